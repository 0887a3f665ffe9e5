//! Finite abelian models for Selmer-group counting: cyclic-subgroup posets,
//! perfect pairings and annihilators, the Wiles ratio, and the coefficients
//! and exponents of Euler products cut out by local conditions.

mod group;
mod model;
mod pairing;
mod wiles;

pub use group::{
    cyclic_subgroups, mobius_nodes, AbelianGroup, CyclicNode, FiniteAbelianGroup, Subgroup, TableGroup,
    DEFAULT_GROUP_CAP,
};
pub use model::{
    restricted_annihilator, AbInv, CoefficientEntry, ConditionClass, IrregularCondition, LocalCohomologyModel,
    LocalConditionFamily, SyntheticConditions, SyntheticLocalData, SyntheticReport, ValuationRule, MODEL_ORDER_CAP,
};
pub use pairing::Pairing;
pub use wiles::{wiles_rhs, LocalSizes};
