//! Permutations, materialized permutation groups, and the index function.

mod group;
mod permutation;

pub use group::{GroupSpec, PermGroup, DEFAULT_CLOSURE_CAP, SUBGROUP_SCAN_CAP};
pub use permutation::Permutation;
