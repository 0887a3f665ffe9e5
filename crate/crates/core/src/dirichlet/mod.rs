//! Frobenian Euler products: leading exponents, regularization against
//! zeta powers, exact truncated expansion and Tauberian main terms.

mod expand;
mod family;
mod tauber;
mod zeta;

pub use expand::{expand, expand_with_cap, DirichletCoefficients, DEFAULT_COEFFICIENT_CAP};
pub use family::{
    AqBq, Exponent, FamilyClass, FrobenianFamily, IrregularOverride, PrimeClass, PrimeClassifier,
    ResidueClassifier,
};
pub use tauber::{delange_predict, partial_sum_compare, ComparisonRow, ComparisonTable, DelangePrediction};
pub use zeta::{
    g_at_pole, riemann_zeta, tail_spread, zeta_factor_estimate, zeta_factor_estimates, ZetaFactorEstimate,
};
