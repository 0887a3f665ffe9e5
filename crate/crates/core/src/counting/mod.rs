//! Counting homomorphisms from the absolute Galois group of ℚ to a finite
//! abelian group, parametrized by primitive Dirichlet characters and
//! ordered by discriminant or by the product of ramified primes.

mod abelian;
mod count;
mod fit;
mod units;

pub use abelian::{all_subgroups, automorphism_count, regular_permutation, regular_representation};
pub use count::{
    count, count_brute_force, count_coefficients, enumerate_by_conductor, local_counts, log_grid,
    predicted_exponents, CountOptions, CountOrdering, CountSeries, EnumeratedHom, LocalCounts,
    PredictedExponents, DISC_BOUND_CAP, RAM_BOUND_CAP,
};
pub use fit::{fit_exponents, ExponentFit, MIN_FIT_DECADES, MIN_FIT_POINTS};
pub use units::{
    all_homs, homs_with_conductor, primitive_homs, Characters, UnitGroup, UnitGroupHom, DEFAULT_MODULUS_CAP,
};
