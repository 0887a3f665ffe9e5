//! Counting invariants for number fields and crossed homomorphisms.
//!
//! The crate computes the exponents `a` and `b` of Malle's prediction and
//! their twisted refinement for abelian normal subgroups, enumerates local
//! crossed homomorphisms over the tame quotient, expands and factors the
//! resulting Frobenian Euler products, evaluates Selmer-group formulas on
//! finite abelian models, and counts abelian extensions of ℚ to check the
//! predicted growth.

pub mod catalog;
pub mod counting;
pub mod dirichlet;
pub mod error;
pub mod invariants;
pub mod local;
pub mod primes;
pub mod perm;
pub mod poset;
pub mod rational;
pub mod selmer;
pub mod twist;
pub mod verify;

pub use error::{Error, Result};

/// Exact rationals used throughout the coefficient arithmetic.
pub type Rational = num_rational::Ratio<i64>;
