use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rational;

/// Sizes of a local condition and of the local `H⁰` at one place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSizes {
    pub l_size: u64,
    pub h0_size: u64,
}

/// `|H¹_𝓛(K,T)| / |H¹_𝓛*(K,T*)| = |H⁰(K,T)|/|H⁰(K,T*)| · ∏_p |L_p|/|H⁰(K_p,T)|`.
///
/// Places omitted from `locals` are taken to contribute a factor 1.
pub fn wiles_rhs(locals: &[LocalSizes], global_h0_t: u64, global_h0_tstar: u64) -> Result<Rational> {
    if global_h0_tstar == 0 || locals.iter().any(|l| l.h0_size == 0) {
        return Err(Error::ZeroH0);
    }
    let mut acc = Rational::new(global_h0_t as i64, global_h0_tstar as i64);
    for l in locals {
        acc *= Rational::new(l.l_size as i64, l.h0_size as i64);
    }
    Ok(acc)
}
