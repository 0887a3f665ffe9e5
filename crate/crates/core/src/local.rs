//! Crossed homomorphisms on the tame quotient `G_m = ⟨τ, Fr : Fr τ Fr⁻¹ = τ^m⟩`
//! with values in an abelian `T`, and the Euler factors built from them.
//!
//! At a regular place `τ` acts trivially on `T` and `Fr` acts by conjugation by
//! the class conjugator `g`. A cocycle is fixed by the pair `(f(τ), f(Fr))`,
//! subject to `g f(τ) g⁻¹ = f(τ)^m`; `f(Fr)` is unconstrained.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation};
use crate::twist::ActionPair;
use crate::Rational;

/// Frobenius data of a place: `π(Fr)`, the norm modulo `e`, and whether `π`
/// ramifies there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalClass {
    pub conjugator: Permutation,
    pub unit: u64,
    #[serde(default)]
    pub pi_ramified: bool,
}

impl LocalClass {
    pub fn regular(conjugator: Permutation, unit: u64) -> Self {
        LocalClass {
            conjugator,
            unit,
            pi_ramified: false,
        }
    }

    pub fn from_pair(pair: &ActionPair) -> Self {
        Self::regular(pair.conjugator.clone(), pair.unit)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cocycle {
    pub tau_image: Permutation,
    pub fr_image: Permutation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalOrdering {
    /// `ν_p(disc_π(f)) = ind(f(τ))`.
    DiscPi,
    /// `1` when `f(τ) ≠ 1`, the product-of-ramified-places ordering.
    RamPi,
}

impl LocalOrdering {
    pub fn weight(self, tau_image: &Permutation) -> u32 {
        match self {
            LocalOrdering::DiscPi => tau_image.ind() as u32,
            LocalOrdering::RamPi => u32::from(!tau_image.is_identity()),
        }
    }
}

/// Polynomial in `x = N(p)^{-s}` with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerFactor {
    #[serde(with = "crate::rational::coefficient_map")]
    pub coefficients: BTreeMap<u32, Rational>,
}

impl EulerFactor {
    pub fn one() -> Self {
        Self::from_pairs([(0, Rational::from_integer(1))])
    }

    /// Builds a factor, dropping zero coefficients.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, Rational)>) -> Self {
        let mut coefficients = BTreeMap::new();
        for (k, v) in pairs {
            *coefficients.entry(k).or_insert_with(|| Rational::from_integer(0)) += v;
        }
        coefficients.retain(|_, v| *v != Rational::from_integer(0));
        EulerFactor { coefficients }
    }

    pub fn coefficient(&self, k: u32) -> Rational {
        self.coefficients
            .get(&k)
            .copied()
            .unwrap_or_else(|| Rational::from_integer(0))
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(0)
    }

    /// Least exponent with a nonzero coefficient, constant term excluded.
    pub fn least_nonzero_exponent(&self) -> Option<u32> {
        self.coefficients.keys().copied().find(|&k| k > 0)
    }

    pub fn degree(&self) -> u32 {
        self.coefficients.keys().copied().next_back().unwrap_or(0)
    }

    pub fn mass(&self) -> Rational {
        self.coefficients.values().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coefficients.values().all(|v| *v >= Rational::from_integer(0))
    }

    /// Evaluates at a real `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|(&k, v)| (*v.numer() as f64 / *v.denom() as f64) * x.powi(k as i32))
            .sum()
    }
}

fn validate(t: &PermGroup, cls: &LocalClass) -> Result<()> {
    if cls.pi_ramified {
        return Err(Error::IrregularClass);
    }
    if !t.is_abelian() {
        return Err(Error::NotAbelian);
    }
    if cls.conjugator.degree() != t.degree() {
        return Err(Error::DegreeMismatch {
            expected: t.degree(),
            got: cls.conjugator.degree(),
        });
    }
    if !t.is_normalized_by(&cls.conjugator) {
        return Err(Error::NotNormalizing(cls.conjugator.to_string()));
    }
    let e = t.exponent();
    if e > 1 && num_integer::gcd(cls.unit, e) != 1 {
        return Err(Error::UnitNotCoprime(cls.unit, e));
    }
    Ok(())
}

/// Inertia images allowed by the relation: `g t g⁻¹ = t^m`.
fn admissible_tau_images(t: &PermGroup, cls: &LocalClass) -> Vec<Permutation> {
    t.elements()
        .iter()
        .filter(|x| x.conjugate_by(&cls.conjugator) == x.pow(cls.unit as i64))
        .cloned()
        .collect()
}

/// All crossed homomorphisms `G_m → T(π)` at a regular class, `T` abelian.
pub fn z1_enumerate(t: &PermGroup, cls: &LocalClass) -> Result<Vec<Cocycle>> {
    validate(t, cls)?;
    let taus = admissible_tau_images(t, cls);
    let mut out = Vec::with_capacity(taus.len() * t.order());
    for tau in &taus {
        for y in t.elements() {
            out.push(Cocycle {
                tau_image: tau.clone(),
                fr_image: y.clone(),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologySizes {
    pub z1: u64,
    pub b1: u64,
    pub h1: u64,
    pub h0: u64,
    pub z1_ur: u64,
    pub h1_ur: u64,
}

/// Sizes of `Z¹`, `B¹`, `H¹`, `H⁰` and the unramified parts at a regular class.
///
/// `B¹` is materialized as `{(1, g s g⁻¹ s⁻¹)}` and checked against `|T|/|H⁰|`.
pub fn cohomology_sizes(t: &PermGroup, cls: &LocalClass) -> Result<CohomologySizes> {
    validate(t, cls)?;
    let order = t.order() as u64;
    let g = &cls.conjugator;
    let h0 = t.elements().iter().filter(|x| x.conjugate_by(g) == **x).count() as u64;
    let coboundaries: HashSet<Permutation> = t
        .elements()
        .iter()
        .map(|s| s.conjugate_by(g).compose(&s.inverse()))
        .collect();
    let b1 = coboundaries.len() as u64;
    if b1 * h0 != order {
        return Err(Error::CohomologyDefect(format!(
            "|B¹| = {b1} but |T|/|H⁰| = {order}/{h0}"
        )));
    }
    let z1 = admissible_tau_images(t, cls).len() as u64 * order;
    if !z1.is_multiple_of(b1) {
        return Err(Error::CohomologyDefect(format!("|B¹| = {b1} does not divide |Z¹| = {z1}")));
    }
    let z1_ur = order;
    Ok(CohomologySizes {
        z1,
        b1,
        h1: z1 / b1,
        h0,
        z1_ur,
        h1_ur: z1_ur / b1,
    })
}

/// `(1/|T|) Σ_{f ∈ Z¹} x^{w(f(τ))}` at a regular class.
pub fn euler_factor(t: &PermGroup, cls: &LocalClass, ordering: LocalOrdering) -> Result<EulerFactor> {
    let cocycles = z1_enumerate(t, cls)?;
    let mut counts: BTreeMap<u32, i64> = BTreeMap::new();
    for f in &cocycles {
        *counts.entry(ordering.weight(&f.tau_image)).or_insert(0) += 1;
    }
    let order = t.order() as i64;
    let factor = EulerFactor::from_pairs(counts.into_iter().map(|(k, c)| (k, Rational::new(c, order))));
    debug_assert_eq!(factor.constant_term(), Rational::from_integer(1));
    Ok(factor)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscCaps {
    pub lower_exponent: u32,
    pub upper_exponent: u32,
}

/// Bounds for an irregular place from the supplied attainable valuations.
pub fn disc_caps(valuations: &[u32]) -> Result<DiscCaps> {
    let lower_exponent = *valuations.iter().min().ok_or(Error::EmptyValuations)?;
    let upper_exponent = *valuations.iter().max().ok_or(Error::EmptyValuations)?;
    Ok(DiscCaps {
        lower_exponent,
        upper_exponent,
    })
}

/// One Euler factor per element of the twist group, each paired with its class.
pub fn factor_family(
    t: &PermGroup,
    gamma: &crate::twist::TwistGroup,
    ordering: LocalOrdering,
) -> Result<Vec<(LocalClass, EulerFactor)>> {
    gamma
        .pairs()
        .iter()
        .map(|pair| {
            let cls = LocalClass::from_pair(pair);
            let factor = euler_factor(t, &cls, ordering)?;
            Ok((cls, factor))
        })
        .collect()
}
