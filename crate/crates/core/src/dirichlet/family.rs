use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local::{factor_family, EulerFactor, LocalOrdering};
use crate::perm::PermGroup;
use crate::twist::TwistGroup;
use crate::Rational;

/// An exponent that may be infinite (all regular factors constant).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exponent {
    Finite(u32),
    Infinite,
}

impl Exponent {
    pub fn finite(self) -> Option<u32> {
        match self {
            Exponent::Finite(a) => Some(a),
            Exponent::Infinite => None,
        }
    }

    /// `1/a`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> Rational {
        match self {
            Exponent::Finite(a) => Rational::new(1, a as i64),
            Exponent::Infinite => Rational::from_integer(0),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(a) => write!(f, "{a}"),
            Exponent::Infinite => write!(f, "infinity"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(a) => s.serialize_u32(*a),
            Exponent::Infinite => s.serialize_str("infinity"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyClass {
    #[serde(default)]
    pub label: String,
    pub factor: EulerFactor,
    #[serde(with = "crate::rational")]
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrregularOverride {
    pub prime: u64,
    pub factor: EulerFactor,
}

/// Euler factors indexed by Frobenius classes, weighted by class proportion,
/// plus explicit factors at finitely many irregular primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobenianFamily {
    pub classes: Vec<FamilyClass>,
    #[serde(default)]
    pub irregular_overrides: Vec<IrregularOverride>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AqBq {
    pub a: Exponent,
    #[serde(with = "crate::rational")]
    pub b: Rational,
}

impl FrobenianFamily {
    pub fn new(classes: Vec<FamilyClass>, irregular_overrides: Vec<IrregularOverride>) -> Result<Self> {
        let family = FrobenianFamily {
            classes,
            irregular_overrides,
        };
        family.validate()?;
        Ok(family)
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::InvalidFamily("no classes".into()));
        }
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        let mut total = zero;
        for c in &self.classes {
            if c.weight <= zero {
                return Err(Error::InvalidFamily(format!("nonpositive weight {}", c.weight)));
            }
            if c.factor.constant_term() != one {
                return Err(Error::InvalidFamily(format!(
                    "class {:?} has constant term {}",
                    c.label,
                    c.factor.constant_term()
                )));
            }
            if !c.factor.is_nonnegative() {
                return Err(Error::InvalidFamily(format!("class {:?} has a negative coefficient", c.label)));
            }
            total += c.weight;
        }
        if total != one {
            return Err(Error::InvalidFamily(format!("weights sum to {total}")));
        }
        let mut seen = std::collections::HashSet::new();
        for o in &self.irregular_overrides {
            if !seen.insert(o.prime) {
                return Err(Error::InvalidFamily(format!("duplicate override at {}", o.prime)));
            }
        }
        Ok(())
    }

    /// Uniformly weighted classes, one per element of `Γ`, from the local
    /// crossed-homomorphism enumeration of `T`.
    pub fn from_twist(t: &PermGroup, gamma: &TwistGroup, ordering: LocalOrdering) -> Result<Self> {
        let weight = Rational::new(1, gamma.order() as i64);
        let classes = factor_family(t, gamma, ordering)?
            .into_iter()
            .map(|(cls, factor)| FamilyClass {
                label: format!("({}, {})", cls.conjugator, cls.unit),
                factor,
                weight,
            })
            .collect();
        Self::new(classes, vec![])
    }

    /// `(a(Q), b(Q))`: the least nonzero power of `x` over all classes and the
    /// weighted mean of its coefficient. When every factor is constant, `a` is
    /// infinite and `b` is the mean constant term, which is 1.
    pub fn aq_bq(&self) -> AqBq {
        let a = self
            .classes
            .iter()
            .filter_map(|c| c.factor.least_nonzero_exponent())
            .min();
        match a {
            None => AqBq {
                a: Exponent::Infinite,
                b: self.classes.iter().map(|c| c.weight * c.factor.constant_term()).sum(),
            },
            Some(a) => AqBq {
                a: Exponent::Finite(a),
                b: self.classes.iter().map(|c| c.weight * c.factor.coefficient(a)).sum(),
            },
        }
    }

    pub fn override_at(&self, p: u64) -> Option<&EulerFactor> {
        self.irregular_overrides
            .iter()
            .find(|o| o.prime == p)
            .map(|o| &o.factor)
    }
}

/// Where a prime falls in a Frobenian family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeClass {
    Regular(usize),
    Irregular,
}

/// Assigns primes to Frobenius classes.
pub trait PrimeClassifier: Sync {
    fn classify(&self, p: u64) -> PrimeClass;
}

impl<F: Fn(u64) -> PrimeClass + Sync> PrimeClassifier for F {
    fn classify(&self, p: u64) -> PrimeClass {
        self(p)
    }
}

/// Classification over ℚ by the residue of `p` modulo a fixed modulus; primes
/// whose residue is not listed (those dividing the modulus) are irregular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueClassifier {
    pub modulus: u64,
    pub classes: HashMap<u64, usize>,
}

impl ResidueClassifier {
    /// For families built by [`FrobenianFamily::from_twist`] from a twist group
    /// with trivial conjugators: class `i` is the pair with unit `u_i`.
    pub fn for_trivial_pi(gamma: &TwistGroup) -> Result<Self> {
        let e = gamma.exponent();
        let mut classes = HashMap::new();
        for (i, pair) in gamma.pairs().iter().enumerate() {
            if !pair.conjugator.is_identity() {
                return Err(Error::InvalidFamily(
                    "residue classification needs trivial conjugators".into(),
                ));
            }
            classes.insert(pair.unit % e, i);
        }
        let expected = crate::twist::units_mod(e).len();
        if classes.len() != expected {
            return Err(Error::InvalidFamily(format!(
                "twist group covers {} of {expected} residues",
                classes.len()
            )));
        }
        Ok(ResidueClassifier { modulus: e, classes })
    }

    /// Every prime is regular and in class 0.
    pub fn single_class() -> Self {
        ResidueClassifier {
            modulus: 1,
            classes: HashMap::from([(0, 0)]),
        }
    }
}

impl PrimeClassifier for ResidueClassifier {
    fn classify(&self, p: u64) -> PrimeClass {
        if self.modulus > 1 && p.is_multiple_of(self.modulus) {
            return PrimeClass::Irregular;
        }
        match self.classes.get(&(p % self.modulus)) {
            Some(&i) => PrimeClass::Regular(i),
            None => PrimeClass::Irregular,
        }
    }
}
