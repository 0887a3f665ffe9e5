use serde::Serialize;

use super::family::{FrobenianFamily, PrimeClass, PrimeClassifier};
use crate::error::{Error, Result};
use crate::local::EulerFactor;
use crate::primes::smallest_prime_factors;
use crate::Rational;

/// Default bound on the number of materialized coefficients.
pub const DEFAULT_COEFFICIENT_CAP: usize = 20_000_000;

/// Coefficients `f(1), .., f(N)` of a truncated Euler product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirichletCoefficients {
    pub bound: usize,
    values: Vec<Rational>,
}

impl DirichletCoefficients {
    /// Coefficient of `n^{-s}`, for `1 ≤ n ≤ bound`.
    pub fn get(&self, n: usize) -> Rational {
        self.values[n - 1]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `Σ_{n ≤ x} f(n)`.
    pub fn partial_sum(&self, x: usize) -> Rational {
        self.values[..x.min(self.bound)].iter().sum()
    }

    /// Partial sums at each point of an increasing grid, in one pass.
    pub fn partial_sums(&self, grid: &[usize]) -> Result<Vec<Rational>> {
        let mut out = Vec::with_capacity(grid.len());
        let mut acc = Rational::from_integer(0);
        let mut n = 0;
        for &x in grid {
            if x > self.bound {
                return Err(Error::DegenerateGrid(format!(
                    "grid point {x} beyond coefficient bound {}",
                    self.bound
                )));
            }
            if x < n {
                return Err(Error::DegenerateGrid("grid must be increasing".into()));
            }
            while n < x {
                acc += self.values[n];
                n += 1;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

fn local_factor<'a>(
    family: &'a FrobenianFamily,
    classifier: &dyn PrimeClassifier,
    p: u64,
) -> Option<&'a EulerFactor> {
    match classifier.classify(p) {
        PrimeClass::Regular(i) => Some(&family.classes[i].factor),
        PrimeClass::Irregular => family.override_at(p),
    }
}

/// Exact expansion of `∏_{p ≤ P} Q_p(p^{-s})` up to `n ≤ N`.
///
/// Irregular primes without an override contribute the constant factor 1.
pub fn expand(
    family: &FrobenianFamily,
    classifier: &dyn PrimeClassifier,
    prime_bound: u64,
    coeff_bound: usize,
) -> Result<DirichletCoefficients> {
    expand_with_cap(family, classifier, prime_bound, coeff_bound, DEFAULT_COEFFICIENT_CAP)
}

pub fn expand_with_cap(
    family: &FrobenianFamily,
    classifier: &dyn PrimeClassifier,
    prime_bound: u64,
    coeff_bound: usize,
    cap: usize,
) -> Result<DirichletCoefficients> {
    if coeff_bound > cap {
        return Err(Error::CapExceeded {
            what: "coefficient bound",
            cap,
        });
    }
    if coeff_bound == 0 {
        return Ok(DirichletCoefficients {
            bound: 0,
            values: vec![],
        });
    }
    for c in &family.classes {
        if c.factor.constant_term() != Rational::from_integer(1) {
            return Err(Error::InvalidFamily("regular factor with constant term ≠ 1".into()));
        }
    }
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    // Irregular primes in range whose constant term is not 1 affect every coefficient.
    let irregular_constants: Vec<(u64, Rational)> = family
        .irregular_overrides
        .iter()
        .filter(|o| o.prime <= prime_bound)
        .map(|o| (o.prime, o.factor.constant_term()))
        .filter(|(_, c)| *c != one)
        .collect();

    let spf = smallest_prime_factors(coeff_bound);
    // `core[n]` holds ∏_{p^k ∥ n} c_{p,k}, without the constant-term corrections.
    let mut core = vec![zero; coeff_bound + 1];
    core[1] = one;
    for n in 2..=coeff_bound {
        let p = spf[n] as usize;
        let mut m = n;
        let mut k = 0u32;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        if core[m] == zero || p as u64 > prime_bound {
            continue;
        }
        let c = local_factor(family, classifier, p as u64)
            .map(|f| f.coefficient(k))
            .unwrap_or(zero);
        if c != zero {
            core[n] = core[m] * c;
        }
    }
    let mut values: Vec<Rational> = core.into_iter().skip(1).collect();
    if !irregular_constants.is_empty() {
        for (i, v) in values.iter_mut().enumerate() {
            let n = (i + 1) as u64;
            for &(p, c) in &irregular_constants {
                if !n.is_multiple_of(p) {
                    *v *= c;
                }
            }
        }
    }
    Ok(DirichletCoefficients {
        bound: coeff_bound,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::family::{FamilyClass, IrregularOverride, ResidueClassifier};

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn single(factor: EulerFactor) -> FrobenianFamily {
        FrobenianFamily::new(
            vec![FamilyClass {
                label: String::new(),
                factor,
                weight: q(1),
            }],
            vec![],
        )
        .unwrap()
    }

    fn is_squarefree(n: usize) -> bool {
        (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d * d))
    }

    #[test]
    fn squarefree_indicator() {
        let f = single(EulerFactor::from_pairs([(0, q(1)), (1, q(1))]));
        let c = expand(&f, &ResidueClassifier::single_class(), 1000, 1000).unwrap();
        for n in 1..=1000 {
            assert_eq!(c.get(n), q(is_squarefree(n) as i64), "n = {n}");
        }
    }

    #[test]
    fn constant_family() {
        let c = expand(&single(EulerFactor::one()), &ResidueClassifier::single_class(), 100, 50)
            .unwrap();
        assert_eq!(c.get(1), q(1));
        assert!((2..=50).all(|n| c.get(n) == q(0)));
    }

    #[test]
    fn single_prime_square() {
        let f = single(EulerFactor::from_pairs([(0, q(1)), (2, q(3))]));
        let c = expand(&f, &ResidueClassifier::single_class(), 100, 100).unwrap();
        assert_eq!(c.get(9), q(3));
        assert_eq!(c.get(3), q(0));
        assert_eq!(c.get(36), q(9));
    }

    #[test]
    fn prime_bound_truncates() {
        let f = single(EulerFactor::from_pairs([(0, q(1)), (1, q(1))]));
        let c = expand(&f, &ResidueClassifier::single_class(), 3, 30).unwrap();
        assert_eq!(c.get(6), q(1));
        assert_eq!(c.get(5), q(0));
        assert_eq!(c.get(10), q(0));
    }

    #[test]
    fn irregular_constant_terms() {
        let mut f = single(EulerFactor::from_pairs([(0, q(1)), (1, q(1))]));
        f.irregular_overrides.push(IrregularOverride {
            prime: 2,
            factor: EulerFactor::from_pairs([(0, Rational::new(1, 2)), (3, q(2))]),
        });
        let odd = |p: u64| {
            if p == 2 {
                crate::dirichlet::PrimeClass::Irregular
            } else {
                crate::dirichlet::PrimeClass::Regular(0)
            }
        };
        let c = expand(&f, &odd, 100, 100).unwrap();
        assert_eq!(c.get(1), Rational::new(1, 2));
        assert_eq!(c.get(2), q(0));
        assert_eq!(c.get(8), q(2));
        assert_eq!(c.get(24), q(2));
        assert_eq!(c.get(15), Rational::new(1, 2));
    }

    #[test]
    fn cap_enforced() {
        let f = single(EulerFactor::one());
        let err = expand_with_cap(&f, &ResidueClassifier::single_class(), 10, 1000, 100);
        assert!(matches!(err, Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn partial_sums_on_grid() {
        let f = single(EulerFactor::from_pairs([(0, q(1)), (1, q(1))]));
        let c = expand(&f, &ResidueClassifier::single_class(), 100, 100).unwrap();
        let sums = c.partial_sums(&[1, 10, 100]).unwrap();
        assert_eq!(sums, vec![q(1), q(7), q(61)]);
        assert!(c.partial_sums(&[101]).is_err());
    }
}
