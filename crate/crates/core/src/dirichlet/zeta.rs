use serde::Serialize;

use super::family::{Exponent, FrobenianFamily, PrimeClass, PrimeClassifier};
use crate::error::{Error, Result};
use crate::local::EulerFactor;
use crate::primes::primes_up_to;

/// Riemann zeta for real `s > 1`, by Euler–Maclaurin summation.
pub fn riemann_zeta(s: f64) -> f64 {
    assert!(s > 1.0, "riemann_zeta needs s > 1");
    // B_2k / (2k)!
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    ];
    let n = 20.0f64;
    let mut sum: f64 = (1..20).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Rising product s(s+1)..(s+2k-2) times N^{-s-2k+1}.
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (k, b) in B.iter().enumerate() {
        sum += b * rising * power;
        let j = 2 * k as i32 + 1;
        rising *= (s + j as f64) * (s + j as f64 + 1.0);
        power /= n * n;
    }
    sum
}

fn factor_at(f: &EulerFactor, y: f64) -> f64 {
    f.coefficients
        .iter()
        .map(|(&k, c)| (*c.numer() as f64 / *c.denom() as f64) * y.powi(k as i32))
        .sum()
}

/// One value of the regularized product at a given truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZetaFactorEstimate {
    pub prime_bound: u64,
    pub value: f64,
}

/// `∏_{p ≤ P} Q_p(p^{-s}) (1 - p^{-as})^b` at each bound in `bounds`, in one
/// pass over the primes. No check on `s` is made.
fn regularized_products(
    family: &FrobenianFamily,
    classifier: &dyn PrimeClassifier,
    s: f64,
    bounds: &[u64],
) -> Result<Vec<ZetaFactorEstimate>> {
    if bounds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DegenerateGrid("prime bounds must increase".into()));
    }
    let Some(&top) = bounds.last() else {
        return Ok(vec![]);
    };
    let ab = family.aq_bq();
    let b = *ab.b.numer() as f64 / *ab.b.denom() as f64;
    let mut log_g = 0.0f64;
    let mut out = Vec::with_capacity(bounds.len());
    let mut next = 0;
    for p in primes_up_to(top) {
        while next < bounds.len() && p > bounds[next] {
            out.push(ZetaFactorEstimate {
                prime_bound: bounds[next],
                value: log_g.exp(),
            });
            next += 1;
        }
        let y = (p as f64).powf(-s);
        let q = match classifier.classify(p) {
            PrimeClass::Regular(i) => factor_at(&family.classes[i].factor, y),
            PrimeClass::Irregular => family.override_at(p).map_or(1.0, |f| factor_at(f, y)),
        };
        if q <= 0.0 {
            return Ok(bounds
                .iter()
                .map(|&prime_bound| ZetaFactorEstimate {
                    prime_bound,
                    value: 0.0,
                })
                .collect());
        }
        log_g += q.ln();
        if let Exponent::Finite(a) = ab.a {
            log_g += b * (-(p as f64).powf(-(a as f64) * s)).ln_1p();
        }
    }
    while next < bounds.len() {
        out.push(ZetaFactorEstimate {
            prime_bound: bounds[next],
            value: log_g.exp(),
        });
        next += 1;
    }
    Ok(out)
}

/// Estimate of `G(s)` in `F(s) = ζ(as)^b G(s)`, truncated at primes `≤ P`.
pub fn zeta_factor_estimate(
    family: &FrobenianFamily,
    classifier: &dyn PrimeClassifier,
    s: f64,
    prime_bound: u64,
) -> Result<f64> {
    Ok(zeta_factor_estimates(family, classifier, s, &[prime_bound])?[0].value)
}

/// [`zeta_factor_estimate`] at several increasing prime bounds.
pub fn zeta_factor_estimates(
    family: &FrobenianFamily,
    classifier: &dyn PrimeClassifier,
    s: f64,
    bounds: &[u64],
) -> Result<Vec<ZetaFactorEstimate>> {
    let pole = family.aq_bq().a.reciprocal();
    let pole = *pole.numer() as f64 / *pole.denom() as f64;
    if s <= pole {
        return Err(Error::LeftOfPole { s, pole });
    }
    regularized_products(family, classifier, s, bounds)
}

/// `G(1/a)`, from the regularized product evaluated at the pole itself.
/// Convergence there is slow; successive bounds show how far it has settled.
pub fn g_at_pole(
    family: &FrobenianFamily,
    classifier: &dyn PrimeClassifier,
    bounds: &[u64],
) -> Result<Vec<ZetaFactorEstimate>> {
    let a = family.aq_bq().a.finite().ok_or_else(|| {
        Error::InvalidFamily("all regular factors are constant; there is no pole".into())
    })?;
    regularized_products(family, classifier, 1.0 / a as f64, bounds)
}

/// Largest gap between consecutive estimates in the second half of a
/// sequence; a shrinking value indicates stabilization.
pub fn tail_spread(estimates: &[ZetaFactorEstimate]) -> f64 {
    let half = estimates.len() / 2;
    estimates[half.saturating_sub(1)..]
        .windows(2)
        .map(|w| (w[1].value - w[0].value).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::family::{FamilyClass, ResidueClassifier};
    use crate::Rational;
    use std::f64::consts::PI;

    fn single(pairs: &[(u32, i64)]) -> FrobenianFamily {
        FrobenianFamily::new(
            vec![FamilyClass {
                label: String::new(),
                factor: EulerFactor::from_pairs(pairs.iter().map(|&(k, c)| (k, Rational::from_integer(c)))),
                weight: Rational::from_integer(1),
            }],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn zeta_values() {
        assert!((riemann_zeta(2.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((riemann_zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-13);
        assert!((riemann_zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-12);
        // Near the pole, ζ(s) - 1/(s-1) → γ.
        let s = 1.0 + 1e-6;
        assert!((riemann_zeta(s) - 1.0 / (s - 1.0) - 0.577_215_664_901_532_9).abs() < 1e-5);
    }

    #[test]
    fn squarefree_regularized() {
        let f = single(&[(0, 1), (1, 1)]);
        let g = zeta_factor_estimate(&f, &ResidueClassifier::single_class(), 2.0, 1_000_000).unwrap();
        assert!((g - 90.0 / PI.powi(4)).abs() < 1e-6);
    }

    #[test]
    fn constant_family_is_one() {
        let f = single(&[(0, 1)]);
        for s in [0.1, 1.0, 3.0] {
            let g = zeta_factor_estimate(&f, &ResidueClassifier::single_class(), s, 1000).unwrap();
            assert_eq!(g, 1.0);
        }
    }

    #[test]
    fn left_of_pole() {
        let f = single(&[(0, 1), (2, 3)]);
        let c = ResidueClassifier::single_class();
        assert!(matches!(
            zeta_factor_estimate(&f, &c, 0.5, 100),
            Err(Error::LeftOfPole { .. })
        ));
        assert!(zeta_factor_estimate(&f, &c, 0.51, 100).is_ok());
    }

    #[test]
    fn pole_value_squarefree() {
        let f = single(&[(0, 1), (1, 1)]);
        let est = g_at_pole(&f, &ResidueClassifier::single_class(), &[10_000, 100_000, 1_000_000]).unwrap();
        let target = 6.0 / (PI * PI);
        assert!((est[2].value - target).abs() < 1e-5);
        assert!(tail_spread(&est) < 1e-4);
    }

    #[test]
    fn cauchy_trend() {
        let f = single(&[(0, 1), (2, 3)]);
        let c = ResidueClassifier::single_class();
        let est = zeta_factor_estimates(&f, &c, 1.0, &[1000, 2000, 4000, 8000, 16000]).unwrap();
        let gaps: Vec<f64> = est.windows(2).map(|w| (w[1].value - w[0].value).abs()).collect();
        assert!(gaps.windows(2).all(|g| g[1] < g[0]));
    }
}
