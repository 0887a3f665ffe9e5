//! Cross-module verification suites over the catalog.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::catalog;
use crate::counting::{
    count, count_brute_force, enumerate_by_conductor, log_grid, regular_permutation, CountOptions, CountOrdering,
    UnitGroup,
};
use crate::dirichlet::FrobenianFamily;
use crate::error::{Error, Result};
use crate::invariants::{a_invariant, b_twisted, burnside_b, minimal_index_set};
use crate::local::LocalOrdering;
use crate::poset::{mobius, mobius_recursive};
use crate::primes::factorize;
use crate::selmer::{cyclic_subgroups, AbelianGroup, FiniteAbelianGroup, DEFAULT_GROUP_CAP};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Mblocal,
    Mobius,
    Burnside,
    Sieve,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Mblocal, Suite::Mobius, Suite::Burnside, Suite::Sieve];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mblocal" => Ok(Suite::Mblocal),
            "mobius" => Ok(Suite::Mobius),
            "burnside" => Ok(Suite::Burnside),
            "sieve" => Ok(Suite::Sieve),
            _ => Err(Error::Parse {
                what: "suite",
                detail: format!("expected mblocal, mobius, burnside or sieve, got {s:?}"),
            }),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Mblocal => "mblocal",
            Suite::Mobius => "mobius",
            Suite::Burnside => "burnside",
            Suite::Sieve => "sieve",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseOutcome {
    pub case: String,
    pub pass: bool,
    /// Both sides of the comparison; empty on a pass unless verbose.
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub cases: Vec<CaseOutcome>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseOutcome> {
        self.cases.iter().filter(|c| !c.pass)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Case names must contain this substring.
    pub filter: Option<String>,
    /// Largest cyclic group order for the Möbius suite.
    pub mobius_max_order: u64,
    /// Largest ordering value for the sieve suite.
    pub sieve_bound: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            filter: None,
            mobius_max_order: 60,
            sieve_bound: 10_000,
        }
    }
}

pub fn run(suite: Suite, options: &VerifyOptions) -> Result<VerifyReport> {
    let keep = |name: &str| options.filter.as_deref().is_none_or(|f| name.contains(f));
    let cases = match suite {
        Suite::Mblocal => catalog_cases(&keep, mblocal_case)?,
        Suite::Burnside => catalog_cases(&keep, burnside_case)?,
        Suite::Mobius => (1..=options.mobius_max_order)
            .map(|n| (format!("C{n}"), n))
            .filter(|(name, _)| keep(name))
            .map(|(name, n)| mobius_case(name, n))
            .collect::<Result<_>>()?,
        Suite::Sieve => sieve_groups()
            .into_iter()
            .flat_map(|inv| [CountOrdering::Disc, CountOrdering::Ram].map(|o| (inv.clone(), o)))
            .map(|(inv, o)| (format!("{inv:?}/{o}"), inv, o))
            .filter(|(name, _, _)| keep(name))
            .map(|(name, inv, o)| sieve_case(name, &inv, o, options.sieve_bound))
            .collect::<Result<_>>()?,
    };
    let mut warnings = Vec::new();
    if cases.is_empty() {
        warnings.push(format!(
            "filter {:?} selected no cases; vacuous pass",
            options.filter.as_deref().unwrap_or("")
        ));
    }
    Ok(VerifyReport {
        suite,
        cases,
        warnings,
    })
}

fn catalog_cases(
    keep: &dyn Fn(&str) -> bool,
    check: fn(&catalog::Case) -> Result<(bool, String)>,
) -> Result<Vec<CaseOutcome>> {
    catalog::cases()?
        .into_iter()
        .map(|c| (format!("{}[{}]/{}", c.group, c.normal, c.preset), c))
        .filter(|(name, _)| keep(name))
        .map(|(name, c)| {
            let (pass, detail) = check(&c)?;
            Ok(CaseOutcome {
                case: name,
                pass,
                detail,
            })
        })
        .collect()
}

/// Local Euler-factor path against the group-theoretic path.
pub fn mblocal_case(c: &catalog::Case) -> Result<(bool, String)> {
    let family = FrobenianFamily::from_twist(&c.t, &c.gamma, LocalOrdering::DiscPi)?;
    let ab = family.aq_bq();
    let a = a_invariant(&c.t)?;
    let b = b_twisted(&c.t, &c.gamma)?.b;
    let burnside = burnside_b(&c.t, &c.gamma)?;
    let pass = ab.a.finite() == Some(a as u32)
        && ab.b == Rational::from_integer(b as i64)
        && burnside == Rational::from_integer(b as i64);
    Ok((
        pass,
        format!("aq_bq = ({}, {}); invariants = ({a}, {b}); burnside = {burnside}", ab.a, ab.b),
    ))
}

/// Orbit count on `A(T)` against the average fixed-point count.
pub fn burnside_case(c: &catalog::Case) -> Result<(bool, String)> {
    let set = minimal_index_set(&c.t)?;
    let orbits = c.gamma.orbits(&set)?.len();
    let average = c.gamma.burnside_average(&set);
    Ok((
        average == Rational::from_integer(orbits as i64),
        format!("orbits = {orbits}; average fixed points = {average}"),
    ))
}

fn mobius_case(name: String, n: u64) -> Result<CaseOutcome> {
    let g = FiniteAbelianGroup::cyclic(n)?;
    let nodes = cyclic_subgroups(&g, DEFAULT_GROUP_CAP)?;
    let subs: Vec<_> = nodes.iter().map(|c| c.subgroup(&g)).collect();
    let le = |i: usize, j: usize| subs[i].is_subgroup_of(&subs[j]);
    let mut mismatches = Vec::new();
    let mut pairs = 0;
    for i in 0..nodes.len() {
        for j in 0..nodes.len() {
            if !le(i, j) {
                continue;
            }
            pairs += 1;
            let closed = mobius(nodes[j].order / nodes[i].order);
            let recursive = mobius_recursive(nodes.len(), le, i, j);
            if closed != recursive {
                mismatches.push(format!(
                    "|λ'| = {}, |λ| = {}: closed {closed}, recursive {recursive}",
                    nodes[i].order, nodes[j].order
                ));
            }
        }
    }
    let pass = mismatches.is_empty();
    let detail = if pass {
        format!("{pairs} pairs")
    } else {
        mismatches.join("; ")
    };
    Ok(CaseOutcome {
        case: name,
        pass,
        detail,
    })
}

fn sieve_groups() -> Vec<Vec<u64>> {
    vec![vec![2], vec![3], vec![4], vec![2, 2], vec![3, 3]]
}

/// Möbius-sieved surjection counts against image-checked enumeration at every
/// integer `X ≤ bound`.
pub fn sieve_case(name: String, invariants: &[u64], ordering: CountOrdering, bound: u64) -> Result<CaseOutcome> {
    let t = FiniteAbelianGroup::new(invariants.to_vec())?;
    let grid: Vec<u64> = (1..=bound).collect();
    let options = CountOptions {
        surjective: true,
        fields: false,
    };
    let fast = count(&t, ordering, &grid, options)?.counts;
    let brute = count_brute_force(&t, ordering, &grid, true)?;
    let first = grid.iter().zip(fast.iter().zip(&brute)).find(|(_, (a, b))| a != b);
    let (pass, detail) = match first {
        None => (true, format!("N({bound}) = {}", fast.last().copied().unwrap_or(0))),
        Some((x, (a, b))) => (false, format!("X = {x}: sieve {a}, brute force {b}")),
    };
    Ok(CaseOutcome {
        case: name,
        pass,
        detail,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TameCheck {
    pub homs: usize,
    pub places: usize,
    pub mismatches: Vec<String>,
}

/// For every map of conductor `≤ max_modulus` and every prime `p ∤ |T|`
/// exactly dividing the conductor, compares the character-sum exponent of `p`
/// in the discriminant with `ind` of the inertia image in the regular
/// representation.
pub fn tame_valuation_check(t: &FiniteAbelianGroup, max_modulus: u64) -> Result<TameCheck> {
    let order = t.order() as u64;
    let chars = crate::counting::Characters::new(t);
    let mut out = TameCheck {
        homs: 0,
        places: 0,
        mismatches: Vec::new(),
    };
    for e in enumerate_by_conductor(t, max_modulus) {
        out.homs += 1;
        let m = e.hom.modulus;
        let units = UnitGroup::new(m)?;
        let exps = e.hom.discriminant_exponents(&units, t, &chars);
        for (p, k) in factorize(m) {
            if k != 1 || order.is_multiple_of(p) {
                continue;
            }
            let gen = units
                .generators()
                .into_iter()
                .position(|g| g % p != 1)
                .ok_or_else(|| Error::InvalidHom(format!("no generator at {p} mod {m}")))?;
            let inertia = e.hom.images[gen];
            let local = LocalOrdering::DiscPi.weight(&regular_permutation(t, inertia));
            let counted = exps.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, v)| v);
            out.places += 1;
            if local != counted {
                out.mismatches.push(format!("m = {m}, p = {p}: counting {counted}, ind {local}"));
            }
        }
    }
    Ok(out)
}

/// Log-spaced grid helper shared by the fit checks.
pub fn decade_grid(top_decade: u32, decades: u32, per_decade: u32) -> Result<Vec<u64>> {
    if decades > top_decade {
        return Err(Error::DegenerateGrid(format!("{decades} decades below 10^{top_decade}")));
    }
    log_grid(10u64.pow(top_decade - decades), 10u64.pow(top_decade), per_decade)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_settings() {
        let options = VerifyOptions {
            filter: None,
            mobius_max_order: 24,
            sieve_bound: 500,
        };
        for suite in Suite::ALL {
            let report = run(suite, &options).unwrap();
            assert!(!report.cases.is_empty());
            assert!(report.passed(), "{suite}: {:?}", report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn empty_filter_is_vacuous() {
        let options = VerifyOptions {
            filter: Some("no such case".into()),
            ..VerifyOptions::default()
        };
        let report = run(Suite::Mblocal, &options).unwrap();
        assert!(report.cases.is_empty());
        assert!(report.passed());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn filter_selects_group() {
        let options = VerifyOptions {
            filter: Some("kluners".into()),
            ..VerifyOptions::default()
        };
        let report = run(Suite::Mblocal, &options).unwrap();
        assert!(report.cases.iter().all(|c| c.case.starts_with("kluners")));
        assert!(report.cases.iter().any(|c| c.case.ends_with("kluners-split")));
    }

    #[test]
    fn tame_small() {
        let t = FiniteAbelianGroup::new(vec![3]).unwrap();
        let r = tame_valuation_check(&t, 200).unwrap();
        assert!(r.places > 0);
        assert!(r.mismatches.is_empty(), "{:?}", r.mismatches);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
