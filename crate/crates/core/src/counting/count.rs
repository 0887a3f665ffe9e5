use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::abelian::{all_subgroups, automorphism_count, regular_representation};
use super::units::{all_homs, primitive_homs, Characters, UnitGroup, UnitGroupHom};
use crate::error::{Error, Result};
use crate::primes::{factorize, primes_up_to};
use crate::selmer::{AbelianGroup, FiniteAbelianGroup, Subgroup};
use crate::twist::TwistGroup;
use crate::Rational;

/// Largest ordering bound accepted, per ordering.
pub const DISC_BOUND_CAP: u64 = 1_000_000_000_000_000;
pub const RAM_BOUND_CAP: u64 = 10_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountOrdering {
    /// Discriminant of the regular representation.
    Disc,
    /// Product of ramified primes.
    Ram,
}

impl std::str::FromStr for CountOrdering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disc" => Ok(CountOrdering::Disc),
            "ram" => Ok(CountOrdering::Ram),
            _ => Err(Error::Parse {
                what: "ordering",
                detail: format!("expected disc or ram, got {s:?}"),
            }),
        }
    }
}

impl std::fmt::Display for CountOrdering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CountOrdering::Disc => "disc",
            CountOrdering::Ram => "ram",
        })
    }
}

/// Local factor at one prime: `exponent ↦ number of local maps`.
pub type LocalCounts = BTreeMap<u32, u64>;

/// Smallest `k` such that every map `ℤ_p^× → T` factors through `(ℤ/p^k)^×`.
fn wild_level(p: u64, exponent: u64) -> u32 {
    let v = factorize(exponent).into_iter().find(|&(q, _)| q == p).map_or(0, |(_, k)| k);
    if p == 2 {
        v + 2
    } else {
        v + 1
    }
}

/// Local counts for maps `ℤ_p^× → H ⊆ T`, with exponents measured through
/// the characters of `T`.
pub fn local_counts(t: &FiniteAbelianGroup, h: &Subgroup, p: u64, ordering: CountOrdering) -> LocalCounts {
    let mut out = LocalCounts::new();
    let chars = Characters::new(t);
    if (t.order() as u64).is_multiple_of(p) {
        let units = UnitGroup::new(p.pow(wild_level(p, t.exponent()))).expect("positive modulus");
        for hom in all_homs(&units, t, Some(h)) {
            let e = match ordering {
                CountOrdering::Disc => hom.discriminant_exponents(&units, t, &chars)[0].1,
                CountOrdering::Ram => u32::from(!hom.is_trivial(t)),
            };
            *out.entry(e).or_insert(0) += 1;
        }
    } else {
        for &x in h.elements() {
            if (p - 1).is_multiple_of(t.element_order(x)) {
                let e = match ordering {
                    CountOrdering::Disc => chars.nontrivial_count(x) as u32,
                    CountOrdering::Ram => u32::from(x != t.zero()),
                };
                *out.entry(e).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Nontrivial part of a local factor, as `(p^e, count)` pairs sorted by size.
type Steps = Vec<(u64, u64)>;

struct Factors {
    primes: Vec<u64>,
    steps: Vec<Steps>,
    /// From this index on every prime is tame with smallest step ≥ `p^tame_min`.
    tame_start: usize,
    tame_min: u32,
}

fn build_factors(t: &FiniteAbelianGroup, h: &Subgroup, ordering: CountOrdering, bound: u64) -> Factors {
    let order = t.order() as u64;
    let ell = factorize(h.order() as u64).first().map(|&(q, _)| q);
    let tame_min = match (ordering, ell) {
        (_, None) => u32::MAX,
        (CountOrdering::Ram, _) => 1,
        (CountOrdering::Disc, Some(l)) => (order - order / l) as u32,
    };
    let largest_wild = factorize(order).last().map_or(1, |&(p, _)| p);
    let prime_limit = if tame_min == u32::MAX {
        // Trivial H: only wild primes could contribute, and they cannot.
        1
    } else {
        let r = ((bound - 1) as f64).powf(1.0 / tame_min as f64).floor() as u64 + 1;
        r.max(largest_wild)
    };
    // Classes of tame local factors by gcd(p - 1, exp T).
    let e = t.exponent();
    let mut tame_cache: BTreeMap<u64, Steps> = BTreeMap::new();
    let mut primes = Vec::new();
    let mut steps = Vec::new();
    for p in primes_up_to(prime_limit) {
        let s = if order.is_multiple_of(p) {
            to_steps(p, &local_counts(t, h, p, ordering), bound)
        } else {
            let g = num_integer::gcd(p - 1, e);
            let rep = tame_cache.entry(g).or_insert_with(|| {
                let counts = local_counts(t, h, p, ordering);
                counts.into_iter().filter(|&(k, _)| k > 0).map(|(k, c)| (k as u64, c)).collect()
            });
            rep.iter()
                .filter_map(|&(k, c)| p.checked_pow(k as u32).filter(|&q| q < bound).map(|q| (q, c)))
                .collect()
        };
        if !s.is_empty() {
            primes.push(p);
            steps.push(s);
        }
    }
    let tame_start = primes.iter().position(|&p| !order.is_multiple_of(p) && p > largest_wild).unwrap_or(primes.len());
    Factors {
        primes,
        steps,
        tame_start,
        tame_min,
    }
}

fn to_steps(p: u64, counts: &LocalCounts, bound: u64) -> Steps {
    counts
        .iter()
        .filter(|&(&k, _)| k > 0)
        .filter_map(|(&k, &c)| p.checked_pow(k).filter(|&q| q < bound).map(|q| (q, c)))
        .collect()
}

/// Accumulates `mult` at every value `v < bound` reachable from `n` using
/// primes from index `start` on.
fn dfs(f: &Factors, start: usize, n: u64, mult: u128, bound: u64, visit: &mut impl FnMut(u64, u128)) {
    for i in start..f.primes.len() {
        let p = f.primes[i];
        if i >= f.tame_start {
            let min_step = p.checked_pow(f.tame_min);
            match min_step.and_then(|q| n.checked_mul(q)) {
                Some(m) if m < bound => {}
                _ => break,
            }
        }
        for &(q, c) in &f.steps[i] {
            if let Some(m) = n.checked_mul(q).filter(|&m| m < bound) {
                let mc = mult * c as u128;
                visit(m, mc);
                dfs(f, i + 1, m, mc, bound, visit);
            }
        }
    }
}

/// `N(X_i)` for every grid point: the weighted number of values `< X_i`.
fn histogram(f: &Factors, grid: &[u64]) -> Vec<u128> {
    let bound = *grid.last().expect("nonempty grid");
    let bucket = |v: u64| grid.partition_point(|&x| x <= v);
    let shard = |i: usize| {
        let mut hist = vec![0u128; grid.len() + 1];
        for &(q, c) in &f.steps[i] {
            if q < bound {
                hist[bucket(q)] += c as u128;
                dfs(f, i + 1, q, c as u128, bound, &mut |v, m| hist[bucket(v)] += m);
            }
        }
        hist
    };
    let mut hist = (0..f.primes.len())
        .into_par_iter()
        .map(shard)
        .reduce(|| vec![0u128; grid.len() + 1], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        });
    // The trivial map has value 1.
    if bound > 1 {
        hist[bucket(1)] += 1;
    }
    let mut acc = 0u128;
    hist.truncate(grid.len());
    hist.into_iter()
        .map(|h| {
            acc += h;
            acc
        })
        .collect()
}

/// Predicted exponents for counting maps to `T` over ℚ with trivial action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PredictedExponents {
    pub a: u32,
    #[serde(with = "crate::rational")]
    pub b: Rational,
}

pub fn predicted_exponents(t: &FiniteAbelianGroup, ordering: CountOrdering) -> Result<PredictedExponents> {
    let reg = regular_representation(t)?;
    let gamma = TwistGroup::trivial_pi_over_q(reg.degree(), t.exponent())?;
    match ordering {
        CountOrdering::Disc => {
            let a = crate::invariants::a_invariant(&reg)? as u32;
            let b = crate::invariants::b_twisted(&reg, &gamma)?.b as i64;
            Ok(PredictedExponents {
                a,
                b: Rational::from_integer(b),
            })
        }
        CountOrdering::Ram => {
            let nonidentity: Vec<_> = reg.elements().iter().filter(|g| !g.is_identity()).cloned().collect();
            let b = gamma.orbits(&nonidentity)?.len() as i64;
            Ok(PredictedExponents {
                a: 1,
                b: Rational::from_integer(b),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountOptions {
    pub surjective: bool,
    /// Divide surjection counts by `|Aut(T)|`; requires `surjective`.
    pub fields: bool,
}

/// Counts of maps `G_ℚ → T` with ordering value `< X` for each grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountSeries {
    pub target: Vec<u64>,
    pub ordering: CountOrdering,
    pub surjective: bool,
    pub fields: bool,
    pub grid: Vec<u64>,
    pub counts: Vec<u128>,
    pub predicted: PredictedExponents,
}

fn validate_grid(grid: &[u64], ordering: CountOrdering) -> Result<()> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DegenerateGrid("grid must be nonempty, positive and increasing".into()));
    }
    let cap = match ordering {
        CountOrdering::Disc => DISC_BOUND_CAP,
        CountOrdering::Ram => RAM_BOUND_CAP,
    };
    if *grid.last().expect("nonempty") > cap {
        return Err(Error::CapExceeded {
            what: "ordering bound",
            cap: cap as usize,
        });
    }
    Ok(())
}

/// Counts into each subgroup `H` (values always measured through `T`).
fn counts_into(t: &FiniteAbelianGroup, h: &Subgroup, ordering: CountOrdering, grid: &[u64]) -> Vec<u128> {
    let f = build_factors(t, h, ordering, *grid.last().expect("nonempty"));
    histogram(&f, grid)
}

pub fn count(t: &FiniteAbelianGroup, ordering: CountOrdering, grid: &[u64], options: CountOptions) -> Result<CountSeries> {
    validate_grid(grid, ordering)?;
    if options.fields && !options.surjective {
        return Err(Error::InvalidHom("field counts need surjective counting".into()));
    }
    let whole = Subgroup::whole(t);
    let counts = if options.surjective {
        let subs = all_subgroups(t);
        let top = subs.iter().position(|s| *s == whole).expect("whole group listed");
        let mu = crate::poset::mobius_to_top(subs.len(), |i, j| subs[i].is_subgroup_of(&subs[j]), top);
        let mut acc = vec![0i128; grid.len()];
        for (s, &m) in subs.iter().zip(&mu) {
            if m != 0 {
                for (a, c) in acc.iter_mut().zip(counts_into(t, s, ordering, grid)) {
                    *a += m as i128 * c as i128;
                }
            }
        }
        let aut = if options.fields { automorphism_count(t) as i128 } else { 1 };
        acc.into_iter()
            .map(|a| {
                debug_assert!(a >= 0 && a % aut == 0);
                (a / aut) as u128
            })
            .collect()
    } else {
        counts_into(t, &whole, ordering, grid)
    };
    Ok(CountSeries {
        target: t.invariant_factors().to_vec(),
        ordering,
        surjective: options.surjective,
        fields: options.fields,
        grid: grid.to_vec(),
        counts,
        predicted: predicted_exponents(t, ordering)?,
    })
}

/// Exact Dirichlet coefficients `#{maps with ordering value n}` for `n ≤ N`.
pub fn count_coefficients(t: &FiniteAbelianGroup, ordering: CountOrdering, n: usize) -> Vec<u128> {
    let bound = n as u64 + 1;
    let f = build_factors(t, &Subgroup::whole(t), ordering, bound);
    let mut out = vec![0u128; n + 1];
    if n >= 1 {
        out[1] = 1;
    }
    dfs(&f, 0, 1, 1, bound, &mut |v, m| out[v as usize] += m);
    out
}

/// One enumerated map with its conductor and ordering values.
#[derive(Clone, Debug)]
pub struct EnumeratedHom {
    pub hom: UnitGroupHom,
    pub disc: u128,
    pub ram: u64,
    pub surjective: bool,
}

/// Every map `G_ℚ → T` of conductor `≤ max_conductor`, by explicit
/// enumeration of primitive homomorphisms `(ℤ/m)^× → T`.
pub fn enumerate_by_conductor(t: &FiniteAbelianGroup, max_conductor: u64) -> Vec<EnumeratedHom> {
    let chars = Characters::new(t);
    (1..=max_conductor)
        .into_par_iter()
        .flat_map_iter(|m| {
            let units = UnitGroup::new(m).expect("positive modulus");
            let ram: u64 = factorize(m).iter().map(|&(p, _)| p).product();
            primitive_homs(&units, t)
                .into_iter()
                .map(|hom| EnumeratedHom {
                    disc: hom.discriminant(&units, t, &chars),
                    surjective: hom.image(t).order() == t.order(),
                    ram,
                    hom,
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Brute-force counts by conductor enumeration and explicit image checks.
pub fn count_brute_force(t: &FiniteAbelianGroup, ordering: CountOrdering, grid: &[u64], surjective: bool) -> Result<Vec<u128>> {
    validate_grid(grid, ordering)?;
    let bound = *grid.last().expect("nonempty");
    // disc ≥ conductor; for ram the conductor is at most rad · ∏ wild excess.
    let max_conductor = match ordering {
        CountOrdering::Disc => bound,
        CountOrdering::Ram => {
            let e = t.exponent();
            let excess: u64 = factorize(t.order() as u64)
                .iter()
                .map(|&(p, _)| p.pow(wild_level(p, e) - 1))
                .product();
            bound * excess
        }
    };
    let mut out = vec![0u128; grid.len()];
    for h in enumerate_by_conductor(t, max_conductor) {
        if surjective && !h.surjective {
            continue;
        }
        let v = match ordering {
            CountOrdering::Disc => h.disc,
            CountOrdering::Ram => h.ram as u128,
        };
        for (o, &x) in out.iter_mut().zip(grid) {
            if v < x as u128 {
                *o += 1;
            }
        }
    }
    Ok(out)
}

/// Geometric grid from `lo` to `hi` with `per_decade` points per decade.
pub fn log_grid(lo: u64, hi: u64, per_decade: u32) -> Result<Vec<u64>> {
    if lo == 0 || hi <= lo || per_decade == 0 {
        return Err(Error::DegenerateGrid(format!("bad range {lo}..{hi}")));
    }
    let steps = ((hi as f64 / lo as f64).log10() * per_decade as f64).round() as u32;
    let mut out: Vec<u64> = (0..=steps)
        .map(|i| (lo as f64 * 10f64.powf(i as f64 / per_decade as f64)).round() as u64)
        .collect();
    *out.last_mut().expect("nonempty") = hi;
    out.dedup();
    Ok(out)
}
