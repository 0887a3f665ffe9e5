//! The counting invariants `a(T)`, `A(T)`, the twisted `b`, Malle's `b(K, G)`,
//! Türkelli's modified `B`, and the lower-bound exponents over abelian normal
//! subgroups.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation};
use crate::twist::{units_mod, ActionPair, TwistGroup};
use crate::Rational;

/// Image of the cyclotomic character of the base field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseField {
    /// `K = ℚ`: the full unit group modulo every exponent.
    Rationals,
    /// Units modulo `modulus` generating the image of `Gal(K(μ)/K)`.
    CyclotomicImage { modulus: u64, units: Vec<u64> },
}

impl BaseField {
    /// Generators of the cyclotomic image modulo `e`.
    pub fn units_mod(&self, e: u64) -> Result<Vec<u64>> {
        match self {
            BaseField::Rationals => Ok(units_mod(e)),
            BaseField::CyclotomicImage { modulus, units } => {
                if modulus % e != 0 {
                    return Err(Error::InvalidFamily(format!(
                        "cyclotomic image given modulo {modulus}, which is not a multiple of {e}"
                    )));
                }
                Ok(units.iter().map(|u| u % e).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitDetail {
    pub representative: Permutation,
    pub members: Vec<Permutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub a: usize,
    pub minimal_set: Vec<Permutation>,
    pub b: usize,
    pub orbit_detail: Vec<OrbitDetail>,
}

/// `min ind(t)` over nonidentity `t`.
pub fn a_invariant(t: &PermGroup) -> Result<usize> {
    t.elements()
        .iter()
        .filter(|x| !x.is_identity())
        .map(|x| x.ind())
        .min()
        .ok_or(Error::TrivialGroup)
}

/// `A(T)`: nonidentity elements of minimal index, sorted.
pub fn minimal_index_set(t: &PermGroup) -> Result<Vec<Permutation>> {
    let a = a_invariant(t)?;
    Ok(t.elements().iter().filter(|x| x.ind() == a).cloned().collect())
}

fn check_exponent(t: &PermGroup, gamma: &TwistGroup) -> Result<()> {
    if gamma.degree() != t.degree() {
        return Err(Error::DegreeMismatch {
            expected: t.degree(),
            got: gamma.degree(),
        });
    }
    if !gamma.exponent().is_multiple_of(t.exponent()) {
        return Err(Error::InvalidFamily(format!(
            "twist exponent {} is not a multiple of exponent(T) = {}",
            gamma.exponent(),
            t.exponent()
        )));
    }
    Ok(())
}

/// Orbits of `Γ` on the `T`-conjugacy classes inside `A(T)`.
pub fn b_twisted(t: &PermGroup, gamma: &TwistGroup) -> Result<InvariantReport> {
    check_exponent(t, gamma)?;
    gamma.check_normalizes(t)?;
    let a = a_invariant(t)?;
    let minimal_set = minimal_index_set(t)?;
    let classes: Vec<Vec<Permutation>> = t
        .conjugacy_classes()
        .into_iter()
        .filter(|c| c[0].ind() == a && !c[0].is_identity())
        .collect();
    let orbits = gamma.class_orbits(&classes)?;
    let orbit_detail = orbits
        .iter()
        .map(|o| {
            let mut members: Vec<Permutation> =
                o.iter().flat_map(|&i| classes[i].iter().cloned()).collect();
            members.sort();
            OrbitDetail {
                representative: members[0].clone(),
                members,
            }
        })
        .collect();
    Ok(InvariantReport {
        a,
        minimal_set,
        b: orbits.len(),
        orbit_detail,
    })
}

/// Average number of fixed points of `Γ` on `A(T)`; equals `b` for abelian `T`.
pub fn burnside_b(t: &PermGroup, gamma: &TwistGroup) -> Result<Rational> {
    check_exponent(t, gamma)?;
    gamma.check_normalizes(t)?;
    Ok(gamma.burnside_average(&minimal_index_set(t)?))
}

/// Malle's `b(K, G)`: orbits of `g ↦ g^u` on conjugacy classes in `A(G)`.
pub fn b_malle(g: &PermGroup, field: &BaseField) -> Result<usize> {
    let e = g.exponent();
    let units = field.units_mod(e)?;
    let id = Permutation::identity(g.degree());
    let gens = units.into_iter().map(|u| ActionPair::new(id.clone(), u)).collect();
    let gamma = TwistGroup::closure(g.degree(), gens, e)?;
    Ok(b_twisted(g, &gamma)?.b)
}

/// `G × U` as a permutation group on `n + |U|` points, with the encoding data
/// needed to read a pair back off a permutation.
struct PairProduct {
    degree: usize,
    units: Vec<u64>,
    exponent: u64,
    group: PermGroup,
}

impl PairProduct {
    fn new(g: &PermGroup, units: Vec<u64>, exponent: u64) -> Result<Self> {
        let n = g.degree();
        let k = units.len();
        let pos: HashMap<u64, usize> = units.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let lift = |conj: &Permutation, u: u64| -> Permutation {
            let mut images: Vec<u32> = conj.images().to_vec();
            for &v in &units {
                let w = (u * v) % exponent;
                images.push((n + pos[&w]) as u32);
            }
            Permutation::from_images(images).expect("product of bijections")
        };
        let mut gens: Vec<Permutation> = g
            .generators()
            .iter()
            .map(|x| lift(x, 1 % exponent))
            .collect();
        let id = Permutation::identity(n);
        gens.extend(units.iter().map(|&u| lift(&id, u)));
        let order = g.order() * k;
        if order > crate::perm::SUBGROUP_SCAN_CAP {
            return Err(Error::CapExceeded {
                what: "G × units for subgroup enumeration",
                cap: crate::perm::SUBGROUP_SCAN_CAP,
            });
        }
        let group = PermGroup::generate(n + k, gens)?;
        Ok(PairProduct {
            degree: n,
            units,
            exponent,
            group,
        })
    }

    fn decode(&self, x: &Permutation) -> ActionPair {
        let conj = Permutation::from_images(x.images()[..self.degree].to_vec())
            .expect("restriction of a product element");
        let one = self
            .units
            .iter()
            .position(|&u| u == 1 % self.exponent)
            .expect("units contain 1");
        let image = x.apply(self.degree + one) - self.degree;
        ActionPair::new(conj, self.units[image])
    }
}

/// Closure of a set of units modulo `e`.
fn unit_subgroup(generators: &[u64], e: u64) -> Vec<u64> {
    let mut set: BTreeSet<u64> = BTreeSet::new();
    set.insert(1 % e);
    let mut frontier = vec![1 % e];
    while let Some(x) = frontier.pop() {
        for &g in generators {
            let y = (x * g) % e;
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.into_iter().collect()
}

/// Smallest element of the coset `gN`, used as a key for `G/N`.
fn coset_key(g: &Permutation, n: &PermGroup) -> Permutation {
    n.elements()
        .iter()
        .map(|x| g.compose(x))
        .min()
        .expect("nonempty subgroup")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TurkelliReport {
    /// The modified invariant `B`.
    pub value: usize,
    /// Generators of the maximizing normal subgroup `N`.
    pub subgroup: Vec<Permutation>,
    /// Order of the maximizing twist group.
    pub twist_order: usize,
}

/// Türkelli's `B` for `T ⊴ G` and the twist `Γ` modelling `(π, χ)`.
///
/// Ranges over normal subgroups `N ≤ T` of `G` with `a(N) = a(T)` and over all
/// subgroups `Γ' ≤ G × U` whose image in `(G/N) × U` equals that of `Γ`, where
/// `U` is the unit projection of `Γ`. Every homomorphism `φ ≡ π mod N` yields
/// such a `Γ'`, so the result bounds the field-theoretic maximum from above.
pub fn turkelli_b(g: &PermGroup, t: &PermGroup, gamma: &TwistGroup) -> Result<TurkelliReport> {
    if !t.is_normal_in(g) {
        return Err(Error::InvalidFamily("T must be a normal subgroup of G".into()));
    }
    for pair in gamma.pairs() {
        if !g.contains(&pair.conjugator) {
            return Err(Error::InvalidFamily(format!(
                "twist conjugator {} is not in G",
                pair.conjugator
            )));
        }
    }
    check_exponent(t, gamma)?;
    let a_t = a_invariant(t)?;
    let e = gamma.exponent();
    let product = PairProduct::new(g, gamma.unit_projection(), e)?;
    let candidates: Vec<Vec<ActionPair>> = product
        .group
        .subgroups()?
        .iter()
        .map(|s| s.elements().iter().map(|x| product.decode(x)).collect())
        .collect();

    let mut best: Option<TurkelliReport> = None;
    for n in g.subgroups()? {
        if n.is_trivial() || !n.is_subgroup_of(t) || !n.is_normal_in(g) || a_invariant(&n)? != a_t
        {
            continue;
        }
        let target: BTreeSet<(Permutation, u64)> = gamma
            .pairs()
            .iter()
            .map(|p| (coset_key(&p.conjugator, &n), p.unit))
            .collect();
        for pairs in &candidates {
            let projection: BTreeSet<(Permutation, u64)> = pairs
                .iter()
                .map(|p| (coset_key(&p.conjugator, &n), p.unit))
                .collect();
            if projection != target {
                continue;
            }
            let twist = TwistGroup::closure(g.degree(), pairs.clone(), e)?;
            let b = b_twisted(&n, &twist)?.b;
            if best.as_ref().is_none_or(|r| b > r.value) {
                best = Some(TurkelliReport {
                    value: b,
                    subgroup: n.generators().to_vec(),
                    twist_order: twist.order(),
                });
            }
        }
    }
    best.ok_or_else(|| Error::InvalidFamily("no admissible normal subgroup".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub power_of_x: Rational,
    pub power_of_log: i64,
    pub a: usize,
    pub b: usize,
    /// Generators of the abelian normal subgroup achieving the bound.
    pub subgroup: Vec<Permutation>,
}

/// Best `(1/a(T), b(K, T(π)) - 1)` over nontrivial abelian `T ⊴ G` and twists
/// `Γ ≤ G × U` projecting onto both `G` and the cyclotomic image `U`.
///
/// Ordered lexicographically: larger power of `X` first, then larger power of
/// `log X`.
pub fn lower_bound_exponents(g: &PermGroup, field: &BaseField) -> Result<LowerBound> {
    let mut best: Option<LowerBound> = None;
    for t in g.normal_subgroups_abelian()? {
        if t.is_trivial() {
            continue;
        }
        let e = t.exponent();
        let units = unit_subgroup(&field.units_mod(e)?, e);
        let a = a_invariant(&t)?;
        if let Some(cur) = &best {
            if a > cur.a {
                continue;
            }
        }
        let product = PairProduct::new(g, units.clone(), e)?;
        let mut b_best = 0;
        for s in product.group.subgroups()? {
            let pairs: Vec<ActionPair> = s.elements().iter().map(|x| product.decode(x)).collect();
            let conj: BTreeSet<&Permutation> = pairs.iter().map(|p| &p.conjugator).collect();
            let us: BTreeSet<u64> = pairs.iter().map(|p| p.unit).collect();
            if conj.len() != g.order() || us.len() != units.len() {
                continue;
            }
            let twist = TwistGroup::closure(g.degree(), pairs, e)?;
            b_best = b_best.max(b_twisted(&t, &twist)?.b);
        }
        let candidate = LowerBound {
            power_of_x: Rational::new(1, a as i64),
            power_of_log: b_best as i64 - 1,
            a,
            b: b_best,
            subgroup: t.generators().to_vec(),
        };
        let better = match &best {
            None => true,
            Some(cur) => a < cur.a || (a == cur.a && b_best > cur.b),
        };
        if better {
            best = Some(candidate);
        }
    }
    best.ok_or(Error::NoAbelianNormalSubgroup)
}
