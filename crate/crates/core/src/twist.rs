//! Finite models of the twisted action `σ.t = π(σ) t^{χ(σ)⁻¹} π(σ)⁻¹`.
//!
//! A [`TwistGroup`] is a subgroup of `G × (ℤ/eℤ)^×` where `e` is the exponent of
//! the abelian (or at least power-closed) subgroup being acted on. Uniform
//! weights on its elements stand in for Chebotarev equidistribution.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation, DEFAULT_CLOSURE_CAP};
use crate::Rational;

/// The pair `(π(σ), χ(σ) mod e)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct ActionPair {
    pub conjugator: Permutation,
    pub unit: u64,
}

impl ActionPair {
    pub fn new(conjugator: Permutation, unit: u64) -> Self {
        ActionPair { conjugator, unit }
    }

    pub fn identity(degree: usize) -> Self {
        ActionPair::new(Permutation::identity(degree), 1)
    }

    pub fn compose(&self, other: &ActionPair, exponent: u64) -> ActionPair {
        ActionPair {
            conjugator: self.conjugator.compose(&other.conjugator),
            unit: (self.unit * other.unit) % exponent,
        }
    }
}

/// Inverse of `u` modulo `m`, if it exists.
pub fn mod_inverse(u: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let g = (u as i64).extended_gcd(&(m as i64));
    (g.gcd == 1).then(|| g.x.rem_euclid(m as i64) as u64)
}

/// Units of `ℤ/eℤ`, in increasing order.
pub fn units_mod(e: u64) -> Vec<u64> {
    if e == 1 {
        return vec![0];
    }
    (1..e).filter(|u| u.gcd(&e) == 1).collect()
}

/// `pair.t = c ∘ t^{u⁻¹} ∘ c⁻¹`, with `u⁻¹` taken modulo `exponent`.
pub fn act(pair: &ActionPair, t: &Permutation, exponent: u64) -> Permutation {
    let inv = mod_inverse(pair.unit % exponent, exponent).expect("unit coprime to exponent");
    t.pow(inv as i64).conjugate_by(&pair.conjugator)
}

/// JSON form: `{ "exponent": e, "pairs": [{"conjugator": [...], "unit": u}, ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TwistSpec {
    pub exponent: u64,
    pub pairs: Vec<ActionPair>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistGroup {
    degree: usize,
    exponent: u64,
    generators: Vec<ActionPair>,
    pairs: Vec<ActionPair>,
}

impl TwistGroup {
    /// Smallest subgroup of `Sym(n) × (ℤ/eℤ)^×` containing `generators`.
    pub fn closure(degree: usize, generators: Vec<ActionPair>, exponent: u64) -> Result<Self> {
        Self::closure_with_cap(degree, generators, exponent, DEFAULT_CLOSURE_CAP)
    }

    pub fn closure_with_cap(
        degree: usize,
        generators: Vec<ActionPair>,
        exponent: u64,
        cap: usize,
    ) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::InvalidFamily("exponent must be positive".into()));
        }
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.conjugator.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: g.conjugator.degree(),
                });
            }
            if g.unit.gcd(&exponent) != 1 && exponent != 1 {
                return Err(Error::UnitNotCoprime(g.unit, exponent));
            }
            gens.push(ActionPair::new(g.conjugator, g.unit % exponent));
        }
        let id = ActionPair::new(Permutation::identity(degree), 1 % exponent);
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = x.compose(g, exponent);
                if !seen.contains(&y) {
                    if seen.len() >= cap {
                        return Err(Error::CapExceeded {
                            what: "twist group closure",
                            cap,
                        });
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(TwistGroup {
            degree,
            exponent,
            generators: gens,
            pairs: seen.into_iter().collect(),
        })
    }

    pub fn from_spec(degree: usize, spec: &TwistSpec) -> Result<Self> {
        Self::closure(degree, spec.pairs.clone(), spec.exponent)
    }

    pub fn to_spec(&self) -> TwistSpec {
        TwistSpec {
            exponent: self.exponent,
            pairs: self.generators.clone(),
        }
    }

    /// `{(1, 1)}`.
    pub fn trivial(degree: usize, exponent: u64) -> Result<Self> {
        Self::closure(degree, vec![], exponent)
    }

    /// Trivial `π` with full cyclotomic image: `{1} × (ℤ/eℤ)^×`.
    pub fn trivial_pi_over_q(degree: usize, exponent: u64) -> Result<Self> {
        let gens = units_mod(exponent)
            .into_iter()
            .map(|u| ActionPair::new(Permutation::identity(degree), u))
            .collect();
        Self::closure(degree, gens, exponent)
    }

    /// `G × U` for a group `G` of conjugators and a set of units generating `U`.
    pub fn product(group: &PermGroup, units: &[u64], exponent: u64) -> Result<Self> {
        let id = Permutation::identity(group.degree());
        let mut gens: Vec<ActionPair> = group
            .generators()
            .iter()
            .map(|g| ActionPair::new(g.clone(), 1))
            .collect();
        gens.extend(units.iter().map(|&u| ActionPair::new(id.clone(), u)));
        Self::closure(group.degree(), gens, exponent)
    }

    /// Conjugation by `G` with trivial cyclotomic image.
    pub fn conjugation_only(group: &PermGroup, exponent: u64) -> Result<Self> {
        Self::product(group, &[], exponent)
    }

    /// Surjective `π` onto `G` independent of a full cyclotomic image: `G × (ℤ/eℤ)^×`.
    pub fn full_over_q(group: &PermGroup, exponent: u64) -> Result<Self> {
        Self::product(group, &units_mod(exponent), exponent)
    }

    /// `C₃ ≀ C₂` with `L = ℚ(ζ₃)`: the swap and the nontrivial unit always occur together.
    pub fn kluners_split() -> Self {
        let s = Permutation::parse_cycles("(1 4)(2 5)(3 6)", 6).expect("valid cycles");
        Self::closure(6, vec![ActionPair::new(s, 2)], 3).expect("order two")
    }

    /// `C₃ ≀ C₂` with `L ≠ ℚ(ζ₃)`: swap and unit vary independently.
    pub fn kluners_nonsplit() -> Self {
        let s = Permutation::parse_cycles("(1 4)(2 5)(3 6)", 6).expect("valid cycles");
        let gens = vec![
            ActionPair::new(s, 1),
            ActionPair::new(Permutation::identity(6), 2),
        ];
        Self::closure(6, gens, 3).expect("order four")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn generators(&self) -> &[ActionPair] {
        &self.generators
    }

    pub fn pairs(&self) -> &[ActionPair] {
        &self.pairs
    }

    pub fn order(&self) -> usize {
        self.pairs.len()
    }

    pub fn contains(&self, pair: &ActionPair) -> bool {
        self.pairs.binary_search(pair).is_ok()
    }

    pub fn act(&self, pair: &ActionPair, t: &Permutation) -> Permutation {
        act(pair, t, self.exponent)
    }

    /// Distinct units occurring in the group.
    pub fn unit_projection(&self) -> Vec<u64> {
        let set: BTreeSet<u64> = self.pairs.iter().map(|p| p.unit).collect();
        set.into_iter().collect()
    }

    /// Checks that every conjugator maps `t` into itself.
    pub fn check_normalizes(&self, t: &PermGroup) -> Result<()> {
        for g in &self.generators {
            if !t.is_normalized_by(&g.conjugator) {
                return Err(Error::NotNormalizing(g.conjugator.to_string()));
            }
        }
        Ok(())
    }

    /// Partition of `set` into orbits; each orbit sorted, orbits ordered by first element.
    pub fn orbits(&self, set: &[Permutation]) -> Result<Vec<Vec<Permutation>>> {
        let position: HashMap<&Permutation, usize> =
            set.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut orbit_of = vec![usize::MAX; set.len()];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..set.len() {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            orbit_of[start] = id;
            let mut members = vec![start];
            let mut i = 0;
            while i < members.len() {
                let t = &set[members[i]];
                for g in &self.generators {
                    let image = self.act(g, t);
                    let j = *position.get(&image).ok_or(Error::NotActionClosed)?;
                    if orbit_of[j] == usize::MAX {
                        orbit_of[j] = id;
                        members.push(j);
                    }
                }
                i += 1;
            }
            orbits.push(members);
        }
        let mut out: Vec<Vec<Permutation>> = orbits
            .into_iter()
            .map(|o| {
                let mut v: Vec<Permutation> = o.into_iter().map(|j| set[j].clone()).collect();
                v.sort();
                v
            })
            .collect();
        out.sort();
        Ok(out)
    }

    /// Orbits on a family of conjugacy classes, returned as lists of class indices.
    ///
    /// The image of a class is located through its first element, so the classes
    /// must be permuted by the action (as they are when every conjugator
    /// normalizes the ambient subgroup).
    pub fn class_orbits(&self, classes: &[Vec<Permutation>]) -> Result<Vec<Vec<usize>>> {
        let mut class_of: HashMap<&Permutation, usize> = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            for t in c {
                class_of.insert(t, i);
            }
        }
        let mut orbit_of = vec![usize::MAX; classes.len()];
        let mut orbits = Vec::new();
        for start in 0..classes.len() {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            orbit_of[start] = id;
            let mut members = vec![start];
            let mut i = 0;
            while i < members.len() {
                let rep = &classes[members[i]][0];
                for g in &self.generators {
                    let image = self.act(g, rep);
                    let j = *class_of.get(&image).ok_or(Error::NotActionClosed)?;
                    if orbit_of[j] == usize::MAX {
                        orbit_of[j] = id;
                        members.push(j);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            orbits.push(members);
        }
        Ok(orbits)
    }

    /// `#{t ∈ set : pair.t = t}`.
    pub fn fixed_point_count(&self, pair: &ActionPair, set: &[Permutation]) -> usize {
        set.iter().filter(|t| &self.act(pair, t) == *t).count()
    }

    /// `(1/|Γ|) Σ_{pair ∈ Γ} #fixed points` on an action-closed set.
    pub fn burnside_average(&self, set: &[Permutation]) -> Rational {
        let total: usize = self.pairs.iter().map(|p| self.fixed_point_count(p, set)).sum();
        Rational::new(total as i64, self.order() as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        Permutation::parse_cycles(s, 6).unwrap()
    }

    fn kluners_minimal_set() -> Vec<Permutation> {
        vec![p("(1 2 3)"), p("(1 3 2)"), p("(4 5 6)"), p("(4 6 5)")]
    }

    #[test]
    fn closure_examples() {
        assert_eq!(TwistGroup::trivial(6, 3).unwrap().order(), 1);
        assert_eq!(TwistGroup::kluners_split().order(), 2);
        assert_eq!(TwistGroup::kluners_nonsplit().order(), 4);
        let g = TwistGroup::closure(6, vec![ActionPair::new(Permutation::identity(6), 2)], 3)
            .unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.unit_projection(), vec![1, 2]);
    }

    #[test]
    fn closure_rejects_non_units() {
        let err = TwistGroup::closure(3, vec![ActionPair::new(Permutation::identity(3), 3)], 6);
        assert_eq!(err.unwrap_err(), Error::UnitNotCoprime(3, 6));
    }

    #[test]
    fn action_examples() {
        let t = p("(1 2 3)");
        assert_eq!(act(&ActionPair::identity(6), &t, 3), t);
        let s = p("(1 4)(2 5)(3 6)");
        assert_eq!(act(&ActionPair::new(s, 2), &t, 3), p("(4 5 6)").pow(2));
        assert_eq!(
            act(&ActionPair::new(Permutation::identity(6), 2), &t, 3),
            t.pow(2)
        );
    }

    #[test]
    fn kluners_orbits() {
        let a = kluners_minimal_set();
        assert_eq!(TwistGroup::kluners_split().orbits(&a).unwrap().len(), 2);
        assert_eq!(TwistGroup::kluners_nonsplit().orbits(&a).unwrap().len(), 1);
        assert_eq!(TwistGroup::trivial(6, 3).unwrap().orbits(&a).unwrap().len(), 4);
    }

    #[test]
    fn fixed_points() {
        let a = kluners_minimal_set();
        let g = TwistGroup::kluners_split();
        let s = p("(1 4)(2 5)(3 6)");
        assert_eq!(g.fixed_point_count(&ActionPair::new(s, 2), &a), 0);
        assert_eq!(g.fixed_point_count(&ActionPair::identity(6), &a), 4);
        assert_eq!(g.burnside_average(&a), Rational::from_integer(2));
    }

    #[test]
    fn orbits_require_closed_sets() {
        let g = TwistGroup::kluners_split();
        let err = g.orbits(&[p("(1 2 3)")]).unwrap_err();
        assert_eq!(err, Error::NotActionClosed);
    }

    #[test]
    fn modular_inverses() {
        assert_eq!(mod_inverse(2, 3), Some(2));
        assert_eq!(mod_inverse(5, 12), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(units_mod(12), vec![1, 5, 7, 11]);
    }
}
