use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::group::{AbelianGroup, FiniteAbelianGroup, Subgroup, TableGroup};
use super::pairing::Pairing;
use crate::dirichlet::{Exponent, FamilyClass, FrobenianFamily};
use crate::error::{Error, Result};
use crate::local::{cohomology_sizes, z1_enumerate, EulerFactor, LocalClass, LocalOrdering};
use crate::perm::{PermGroup, Permutation};
use crate::twist::TwistGroup;
use crate::Rational;

/// Largest group turned into an addition table.
pub const MODEL_ORDER_CAP: usize = 2048;

/// A local cohomology group modeled at cocycle level: `Z` with coboundaries
/// `B ⊆ U ⊆ Z`, so that `H¹ = Z/B`, the unramified part is `U/B` and the
/// inertia restriction is the quotient map `Z → Z/U`.
///
/// `valuation` assigns each cocycle the exponent of its ordering; it vanishes
/// exactly on `U` and is constant on cosets of `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCohomologyModel {
    group: TableGroup,
    boundaries: Subgroup,
    unramified: Subgroup,
    valuation: Vec<u32>,
    h0: u64,
}

impl LocalCohomologyModel {
    pub fn new(
        group: TableGroup,
        boundaries: Subgroup,
        unramified: Subgroup,
        valuation: Vec<u32>,
        h0: u64,
    ) -> Result<Self> {
        if !boundaries.is_subgroup_of(&unramified) {
            return Err(Error::InconsistentSubgroups("coboundaries not inside the unramified part".into()));
        }
        if valuation.len() != group.order() {
            return Err(Error::DegreeMismatch {
                expected: group.order(),
                got: valuation.len(),
            });
        }
        for (z, &v) in valuation.iter().enumerate() {
            if (v == 0) != unramified.contains(z) {
                return Err(Error::InconsistentSubgroups(format!(
                    "valuation {v} at element {z} disagrees with the unramified subgroup"
                )));
            }
            if boundaries.elements().iter().any(|&b| valuation[group.add(z, b)] != v) {
                return Err(Error::InconsistentSubgroups(
                    "valuation is not constant on cohomology classes".into(),
                ));
            }
        }
        if h0 == 0 {
            return Err(Error::ZeroH0);
        }
        Ok(LocalCohomologyModel {
            group,
            boundaries,
            unramified,
            valuation,
            h0,
        })
    }

    /// The model at a tame place of the given class, for abelian `T`.
    /// Cocycles are pairs `(τ ↦ t, Fr ↦ y)` under pointwise multiplication.
    pub fn from_local(t: &PermGroup, cls: &LocalClass, ordering: LocalOrdering) -> Result<Self> {
        if !t.is_abelian() {
            return Err(Error::NotAbelian);
        }
        let cocycles = z1_enumerate(t, cls)?;
        if cocycles.len() > MODEL_ORDER_CAP {
            return Err(Error::CapExceeded {
                what: "cocycle group order",
                cap: MODEL_ORDER_CAP,
            });
        }
        let index: HashMap<(&Permutation, &Permutation), usize> = cocycles
            .iter()
            .enumerate()
            .map(|(i, c)| ((&c.tau_image, &c.fr_image), i))
            .collect();
        let id = t.identity();
        let zero = index[&(&id, &id)];
        let group = TableGroup::from_fn(cocycles.len(), zero, |a, b| {
            let (x, y) = (&cocycles[a], &cocycles[b]);
            index[&(&x.tau_image.compose(&y.tau_image), &x.fr_image.compose(&y.fr_image))]
        })?;
        let unramified = Subgroup::filter(&group, |z| cocycles[z].tau_image.is_identity());
        let g = &cls.conjugator;
        let bound_gens: Vec<usize> = t
            .elements()
            .iter()
            .map(|s| index[&(&id, &s.conjugate_by(g).compose(&s.inverse()))])
            .collect();
        let boundaries = Subgroup::span(&group, &bound_gens);
        let valuation = cocycles.iter().map(|c| ordering.weight(&c.tau_image)).collect();
        let h0 = cohomology_sizes(t, cls)?.h0;
        Self::new(group, boundaries, unramified, valuation, h0)
    }

    /// A model with `B = 0`, so `Z` is the cohomology group itself.
    pub fn synthetic(group: &FiniteAbelianGroup, unramified: Subgroup, rule: ValuationRule) -> Result<Self> {
        if group.order() > MODEL_ORDER_CAP {
            return Err(Error::CapExceeded {
                what: "group order",
                cap: MODEL_ORDER_CAP,
            });
        }
        let table = TableGroup::from_fn(group.order(), group.zero(), |a, b| group.add(a, b))?;
        let valuation = (0..group.order())
            .map(|z| match rule {
                _ if unramified.contains(z) => 0,
                ValuationRule::Ram => 1,
                ValuationRule::InertiaOrder => (unramified.extend(&table, z).order() / unramified.order()) as u32 - 1,
            })
            .collect();
        let h0 = unramified.order() as u64;
        let trivial = Subgroup::trivial(&table);
        Self::new(table, trivial, unramified, valuation, h0)
    }

    pub fn group(&self) -> &TableGroup {
        &self.group
    }

    pub fn boundaries(&self) -> &Subgroup {
        &self.boundaries
    }

    pub fn unramified(&self) -> &Subgroup {
        &self.unramified
    }

    pub fn valuation(&self, z: usize) -> u32 {
        self.valuation[z]
    }

    pub fn h0(&self) -> u64 {
        self.h0
    }

    pub fn h1_order(&self) -> usize {
        self.group.order() / self.boundaries.order()
    }

    /// The whole group `Z`, i.e. the unrestricted local condition.
    pub fn everything(&self) -> Subgroup {
        Subgroup::whole(&self.group)
    }

    fn check_contains_unramified(&self, s: &Subgroup, what: &str) -> Result<()> {
        if self.unramified.is_subgroup_of(s) {
            Ok(())
        } else {
            Err(Error::InconsistentSubgroups(format!("{what} does not contain the unramified part")))
        }
    }

    /// `c(h, f)` for a local condition `L` and the preimage `R ⊇ U` of the
    /// inertia-restricted annihilator of `⟨res h⟩`. Pass `R = Z` for `h = 0`.
    ///
    /// `R` is taken as given: the model has no Tate pairing of its own.
    /// [`restricted_annihilator`] builds it for synthetic models.
    pub fn coefficient_c(&self, l: &Subgroup, r: &Subgroup, f: usize) -> Result<Rational> {
        self.check_contains_unramified(l, "local condition")?;
        self.check_contains_unramified(r, "restricted annihilator")?;
        if !l.contains(f) {
            return Err(Error::InconsistentSubgroups(format!("element {f} is outside the local condition")));
        }
        let g = &self.group;
        let u = &self.unramified;
        let c = u.extend(g, f);
        let d = c.intersect(r);
        let mu = crate::poset::mobius((c.order() / d.order()) as u64);
        if mu == 0 {
            return Ok(Rational::from_integer(0));
        }
        let n = (c.order() / u.order()) as u64;
        let rad: u64 = crate::primes::factorize(n).iter().map(|&(p, _)| p).product();
        let frattini = u.extend(g, g.multiple(rad, f));
        let mut numerator = 0i64;
        let mut denominator = 0i64;
        for &x in l.elements() {
            if c.contains(x) {
                // U + ⟨x⟩ ⊆ C, and U ⊆ Φ gives (U + ⟨x⟩) + Φ = Φ + ⟨x⟩.
                if u.extend(g, x).order() == c.order() {
                    denominator += 1;
                }
                if d.contains(x) && frattini.extend(g, x) == d {
                    numerator += 1;
                }
            }
        }
        Ok(Rational::new(mu * numerator, denominator))
    }

    /// `(1/|H⁰|) Σ_{f ∈ L} c(h, f) x^{ν(f)}`, summing over classes in `H¹`.
    pub fn euler_factor(&self, l: &Subgroup, r: &Subgroup) -> Result<EulerFactor> {
        let mut acc: BTreeMap<u32, Rational> = BTreeMap::new();
        for &f in l.elements() {
            *acc.entry(self.valuation[f]).or_insert_with(|| Rational::from_integer(0)) += self.coefficient_c(l, r, f)?;
        }
        let scale = Rational::new(1, (self.h0 as usize * self.boundaries.order()) as i64);
        Ok(EulerFactor::from_pairs(acc.into_iter().map(|(k, v)| (k, v * scale))))
    }
}

/// Exponent assigned to a synthetic cohomology class off the unramified part.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationRule {
    /// 1 for every ramified class.
    #[default]
    Ram,
    /// Order of the inertia image, minus one.
    InertiaOrder,
}

/// Preimage in `Z` of `res_I(⟨h⟩^*)`: the left annihilator of `⟨h⟩` plus `U`,
/// for a synthetic model whose group is the pairing's left group.
pub fn restricted_annihilator(pairing: &Pairing, unramified: &Subgroup, h: usize) -> Result<Subgroup> {
    let dual = pairing.right();
    let ann = pairing.left_annihilator(&Subgroup::span(dual, &[h]))?;
    Ok(ann.join(pairing.left(), unramified))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionClass {
    pub label: String,
    pub weight: Rational,
    pub model: LocalCohomologyModel,
    pub condition: Subgroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrregularCondition {
    pub label: String,
    pub model: LocalCohomologyModel,
    pub condition: Subgroup,
}

/// Local conditions `L_σ` for each Frobenius class `σ`, with class weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalConditionFamily {
    pub classes: Vec<ConditionClass>,
    pub irregular: Vec<IrregularCondition>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AbInv {
    pub a: Exponent,
    #[serde(with = "crate::rational")]
    pub b: Rational,
}

impl LocalConditionFamily {
    pub fn new(classes: Vec<ConditionClass>, irregular: Vec<IrregularCondition>) -> Result<Self> {
        let mut total = Rational::from_integer(0);
        for c in &classes {
            if c.weight <= Rational::from_integer(0) {
                return Err(Error::InvalidFamily(format!("nonpositive weight {}", c.weight)));
            }
            c.model.check_contains_unramified(&c.condition, "local condition")?;
            total += c.weight;
        }
        if total != Rational::from_integer(1) {
            return Err(Error::InvalidFamily(format!("weights sum to {total}")));
        }
        Ok(LocalConditionFamily { classes, irregular })
    }

    /// Unrestricted conditions `L_σ = H¹` for every element of `Γ`.
    pub fn unrestricted(t: &PermGroup, gamma: &TwistGroup, ordering: LocalOrdering) -> Result<Self> {
        let weight = Rational::new(1, gamma.order() as i64);
        let classes = gamma
            .pairs()
            .iter()
            .map(|pair| {
                let model = LocalCohomologyModel::from_local(t, &LocalClass::from_pair(pair), ordering)?;
                Ok(ConditionClass {
                    label: format!("({}, {})", pair.conjugator, pair.unit),
                    weight,
                    condition: model.everything(),
                    model,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(classes, vec![])
    }

    /// Least exponent of a ramified class in any `L_σ`, and the weighted
    /// average of `|L_σ^{[a]}| / |H⁰|`. With no ramified class at all, `a` is
    /// infinite and `b = 1`.
    pub fn ab_inv(&self) -> AbInv {
        let a = self
            .classes
            .iter()
            .flat_map(|c| c.condition.elements().iter().map(|&z| c.model.valuation(z)))
            .filter(|&v| v > 0)
            .min();
        let Some(a) = a else {
            return AbInv {
                a: Exponent::Infinite,
                b: Rational::from_integer(1),
            };
        };
        let b = self
            .classes
            .iter()
            .map(|c| {
                let m = &c.model;
                let count = c.condition.elements().iter().filter(|&&z| m.valuation(z) == a).count();
                c.weight * Rational::new(count as i64, (m.boundaries().order() as u64 * m.h0()) as i64)
            })
            .sum();
        AbInv { a: Exponent::Finite(a), b }
    }

    /// The Frobenian family of Euler factors `Q_σ(0, x)`.
    pub fn trivial_character_family(&self) -> Result<FrobenianFamily> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                Ok(FamilyClass {
                    label: c.label.clone(),
                    factor: c.model.euler_factor(&c.condition, &c.model.everything())?,
                    weight: c.weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FrobenianFamily::new(classes, vec![])
    }
}

/// Synthetic local data in JSON form: the cohomology group with `B = 0`, its
/// unramified subgroup, a self-pairing matrix into `ℤ/exp`, and the local
/// condition together with an optional dual element `h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticLocalData {
    pub group: FiniteAbelianGroup,
    pub unramified: Vec<Vec<u64>>,
    #[serde(default)]
    pub pairing: Option<Vec<Vec<u64>>>,
    #[serde(default)]
    pub valuation: ValuationRule,
    #[serde(default)]
    pub conditions: SyntheticConditions,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticConditions {
    /// Generators of `L` beyond the unramified part; absent means `L = H¹`.
    #[serde(default)]
    pub local: Option<Vec<Vec<u64>>>,
    #[serde(default)]
    pub h: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientEntry {
    pub element: Vec<u64>,
    pub valuation: u32,
    #[serde(with = "crate::rational")]
    pub c: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SyntheticReport {
    pub h1_order: usize,
    pub h0: u64,
    pub local_condition_order: usize,
    pub restricted_annihilator_order: usize,
    pub coefficients: Vec<CoefficientEntry>,
    pub euler_factor: EulerFactor,
}

impl SyntheticLocalData {
    fn indices(&self, tuples: &[Vec<u64>]) -> Result<Vec<usize>> {
        tuples.iter().map(|t| self.group.index(t)).collect()
    }

    pub fn pairing(&self) -> Result<Pairing> {
        match &self.pairing {
            None => Ok(Pairing::standard(&self.group)),
            Some(m) => Pairing::new(self.group.clone(), self.group.clone(), self.group.exponent(), m.clone()),
        }
    }

    pub fn evaluate(&self) -> Result<SyntheticReport> {
        let g = &self.group;
        let unramified = Subgroup::span(g, &self.indices(&self.unramified)?);
        let model = LocalCohomologyModel::synthetic(g, unramified.clone(), self.valuation)?;
        let l = match &self.conditions.local {
            None => Subgroup::whole(g),
            Some(gens) => unramified.join(g, &Subgroup::span(g, &self.indices(gens)?)),
        };
        let r = match &self.conditions.h {
            None => Subgroup::whole(g),
            Some(h) => restricted_annihilator(&self.pairing()?, &unramified, g.index(h)?)?,
        };
        let coefficients = l
            .elements()
            .iter()
            .map(|&f| {
                Ok(CoefficientEntry {
                    element: g.tuple(f),
                    valuation: model.valuation(f),
                    c: model.coefficient_c(&l, &r, f)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SyntheticReport {
            h1_order: model.h1_order(),
            h0: model.h0(),
            local_condition_order: l.order(),
            restricted_annihilator_order: r.order(),
            coefficients,
            euler_factor: model.euler_factor(&l, &r)?,
        })
    }
}
