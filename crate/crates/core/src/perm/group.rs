use std::collections::{HashMap, HashSet, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::Permutation;
use crate::error::{Error, Result};

/// Default bound on the number of materialized elements of a group.
pub const DEFAULT_CLOSURE_CAP: usize = 10_000;

/// Largest group order for which all subgroups are enumerated.
pub const SUBGROUP_SCAN_CAP: usize = 200;

/// JSON form of a permutation group: `{ "degree": n, "generators": [[images...], ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupSpec {
    pub degree: usize,
    pub generators: Vec<Vec<u32>>,
}

/// A finite permutation group with every element materialized.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl std::fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for PermGroup {}

impl PermGroup {
    pub fn generate(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        Self::generate_with_cap(degree, generators, DEFAULT_CLOSURE_CAP)
    }

    pub fn generate_with_cap(
        degree: usize,
        generators: Vec<Permutation>,
        cap: usize,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidPermutation("degree must be positive".into()));
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: g.degree(),
                });
            }
        }
        let id = Permutation::identity(degree);
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = x.compose(g);
                if !seen.contains(&y) {
                    if seen.len() >= cap {
                        return Err(Error::CapExceeded {
                            what: "group closure",
                            cap,
                        });
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Permutation> = seen.into_iter().collect();
        elements.sort();
        Ok(Self::from_sorted(degree, generators, elements))
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        let gens = spec
            .generators
            .iter()
            .map(|g| {
                let p = Permutation::from_one_indexed(g)?;
                if p.degree() != spec.degree {
                    return Err(Error::DegreeMismatch {
                        expected: spec.degree,
                        got: p.degree(),
                    });
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::generate(spec.degree, gens)
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec {
            degree: self.degree,
            generators: self
                .generators
                .iter()
                .map(|g| g.one_indexed_images())
                .collect(),
        }
    }

    /// Parses generators given in cycle notation.
    pub fn from_cycles(degree: usize, generators: &[&str]) -> Result<Self> {
        let gens = generators
            .iter()
            .map(|s| Permutation::parse_cycles(s, degree))
            .collect::<Result<Vec<_>>>()?;
        Self::generate(degree, gens)
    }

    fn from_sorted(degree: usize, generators: Vec<Permutation>, elements: Vec<Permutation>) -> Self {
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        PermGroup {
            degree,
            generators,
            elements,
            index,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.index.contains_key(g)
    }

    pub fn index_of(&self, g: &Permutation) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, a)| self.generators[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|g| other.contains(g))
    }

    /// Orbits of the group on points, 0-indexed.
    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < orbit.len() {
                let x = orbit[i];
                for g in &self.generators {
                    let y = g.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.point_orbits().len() == 1
    }

    pub fn exponent(&self) -> u64 {
        self.elements.iter().fold(1u64, |acc, g| acc.lcm(&g.order()))
    }

    /// True when conjugation by `g` maps the group onto itself.
    pub fn is_normalized_by(&self, g: &Permutation) -> bool {
        self.generators.iter().all(|t| self.contains(&t.conjugate_by(g)))
    }

    pub fn is_normal_in(&self, ambient: &PermGroup) -> bool {
        self.is_subgroup_of(ambient) && ambient.generators.iter().all(|g| self.is_normalized_by(g))
    }

    /// Conjugacy classes, each sorted, listed by smallest element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<Permutation>> {
        let mut class_of = vec![usize::MAX; self.order()];
        let mut classes = Vec::new();
        for start in 0..self.order() {
            if class_of[start] != usize::MAX {
                continue;
            }
            let id = classes.len();
            class_of[start] = id;
            let mut members = vec![start];
            let mut i = 0;
            while i < members.len() {
                let x = &self.elements[members[i]];
                for g in &self.generators {
                    let y = self.index[&x.conjugate_by(g)];
                    if class_of[y] == usize::MAX {
                        class_of[y] = id;
                        members.push(y);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            classes.push(members.into_iter().map(|j| self.elements[j].clone()).collect());
        }
        classes
    }

    /// All subgroups, by iterated joins of cyclic subgroups.
    pub fn subgroups(&self) -> Result<Vec<PermGroup>> {
        if self.order() > SUBGROUP_SCAN_CAP {
            return Err(Error::CapExceeded {
                what: "subgroup enumeration",
                cap: SUBGROUP_SCAN_CAP,
            });
        }
        let table = MulTable::new(self);
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        let mut found: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
        let mut cyclic_gens: Vec<u32> = Vec::new();
        for x in 0..self.order() as u32 {
            let c = table.close(&[x]);
            if seen.insert(c.clone()) {
                cyclic_gens.push(x);
                found.push((c, vec![x]));
            }
        }
        let mut layer: Vec<usize> = (0..found.len()).collect();
        while !layer.is_empty() {
            let mut next = Vec::new();
            for &h in &layer {
                for &x in &cyclic_gens {
                    let (elems, gens) = &found[h];
                    if elems.binary_search(&x).is_ok() {
                        continue;
                    }
                    let mut new_gens = gens.clone();
                    new_gens.push(x);
                    let k = table.close(&new_gens);
                    if seen.insert(k.clone()) {
                        found.push((k, new_gens));
                        next.push(found.len() - 1);
                    }
                }
            }
            layer = next;
        }
        found.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(found
            .into_iter()
            .map(|(elems, gens)| self.subgroup_from_indices(&elems, &gens))
            .collect())
    }

    fn subgroup_from_indices(&self, elems: &[u32], gens: &[u32]) -> PermGroup {
        let generators = gens
            .iter()
            .map(|&i| self.elements[i as usize].clone())
            .filter(|g| !g.is_identity())
            .collect();
        let elements = elems.iter().map(|&i| self.elements[i as usize].clone()).collect();
        PermGroup::from_sorted(self.degree, generators, elements)
    }

    /// Every abelian normal subgroup, trivial group included, in order of size.
    pub fn normal_subgroups_abelian(&self) -> Result<Vec<PermGroup>> {
        Ok(self
            .subgroups()?
            .into_iter()
            .filter(|h| h.is_abelian() && h.is_normal_in(self))
            .collect())
    }

    /// Least index among nonidentity elements commuting with all their conjugates.
    pub fn solvable_exponent(&self) -> Result<usize> {
        if self.is_trivial() {
            return Err(Error::TrivialGroup);
        }
        let mut best: Option<usize> = None;
        for g in self.elements.iter().filter(|g| !g.is_identity()) {
            let ind = g.ind();
            if best.is_some_and(|b| b <= ind) {
                continue;
            }
            let commutes = self
                .elements
                .iter()
                .all(|h| g.commutes_with(&g.conjugate_by(h)));
            if commutes {
                best = Some(ind);
            }
        }
        best.ok_or(Error::NoAbelianWitness)
    }

    /// Subgroup generated by the given elements of this group.
    pub fn subgroup(&self, generators: Vec<Permutation>) -> Result<PermGroup> {
        for g in &generators {
            if !self.contains(g) {
                return Err(Error::InvalidPermutation(format!("{g} is not in the group")));
            }
        }
        PermGroup::generate(self.degree, generators)
    }
}

/// Multiplication table on element indices of a small group.
struct MulTable {
    n: usize,
    mul: Vec<u32>,
    id: u32,
}

impl MulTable {
    fn new(g: &PermGroup) -> Self {
        let n = g.order();
        let mut mul = Vec::with_capacity(n * n);
        for a in g.elements() {
            for b in g.elements() {
                mul.push(g.index[&a.compose(b)] as u32);
            }
        }
        let id = g.index[&g.identity()] as u32;
        MulTable { n, mul, id }
    }

    fn close(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.n];
        let mut out = vec![self.id];
        seen[self.id as usize] = true;
        let mut i = 0;
        while i < out.len() {
            let x = out[i] as usize;
            for &g in gens {
                let y = self.mul[x * self.n + g as usize];
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }
}
