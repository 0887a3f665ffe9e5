
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on the order of groups whose elements are enumerated.
pub const DEFAULT_GROUP_CAP: usize = 10_000;

/// A finite abelian group whose elements are the indices `0..order`.
pub trait AbelianGroup {
    fn order(&self) -> usize;
    fn zero(&self) -> usize;
    fn add(&self, a: usize, b: usize) -> usize;

    fn multiple(&self, k: u64, a: usize) -> usize {
        let (mut acc, mut base, mut k) = (self.zero(), a, k);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    fn element_order(&self, a: usize) -> u64 {
        let (mut x, mut k) = (a, 1);
        while x != self.zero() {
            x = self.add(x, a);
            k += 1;
        }
        k
    }
}

/// A subgroup, stored as its sorted element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn trivial<G: AbelianGroup>(g: &G) -> Self {
        Subgroup {
            elements: vec![g.zero()],
        }
    }

    pub fn whole<G: AbelianGroup>(g: &G) -> Self {
        Subgroup {
            elements: (0..g.order()).collect(),
        }
    }

    /// The subgroup generated by `gens`.
    pub fn span<G: AbelianGroup>(g: &G, gens: &[usize]) -> Self {
        let mut out = Subgroup::trivial(g);
        for &s in gens {
            if !out.contains(s) {
                out = out.extend(g, s);
            }
        }
        out
    }

    /// Elements of `g` satisfying a predicate closed under addition.
    pub fn filter<G: AbelianGroup>(g: &G, pred: impl Fn(usize) -> bool) -> Self {
        Subgroup {
            elements: (0..g.order()).filter(|&x| pred(x)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn join<G: AbelianGroup>(&self, g: &G, other: &Subgroup) -> Subgroup {
        let (mut acc, small) = if self.order() >= other.order() { (self.clone(), other) } else { (other.clone(), self) };
        for &x in &small.elements {
            if !acc.contains(x) {
                acc = acc.extend(g, x);
            }
        }
        acc
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            elements: self.elements.iter().copied().filter(|&x| other.contains(x)).collect(),
        }
    }

    /// `⟨x⟩ + self`, as the union of the cosets `self + kx`.
    pub fn extend<G: AbelianGroup>(&self, g: &G, x: usize) -> Subgroup {
        let mut elements = self.elements.clone();
        let mut shift = x;
        while !self.contains(shift) {
            elements.extend(self.elements.iter().map(|&s| g.add(s, shift)));
            shift = g.add(shift, x);
        }
        elements.sort_unstable();
        Subgroup { elements }
    }
}

/// `⊕ ℤ/d_i` with `d_1 | d_2 | …`; element index is mixed-radix in the
/// residue tuple with the last coordinate varying fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<u64>,
    order: usize,
}

impl TryFrom<Vec<u64>> for FiniteAbelianGroup {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        FiniteAbelianGroup::new(v)
    }
}

impl From<FiniteAbelianGroup> for Vec<u64> {
    fn from(g: FiniteAbelianGroup) -> Self {
        g.invariant_factors
    }
}

impl FiniteAbelianGroup {
    pub fn new(invariant_factors: Vec<u64>) -> Result<Self> {
        Self::with_cap(invariant_factors, DEFAULT_GROUP_CAP)
    }

    pub fn with_cap(invariant_factors: Vec<u64>, cap: usize) -> Result<Self> {
        if let Some(d) = invariant_factors.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidAbelianGroup(format!("invariant factor {d} < 2")));
        }
        if let Some(w) = invariant_factors.windows(2).find(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidAbelianGroup(format!("{} does not divide {}", w[0], w[1])));
        }
        let mut order: usize = 1;
        for &d in &invariant_factors {
            order = order
                .checked_mul(d as usize)
                .filter(|&o| o <= cap)
                .ok_or(Error::CapExceeded { what: "group order", cap })?;
        }
        Ok(FiniteAbelianGroup {
            invariant_factors,
            order,
        })
    }

    /// Cyclic group of order `n` (trivial for `n = 1`).
    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(if n == 1 { vec![] } else { vec![n] })
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    pub fn tuple(&self, mut index: usize) -> Vec<u64> {
        let mut t = vec![0; self.rank()];
        for (slot, &d) in t.iter_mut().zip(&self.invariant_factors).rev() {
            *slot = (index % d as usize) as u64;
            index /= d as usize;
        }
        t
    }

    /// Index of a residue tuple; entries are reduced modulo the factors.
    pub fn index(&self, tuple: &[u64]) -> Result<usize> {
        if tuple.len() != self.rank() {
            return Err(Error::DegreeMismatch {
                expected: self.rank(),
                got: tuple.len(),
            });
        }
        Ok(tuple
            .iter()
            .zip(&self.invariant_factors)
            .fold(0usize, |acc, (&x, &d)| acc * d as usize + (x % d) as usize))
    }
}

impl AbelianGroup for FiniteAbelianGroup {
    fn order(&self) -> usize {
        self.order
    }

    fn zero(&self) -> usize {
        0
    }

    fn add(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for &d in self.invariant_factors.iter().rev() {
            let d = d as usize;
            out += ((a % d + b % d) % d) * place;
            a /= d;
            b /= d;
            place *= d;
        }
        out
    }
}

/// An abelian group given by its full addition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableGroup {
    order: usize,
    zero: usize,
    table: Vec<u32>,
}

impl TableGroup {
    /// Builds the table from an addition closure; checks closure, identity
    /// and commutativity (associativity is the caller's responsibility).
    pub fn from_fn(order: usize, zero: usize, add: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let mut table = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                let c = add(a, b);
                if c >= order {
                    return Err(Error::InvalidAbelianGroup("table is not closed".into()));
                }
                table[a * order + b] = c as u32;
            }
        }
        let g = TableGroup { order, zero, table };
        for a in 0..order {
            if g.add(a, zero) != a {
                return Err(Error::InvalidAbelianGroup("zero is not an identity".into()));
            }
            for b in 0..a {
                if g.add(a, b) != g.add(b, a) {
                    return Err(Error::NotAbelian);
                }
            }
        }
        Ok(g)
    }
}

impl AbelianGroup for TableGroup {
    fn order(&self) -> usize {
        self.order
    }

    fn zero(&self) -> usize {
        self.zero
    }

    fn add(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }
}

/// A cyclic subgroup, by a generator and its order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicNode {
    pub generator: usize,
    pub order: u64,
}

impl CyclicNode {
    pub fn subgroup<G: AbelianGroup>(&self, g: &G) -> Subgroup {
        Subgroup::span(g, &[self.generator])
    }
}

/// All cyclic subgroups of `g`, trivial first, each listed once.
pub fn cyclic_subgroups<G: AbelianGroup>(g: &G, cap: usize) -> Result<Vec<CyclicNode>> {
    if g.order() > cap {
        return Err(Error::CapExceeded {
            what: "group order",
            cap,
        });
    }
    let mut covered = vec![false; g.order()];
    let mut out = Vec::new();
    for x in 0..g.order() {
        if covered[x] {
            continue;
        }
        let sub = Subgroup::span(g, &[x]);
        let n = sub.order() as u64;
        // Mark every generator of ⟨x⟩.
        for &y in sub.elements() {
            if g.element_order(y) == n {
                covered[y] = true;
            }
        }
        out.push(CyclicNode {
            generator: x,
            order: n,
        });
    }
    out.sort_by_key(|c| (c.order, c.generator));
    Ok(out)
}

/// `μ(λ', λ)` on cyclic subgroups: `μ(|λ/λ'|)` when `λ' ≤ λ`, else 0.
pub fn mobius_nodes<G: AbelianGroup>(g: &G, lower: &CyclicNode, upper: &CyclicNode) -> i64 {
    if !upper.subgroup(g).contains(lower.generator) {
        return 0;
    }
    crate::poset::mobius(upper.order / lower.order)
}
