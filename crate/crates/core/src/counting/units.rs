use serde::Serialize;

use crate::error::{Error, Result};
use crate::primes::factorize;
use crate::selmer::{AbelianGroup, FiniteAbelianGroup, Subgroup};

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn primitive_root_mod_p(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let qs: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| qs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// Smallest `x < n` with `g^x ≡ r (mod m)`, by baby-step giant-step.
fn discrete_log(g: u64, r: u64, n: u64, m: u64) -> Option<u64> {
    let step = (n as f64).sqrt().ceil() as u64 + 1;
    let mut baby = std::collections::HashMap::with_capacity(step as usize);
    let mut x = 1 % m;
    for j in 0..step {
        baby.entry(x).or_insert(j);
        x = (x as u128 * g as u128 % m as u128) as u64;
    }
    let giant = crate::twist::mod_inverse(pow_mod(g, step, m), m)?;
    let mut y = r % m;
    for i in 0..=step {
        if let Some(&j) = baby.get(&y) {
            let e = i * step + j;
            if e < n {
                return Some(e);
            }
        }
        y = (y as u128 * giant as u128 % m as u128) as u64;
    }
    None
}

/// `(ℤ/p^k)^×` with explicit generators.
#[derive(Clone, Debug)]
struct Component {
    p: u64,
    k: u32,
    pk: u64,
    /// Generators (as residues mod p^k) and their orders.
    gens: Vec<(u64, u64)>,
    /// Exponent vectors of `1 + p^j` for `j0 ≤ j < k`, where `j0` is 2 for
    /// `p = 2` and 1 otherwise; these generate the higher unit filtration.
    filtration: Vec<Vec<u64>>,
}

impl Component {
    fn new(p: u64, k: u32) -> Self {
        let pk = p.pow(k);
        let gens: Vec<(u64, u64)> = if p == 2 {
            match k {
                1 => vec![],
                2 => vec![(3, 2)],
                _ => vec![(pk - 1, 2), (5, pk / 4)],
            }
        } else {
            let mut g = primitive_root_mod_p(p);
            if k > 1 && pow_mod(g, p - 1, p * p) == 1 {
                g += p;
            }
            vec![(g % pk, pk / p * (p - 1))]
        };
        let mut c = Component {
            p,
            k,
            pk,
            gens,
            filtration: Vec::new(),
        };
        let j0 = c.filtration_start();
        c.filtration = (j0..k)
            .map(|j| c.log(1 + p.pow(j)).expect("1 + p^j is a unit"))
            .collect();
        c
    }

    fn filtration_start(&self) -> u32 {
        if self.p == 2 {
            2
        } else {
            1
        }
    }

    fn order(&self) -> u64 {
        self.gens.iter().map(|g| g.1).product()
    }

    fn log(&self, r: u64) -> Option<Vec<u64>> {
        let r = r % self.pk;
        if r.is_multiple_of(self.p) {
            return None;
        }
        match (self.p, self.k) {
            (2, 1) => Some(vec![]),
            (2, 2) => Some(vec![u64::from(r == 3)]),
            (2, _) => {
                let sign = u64::from(r % 4 == 3);
                let r = if sign == 1 { self.pk - r } else { r };
                Some(vec![sign, discrete_log(5, r, self.gens[1].1, self.pk)?])
            }
            _ => Some(vec![discrete_log(self.gens[0].0, r, self.gens[0].1, self.pk)?]),
        }
    }
}

/// `(ℤ/mℤ)^×` as a product of prime-power components, each with fixed
/// generators. The global generator list is the concatenation.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    modulus: u64,
    components: Vec<Component>,
    /// Start of each component's generators in the global list.
    offsets: Vec<usize>,
}

impl UnitGroup {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidHom("modulus 0".into()));
        }
        let components: Vec<Component> = factorize(modulus).into_iter().map(|(p, k)| Component::new(p, k)).collect();
        let mut offsets = Vec::with_capacity(components.len());
        let mut n = 0;
        for c in &components {
            offsets.push(n);
            n += c.gens.len();
        }
        Ok(UnitGroup {
            modulus,
            components,
            offsets,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.components.iter().map(Component::order).product()
    }

    pub fn generator_orders(&self) -> Vec<u64> {
        self.components.iter().flat_map(|c| c.gens.iter().map(|g| g.1)).collect()
    }

    /// Generators as residues mod `m` (each is 1 away from its own component).
    pub fn generators(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for (ci, c) in self.components.iter().enumerate() {
            for &(g, _) in &c.gens {
                out.push(self.lift(ci, g));
            }
        }
        out
    }

    /// CRT lift of a residue at one component, 1 at all others.
    fn lift(&self, ci: usize, r: u64) -> u64 {
        let pk = self.components[ci].pk;
        let rest = self.modulus / pk;
        // x ≡ r (mod p^k), x ≡ 1 (mod rest).
        let inv = crate::twist::mod_inverse(rest % pk, pk).unwrap_or(0);
        let t = ((r + pk - 1 % pk) % pk) as u128 * inv as u128 % pk as u128;
        ((1 + rest as u128 * t) % self.modulus as u128) as u64
    }

    /// Exponents of `u` in the generators; `None` if `u` is not a unit.
    pub fn dlog(&self, u: u64) -> Option<Vec<u64>> {
        let mut out = Vec::new();
        for c in &self.components {
            out.extend(c.log(u)?);
        }
        Some(out)
    }
}

/// A homomorphism `(ℤ/mℤ)^× → T`, by the images of the fixed generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitGroupHom {
    pub modulus: u64,
    /// Element indices in `T`.
    pub images: Vec<usize>,
}

impl UnitGroupHom {
    pub fn eval<G: AbelianGroup>(&self, units: &UnitGroup, target: &G, u: u64) -> Result<usize> {
        let e = units
            .dlog(u)
            .ok_or_else(|| Error::InvalidHom(format!("{u} is not a unit mod {}", units.modulus)))?;
        Ok(combine(target, &e, &self.images))
    }

    /// `ψ(1 + p^j)` at component `ci`.
    fn eval_filtration<G: AbelianGroup>(&self, units: &UnitGroup, target: &G, ci: usize, j: u32) -> usize {
        let c = &units.components[ci];
        let off = units.offsets[ci];
        let e = &c.filtration[(j - c.filtration_start()) as usize];
        combine(target, e, &self.images[off..off + c.gens.len()])
    }

    pub fn image<G: AbelianGroup>(&self, target: &G) -> Subgroup {
        Subgroup::span(target, &self.images)
    }

    pub fn is_trivial<G: AbelianGroup>(&self, target: &G) -> bool {
        self.images.iter().all(|&x| x == target.zero())
    }

    /// Whether the conductor is exactly the modulus.
    pub fn is_primitive<G: AbelianGroup>(&self, units: &UnitGroup, target: &G) -> bool {
        units.components.iter().enumerate().all(|(ci, c)| {
            if c.gens.is_empty() {
                return false;
            }
            if c.filtration.is_empty() {
                // Reduction to p^{k-1} kills the whole component.
                let off = units.offsets[ci];
                self.images[off..off + c.gens.len()].iter().any(|&x| x != target.zero())
            } else {
                self.eval_filtration(units, target, ci, c.k - 1) != target.zero()
            }
        })
    }

    /// `(p, Σ_χ f_p(χ ∘ ψ))` for each prime of the modulus: the exponent of
    /// `p` in the product of the conductors of all characters of `T`
    /// composed with this map.
    pub fn discriminant_exponents<G: AbelianGroup>(
        &self,
        units: &UnitGroup,
        target: &G,
        chars: &Characters,
    ) -> Vec<(u64, u32)> {
        units
            .components
            .iter()
            .enumerate()
            .map(|(ci, c)| {
                let off = units.offsets[ci];
                let gens = &self.images[off..off + c.gens.len()];
                let j0 = c.filtration_start();
                let filtration: Vec<usize> = (j0..c.k).map(|j| self.eval_filtration(units, target, ci, j)).collect();
                let total: u32 = (0..chars.len())
                    .map(|a| {
                        if gens.iter().all(|&x| chars.is_trivial_on(a, x)) {
                            return 0;
                        }
                        let below = filtration.iter().position(|&x| chars.is_trivial_on(a, x));
                        j0 + below.map_or(c.k - j0, |i| i as u32)
                    })
                    .sum();
                (c.p, total)
            })
            .collect()
    }

    /// `∏_χ cond(χ ∘ ψ)`, saturating at `u128::MAX`.
    pub fn discriminant<G: AbelianGroup>(&self, units: &UnitGroup, target: &G, chars: &Characters) -> u128 {
        self.discriminant_exponents(units, target, chars)
            .into_iter()
            .fold(1u128, |acc, (p, e)| acc.saturating_mul((p as u128).saturating_pow(e)))
    }
}

fn combine<G: AbelianGroup>(target: &G, exps: &[u64], images: &[usize]) -> usize {
    exps.iter()
        .zip(images)
        .fold(target.zero(), |acc, (&e, &x)| target.add(acc, target.multiple(e, x)))
}

/// The characters `χ_a(x) = exp(2πi Σ a_i x_i / d_i)` of a finite abelian
/// group, indexed by `a`, with a precomputed triviality table.
pub struct Characters {
    order: usize,
    trivial: Vec<bool>,
}

impl Characters {
    pub fn new(group: &FiniteAbelianGroup) -> Self {
        let n = group.order();
        let e = group.exponent();
        let tuples: Vec<Vec<u64>> = (0..n).map(|i| group.tuple(i)).collect();
        let mut trivial = vec![false; n * n];
        for a in 0..n {
            for x in 0..n {
                let s: u64 = tuples[a]
                    .iter()
                    .zip(&tuples[x])
                    .zip(group.invariant_factors())
                    .map(|((&ai, &xi), &d)| ai * xi % d * (e / d))
                    .sum();
                trivial[a * n + x] = s.is_multiple_of(e);
            }
        }
        Characters { order: n, trivial }
    }

    pub fn len(&self) -> usize {
        self.order
    }

    pub fn is_empty(&self) -> bool {
        self.order == 0
    }

    pub fn is_trivial_on(&self, a: usize, x: usize) -> bool {
        self.trivial[a * self.order + x]
    }

    /// Number of characters nontrivial on `x`: `|T| - |T|/ord(x)`.
    pub fn nontrivial_count(&self, x: usize) -> usize {
        (0..self.order).filter(|&a| !self.is_trivial_on(a, x)).count()
    }
}

fn component_images(
    units: &UnitGroup,
    target: &FiniteAbelianGroup,
    pool: &[usize],
    ci: usize,
    primitive: bool,
) -> Vec<Vec<usize>> {
    let c = &units.components[ci];
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for &(_, ord) in &c.gens {
        let opts: Vec<usize> = pool.iter().copied().filter(|&x| ord % target.element_order(x) == 0).collect();
        out = out
            .into_iter()
            .flat_map(|v| {
                opts.iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    if primitive {
        out.retain(|imgs| {
            if c.gens.is_empty() {
                false
            } else if let Some(top) = c.filtration.last() {
                combine(target, top, imgs) != target.zero()
            } else {
                imgs.iter().any(|&x| x != target.zero())
            }
        });
    }
    out
}

fn homs_from_components(
    units: &UnitGroup,
    target: &FiniteAbelianGroup,
    within: Option<&Subgroup>,
    primitive: bool,
) -> Vec<UnitGroupHom> {
    let pool: Vec<usize> = match within {
        Some(h) => h.elements().to_vec(),
        None => (0..target.order()).collect(),
    };
    let mut out = vec![Vec::new()];
    for ci in 0..units.components.len() {
        let parts = component_images(units, target, &pool, ci, primitive);
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                parts.iter().map(move |p| {
                    let mut w = v.clone();
                    w.extend_from_slice(p);
                    w
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|images| UnitGroupHom {
            modulus: units.modulus,
            images,
        })
        .collect()
}

/// All homomorphisms `(ℤ/mℤ)^× → T` with image inside `within` (all of `T`
/// when `None`).
pub fn all_homs(units: &UnitGroup, target: &FiniteAbelianGroup, within: Option<&Subgroup>) -> Vec<UnitGroupHom> {
    homs_from_components(units, target, within, false)
}

/// The homomorphisms of [`all_homs`] whose conductor is exactly the modulus.
pub fn primitive_homs(units: &UnitGroup, target: &FiniteAbelianGroup) -> Vec<UnitGroupHom> {
    homs_from_components(units, target, None, true)
}

/// Default largest modulus for explicit enumeration.
pub const DEFAULT_MODULUS_CAP: u64 = 1_000_000;

/// All homomorphisms `(ℤ/mℤ)^× → T` of conductor exactly `m`.
pub fn homs_with_conductor(target: &FiniteAbelianGroup, m: u64, cap: u64) -> Result<Vec<UnitGroupHom>> {
    if m > cap {
        return Err(Error::CapExceeded {
            what: "modulus",
            cap: cap as usize,
        });
    }
    let units = UnitGroup::new(m)?;
    Ok(primitive_homs(&units, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn fag(v: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(v.to_vec()).unwrap()
    }

    #[test]
    fn unit_group_structure() {
        for m in 1..300u64 {
            let u = UnitGroup::new(m).unwrap();
            let phi = (1..=m).filter(|x| x.gcd(&m) == 1).count() as u64;
            assert_eq!(u.order(), phi, "m = {m}");
            let gens = u.generators();
            let orders = u.generator_orders();
            for x in (1..=m).filter(|x| x.gcd(&m) == 1) {
                let e = u.dlog(x % m).unwrap();
                let back = e
                    .iter()
                    .zip(&gens)
                    .fold(1 % m, |acc, (&k, &g)| (acc as u128 * pow_mod(g, k, m) as u128 % m as u128) as u64);
                assert_eq!(back, x % m, "m = {m}, x = {x}");
            }
            for (g, o) in gens.iter().zip(&orders) {
                assert_eq!(pow_mod(*g, *o, m), 1 % m);
            }
        }
    }

    #[test]
    fn conductor_examples() {
        let c2 = fag(&[2]);
        let c3 = fag(&[3]);
        assert_eq!(homs_with_conductor(&c2, 1, 100).unwrap().len(), 1);
        assert_eq!(homs_with_conductor(&c2, 8, 100).unwrap().len(), 2);
        assert_eq!(homs_with_conductor(&c2, 4, 100).unwrap().len(), 1);
        assert_eq!(homs_with_conductor(&c2, 2, 100).unwrap().len(), 0);
        assert_eq!(homs_with_conductor(&c3, 7, 100).unwrap().len(), 2);
        assert_eq!(homs_with_conductor(&c3, 9, 100).unwrap().len(), 2);
        assert_eq!(homs_with_conductor(&c3, 5, 100).unwrap().len(), 0);
        assert!(homs_with_conductor(&c3, 101, 100).is_err());
    }

    #[test]
    fn primitive_filter_agrees() {
        let t = fag(&[2, 4]);
        for m in 1..300u64 {
            let u = UnitGroup::new(m).unwrap();
            let filtered: Vec<_> = all_homs(&u, &t, None).into_iter().filter(|h| h.is_primitive(&u, &t)).collect();
            assert_eq!(filtered, primitive_homs(&u, &t), "m = {m}");
        }
    }

    #[test]
    fn conductor_counts_partition_all_homs() {
        // Every hom of (ℤ/m)^× has a unique conductor d | m.
        let t = fag(&[2, 4]);
        for m in 1..200u64 {
            let total = all_homs(&UnitGroup::new(m).unwrap(), &t, None).len();
            let by_conductor: usize = (1..=m)
                .filter(|d| m % d == 0)
                .map(|d| homs_with_conductor(&t, d, 1000).unwrap().len())
                .sum();
            assert_eq!(total, by_conductor, "m = {m}");
        }
    }

    #[test]
    fn discriminant_examples() {
        let c2 = fag(&[2]);
        let c3 = fag(&[3]);
        let triv = &homs_with_conductor(&c2, 1, 10).unwrap()[0];
        assert_eq!(triv.discriminant(&UnitGroup::new(1).unwrap(), &c2, &Characters::new(&c2)), 1);
        let u8 = UnitGroup::new(8).unwrap();
        for h in homs_with_conductor(&c2, 8, 10).unwrap() {
            assert_eq!(h.discriminant(&u8, &c2, &Characters::new(&c2)), 8);
        }
        let u7 = UnitGroup::new(7).unwrap();
        for h in homs_with_conductor(&c3, 7, 10).unwrap() {
            assert_eq!(h.discriminant(&u7, &c3, &Characters::new(&c3)), 49);
        }
        let u9 = UnitGroup::new(9).unwrap();
        for h in homs_with_conductor(&c3, 9, 10).unwrap() {
            assert_eq!(h.discriminant(&u9, &c3, &Characters::new(&c3)), 81);
        }
        // Quadratic discriminants: conductor 4 → 4, conductor 3 → 3.
        let u4 = UnitGroup::new(4).unwrap();
        assert_eq!(homs_with_conductor(&c2, 4, 10).unwrap()[0].discriminant(&u4, &c2, &Characters::new(&c2)), 4);
    }

    #[test]
    fn character_counts() {
        let t = fag(&[2, 4]);
        let ch = Characters::new(&t);
        for x in 0..t.order() {
            let ord = t.element_order(x) as usize;
            assert_eq!(ch.nontrivial_count(x), 8 - 8 / ord);
        }
    }
}
