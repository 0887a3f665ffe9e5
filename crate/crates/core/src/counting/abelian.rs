use crate::error::Result;
use crate::perm::{PermGroup, Permutation};
use crate::selmer::{AbelianGroup, FiniteAbelianGroup, Subgroup};

/// Translation action of `T` on itself.
pub fn regular_permutation(t: &FiniteAbelianGroup, x: usize) -> Permutation {
    Permutation::from_images((0..t.order()).map(|y| t.add(y, x) as u32).collect()).expect("translation is a bijection")
}

pub fn regular_representation(t: &FiniteAbelianGroup) -> Result<PermGroup> {
    let gens: Vec<Permutation> = (0..t.rank())
        .map(|i| {
            let mut e = vec![0; t.rank()];
            e[i] = 1;
            regular_permutation(t, t.index(&e).expect("rank matches"))
        })
        .collect();
    PermGroup::generate(t.order(), gens)
}

/// Every subgroup, sorted by order.
pub fn all_subgroups(t: &FiniteAbelianGroup) -> Vec<Subgroup> {
    let cyclic: Vec<Subgroup> = {
        let mut v: Vec<Subgroup> = (0..t.order()).map(|x| Subgroup::span(t, &[x])).collect();
        v.sort();
        v.dedup();
        v
    };
    let mut all = cyclic.clone();
    let mut i = 0;
    while i < all.len() {
        for c in &cyclic {
            if !c.is_subgroup_of(&all[i]) {
                let j = all[i].join(t, c);
                if !all.contains(&j) {
                    all.push(j);
                }
            }
        }
        i += 1;
    }
    all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
    all
}

/// `|Aut(T)|`, by counting generating images of the standard basis.
pub fn automorphism_count(t: &FiniteAbelianGroup) -> u64 {
    let basis: Vec<u64> = t.invariant_factors().to_vec();
    let mut count = 0;
    let mut stack: Vec<Vec<usize>> = vec![vec![]];
    while let Some(partial) = stack.pop() {
        if partial.len() == basis.len() {
            if Subgroup::span(t, &partial).order() == t.order() {
                count += 1;
            }
            continue;
        }
        let d = basis[partial.len()];
        for x in 0..t.order() {
            if d.is_multiple_of(t.element_order(x)) {
                let mut next = partial.clone();
                next.push(x);
                stack.push(next);
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fag(v: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(v.to_vec()).unwrap()
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(all_subgroups(&fag(&[4])).len(), 3);
        assert_eq!(all_subgroups(&fag(&[2, 2])).len(), 5);
        assert_eq!(all_subgroups(&fag(&[3, 3])).len(), 6);
        assert_eq!(all_subgroups(&fag(&[2, 4])).len(), 8);
    }

    #[test]
    fn automorphisms() {
        assert_eq!(automorphism_count(&fag(&[2])), 1);
        assert_eq!(automorphism_count(&fag(&[4])), 2);
        assert_eq!(automorphism_count(&fag(&[2, 2])), 6);
        assert_eq!(automorphism_count(&fag(&[3, 3])), 48);
    }

    #[test]
    fn regular_rep_is_regular() {
        let t = fag(&[2, 2]);
        let g = regular_representation(&t).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_transitive());
        let v4 = PermGroup::from_cycles(4, &["(1 2)(3 4)", "(1 3)(2 4)"]).unwrap();
        assert_eq!(crate::invariants::a_invariant(&g).unwrap(), crate::invariants::a_invariant(&v4).unwrap());
    }
}
