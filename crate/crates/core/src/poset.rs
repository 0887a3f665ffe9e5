//! Möbius functions: the classical arithmetic one and the recursive
//! definition on a finite poset.

use std::collections::HashMap;

/// Arithmetic Möbius function.
pub fn mobius(n: u64) -> i64 {
    assert!(n > 0, "mobius(0) is undefined");
    let mut sign = 1;
    for (_, k) in crate::primes::factorize(n) {
        if k > 1 {
            return 0;
        }
        sign = -sign;
    }
    sign
}

/// Möbius function of a finite poset with `size` elements and order
/// relation `le`, from the recursive definition
/// `μ(x, x) = 1`, `μ(x, y) = -Σ_{x ≤ z < y} μ(x, z)`.
///
/// Memoized per call; cost grows with the size of the interval.
pub fn mobius_recursive<F: Fn(usize, usize) -> bool>(size: usize, le: F, x: usize, y: usize) -> i64 {
    let mut memo = HashMap::new();
    recurse(size, &le, x, y, &mut memo)
}

fn recurse<F: Fn(usize, usize) -> bool>(
    size: usize,
    le: &F,
    x: usize,
    y: usize,
    memo: &mut HashMap<usize, i64>,
) -> i64 {
    if !le(x, y) {
        return 0;
    }
    if x == y {
        return 1;
    }
    if let Some(&v) = memo.get(&y) {
        return v;
    }
    let mut total = 0;
    for z in 0..size {
        if z != y && le(x, z) && le(z, y) {
            total += recurse(size, le, x, z, memo);
        }
    }
    memo.insert(y, -total);
    -total
}

/// `μ(x, top)` for every `x`, top-down over a poset. Linear in the number
/// of comparable pairs; used for sieving over subgroup lattices.
pub fn mobius_to_top<F: Fn(usize, usize) -> bool>(size: usize, le: F, top: usize) -> Vec<i64> {
    // Process elements by decreasing number of elements above them, so that
    // every z with x < z ≤ top is done before x.
    let up: Vec<usize> = (0..size).map(|x| (0..size).filter(|&z| le(x, z)).count()).collect();
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by_key(|&x| up[x]);
    let mut mu = vec![0i64; size];
    for &x in &order {
        if !le(x, top) {
            continue;
        }
        if x == top {
            mu[x] = 1;
            continue;
        }
        mu[x] = -(0..size)
            .filter(|&z| z != x && le(x, z) && le(z, top))
            .map(|z| mu[z])
            .sum::<i64>();
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let expected = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, &m) in expected.iter().enumerate() {
            assert_eq!(mobius(i as u64 + 1), m);
        }
    }

    #[test]
    fn divisor_lattice_matches_arithmetic() {
        let n = 360u64;
        let divs: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
        let le = |i: usize, j: usize| divs[j].is_multiple_of(divs[i]);
        let top = divs.len() - 1;
        let to_top = mobius_to_top(divs.len(), le, top);
        for (i, &d) in divs.iter().enumerate() {
            assert_eq!(mobius_recursive(divs.len(), le, i, top), mobius(n / d));
            assert_eq!(to_top[i], mobius(n / d));
        }
    }

    #[test]
    fn boolean_lattice() {
        // Subsets of a 3-set: μ(∅, S) = (-1)^{|S|}.
        let le = |a: usize, b: usize| a & b == a;
        for s in 0..8usize {
            assert_eq!(mobius_recursive(8, le, 0, s), (-1i64).pow(s.count_ones()));
        }
    }
}
