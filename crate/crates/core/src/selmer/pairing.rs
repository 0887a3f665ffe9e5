use serde::{Deserialize, Serialize};

use super::group::{AbelianGroup, FiniteAbelianGroup, Subgroup};
use crate::error::{Error, Result};

/// A bilinear pairing `left × right → ℤ/n`, `⟨x, y⟩ = Σ x_i M_ij y_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    left: FiniteAbelianGroup,
    right: FiniteAbelianGroup,
    modulus: u64,
    matrix: Vec<Vec<u64>>,
}

impl Pairing {
    pub fn new(
        left: FiniteAbelianGroup,
        right: FiniteAbelianGroup,
        modulus: u64,
        matrix: Vec<Vec<u64>>,
    ) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::PairingNotBilinear("modulus 0".into()));
        }
        if matrix.len() != left.rank() || matrix.iter().any(|r| r.len() != right.rank()) {
            return Err(Error::PairingNotBilinear(format!(
                "matrix must be {} × {}",
                left.rank(),
                right.rank()
            )));
        }
        for (i, row) in matrix.iter().enumerate() {
            let d = left.invariant_factors()[i];
            for (j, &m) in row.iter().enumerate() {
                let e = right.invariant_factors()[j];
                if !(d as u128 * m as u128).is_multiple_of(modulus as u128)
                    || !(e as u128 * m as u128).is_multiple_of(modulus as u128)
                {
                    return Err(Error::PairingNotBilinear(format!(
                        "entry ({i}, {j}) = {m} is not killed by both {d} and {e} mod {modulus}"
                    )));
                }
            }
        }
        let matrix = matrix
            .into_iter()
            .map(|r| r.into_iter().map(|m| m % modulus).collect())
            .collect();
        Ok(Pairing {
            left,
            right,
            modulus,
            matrix,
        })
    }

    /// The diagonal self-pairing of `g` into `ℤ/exp(g)`, which is perfect.
    pub fn standard(g: &FiniteAbelianGroup) -> Self {
        let n = g.exponent();
        let k = g.rank();
        let matrix = (0..k)
            .map(|i| (0..k).map(|j| if i == j { n / g.invariant_factors()[i] } else { 0 }).collect())
            .collect();
        Pairing {
            left: g.clone(),
            right: g.clone(),
            modulus: n,
            matrix,
        }
    }

    pub fn left(&self) -> &FiniteAbelianGroup {
        &self.left
    }

    pub fn right(&self) -> &FiniteAbelianGroup {
        &self.right
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn pair(&self, x: usize, y: usize) -> u64 {
        let xs = self.left.tuple(x);
        let ys = self.right.tuple(y);
        let n = self.modulus as u128;
        let mut acc = 0u128;
        for (i, &xi) in xs.iter().enumerate() {
            for (j, &yj) in ys.iter().enumerate() {
                acc = (acc + xi as u128 * self.matrix[i][j] as u128 % n * yj as u128) % n;
            }
        }
        acc as u64
    }

    fn right_orthogonal(&self, gens: &[usize]) -> Subgroup {
        Subgroup::filter(&self.right, |y| gens.iter().all(|&x| self.pair(x, y) == 0))
    }

    fn left_orthogonal(&self, gens: &[usize]) -> Subgroup {
        Subgroup::filter(&self.left, |x| gens.iter().all(|&y| self.pair(x, y) == 0))
    }

    pub fn is_perfect(&self) -> bool {
        self.left.order() == self.right.order()
            && self.left_orthogonal(&basis(&self.right)).order() == 1
            && self.right_orthogonal(&basis(&self.left)).order() == 1
    }

    fn require_perfect(&self) -> Result<()> {
        if self.is_perfect() {
            Ok(())
        } else {
            Err(Error::PairingNotPerfect)
        }
    }

    /// `{y : ⟨x, y⟩ = 0 for all x ∈ N}` for `N` a subgroup of the left group.
    pub fn annihilator(&self, n: &Subgroup) -> Result<Subgroup> {
        self.require_perfect()?;
        Ok(self.right_orthogonal(n.elements()))
    }

    /// `{x : ⟨x, y⟩ = 0 for all y ∈ M}` for `M` a subgroup of the right group.
    pub fn left_annihilator(&self, m: &Subgroup) -> Result<Subgroup> {
        self.require_perfect()?;
        Ok(self.left_orthogonal(m.elements()))
    }
}

/// Indices of the standard basis vectors.
fn basis(g: &FiniteAbelianGroup) -> Vec<usize> {
    (0..g.rank())
        .map(|i| {
            let mut t = vec![0; g.rank()];
            t[i] = 1;
            g.index(&t).expect("rank matches")
        })
        .collect()
}
