use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of `log N = α log X + β log log X + c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub a_hat: f64,
    pub b_hat: f64,
    pub alpha: f64,
    pub beta: f64,
    pub intercept: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 8;
pub const MIN_FIT_DECADES: f64 = 3.0;

/// Fits the shape `X^{1/a} (log X)^{b-1}`; points with `N = 0` or `X ≤ e`
/// are skipped. Needs at least 8 usable points spanning 3 decades.
pub fn fit_exponents(grid: &[u64], counts: &[u128]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(counts)
        .filter(|&(&x, &n)| n > 0 && (x as f64) > std::f64::consts::E)
        .map(|(&x, &n)| (x as f64, n as f64))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateGrid(format!(
            "{} usable points, need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    let span = (pts.last().expect("nonempty").0 / pts[0].0).log10();
    if span < MIN_FIT_DECADES {
        return Err(Error::DegenerateGrid(format!(
            "grid spans {span:.2} decades, need {MIN_FIT_DECADES}"
        )));
    }
    let a = DMatrix::from_fn(pts.len(), 3, |i, j| {
        let lx = pts[i].0.ln();
        match j {
            0 => lx,
            1 => lx.ln(),
            _ => 1.0,
        }
    });
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1.ln()));
    let sol = a
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::DegenerateGrid(e.to_string()))?;
    let (alpha, beta, intercept) = (sol[0], sol[1], sol[2]);
    Ok(ExponentFit {
        a_hat: 1.0 / alpha,
        b_hat: beta + 1.0,
        alpha,
        beta,
        intercept,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::log_grid;

    fn synthetic(f: impl Fn(f64) -> f64) -> (Vec<u64>, Vec<u128>) {
        let grid = log_grid(100, 100_000_000_000, 2).unwrap();
        let counts = grid.iter().map(|&x| f(x as f64).round() as u128).collect();
        (grid, counts)
    }

    #[test]
    fn exact_power_law() {
        let (g, c) = synthetic(|x| x);
        let fit = fit_exponents(&g, &c).unwrap();
        assert!((fit.a_hat - 1.0).abs() < 1e-3);
        assert!((fit.b_hat - 1.0).abs() < 1e-2);
    }

    #[test]
    fn square_root_log_squared() {
        let (g, c) = synthetic(|x| 1000.0 * x.sqrt() * x.ln().powi(2));
        let fit = fit_exponents(&g, &c).unwrap();
        assert!((fit.a_hat - 2.0).abs() < 1e-3, "{fit:?}");
        assert!((fit.b_hat - 3.0).abs() < 1e-2, "{fit:?}");
    }

    #[test]
    fn degenerate_grids() {
        let grid: Vec<u64> = (1..=5).map(|i| 10u64.pow(i)).collect();
        let counts = vec![1u128; 5];
        assert!(matches!(fit_exponents(&grid, &counts), Err(Error::DegenerateGrid(_))));
        let grid: Vec<u64> = (0..10).map(|i| 1000 + 10 * i).collect();
        let counts = vec![1u128; 10];
        assert!(matches!(fit_exponents(&grid, &counts), Err(Error::DegenerateGrid(_))));
    }
}
