use serde::Serialize;
use statrs::function::gamma::gamma;

use super::expand::DirichletCoefficients;
use crate::error::Result;
use crate::Rational;

/// Predicted main term `c · X^{1/a} · (log X)^{b-1}`.
///
/// When `b` is a nonpositive integer there is no main term of this shape and
/// `constant` is `None`; the sum is then `O(X^{1/a} (log X)^{-1+ε})`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelangePrediction {
    pub a: u32,
    #[serde(with = "crate::rational")]
    pub b: Rational,
    pub x_power: f64,
    #[serde(with = "crate::rational")]
    pub log_power: Rational,
    pub constant: Option<f64>,
    pub degenerate: bool,
}

impl DelangePrediction {
    /// The main term at `x`, if one exists.
    pub fn main_term(&self, x: f64) -> Option<f64> {
        let lp = to_f64(self.log_power);
        self.constant.map(|c| c * x.powf(self.x_power) * x.ln().powf(lp))
    }
}

fn to_f64(q: Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// `c = G · residue^b / (a^b Γ(b))`.
pub fn delange_predict(a: u32, b: Rational, g_at_pole: f64, residue: f64) -> DelangePrediction {
    let degenerate = b.is_integer() && *b.numer() <= 0;
    let bf = to_f64(b);
    let constant = (!degenerate)
        .then(|| g_at_pole * residue.powf(bf) / ((a as f64).powf(bf) * gamma(bf)));
    DelangePrediction {
        a,
        b,
        x_power: 1.0 / a as f64,
        log_power: b - 1,
        constant,
        degenerate,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub x: usize,
    #[serde(with = "crate::rational")]
    pub actual: Rational,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    /// Last ratio minus first ratio, when both exist.
    pub ratio_drift: Option<f64>,
}

/// Partial sums of `coeffs` against the predicted main term on a grid.
pub fn partial_sum_compare(
    coeffs: &DirichletCoefficients,
    prediction: &DelangePrediction,
    grid: &[usize],
) -> Result<ComparisonTable> {
    let sums = coeffs.partial_sums(grid)?;
    let rows: Vec<ComparisonRow> = grid
        .iter()
        .zip(sums)
        .map(|(&x, actual)| {
            // log 1 = 0 makes the main term vanish or blow up at X = 1.
            let predicted = if x > 1 { prediction.main_term(x as f64) } else { None };
            let ratio = predicted.filter(|p| *p != 0.0).map(|p| to_f64(actual) / p);
            ComparisonRow {
                x,
                actual,
                predicted,
                ratio,
            }
        })
        .collect();
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let ratio_drift = match (ratios.first(), ratios.last()) {
        (Some(f), Some(l)) if ratios.len() > 1 => Some(l - f),
        _ => None,
    };
    Ok(ComparisonTable { rows, ratio_drift })
}
