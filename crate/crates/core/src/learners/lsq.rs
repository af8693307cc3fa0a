//! Small dense least-squares solver for rule-indicator designs.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Pivots below this fraction of the largest Gram diagonal count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsFit {
    pub coefficients: Vec<f64>,
    /// Set when the design was rank deficient; the coefficients are then the
    /// minimal-norm solution.
    pub rank_deficient: bool,
}

/// Minimizes `sum_i (target[i] - sum_j columns[j][i] * c[j])^2`.
///
/// Full-rank designs go through the normal equations and a Cholesky solve;
/// rank-deficient ones fall back to an SVD pseudo-inverse.
pub fn least_squares_fit(columns: &[Vec<f64>], target: &[f64]) -> LsFit {
    let p = columns.len();
    if p == 0 {
        return LsFit { coefficients: Vec::new(), rank_deficient: false };
    }
    let mut gram = vec![0.0; p * p];
    let mut rhs = vec![0.0; p];
    for i in 0..p {
        for j in 0..=i {
            let g: f64 = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
            gram[i * p + j] = g;
            gram[j * p + i] = g;
        }
        rhs[i] = columns[i].iter().zip(target).map(|(a, b)| a * b).sum();
    }
    let max_diag = (0..p).map(|i| gram[i * p + i]).fold(0.0, f64::max);
    match cholesky_solve(&gram, &rhs, p, RANK_TOLERANCE * max_diag) {
        Some(coefficients) => LsFit { coefficients, rank_deficient: false },
        None => LsFit { coefficients: min_norm_solve(columns, target), rank_deficient: true },
    }
}

/// Solves `G x = b` for symmetric positive-definite `G`; `None` if a pivot
/// falls to `tol` or below.
fn cholesky_solve(gram: &[f64], rhs: &[f64], p: usize, tol: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| l[i * p + k] * l[j * p + k]).sum();
            let v = gram[i * p + j] - dot;
            if i == j {
                if v <= tol {
                    return None;
                }
                l[i * p + i] = v.sqrt();
            } else {
                l[i * p + j] = v / l[j * p + j];
            }
        }
    }
    let mut y = vec![0.0; p];
    for i in 0..p {
        let dot: f64 = (0..i).map(|k| l[i * p + k] * y[k]).sum();
        y[i] = (rhs[i] - dot) / l[i * p + i];
    }
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let dot: f64 = (i + 1..p).map(|k| l[k * p + i] * x[k]).sum();
        x[i] = (y[i] - dot) / l[i * p + i];
    }
    Some(x)
}

fn min_norm_solve(columns: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let n = target.len();
    let x = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]);
    let y = DVector::from_column_slice(target);
    let svd = x.svd(true, true);
    let eps = svd.singular_values.max() * 1e-9;
    svd.solve(&y, eps)
        .map(|c| c.iter().copied().collect())
        .unwrap_or_else(|_| vec![0.0; columns.len()])
}
