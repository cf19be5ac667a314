//! Nonnegative least squares (Lawson–Hanson active set).

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Solves `min ‖Σ_j λ_j c_j − y‖₂` over `λ ≥ 0`, with `columns[j] = c_j`.
pub fn nnls(columns: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    let k = columns.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::input("nnls: column dimension mismatch"));
    }
    let a = DMatrix::from_fn(n, k, |i, j| columns[j][i]);
    let b = DVector::from_column_slice(y);
    let scale = 1.0 + a.amax() * b.amax();
    let tol = 1e-12 * scale;

    let mut x = DVector::<f64>::zeros(k);
    let mut passive = vec![false; k];
    let max_outer = 3 * k + 30;
    for _ in 0..max_outer {
        let w = a.transpose() * (&b - &a * &x);
        let candidate = (0..k).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else {
            return Ok(x.iter().map(|v| v.max(0.0)).collect());
        };
        passive[j] = true;
        loop {
            let s = solve_passive(&a, &b, &passive);
            let feasible = (0..k).filter(|&i| passive[i]).all(|i| s[i] > 0.0);
            if feasible {
                x = s;
                break;
            }
            // step back toward x until a passive coordinate hits zero
            let mut alpha = f64::INFINITY;
            for i in 0..k {
                if passive[i] && s[i] <= 0.0 {
                    let denom = x[i] - s[i];
                    if denom > 0.0 {
                        alpha = alpha.min(x[i] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            x = &x + (&s - &x) * alpha;
            for i in 0..k {
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    Err(Error::Solver {
        solver: "nnls",
        best_value: (&a * &x - &b).norm(),
        residual: f64::NAN,
        iterate: x.iter().copied().collect(),
    })
}

fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let idx: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
    let sub = a.select_columns(&idx);
    let svd = sub.svd(true, true);
    let sol = svd.solve(b, 1e-13).unwrap_or_else(|_| DVector::zeros(idx.len()));
    let mut out = DVector::zeros(passive.len());
    for (k, &i) in idx.iter().enumerate() {
        out[i] = sol[k];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cone_combination() {
        let cols = vec![vec![1.0, 0.0], vec![1.0, 1.0]];
        let l = nnls(&cols, &[3.0, 1.0]).unwrap();
        assert!((l[0] - 2.0).abs() < 1e-12 && (l[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clips_outside_directions() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let l = nnls(&cols, &[-1.0, 2.0]).unwrap();
        assert!(l[0].abs() < 1e-15 && (l[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_generators() {
        let cols = vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]];
        let l = nnls(&cols, &[1.0, -1.0]).unwrap();
        let fit = [l[0] + 2.0 * l[1] + l[2], l[2]];
        assert!((fit[0] - 1.0).abs() < 1e-12 && fit[1].abs() < 1e-12);
    }
}
