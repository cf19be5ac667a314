//! Invariant measures of row-stochastic matrices.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Damping toward the uniform chain; makes the invariant measure unique.
pub const DAMPING: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-8;
const POWER_ITERS: usize = 20_000;

/// Returns `a ∈ Δ_d` with `aᵀP = aᵀ`.
///
/// Power iteration runs on the lazy damped chain `½(I + P_ε)` with
/// `P_ε = (1−ε)P + ε·U`, starting from uniform; the lazy half-step removes
/// periodicity. If the undamped residual is still above 1e-8 the damped
/// system is solved directly by LU.
pub fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = p.len();
    if d == 0 || p.iter().any(|r| r.len() != d) {
        return Err(Error::input("stationary_distribution: matrix must be square and nonempty"));
    }
    for row in p {
        if row.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::input("stationary_distribution: negative or NaN entry"));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return Err(Error::input(format!("stationary_distribution: row sums to {s}")));
        }
    }
    let u = 1.0 / d as f64;
    let step = |a: &[f64]| -> Vec<f64> {
        let mut next = vec![0.0; d];
        for (i, row) in p.iter().enumerate() {
            for (j, &pij) in row.iter().enumerate() {
                next[j] += a[i] * pij;
            }
        }
        let total: f64 = a.iter().sum();
        next.iter_mut().zip(a).for_each(|(n, &ai)| *n = 0.5 * ((1.0 - DAMPING) * *n + DAMPING * total * u) + 0.5 * ai);
        next
    };
    let mut a = vec![u; d];
    for _ in 0..POWER_ITERS {
        let next = step(&a);
        let change: f64 = next.iter().zip(&a).map(|(x, y)| (x - y).abs()).sum();
        a = next;
        if change <= 1e-15 {
            break;
        }
    }
    normalize(&mut a);
    if residual(p, &a) <= RESIDUAL_TOL {
        return Ok(a);
    }
    let mut a = damped_lu(p)?;
    normalize(&mut a);
    let r = residual(p, &a);
    if r <= RESIDUAL_TOL {
        Ok(a)
    } else {
        Err(Error::Solver { solver: "stationary distribution", best_value: f64::NAN, residual: r, iterate: a })
    }
}

/// `‖aᵀP − aᵀ‖₁`
pub fn residual(p: &[Vec<f64>], a: &[f64]) -> f64 {
    let d = a.len();
    (0..d).map(|j| ((0..d).map(|i| a[i] * p[i][j]).sum::<f64>() - a[j]).abs()).sum()
}

fn normalize(a: &mut [f64]) {
    a.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = a.iter().sum();
    a.iter_mut().for_each(|v| *v /= s);
}

fn damped_lu(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = p.len();
    let u = 1.0 / d as f64;
    // (I − P_εᵀ) a = 0 with the last equation replaced by Σa = 1
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let pe = (1.0 - DAMPING) * p[j][i] + DAMPING * u;
            m[(i, j)] = if i == j { 1.0 - pe } else { -pe };
        }
    }
    for j in 0..d {
        m[(d - 1, j)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(d);
    rhs[d - 1] = 1.0;
    m.lu().solve(&rhs).map(|v| v.iter().copied().collect()).ok_or_else(|| Error::Solver {
        solver: "stationary distribution (LU)",
        best_value: f64::NAN,
        residual: f64::INFINITY,
        iterate: vec![u; d],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubly_stochastic_gives_uniform() {
        let p = vec![vec![0.2, 0.5, 0.3], vec![0.5, 0.1, 0.4], vec![0.3, 0.4, 0.3]];
        let a = stationary_distribution(&p).unwrap();
        for v in a {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_two_cycle() {
        let a = stationary_distribution(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((a[0] - 0.5).abs() < 1e-12 && (a[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_resolves_to_uniform() {
        let p: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let a = stationary_distribution(&p).unwrap();
        assert!(a.iter().all(|v| (v - 0.25).abs() < 1e-12));
    }

    #[test]
    fn matches_linear_solve() {
        // two-state chain with stationary (b, a)/(a + b)
        let (x, y) = (0.3, 0.1);
        let p = vec![vec![1.0 - x, x], vec![y, 1.0 - y]];
        let a = stationary_distribution(&p).unwrap();
        assert!((a[0] - y / (x + y)).abs() < 1e-10);
        assert!(residual(&p, &a) < 1e-12);
    }

    #[test]
    fn rejects_non_stochastic() {
        assert!(stationary_distribution(&[vec![0.5, 0.4], vec![0.5, 0.5]]).is_err());
    }
}
