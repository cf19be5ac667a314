//! Projected gradient ascent for smooth concave maximization.

use super::projection::{project_onto, FeasibleSet};
use crate::error::{Error, Result};
use crate::vector::{norm2, sub};

const ARMIJO: f64 = 0.3;
const MAX_STEP: f64 = 1e8;

#[derive(Debug, Clone, Copy)]
pub struct PgaOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
}

impl Default for PgaOptions {
    fn default() -> Self {
        PgaOptions { tol: 1e-9, max_iter: 20_000, initial_step: 1.0 }
    }
}

/// Maximizes a concave `f` over `set` starting from `x0`.
///
/// `f` returns the value and gradient. Steps follow an Armijo backtracking
/// rule along the projection arc and grow again after each accepted step.
/// Stops once the projected-gradient residual `‖x − P(x + g)‖` drops to
/// `tol`, or when the objective gains less than `tol/10` over 20 iterations.
pub fn pga_maximize<F>(f: F, set: &FeasibleSet, x0: &[f64], opts: PgaOptions) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let tol = opts.tol;
    let inner_tol = (tol * 1e-3).max(1e-14);
    let mut x = project_onto(set, x0, inner_tol)?;
    let (mut fx, mut g) = f(&x);
    let mut step = opts.initial_step;
    let mut history: Vec<f64> = Vec::with_capacity(21);
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let probe: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + b).collect();
        residual = norm2(&sub(&x, &project_onto(set, &probe, inner_tol)?));
        if residual <= tol {
            return Ok(x);
        }
        history.push(fx);
        if history.len() > 20 {
            history.remove(0);
            if fx - history[0] < tol / 10.0 {
                return Ok(x);
            }
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let xn = project_onto(set, &trial, inner_tol)?;
            let dx = sub(&xn, &x);
            let (fn_, gn) = f(&xn);
            let ascent: f64 = dx.iter().zip(&g).map(|(a, b)| a * b).sum();
            if fn_.is_finite() && fn_ >= fx + ARMIJO * ascent - 1e-15 * fx.abs() {
                accepted = true;
                x = xn;
                fx = fn_;
                g = gn;
                step = (2.0 * step).min(MAX_STEP);
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no ascent available at machine precision
            return Ok(x);
        }
    }
    Err(Error::Solver { solver: "projected gradient ascent", best_value: fx, residual, iterate: x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_on_ball() {
        let f = |x: &[f64]| {
            let v = -((x[0] - 2.0).powi(2) + x[1].powi(2));
            (v, vec![-2.0 * (x[0] - 2.0), -2.0 * x[1]])
        };
        let set = FeasibleSet::LqBall { q: 2.0, radius: 1.0 };
        let x = pga_maximize(f, &set, &[0.0, 0.5], PgaOptions::default()).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-7 && x[1].abs() < 1e-7);
    }

    #[test]
    fn linear_on_simplex_hits_vertex() {
        let f = |x: &[f64]| (x[1], vec![0.0, 1.0, 0.0]);
        let x = pga_maximize(f, &FeasibleSet::Simplex(3), &[1.0 / 3.0; 3], PgaOptions::default()).unwrap();
        assert!((x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropic_objective_matches_softmax() {
        let y = [0.3, -1.2, 0.8];
        let f = |x: &[f64]| {
            let mut v = 0.0;
            let mut g = vec![0.0; 3];
            for i in 0..3 {
                v += y[i] * x[i] - if x[i] > 0.0 { x[i] * x[i].ln() } else { 0.0 };
                // floor keeps the boundary slope finite
                g[i] = y[i] - x[i].max(1e-16).ln() - 1.0;
            }
            (v, g)
        };
        let opts = PgaOptions { tol: 1e-10, ..Default::default() };
        let x = pga_maximize(f, &FeasibleSet::Simplex(3), &[1.0 / 3.0; 3], opts).unwrap();
        let s = crate::vector::softmax(&y);
        for i in 0..3 {
            assert!((x[i] - s[i]).abs() < 1e-6, "{x:?} vs {s:?}");
        }
    }
}
