//! Closed-form `min_{a∈Δ_d} ‖a ⊙ y'‖_p` for nonnegative `y'`.
//!
//! Lagrange conditions give `a_i ∝ y'_i^{−q}` with `q` the conjugate
//! exponent, so the minimum is `(Σ y'_i^{−q})^{−1/q}`. A zero coordinate
//! makes the minimum 0, attained by putting all weight on it.

use crate::error::{Error, Result};
use crate::vector::conjugate_exponent;

pub fn min_weighted_lp_norm(y: &[f64], p: f64) -> Result<(f64, Vec<f64>)> {
    if y.is_empty() {
        return Err(Error::input("min_weighted_lp_norm: empty vector"));
    }
    if !(p > 1.0) {
        return Err(Error::input(format!("min_weighted_lp_norm: need p > 1, got {p}")));
    }
    if let Some(i) = y.iter().position(|&v| !(v >= 0.0)) {
        return Err(Error::input(format!("min_weighted_lp_norm: entry {i} is negative ({})", y[i])));
    }
    let d = y.len();
    if let Some(i) = y.iter().position(|&v| v == 0.0) {
        let mut a = vec![0.0; d];
        a[i] = 1.0;
        return Ok((0.0, a));
    }
    let q = conjugate_exponent(p);
    // work relative to the smallest entry to avoid overflow of y^{−q}
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = y.iter().map(|&v| (ymin / v).powf(q)).collect();
    let s: f64 = w.iter().sum();
    let phi = ymin * s.powf(-1.0 / q);
    let a = w.into_iter().map(|v| v / s).collect();
    Ok((phi, a))
}

/// `φ_p(y')` and its gradient on the open orthant.
///
/// `∂φ/∂y_i = φ^{q+1} y_i^{−q−1}`, which is unbounded as `y_i → 0`.
pub fn phi_with_gradient(y: &[f64], p: f64) -> Result<(f64, Vec<f64>)> {
    let (phi, a) = min_weighted_lp_norm(y, p)?;
    if phi == 0.0 {
        let g = y.iter().map(|&v| if v == 0.0 { f64::INFINITY } else { 0.0 }).collect();
        return Ok((0.0, g));
    }
    // a_i = φ^q y_i^{−q}, so the gradient is a_i φ / y_i
    Ok((phi, a.iter().zip(y).map(|(ai, yi)| ai * phi / yi).collect()))
}
