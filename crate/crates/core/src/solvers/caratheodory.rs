//! Decomposition of a capped-simplex point into a convex combination of
//! m-subset indicator vectors.

use crate::error::{Error, Result};

const MEMBERSHIP_TOL: f64 = 1e-9;

/// Greedy decomposition: repeatedly take the m largest residual coordinates
/// and remove as much weight as keeps the residual inside the scaled polytope.
///
/// Subsets are returned as sorted 0-based index lists; at most d atoms.
pub fn caratheodory_decompose(x: &[f64], m: usize) -> Result<Vec<(Vec<usize>, f64)>> {
    let d = x.len();
    if m == 0 || m > d {
        return Err(Error::input(format!("caratheodory: need 1 ≤ m ≤ d, got m = {m}, d = {d}")));
    }
    let sum: f64 = x.iter().sum();
    if (sum - m as f64).abs() > MEMBERSHIP_TOL
        || x.iter().any(|&v| !(-MEMBERSHIP_TOL..=1.0 + MEMBERSHIP_TOL).contains(&v))
    {
        return Err(Error::input("caratheodory: point is outside the capped simplex"));
    }
    let mut r: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let mut w = 1.0_f64;
    let mut atoms = Vec::new();
    let mut order: Vec<usize> = (0..d).collect();
    for _ in 0..=d {
        if w <= 1e-13 {
            break;
        }
        order.sort_by(|&i, &j| r[j].total_cmp(&r[i]).then(i.cmp(&j)));
        let top = &order[..m];
        let min_in = top.iter().map(|&i| r[i]).fold(f64::INFINITY, f64::min);
        let max_out = order[m..].iter().map(|&i| r[i]).fold(0.0, f64::max);
        let alpha = min_in.min(w - max_out).clamp(0.0, w);
        if alpha <= 0.0 {
            break;
        }
        for &i in top {
            r[i] = (r[i] - alpha).max(0.0);
        }
        w -= alpha;
        let mut subset = top.to_vec();
        subset.sort_unstable();
        atoms.push((subset, alpha));
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if atoms.is_empty() || (total - 1.0).abs() > 1e-8 {
        return Err(Error::Solver { solver: "caratheodory", best_value: total, residual: w, iterate: r });
    }
    atoms.iter_mut().for_each(|a| a.1 /= total);
    Ok(atoms)
}

/// `Σ weight · e_subset`
pub fn reconstruct(atoms: &[(Vec<usize>, f64)], d: usize) -> Vec<f64> {
    let mut x = vec![0.0; d];
    for (s, w) in atoms {
        for &i in s {
            x[i] += w;
        }
    }
    x
}
