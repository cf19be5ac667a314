//! Euclidean projections onto simple convex sets and Dykstra's algorithm
//! for their intersections.

use crate::error::{Error, Result};
use crate::vector::{dot, norm1, norm2, norm_p};

pub const BISECTION_TOL: f64 = 1e-12;
pub const BISECTION_CAP: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    /// Probability simplex in dimension d.
    Simplex(usize),
    L1Ball {
        radius: f64,
    },
    LqBall {
        q: f64,
        radius: f64,
    },
    /// `{x ∈ [0,1]^d : Σx = m}`.
    CappedSimplex {
        d: usize,
        m: f64,
    },
    /// `⟨normal, x⟩ ≤ offset`.
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    /// Sign constraints: +1 means `x_i ≥ 0`, −1 means `x_i ≤ 0`, 0 means free.
    Orthant(Vec<i8>),
    /// `set` acting on coordinates `start..start + len`, the rest unconstrained.
    Slice {
        start: usize,
        len: usize,
        set: Box<FeasibleSet>,
    },
    Intersection(Vec<FeasibleSet>),
}

impl FeasibleSet {
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            FeasibleSet::Simplex(_) => x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol,
            FeasibleSet::L1Ball { radius } => norm1(x) <= radius + tol,
            FeasibleSet::LqBall { q, radius } => norm_p(x, *q) <= radius + tol,
            FeasibleSet::CappedSimplex { m, .. } => {
                x.iter().all(|&v| v >= -tol && v <= 1.0 + tol) && (x.iter().sum::<f64>() - m).abs() <= tol
            }
            FeasibleSet::Halfspace { normal, offset } => dot(normal, x) <= offset + tol,
            FeasibleSet::Orthant(signs) => signs.iter().zip(x).all(|(&s, &v)| f64::from(s) * v >= -tol),
            FeasibleSet::Slice { start, len, set } => set.contains(&x[*start..start + len], tol),
            FeasibleSet::Intersection(sets) => sets.iter().all(|s| s.contains(x, tol)),
        }
    }
}

/// Euclidean projection of `v` onto `set`.
pub fn project_onto(set: &FeasibleSet, v: &[f64], tol: f64) -> Result<Vec<f64>> {
    match set {
        FeasibleSet::Simplex(d) => {
            crate::error::check_dim("simplex projection", v.len(), *d)?;
            Ok(project_simplex(v, 1.0))
        }
        FeasibleSet::L1Ball { radius } => Ok(project_l1_ball(v, *radius)),
        FeasibleSet::LqBall { q, radius } => project_lq_ball(v, *q, *radius),
        FeasibleSet::CappedSimplex { d, m } => {
            crate::error::check_dim("capped simplex projection", v.len(), *d)?;
            project_capped_simplex(v, *m)
        }
        FeasibleSet::Halfspace { normal, offset } => {
            let excess = dot(normal, v) - offset;
            if excess <= 0.0 {
                return Ok(v.to_vec());
            }
            let nn = dot(normal, normal);
            if nn == 0.0 {
                return Err(Error::input("halfspace with zero normal and negative offset"));
            }
            Ok(v.iter().zip(normal).map(|(x, n)| x - excess / nn * n).collect())
        }
        FeasibleSet::Orthant(signs) => Ok(v
            .iter()
            .zip(signs)
            .map(|(&x, &s)| match s {
                1 => x.max(0.0),
                -1 => x.min(0.0),
                _ => x,
            })
            .collect()),
        FeasibleSet::Slice { start, len, set } => {
            let mut out = v.to_vec();
            let part = project_onto(set, &v[*start..start + len], tol)?;
            out[*start..start + len].copy_from_slice(&part);
            Ok(out)
        }
        FeasibleSet::Intersection(sets) => dykstra_project(sets, v, tol, 100_000),
    }
}

/// Sort-and-threshold projection onto `{x ≥ 0, Σx = s}`.
pub fn project_simplex(v: &[f64], s: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - s) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

pub fn project_l1_ball(v: &[f64], radius: f64) -> Vec<f64> {
    if norm1(v) <= radius {
        return v.to_vec();
    }
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let w = project_simplex(&abs, radius);
    w.iter().zip(v).map(|(a, x)| a.copysign(*x)).collect()
}

/// Bisection on the shift τ in `x = clip(v − τ, 0, 1)`.
pub fn project_capped_simplex(v: &[f64], m: f64) -> Result<Vec<f64>> {
    let d = v.len() as f64;
    if m < 0.0 || m > d {
        return Err(Error::input(format!("capped simplex needs 0 ≤ m ≤ {d}, got {m}")));
    }
    let total = |tau: f64| v.iter().map(|x| (x - tau).clamp(0.0, 1.0)).sum::<f64>();
    let mut lo = v.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let mut hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..BISECTION_CAP {
        if hi - lo <= BISECTION_TOL * (1.0 + hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if total(mid) > m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    let mut x: Vec<f64> = v.iter().map(|x| (x - tau).clamp(0.0, 1.0)).collect();
    // distribute the residual bisection error over the free coordinates
    let free: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 0.0 && x[i] < 1.0).collect();
    if !free.is_empty() {
        let r = (m - x.iter().sum::<f64>()) / free.len() as f64;
        for i in free {
            x[i] = (x[i] + r).clamp(0.0, 1.0);
        }
    }
    Ok(x)
}

/// Projection onto the ℓq ball. Closed forms for q ∈ {1, 2, ∞}; otherwise
/// nested bisection on the multiplier of `Σ|x_i|^q ≤ r^q`.
pub fn project_lq_ball(v: &[f64], q: f64, radius: f64) -> Result<Vec<f64>> {
    if !(q >= 1.0) || radius < 0.0 {
        return Err(Error::input(format!("invalid lq ball q = {q}, radius = {radius}")));
    }
    if norm_p(v, q) <= radius {
        return Ok(v.to_vec());
    }
    if q == 1.0 {
        return Ok(project_l1_ball(v, radius));
    }
    if q == 2.0 {
        let s = radius / norm2(v);
        return Ok(v.iter().map(|x| x * s).collect());
    }
    if q.is_infinite() {
        return Ok(v.iter().map(|x| x.clamp(-radius, radius)).collect());
    }
    if radius == 0.0 {
        return Ok(vec![0.0; v.len()]);
    }
    // x_i = sign(v_i) s_i where s_i + λ q s_i^{q−1} = |v_i|
    let coord = |a: f64, lambda: f64| -> f64 {
        let (mut lo, mut hi) = (0.0, a);
        for _ in 0..BISECTION_CAP {
            if hi - lo <= BISECTION_TOL * (1.0 + a) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid + lambda * q * mid.powf(q - 1.0) > a {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let target = radius.powf(q);
    let mass = |lambda: f64| v.iter().map(|x| coord(x.abs(), lambda).powf(q)).sum::<f64>();
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut grow = 0;
    while mass(hi) > target {
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::Solver {
                solver: "lq-ball projection",
                best_value: hi,
                residual: mass(hi) - target,
                iterate: v.to_vec(),
            });
        }
    }
    for _ in 0..BISECTION_CAP {
        if hi - lo <= BISECTION_TOL * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mass(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(v.iter().map(|x| coord(x.abs(), hi).copysign(*x)).collect())
}

/// Dykstra's alternating projections onto the intersection of `sets`.
///
/// Stops once a full cycle moves the iterate by at most `tol` (Euclidean).
pub fn dykstra_project(sets: &[FeasibleSet], v: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    if sets.is_empty() {
        return Ok(v.to_vec());
    }
    let n = v.len();
    let mut x = v.to_vec();
    let mut incr = vec![vec![0.0; n]; sets.len()];
    let mut displacement = f64::INFINITY;
    for _ in 0..max_iter {
        let start = x.clone();
        for (k, set) in sets.iter().enumerate() {
            let y: Vec<f64> = x.iter().zip(&incr[k]).map(|(a, b)| a + b).collect();
            let p = project_onto(set, &y, tol)?;
            for i in 0..n {
                incr[k][i] = y[i] - p[i];
            }
            x = p;
        }
        displacement = norm2(&crate::vector::sub(&x, &start));
        if displacement <= tol {
            return Ok(x);
        }
    }
    Err(Error::Solver { solver: "dykstra", best_value: f64::NAN, residual: displacement, iterate: x })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    // Brute force: nearest grid point of the set, step h.
    fn grid_nearest_2d(v: &[f64], h: f64, inside: impl Fn(f64, f64) -> bool) -> (f64, f64) {
        let n = (2.0 / h) as i64;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in -n..=n {
            for j in -n..=n {
                let (x, y) = (i as f64 * h, j as f64 * h);
                if inside(x, y) {
                    let dist = (x - v[0]).powi(2) + (y - v[1]).powi(2);
                    if dist < best.0 {
                        best = (dist, x, y);
                    }
                }
            }
        }
        (best.1, best.2)
    }

    #[test]
    fn simplex_example() {
        let p = project_onto(&FeasibleSet::Simplex(2), &[0.5, 0.9], 1e-12).unwrap();
        assert!(close(&p, &[0.3, 0.7], 1e-12));
        // the nearest point on the segment, sampled at 1e-3
        let best = (0..=1000)
            .map(|k| {
                let a = k as f64 / 1000.0;
                ((a - 0.5).powi(2) + (1.0 - a - 0.9).powi(2), a)
            })
            .fold((f64::INFINITY, 0.0), |m, c| if c.0 < m.0 { c } else { m });
        assert!((best.1 - 0.3).abs() < 1e-3);
    }

    #[test]
    fn l1_and_l2_examples() {
        let p = project_onto(&FeasibleSet::L1Ball { radius: 1.0 }, &[2.0, 0.0], 1e-12).unwrap();
        assert!(close(&p, &[1.0, 0.0], 1e-15));
        let p = project_onto(&FeasibleSet::LqBall { q: 2.0, radius: 1.0 }, &[3.0, 4.0], 1e-12).unwrap();
        assert!(close(&p, &[0.6, 0.8], 1e-15));
    }

    #[test]
    fn capped_simplex_example() {
        let set = FeasibleSet::CappedSimplex { d: 3, m: 2.0 };
        let p = project_onto(&set, &[2.0, 0.5, 0.5], 1e-12).unwrap();
        assert!(close(&p, &[1.0, 0.5, 0.5], 1e-10));
        // brute-force QP on a grid: x1 ∈ [0,1], x2 ∈ [0,1], x3 = 2 − x1 − x2
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=200 {
            for j in 0..=200 {
                let (a, b) = (i as f64 / 200.0, j as f64 / 200.0);
                let c = 2.0 - a - b;
                if (0.0..=1.0).contains(&c) {
                    let dist = (a - 2.0).powi(2) + (b - 0.5).powi(2) + (c - 0.5).powi(2);
                    if dist < best.0 {
                        best = (dist, a, b);
                    }
                }
            }
        }
        assert!((best.1 - 1.0).abs() < 1e-9 && (best.2 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn generic_lq_matches_grid() {
        let v = [1.3, -0.7];
        let p = project_lq_ball(&v, 3.0, 1.0).unwrap();
        assert!((norm_p(&p, 3.0) - 1.0).abs() < 1e-9);
        let g = grid_nearest_2d(&v, 1e-3, |x, y| x.abs().powi(3) + y.abs().powi(3) <= 1.0);
        // the projection is at least as close as every sampled feasible point
        let dp = ((p[0] - v[0]).powi(2) + (p[1] - v[1]).powi(2)).sqrt();
        let dg = ((g.0 - v[0]).powi(2) + (g.1 - v[1]).powi(2)).sqrt();
        assert!(dp <= dg + 1e-12 && dg - dp < 1e-3, "{p:?} vs grid {g:?}");
        // q near 2 agrees with radial scaling
        let p = project_lq_ball(&[3.0, 4.0], 2.0 + 1e-9, 1.0).unwrap();
        assert!(close(&p, &[0.6, 0.8], 1e-6));
    }

    #[test]
    fn dykstra_examples() {
        let sets = vec![
            FeasibleSet::Halfspace { normal: vec![-1.0, 0.0], offset: 0.0 },
            FeasibleSet::Halfspace { normal: vec![0.0, -1.0], offset: 0.0 },
            FeasibleSet::LqBall { q: 2.0, radius: 1.0 },
        ];
        let p = dykstra_project(&sets, &[1.5, -0.5], 1e-12, 10_000).unwrap();
        assert!(close(&p, &[1.0, 0.0], 1e-9));
        let p = dykstra_project(&sets, &[0.3, 0.4], 1e-12, 10_000).unwrap();
        assert!(close(&p, &[0.3, 0.4], 1e-15));
        let sets = vec![
            FeasibleSet::Halfspace { normal: vec![1.0], offset: 0.0 },
            FeasibleSet::Halfspace { normal: vec![-1.0], offset: 0.0 },
        ];
        let p = dykstra_project(&sets, &[3.0], 1e-12, 10_000).unwrap();
        assert!(p[0].abs() < 1e-12);
    }

    #[test]
    fn slices_act_on_their_block() {
        let set = FeasibleSet::Slice { start: 1, len: 2, set: Box::new(FeasibleSet::Simplex(2)) };
        let p = project_onto(&set, &[7.0, 0.5, 0.9], 1e-12).unwrap();
        assert!(close(&p, &[7.0, 0.3, 0.7], 1e-12));
    }
}
