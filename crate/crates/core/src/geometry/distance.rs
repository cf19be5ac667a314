//! Distance to a cone by direct projection or a primal search.
//!
//! This deliberately avoids the support-function machinery so the two can
//! be compared against each other.

use super::cone::ConeSpec;
use super::norm::NormTag;
use crate::error::{check_dim, Error, Result};
use crate::vector::{dot, sub};
use nalgebra::DMatrix;

/// Largest dimension handled by the ellipsoid search.
pub const MAX_SAMPLED_DIM: usize = 4;

/// `inf_{y'∈C} ‖y' − y‖` in the given norm.
///
/// Sign-constrained orthants project by clipping, which is exact for every
/// ℓp norm. Other polyhedral cones in low dimension are handled by a
/// central-cut ellipsoid method on the primal problem: over the cone
/// itself for halfspace cones, and over the nonnegative ray weights for
/// finitely generated cones with independent rays.
pub fn distance_to_cone(y: &[f64], cone: &ConeSpec, norm: &NormTag, tol: f64) -> Result<f64> {
    check_dim("distance_to_cone", y.len(), cone.dim())?;
    match cone {
        ConeSpec::Orthant { .. } if matches!(norm, NormTag::Lp { .. }) => {
            let p = cone.project(y)?;
            Ok(norm.eval(&sub(y, &p)))
        }
        _ if cone.is_trivial() => Ok(norm.eval(y)),
        ConeSpec::HalfspaceIntersection { dim, normals } if *dim <= MAX_SAMPLED_DIM => {
            // the minimizer is within 2‖y‖ of the origin
            let radius = 2.0 * euclid_bound(y, norm);
            let violated = |v: &[f64]| normals.iter().find(|n| dot(n, v) > 0.0).cloned();
            let objective = |v: &[f64]| (norm.eval(&sub(v, y)), norm_subgradient(norm, &sub(v, y)));
            Ok(ellipsoid_minimize(*dim, radius, &violated, &objective, tol))
        }
        ConeSpec::FinitelyGenerated { dim, rays } if rays.len() <= MAX_SAMPLED_DIM => {
            let k = rays.len();
            let r = DMatrix::from_fn(*dim, k, |i, j| rays[j][i]);
            let sv = r.clone().svd(false, false).singular_values;
            let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
            if k > *dim || smin < 1e-6 {
                return Err(Error::capability("brute-force distance needs independent rays"));
            }
            // ‖Rλ‖₂ ≤ 2‖y‖ in Euclidean terms bounds ‖λ‖₂ through σ_min
            let radius = 2.0 * euclid_bound(y, norm) / smin;
            // one ray is searched in two variables, the second one inert
            let n = k.max(2);
            let combine = |l: &[f64]| {
                let mut v = vec![0.0; *dim];
                for (lj, ray) in l.iter().zip(rays) {
                    crate::vector::axpy(&mut v, *lj, ray);
                }
                v
            };
            let violated = |l: &[f64]| {
                (0..k).find(|&j| l[j] < 0.0).map(|j| {
                    let mut g = vec![0.0; n];
                    g[j] = -1.0;
                    g
                })
            };
            let objective = |l: &[f64]| {
                let res = sub(&combine(l), y);
                let s = norm_subgradient(norm, &res);
                let mut g = vec![0.0; n];
                for (j, ray) in rays.iter().enumerate() {
                    g[j] = dot(ray, &s);
                }
                (norm.eval(&res), g)
            };
            Ok(ellipsoid_minimize(n, radius, &violated, &objective, tol))
        }
        _ => Err(Error::capability(format!("no brute-force distance for this cone at dimension {}", cone.dim()))),
    }
}

/// Upper bound on `‖y‖₂` for the norms handled here.
fn euclid_bound(y: &[f64], norm: &NormTag) -> f64 {
    // ‖·‖₂ ≤ √n ‖·‖_∞ ≤ √n ‖·‖ for every ℓp and both composite norms
    let n = y.len() as f64;
    (n.sqrt() * norm.eval(y)).max(crate::vector::norm2(y)).max(1e-12)
}

/// A subgradient of the norm at `r`.
fn norm_subgradient(norm: &NormTag, r: &[f64]) -> Vec<f64> {
    match *norm {
        NormTag::Lp { p } => lp_subgradient(p, r),
        NormTag::GlobalCostPrimal { d, p } => {
            let mut g = lp_subgradient(p, &r[..d]);
            g.extend(lp_subgradient(f64::INFINITY, &r[d..]));
            g
        }
        NormTag::GlobalCostDual { d, q } => {
            let (a, b) = (crate::vector::norm_p(&r[..d], q), crate::vector::norm1(&r[d..]));
            let mut g = vec![0.0; r.len()];
            if a >= b {
                g[..d].copy_from_slice(&lp_subgradient(q, &r[..d]));
            } else {
                g[d..].copy_from_slice(&lp_subgradient(1.0, &r[d..]));
            }
            g
        }
    }
}

fn lp_subgradient(p: f64, r: &[f64]) -> Vec<f64> {
    let nr = crate::vector::norm_p(r, p);
    if nr == 0.0 {
        return vec![0.0; r.len()];
    }
    if p == 1.0 {
        r.iter().map(|v| v.signum() * (*v != 0.0) as u8 as f64).collect()
    } else if p.is_infinite() {
        let i = (0..r.len()).max_by(|&a, &b| r[a].abs().total_cmp(&r[b].abs())).unwrap();
        let mut g = vec![0.0; r.len()];
        g[i] = r[i].signum();
        g
    } else {
        r.iter().map(|v| v.signum() * (v.abs() / nr).powf(p - 1.0)).collect()
    }
}

/// Central-cut ellipsoid method for a convex function on a convex set,
/// starting from the Euclidean ball of the given radius. `violated`
/// returns a separating normal for infeasible points. Stops once the
/// objective cut certifies a gap below `tol`.
fn ellipsoid_minimize<V, F>(n: usize, radius: f64, violated: &V, objective: &F, tol: f64) -> f64
where
    V: Fn(&[f64]) -> Option<Vec<f64>>,
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let nf = n as f64;
    let mut x = nalgebra::DVector::<f64>::zeros(n);
    let mut p = DMatrix::<f64>::identity(n, n) * (radius * radius);
    let mut best = f64::INFINITY;
    let stop = tol.max(1e-13);
    for _ in 0..20_000 {
        let xs = x.as_slice();
        let g = match violated(xs) {
            Some(g) => g,
            None => {
                let (f, g) = objective(xs);
                best = best.min(f);
                g
            }
        };
        let g = nalgebra::DVector::from_vec(g);
        let pg = &p * &g;
        let gpg = g.dot(&pg);
        if !(gpg > 0.0) {
            // zero subgradient at a feasible point: optimal
            break;
        }
        let width = gpg.sqrt();
        if violated(xs).is_none() && width < stop {
            break;
        }
        let b = pg / width;
        x -= &b * (1.0 / (nf + 1.0));
        p = (&p - (&b * b.transpose()) * (2.0 / (nf + 1.0))) * (nf * nf / (nf * nf - 1.0));
        p = (&p + p.transpose()) * 0.5;
    }
    best
}

/// `(proj_C y, proj_{C°} y)`.
pub fn moreau_decompose(y: &[f64], cone: &ConeSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = cone.project(y)?;
    let q = sub(y, &p);
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_examples() {
        let c = ConeSpec::nonpos_orthant(2);
        let d = distance_to_cone(&[1.0, 1.0], &c, &NormTag::l2(), 1e-9).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(distance_to_cone(&[-1.0, -1.0], &c, &NormTag::l2(), 1e-9).unwrap(), 0.0);
        let d = distance_to_cone(&[1.0, -2.0], &c, &NormTag::l2(), 1e-9).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn primal_search_matches_projection() {
        // the nonpositive orthant written as halfspaces and as rays
        let h = ConeSpec::halfspaces(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let f = ConeSpec::finitely_generated(vec![vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        for y in [[1.0, 1.0], [1.0, -2.0], [-0.3, 0.2]] {
            let exact = distance_to_cone(&y, &ConeSpec::nonpos_orthant(2), &NormTag::l2(), 0.0).unwrap();
            for c in [&h, &f] {
                let d = distance_to_cone(&y, c, &NormTag::l2(), 1e-8).unwrap();
                assert!((d - exact).abs() < 1e-6, "{y:?}: {d} vs {exact}");
            }
        }
    }

    #[test]
    fn moreau_examples() {
        let c = ConeSpec::nonpos_orthant(2);
        assert_eq!(moreau_decompose(&[3.0, -1.0], &c).unwrap(), (vec![0.0, -1.0], vec![3.0, 0.0]));
        assert_eq!(moreau_decompose(&[-2.0, -1.0], &c).unwrap(), (vec![-2.0, -1.0], vec![0.0, 0.0]));
        assert_eq!(moreau_decompose(&[1.0, 1.0], &c).unwrap(), (vec![0.0, 0.0], vec![1.0, 1.0]));
    }
}
