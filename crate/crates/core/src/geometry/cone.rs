use serde::{Deserialize, Serialize};

use super::norm::exponent;
use crate::error::{check_dim, Error, Result};
use crate::solvers::{nnls, weighted::min_weighted_lp_norm, FeasibleSet};
use crate::vector::{dot, norm_p, sub};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Nonneg,
    Nonpos,
    Zero,
    Free,
}

impl Sign {
    pub fn polar(self) -> Sign {
        match self {
            Sign::Nonneg => Sign::Nonpos,
            Sign::Nonpos => Sign::Nonneg,
            Sign::Zero => Sign::Free,
            Sign::Free => Sign::Zero,
        }
    }

    fn clip(self, v: f64) -> f64 {
        match self {
            Sign::Nonneg => v.max(0.0),
            Sign::Nonpos => v.min(0.0),
            Sign::Zero => 0.0,
            Sign::Free => v,
        }
    }
}

/// Closed convex cones in one of the representations the algorithms need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cone", rename_all = "snake_case")]
pub enum ConeSpec {
    Orthant {
        signs: Vec<Sign>,
    },
    /// `{Σ λ_j r_j : λ ≥ 0}`; no rays means `{0}`.
    FinitelyGenerated {
        dim: usize,
        rays: Vec<Vec<f64>>,
    },
    /// `{y : ⟨n_j, y⟩ ≤ 0 for all j}`.
    HalfspaceIntersection {
        dim: usize,
        normals: Vec<Vec<f64>>,
    },
    /// `{(y, y') ≥ 0 : ‖y‖_p ≤ min_{a∈Δ_d} ‖a ⊙ y'‖_p}` in `ℝ^{2d}`.
    GlobalCost {
        d: usize,
        #[serde(with = "exponent")]
        p: f64,
    },
    /// Polar of [`ConeSpec::GlobalCost`], known only through separation.
    GlobalCostPolar {
        d: usize,
        #[serde(with = "exponent")]
        p: f64,
    },
}

impl ConeSpec {
    pub fn nonneg_orthant(n: usize) -> Self {
        ConeSpec::Orthant { signs: vec![Sign::Nonneg; n] }
    }

    pub fn nonpos_orthant(n: usize) -> Self {
        ConeSpec::Orthant { signs: vec![Sign::Nonpos; n] }
    }

    pub fn zero(n: usize) -> Self {
        ConeSpec::Orthant { signs: vec![Sign::Zero; n] }
    }

    pub fn finitely_generated(rays: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rays
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::input("finitely generated cone needs at least one ray; use ConeSpec::zero"))?;
        let c = ConeSpec::FinitelyGenerated { dim, rays };
        c.validate()?;
        Ok(c)
    }

    pub fn halfspaces(normals: Vec<Vec<f64>>) -> Result<Self> {
        let dim =
            normals.first().map(Vec::len).ok_or_else(|| Error::input("halfspace cone needs at least one normal"))?;
        let c = ConeSpec::HalfspaceIntersection { dim, normals };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConeSpec::Orthant { signs } if signs.is_empty() => Err(Error::input("orthant of dimension 0")),
            ConeSpec::FinitelyGenerated { dim, rays: vs } | ConeSpec::HalfspaceIntersection { dim, normals: vs } => {
                if *dim == 0 {
                    return Err(Error::input("cone of dimension 0"));
                }
                for v in vs {
                    check_dim("cone vector", v.len(), *dim)?;
                    if v.iter().all(|&x| x == 0.0) || !crate::vector::all_finite(v) {
                        return Err(Error::input("cone rays and normals must be finite and nonzero"));
                    }
                }
                Ok(())
            }
            ConeSpec::GlobalCost { d, p } | ConeSpec::GlobalCostPolar { d, p } => {
                if *d < 2 || !(*p > 1.0) {
                    return Err(Error::input(format!("global-cost cone needs d ≥ 2, p > 1 (d = {d}, p = {p})")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConeSpec::Orthant { signs } => signs.len(),
            ConeSpec::FinitelyGenerated { dim, .. } | ConeSpec::HalfspaceIntersection { dim, .. } => *dim,
            ConeSpec::GlobalCost { d, .. } | ConeSpec::GlobalCostPolar { d, .. } => 2 * d,
        }
    }

    pub fn polar(&self) -> ConeSpec {
        match self {
            ConeSpec::Orthant { signs } => ConeSpec::Orthant { signs: signs.iter().map(|s| s.polar()).collect() },
            ConeSpec::FinitelyGenerated { dim, rays } => {
                if rays.is_empty() {
                    ConeSpec::Orthant { signs: vec![Sign::Free; *dim] }
                } else {
                    ConeSpec::HalfspaceIntersection { dim: *dim, normals: rays.clone() }
                }
            }
            ConeSpec::HalfspaceIntersection { dim, normals } => {
                ConeSpec::FinitelyGenerated { dim: *dim, rays: normals.clone() }
            }
            ConeSpec::GlobalCost { d, p } => ConeSpec::GlobalCostPolar { d: *d, p: *p },
            ConeSpec::GlobalCostPolar { d, p } => ConeSpec::GlobalCost { d: *d, p: *p },
        }
    }

    /// True when the cone is `{0}`.
    pub fn is_trivial(&self) -> bool {
        match self {
            ConeSpec::Orthant { signs } => signs.iter().all(|&s| s == Sign::Zero),
            ConeSpec::FinitelyGenerated { rays, .. } => rays.is_empty(),
            _ => false,
        }
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> Result<bool> {
        check_dim("cone membership", y.len(), self.dim())?;
        match self {
            ConeSpec::Orthant { signs } => Ok(signs.iter().zip(y).all(|(s, &v)| (s.clip(v) - v).abs() <= tol)),
            ConeSpec::HalfspaceIntersection { normals, .. } => Ok(normals.iter().all(|n| dot(n, y) <= tol)),
            ConeSpec::FinitelyGenerated { .. } => {
                let p = self.project(y)?;
                Ok(crate::vector::norm2(&sub(&p, y)) <= tol)
            }
            ConeSpec::GlobalCost { d, p } => {
                let (yy, yp) = y.split_at(*d);
                if y.iter().any(|&v| v < -tol) {
                    return Ok(false);
                }
                let yp: Vec<f64> = yp.iter().map(|v| v.max(0.0)).collect();
                let (phi, _) = min_weighted_lp_norm(&yp, *p)?;
                let yy: Vec<f64> = yy.iter().map(|v| v.max(0.0)).collect();
                Ok(norm_p(&yy, *p) <= phi + tol)
            }
            ConeSpec::GlobalCostPolar { d, p } => {
                let sep = crate::global_cost::separate(&y[..*d], &y[*d..], *p, tol)?;
                Ok(sep.is_none())
            }
        }
    }

    /// Euclidean projection onto the cone.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim("cone projection", y.len(), self.dim())?;
        match self {
            ConeSpec::Orthant { signs } => Ok(signs.iter().zip(y).map(|(s, &v)| s.clip(v)).collect()),
            ConeSpec::FinitelyGenerated { dim, rays } => {
                if rays.is_empty() {
                    return Ok(vec![0.0; *dim]);
                }
                let lambda = nnls(rays, y)?;
                let mut out = vec![0.0; *dim];
                for (l, r) in lambda.iter().zip(rays) {
                    crate::vector::axpy(&mut out, *l, r);
                }
                Ok(out)
            }
            ConeSpec::HalfspaceIntersection { .. } => {
                // Moreau: proj_C y = y − proj_{C°} y, and C° is finitely generated
                let polar_part = self.polar().project(y)?;
                Ok(sub(y, &polar_part))
            }
            ConeSpec::GlobalCost { .. } | ConeSpec::GlobalCostPolar { .. } => {
                Err(Error::capability("Euclidean projection onto the global-cost cones is not available"))
            }
        }
    }

    /// Polyhedral description as feasible sets, when one exists.
    pub fn feasible_sets(&self) -> Option<Vec<FeasibleSet>> {
        match self {
            ConeSpec::Orthant { signs } => {
                let mut sets = Vec::new();
                let mut orth = Vec::with_capacity(signs.len());
                for (i, s) in signs.iter().enumerate() {
                    orth.push(match s {
                        Sign::Nonneg => 1,
                        Sign::Nonpos => -1,
                        _ => 0,
                    });
                    if *s == Sign::Zero {
                        let mut e = vec![0.0; signs.len()];
                        e[i] = 1.0;
                        sets.push(FeasibleSet::Halfspace { normal: e.clone(), offset: 0.0 });
                        e[i] = -1.0;
                        sets.push(FeasibleSet::Halfspace { normal: e, offset: 0.0 });
                    }
                }
                sets.insert(0, FeasibleSet::Orthant(orth));
                Some(sets)
            }
            ConeSpec::HalfspaceIntersection { normals, .. } => {
                Some(normals.iter().map(|n| FeasibleSet::Halfspace { normal: n.clone(), offset: 0.0 }).collect())
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_is_an_involution() {
        let c = ConeSpec::Orthant { signs: vec![Sign::Nonneg, Sign::Zero, Sign::Free] };
        assert_eq!(c.polar().polar(), c);
        let f = ConeSpec::finitely_generated(vec![vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(f.polar().polar(), f);
        let g = ConeSpec::GlobalCost { d: 3, p: 2.0 };
        assert_eq!(g.polar().polar(), g);
    }

    #[test]
    fn halfspace_projection_by_moreau() {
        // C = {y₂ ≤ 0} ∩ {y₁ − y₂ ≤ 0}, whose polar is spanned by (0,1), (1,−1)
        let c = ConeSpec::halfspaces(vec![vec![0.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let p = c.project(&[1.0, 1.0]).unwrap();
        assert!(c.contains(&p, 1e-12).unwrap());
        // cross-check against Dykstra on the halfspaces
        let sets = c.feasible_sets().unwrap();
        let q = crate::solvers::dykstra_project(&sets, &[1.0, 1.0], 1e-13, 100_000).unwrap();
        assert!((p[0] - q[0]).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9);
    }

    #[test]
    fn global_cost_membership() {
        let c = ConeSpec::GlobalCost { d: 2, p: f64::INFINITY };
        // φ_∞(1,1) = 1/2
        assert!(c.contains(&[0.5, 0.5, 1.0, 1.0], 1e-12).unwrap());
        assert!(!c.contains(&[0.6, 0.1, 1.0, 1.0], 1e-12).unwrap());
        assert!(c.contains(&[0.0, 0.0, 1.0, 0.0], 0.0).unwrap());
        assert!(!c.contains(&[1.0, 0.0, 0.0, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn json_shape() {
        let c: ConeSpec = serde_json::from_str(r#"{"cone":"finitely_generated","dim":2,"rays":[[1,0]]}"#).unwrap();
        assert_eq!(c.dim(), 2);
        let g: ConeSpec = serde_json::from_str(r#"{"cone":"global_cost","d":3,"p":"inf"}"#).unwrap();
        assert_eq!(g, ConeSpec::GlobalCost { d: 3, p: f64::INFINITY });
    }
}
