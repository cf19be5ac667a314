use serde::{Deserialize, Serialize};

use super::cone::{ConeSpec, Sign};
use super::norm::NormTag;
use crate::error::{check_dim, Error, Result};
use crate::solvers::lp::{LinearProgram, Relation};
use crate::solvers::FeasibleSet;
use crate::vector::{conjugate_exponent, dot, norm_p};

const KELLEY_ROUNDS: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum GeneratorRepr {
    Simplex {
        d: usize,
    },
    /// `{x ∈ [0,1]^d : Σx = m}`
    ScaledCappedSimplex {
        d: usize,
        m: usize,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    /// `{x : ‖x‖ ≤ 1, x ∈ cone, ⟨c, x⟩ ≤ 0 for every cut c}`
    BallCapCone {
        norm: NormTag,
        cone: ConeSpec,
        cuts: Vec<Vec<f64>>,
    },
}

/// A compact convex set `X` with `ℝ₊X` equal to a target's polar cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub repr: GeneratorRepr,
    /// Range bound Δ of the regularizer, once one is chosen.
    pub delta: Option<f64>,
    /// `max_{x∈X} ‖x‖` under the analysis norm.
    pub radius: f64,
}

impl GeneratorSet {
    pub fn simplex(d: usize) -> Self {
        GeneratorSet { repr: GeneratorRepr::Simplex { d }, delta: None, radius: 1.0 }
    }

    pub fn scaled_capped_simplex(d: usize, m: usize) -> Result<Self> {
        if m == 0 || m > d {
            return Err(Error::input(format!("capped simplex needs 1 ≤ m ≤ d (m = {m}, d = {d})")));
        }
        Ok(GeneratorSet { repr: GeneratorRepr::ScaledCappedSimplex { d, m }, delta: None, radius: m as f64 })
    }

    /// Polytope generator; `radius` is measured in `norm`.
    pub fn polytope(vertices: Vec<Vec<f64>>, norm: &NormTag) -> Result<Self> {
        let n = vertices.first().map(Vec::len).ok_or_else(|| Error::input("empty polytope"))?;
        for v in &vertices {
            check_dim("polytope vertex", v.len(), n)?;
        }
        let radius = vertices.iter().map(|v| norm.eval(v)).fold(0.0, f64::max);
        Ok(GeneratorSet { repr: GeneratorRepr::Polytope { vertices }, delta: None, radius })
    }

    pub fn ball_cap(norm: NormTag, cone: ConeSpec, cuts: Vec<Vec<f64>>) -> Self {
        let radius = if cone.is_trivial() { 0.0 } else { 1.0 };
        GeneratorSet { repr: GeneratorRepr::BallCapCone { norm, cone, cuts }, delta: None, radius }
    }

    pub fn ambient_dim(&self) -> usize {
        match &self.repr {
            GeneratorRepr::Simplex { d } | GeneratorRepr::ScaledCappedSimplex { d, .. } => *d,
            GeneratorRepr::Polytope { vertices } => vertices[0].len(),
            GeneratorRepr::BallCapCone { cone, .. } => cone.dim(),
        }
    }

    /// The cone `ℝ₊X`.
    pub fn cone(&self) -> ConeSpec {
        match &self.repr {
            GeneratorRepr::Simplex { d } | GeneratorRepr::ScaledCappedSimplex { d, .. } => ConeSpec::nonneg_orthant(*d),
            GeneratorRepr::Polytope { vertices } => ConeSpec::FinitelyGenerated {
                dim: vertices[0].len(),
                rays: vertices.iter().filter(|v| v.iter().any(|&x| x != 0.0)).cloned().collect(),
            },
            GeneratorRepr::BallCapCone { cone, .. } => cone.clone(),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        check_dim("generator membership", x.len(), self.ambient_dim())?;
        match &self.repr {
            GeneratorRepr::Simplex { d } => Ok(FeasibleSet::Simplex(*d).contains(x, tol)),
            GeneratorRepr::ScaledCappedSimplex { d, m } => {
                Ok(FeasibleSet::CappedSimplex { d: *d, m: *m as f64 }.contains(x, tol))
            }
            GeneratorRepr::Polytope { vertices } => {
                // feasibility of x = Σ λ_k v_k with λ ∈ Δ
                let k = vertices.len();
                let mut lp = LinearProgram::new(k);
                for i in 0..x.len() {
                    let row = vertices.iter().map(|v| v[i]).collect();
                    lp.constrain(row, Relation::Eq, x[i])?;
                }
                lp.constrain(vec![1.0; k], Relation::Eq, 1.0)?;
                match lp.solve() {
                    Ok(_) => Ok(true),
                    Err(Error::Infeasible) => Ok(false),
                    Err(e) => Err(e),
                }
            }
            GeneratorRepr::BallCapCone { norm, cone, cuts } => {
                Ok(norm.eval(x) <= 1.0 + tol && cone.contains(x, tol)? && cuts.iter().all(|c| dot(c, x) <= tol))
            }
        }
    }

    /// Convex set description for Euclidean projection, when available.
    pub fn feasible_set(&self) -> Option<FeasibleSet> {
        match &self.repr {
            GeneratorRepr::Simplex { d } => Some(FeasibleSet::Simplex(*d)),
            GeneratorRepr::ScaledCappedSimplex { d, m } => Some(FeasibleSet::CappedSimplex { d: *d, m: *m as f64 }),
            GeneratorRepr::Polytope { .. } => None,
            GeneratorRepr::BallCapCone { norm, cone, cuts } => {
                let mut sets = match *norm {
                    NormTag::Lp { p } => vec![FeasibleSet::LqBall { q: p, radius: 1.0 }],
                    NormTag::GlobalCostDual { d, q } => vec![
                        FeasibleSet::Slice { start: 0, len: d, set: Box::new(FeasibleSet::LqBall { q, radius: 1.0 }) },
                        FeasibleSet::Slice { start: d, len: d, set: Box::new(FeasibleSet::L1Ball { radius: 1.0 }) },
                    ],
                    NormTag::GlobalCostPrimal { .. } => return None,
                };
                match cone {
                    ConeSpec::GlobalCostPolar { .. } => {}
                    other => sets.extend(other.feasible_sets()?),
                }
                sets.extend(cuts.iter().map(|c| FeasibleSet::Halfspace { normal: c.clone(), offset: 0.0 }));
                Some(FeasibleSet::Intersection(sets))
            }
        }
    }

    /// `I*_X(y) = sup_{x∈X} ⟨y, x⟩`.
    ///
    /// Exact for the simplex, capped simplex and polytope representations.
    /// The exact cap of the global-cost polar cone uses the distance to the
    /// cone. Other ball caps come from a linear program, refined by tangent
    /// cuts for curved norm balls and by separation cuts for the global-cost
    /// polar cone; the result is a lower bound within `tol` of the supremum.
    pub fn support_function(&self, y: &[f64], tol: f64) -> Result<f64> {
        check_dim("support function", y.len(), self.ambient_dim())?;
        match &self.repr {
            GeneratorRepr::Simplex { .. } => Ok(crate::vector::max_entry(y)),
            GeneratorRepr::ScaledCappedSimplex { m, .. } => Ok(top_m_sum(y, *m)),
            GeneratorRepr::Polytope { vertices } => {
                Ok(vertices.iter().map(|v| dot(v, y)).fold(f64::NEG_INFINITY, f64::max))
            }
            GeneratorRepr::BallCapCone { norm, cone, cuts } => {
                if cone.is_trivial() {
                    return Ok(0.0);
                }
                if let (ConeSpec::GlobalCostPolar { d, p }, NormTag::GlobalCostDual { d: dn, q }) = (cone, norm) {
                    // cuts taken from the cone are implied by the polar, and the
                    // support of ℬ ∩ 𝒞° is then the distance to 𝒞
                    let primal = ConeSpec::GlobalCost { d: *d, p: *p };
                    let implied = cuts.iter().map(|c| primal.contains(c, 1e-12)).collect::<Result<Vec<_>>>()?;
                    if d == dn && (conjugate_exponent(*p) - q).abs() <= 1e-12 * q.max(1.0) && implied.iter().all(|&b| b)
                    {
                        return crate::global_cost::cone_distance(y, *p);
                    }
                }
                let euclidean = matches!(norm, NormTag::Lp { p } if *p == 2.0);
                if euclidean && cuts.is_empty() {
                    if let Ok(p) = cone.project(y) {
                        // sup over K ∩ B₂ is attained at proj_K y / ‖proj_K y‖₂
                        return Ok(crate::vector::norm2(&p));
                    }
                }
                ball_cap_support(norm, cone, cuts, y, tol)
            }
        }
    }
}

/// Sum of the m largest entries.
pub fn top_m_sum(y: &[f64], m: usize) -> f64 {
    let mut v = y.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v[..m].iter().sum()
}

/// Norm-ball blocks `(start, len, exponent)` of a ball-cap norm.
fn ball_blocks(norm: &NormTag, n: usize) -> Result<Vec<(usize, usize, f64)>> {
    match *norm {
        NormTag::Lp { p } => Ok(vec![(0, n, p)]),
        NormTag::GlobalCostDual { d, q } => {
            check_dim("global-cost ball", n, 2 * d)?;
            Ok(vec![(0, d, q), (d, d, 1.0)])
        }
        NormTag::GlobalCostPrimal { .. } => Err(Error::capability("support function over the primal global-cost ball")),
    }
}

fn ball_cap_support(norm: &NormTag, cone: &ConeSpec, cuts: &[Vec<f64>], y: &[f64], tol: f64) -> Result<f64> {
    let n = y.len();
    let blocks = ball_blocks(norm, n)?;
    if matches!(cone, ConeSpec::GlobalCost { .. }) {
        return Err(Error::capability("support function over a cap of the global-cost cone"));
    }
    let mut tangents: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut extra_cuts: Vec<Vec<f64>> = Vec::new();
    let mut best_lower = 0.0_f64;
    let mut upper = f64::INFINITY;
    for _ in 0..KELLEY_ROUNDS {
        let x = solve_cap_lp(&blocks, cone, cuts, &extra_cuts, &tangents, y)?;
        upper = upper.min(dot(y, &x));
        let mut scale = 1.0_f64;
        let mut added = false;
        for (b, &(start, len, e)) in blocks.iter().enumerate() {
            let part = &x[start..start + len];
            let rho = norm_p(part, e);
            scale = scale.max(rho);
            if e > 1.0 && e.is_finite() && rho > 1.0 + 1e-12 {
                tangents.push((b, norm_gradient(part, e, rho)));
                added = true;
            }
        }
        let mut feasible = true;
        if let ConeSpec::GlobalCostPolar { d, p } = cone {
            let xs: Vec<f64> = x.iter().map(|v| v / scale).collect();
            if let Some(cut) = crate::global_cost::separate(&xs[..*d], &xs[*d..], *p, tol * 1e-2)? {
                // lowering z' by the violation along 1 lands in the polar;
                // rescaled into the ball it gives a lower bound
                let v = cut.value(&xs);
                let mut shifted = xs.clone();
                shifted[*d..].iter_mut().for_each(|c| *c -= v);
                let rho = blocks
                    .iter()
                    .map(|&(start, len, e)| norm_p(&shifted[start..start + len], e))
                    .fold(1.0_f64, f64::max);
                best_lower = best_lower.max(dot(y, &shifted) / rho);
                extra_cuts.push(cut.concat());
                added = true;
                feasible = false;
            }
        }
        if feasible {
            best_lower = best_lower.max(dot(y, &x) / scale);
        }
        if upper - best_lower <= tol {
            return Ok(best_lower);
        }
        if !added {
            // every block is within 1e-12 of its ball, so the gap is negligible
            return Ok(best_lower);
        }
    }
    Err(Error::Solver {
        solver: "ball-cap support function",
        best_value: best_lower,
        residual: upper - best_lower,
        iterate: Vec::new(),
    })
}

/// `∇‖x‖_e`, which has unit dual norm.
fn norm_gradient(x: &[f64], e: f64, rho: f64) -> Vec<f64> {
    x.iter().map(|&v| v.signum() * (v.abs() / rho).powf(e - 1.0)).collect()
}

fn solve_cap_lp(
    blocks: &[(usize, usize, f64)],
    cone: &ConeSpec,
    cuts: &[Vec<f64>],
    extra_cuts: &[Vec<f64>],
    tangents: &[(usize, Vec<f64>)],
    y: &[f64],
) -> Result<Vec<f64>> {
    let n = y.len();
    let l1_aux: usize = blocks.iter().filter(|b| b.2 == 1.0).map(|b| b.1).sum();
    let rays: &[Vec<f64>] = match cone {
        ConeSpec::FinitelyGenerated { rays, .. } => rays,
        _ => &[],
    };
    let nvar = n + l1_aux + rays.len();
    let mut lp = LinearProgram::new(nvar);
    let mut c = vec![0.0; nvar];
    for i in 0..n {
        c[i] = -y[i];
        lp.set_free(i);
    }
    lp.minimize(c);
    let unit = |i: usize, v: f64| {
        let mut r = vec![0.0; nvar];
        r[i] = v;
        r
    };
    let mut aux = n;
    for (b, &(start, len, e)) in blocks.iter().enumerate() {
        if e == 1.0 {
            let mut total = vec![0.0; nvar];
            for k in 0..len {
                let (xi, ui) = (start + k, aux + k);
                let mut r = unit(xi, 1.0);
                r[ui] = -1.0;
                lp.constrain(r, Relation::Le, 0.0)?;
                let mut r = unit(xi, -1.0);
                r[ui] = -1.0;
                lp.constrain(r, Relation::Le, 0.0)?;
                total[ui] = 1.0;
            }
            lp.constrain(total, Relation::Le, 1.0)?;
            aux += len;
        } else {
            // ‖x‖_∞ ≤ ‖x‖_e, so the unit box is a valid outer bound
            for k in 0..len {
                lp.constrain(unit(start + k, 1.0), Relation::Le, 1.0)?;
                lp.constrain(unit(start + k, 1.0), Relation::Ge, -1.0)?;
            }
            for (tb, g) in tangents {
                if *tb == b {
                    let mut r = vec![0.0; nvar];
                    r[start..start + len].copy_from_slice(g);
                    lp.constrain(r, Relation::Le, 1.0)?;
                }
            }
        }
    }
    match cone {
        ConeSpec::Orthant { signs } => {
            for (i, s) in signs.iter().enumerate() {
                match s {
                    Sign::Nonneg => lp.constrain(unit(i, 1.0), Relation::Ge, 0.0)?,
                    Sign::Nonpos => lp.constrain(unit(i, 1.0), Relation::Le, 0.0)?,
                    Sign::Zero => lp.constrain(unit(i, 1.0), Relation::Eq, 0.0)?,
                    Sign::Free => {}
                }
            }
        }
        ConeSpec::HalfspaceIntersection { normals, .. } => {
            for nrm in normals {
                let mut r = vec![0.0; nvar];
                r[..n].copy_from_slice(nrm);
                lp.constrain(r, Relation::Le, 0.0)?;
            }
        }
        ConeSpec::FinitelyGenerated { .. } => {
            let base = n + l1_aux;
            for i in 0..n {
                let mut r = unit(i, 1.0);
                for (k, ray) in rays.iter().enumerate() {
                    r[base + k] = -ray[i];
                }
                lp.constrain(r, Relation::Eq, 0.0)?;
            }
        }
        ConeSpec::GlobalCostPolar { .. } | ConeSpec::GlobalCost { .. } => {}
    }
    for cut in cuts.iter().chain(extra_cuts) {
        let mut r = vec![0.0; nvar];
        r[..n].copy_from_slice(cut);
        lp.constrain(r, Relation::Le, 0.0)?;
    }
    let sol = lp.solve()?;
    Ok(sol.solution[..n].to_vec())
}

/// The generator `B ∩ C` of a cone, with B the unit ball of `norm`.
pub fn cap_generator(cone: &ConeSpec, norm: NormTag) -> GeneratorSet {
    GeneratorSet::ball_cap(norm, cone.clone(), Vec::new())
}
