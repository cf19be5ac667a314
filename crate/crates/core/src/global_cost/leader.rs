//! The FTRL leader over the cut approximation of `ℬ ∩ 𝒞°`.
//!
//! For regularizers that split into a z-part and a z'-part, the leader is
//! computed through the dual over cut multipliers: with the ball handled
//! in closed form, `min_{μ≥0} h*_ℬ(w − Σ μ_j c_j)` is smooth and small.

use super::{separate, GlobalCostInstance, PolarApprox};
use crate::engine::Leader;
use crate::error::{Error, Result};
use crate::geometry::{ConeSpec, GeneratorSet, NormTag, Sign};
use crate::regularizers::{Regularizer, RegularizerKind};
use crate::solvers::projection::project_lq_ball;
use crate::vector::{conjugate_exponent, dot, norm1, norm_inf, norm_p};

/// Cut rounds per leader computation before giving up and reporting ν.
const MAX_CUT_ROUNDS: usize = 20;
const DUAL_ITERS: usize = 20_000;

/// `h(z, z') = (a_z/2)‖z‖₂² + (a_zp/2)‖z'‖²_{q'}` on
/// `{‖z‖_q ≤ 1, ‖z'‖₁ ≤ 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeParams {
    pub d: usize,
    pub q: f64,
    pub a_z: f64,
    pub a_zp: f64,
    pub q_prime: f64,
}

impl CompositeParams {
    pub fn value(&self, x: &[f64]) -> f64 {
        let (z, zp) = x.split_at(self.d);
        0.5 * self.a_z * dot(z, z) + 0.5 * self.a_zp * norm_p(zp, self.q_prime).powi(2)
    }

    /// Maximizer over the ball of `⟨u, x⟩ − h(x)`, and the maximum.
    fn ball_argmax(&self, u: &[f64]) -> Result<(Vec<f64>, f64)> {
        let (uz, uzp) = u.split_at(self.d);
        let target: Vec<f64> = uz.iter().map(|v| v / self.a_z).collect();
        let z = project_lq_ball(&target, self.q, 1.0)?;
        let zp = self.zprime_argmax(uzp);
        let mut x = z;
        x.extend_from_slice(&zp);
        let val = dot(u, &x) - self.value(&x);
        Ok((x, val))
    }

    /// `argmax_{‖z'‖₁≤1} ⟨u, z'⟩ − (a/2)‖z'‖²_{q'}`: the unconstrained
    /// maximizer of the soft-thresholded input, with the threshold chosen
    /// so the ℓ1 constraint holds. `‖at(λ)‖₁` is continuous and decreasing
    /// in λ and smooth between the breakpoints `|u_i|`, so the segment is
    /// located first and the root then found by false position.
    fn zprime_argmax(&self, u: &[f64]) -> Vec<f64> {
        let pp = conjugate_exponent(self.q_prime);
        let at = |lambda: f64| -> Vec<f64> {
            let v: Vec<f64> = u.iter().map(|&x| x.signum() * (x.abs() - lambda).max(0.0)).collect();
            mirror_map(&v, pp).into_iter().map(|g| g / self.a_zp).collect()
        };
        let excess = |lambda: f64| norm1(&at(lambda)) - 1.0;
        let free = at(0.0);
        if norm1(&free) <= 1.0 {
            return free;
        }
        let (mut lo, mut hi) = (0.0, norm_inf(u));
        let (mut f_lo, mut f_hi) = (norm1(&free) - 1.0, -1.0);
        let mut breaks: Vec<f64> = u.iter().map(|x| x.abs()).filter(|&b| b > 0.0 && b < hi).collect();
        breaks.sort_by(f64::total_cmp);
        for b in breaks {
            let f = excess(b);
            if f > 0.0 {
                (lo, f_lo) = (b, f);
            } else {
                (hi, f_hi) = (b, f);
                break;
            }
        }
        // Illinois variant of regula falsi; the bracket keeps f_lo > 0 ≥ f_hi
        let mut side = 0;
        for _ in 0..200 {
            if hi - lo <= 1e-16 * hi.max(1.0) || f_hi == 0.0 {
                break;
            }
            let mut mid = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            if !(mid > lo && mid < hi) {
                mid = 0.5 * (lo + hi);
            }
            let f = excess(mid);
            if f > 0.0 {
                (lo, f_lo) = (mid, f);
                if side == -1 {
                    f_hi *= 0.5;
                }
                side = -1;
            } else {
                (hi, f_hi) = (mid, f);
                if side == 1 {
                    f_lo *= 0.5;
                }
                side = 1;
            }
            if f.abs() <= 1e-15 {
                return at(mid);
            }
        }
        at(hi)
    }
}

/// `∇(½‖v‖²_r)`.
fn mirror_map(v: &[f64], r: f64) -> Vec<f64> {
    if r == 2.0 {
        return v.to_vec();
    }
    let n = norm_p(v, r);
    if n == 0.0 {
        return vec![0.0; v.len()];
    }
    v.iter().map(|&x| x.signum() * n * (x.abs() / n).powf(r - 1.0)).collect()
}

/// `argmax ⟨w, x⟩ − h(x)` over the ball intersected with `⟨c_j, x⟩ ≤ 0`.
///
/// Solves the dual by accelerated projected gradient with backtracking;
/// `mu` is the warm start and receives the final multipliers. Returns
/// when the cuts hold to `tol` and complementary slackness to `tol`.
pub fn composite_argmax(
    params: &CompositeParams,
    cuts: &[Vec<f64>],
    w: &[f64],
    mu: &mut Vec<f64>,
    tol: f64,
) -> Result<Vec<f64>> {
    mu.resize(cuts.len(), 0.0);
    if cuts.is_empty() {
        return Ok(params.ball_argmax(w)?.0);
    }
    let shifted = |m: &[f64]| {
        let mut u = w.to_vec();
        for (mj, c) in m.iter().zip(cuts) {
            if *mj != 0.0 {
                crate::vector::axpy(&mut u, -mj, c);
            }
        }
        u
    };
    // the dual gradient at m is −Cx(m); function values cancel near the
    // optimum, so step acceptance and restarts use gradients only
    let eval = |m: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
        let (x, _) = params.ball_argmax(&shifted(m))?;
        let slack: Vec<f64> = cuts.iter().map(|c| dot(c, &x)).collect();
        Ok((x, slack))
    };
    let converged = |m: &[f64], x: &[f64]| {
        let mut viol = 0.0_f64;
        let mut comp = 0.0;
        for (mj, c) in m.iter().zip(cuts) {
            let s = dot(c, x);
            viol = viol.max(s);
            comp += mj * s;
        }
        viol <= tol && comp.abs() <= tol
    };
    let (mut x_mu, _) = eval(mu)?;
    if converged(mu, &x_mu) {
        return Ok(x_mu);
    }
    let mut y = mu.clone();
    let mut t = 1.0_f64;
    let mut lip = 1.0_f64;
    for _ in 0..DUAL_ITERS {
        let (_, slack_y) = eval(&y)?;
        lip = (lip * 0.5).max(1e-12);
        let (next, x_next) = loop {
            let cand: Vec<f64> = y.iter().zip(&slack_y).map(|(yj, sj)| (yj + sj / lip).max(0.0)).collect();
            let (x_c, slack_c) = eval(&cand)?;
            let diff: Vec<f64> = cand.iter().zip(&y).map(|(a, b)| a - b).collect();
            let dg: Vec<f64> = slack_c.iter().zip(&slack_y).map(|(a, b)| a - b).collect();
            if dot(&dg, &dg).sqrt() <= lip * dot(&diff, &diff).sqrt() * (1.0 + 1e-12) || lip > 1e15 {
                break (cand, x_c);
            }
            lip *= 2.0;
        };
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        // restart when the momentum points against the gradient step
        let against: f64 = y.iter().zip(&next).zip(mu.iter()).map(|((yj, nj), mj)| (yj - nj) * (nj - mj)).sum();
        let beta = if against > 0.0 {
            t = 1.0;
            0.0
        } else {
            let b = (t - 1.0) / t_next;
            t = t_next;
            b
        };
        y = next.iter().zip(mu.iter()).map(|(a, b)| (a + beta * (a - b)).max(0.0)).collect();
        *mu = next;
        x_mu = x_next;
        if converged(mu, &x_mu) {
            return Ok(x_mu);
        }
    }
    log::debug!("dual leader stopped at the iteration cap");
    Ok(x_mu)
}

enum Objective {
    Composite(CompositeParams),
    /// Regularizers without a closed-form ball step; handled by projected
    /// gradient over the outer approximation.
    Generic(RegularizerKind),
}

/// FTRL leader on the global-cost generator, refined by separation cuts.
pub struct GlobalCostLeader {
    pub inst: GlobalCostInstance,
    objective: Objective,
    approx: PolarApprox,
    initial_cuts: usize,
    norm: NormTag,
    mu: Vec<f64>,
    /// Cut rounds used by the last leader call.
    pub last_rounds: usize,
}

impl GlobalCostLeader {
    pub fn new(inst: GlobalCostInstance, h: &Regularizer) -> Result<Self> {
        let objective = match h.kind {
            RegularizerKind::CompositeGlobalCost { a, q_prime } => {
                Objective::Composite(CompositeParams { d: inst.d, q: inst.q, a_z: a, a_zp: 1.0, q_prime })
            }
            RegularizerKind::LpSquared { q_prime, scale } if q_prime == 2.0 => {
                Objective::Composite(CompositeParams { d: inst.d, q: inst.q, a_z: scale, a_zp: scale, q_prime })
            }
            ref other => Objective::Generic(other.clone()),
        };
        let approx = PolarApprox::initial(inst.d, inst.p)?;
        Ok(GlobalCostLeader {
            inst,
            objective,
            initial_cuts: approx.cuts.len(),
            approx,
            norm: inst.dual_norm(),
            mu: Vec::new(),
            last_rounds: 0,
        })
    }

    pub fn approx(&self) -> &PolarApprox {
        &self.approx
    }

    pub fn cuts_added(&self) -> usize {
        self.approx.cuts.len() - self.initial_cuts
    }

    /// Inner solves run at the instance's solver tolerance at the finest.
    fn solve(&mut self, w: &[f64], tol: f64) -> Result<Vec<f64>> {
        let tol = tol.max(self.inst.solver_tol);
        let rows = self.approx.rows();
        match &self.objective {
            Objective::Composite(params) => composite_argmax(params, &rows, w, &mut self.mu, tol),
            Objective::Generic(kind) => {
                let domain = self.approx.generator(self.norm);
                let set = domain.feasible_set().ok_or_else(|| Error::capability("no projection for this generator"))?;
                crate::regularizers::generic_argmax(kind, &set, w, tol)
            }
        }
    }

    /// The leader and its certified oracle slack.
    pub fn argmax_with_nu(&mut self, w: &[f64], tol: f64) -> Result<(Vec<f64>, f64)> {
        let x = self.argmax(w, tol)?;
        let (nu, _) = crate::solvers::nu_oracle(&x[..self.inst.d], &x[self.inst.d..])?;
        Ok((x, nu))
    }

    /// Support function of the current outer approximation alone, which
    /// upper-bounds the support of `ℬ ∩ 𝒞°`.
    pub fn outer_support(&self, y: &[f64], tol: f64) -> Result<f64> {
        let free = ConeSpec::Orthant { signs: vec![Sign::Free; 2 * self.inst.d] };
        GeneratorSet::ball_cap(self.norm, free, self.approx.rows()).support_function(y, tol)
    }
}

impl Leader for GlobalCostLeader {
    fn dim(&self) -> usize {
        2 * self.inst.d
    }

    fn argmax(&mut self, w: &[f64], tol: f64) -> Result<Vec<f64>> {
        let d = self.inst.d;
        let mut x = self.solve(w, tol)?;
        self.last_rounds = 1;
        while self.last_rounds < MAX_CUT_ROUNDS && self.cuts_added() < self.inst.cut_budget {
            match separate(&x[..d], &x[d..], self.inst.p, self.inst.solver_tol)? {
                Some(cut) => {
                    self.approx.cuts.push(cut);
                    self.mu.push(0.0);
                }
                None => break,
            }
            x = self.solve(w, tol)?;
            self.last_rounds += 1;
        }
        Ok(x)
    }

    fn support(&mut self, y: &[f64], tol: f64) -> Result<f64> {
        self.approx.generator(self.norm).support_function(y, tol.max(self.inst.solver_tol))
    }

    fn radius(&self) -> f64 {
        1.0
    }

    fn cut_count(&self) -> usize {
        self.cuts_added()
    }
}

/// One leader step on an explicit approximation: maximizes
/// `⟨ηY, x⟩ − h(x)` for the instance's composite regularizer, adding cuts
/// within the budget, and returns the point with its oracle slack.
pub fn ftrl_argmax_gc(
    inst: &GlobalCostInstance,
    approx: &mut PolarApprox,
    y: &[f64],
    eta: f64,
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    let h = Regularizer::new(
        RegularizerKind::CompositeGlobalCost { a: inst.a, q_prime: inst.q_prime },
        approx.generator(inst.dual_norm()),
    )?;
    let mut leader = GlobalCostLeader::new(*inst, &h)?;
    leader.initial_cuts = approx.cuts.len().min(leader.initial_cuts);
    leader.approx = approx.clone();
    let w: Vec<f64> = y.iter().map(|v| eta * v).collect();
    let out = leader.argmax_with_nu(&w, tol)?;
    *approx = leader.approx;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::norm2;

    #[test]
    fn unconstrained_ball_step() {
        let p = CompositeParams { d: 2, q: 2.0, a_z: 1.0, a_zp: 1.0, q_prime: 2.0 };
        let (x, _) = p.ball_argmax(&[0.3, 0.4, 0.2, -0.1]).unwrap();
        assert_eq!(x, vec![0.3, 0.4, 0.2, -0.1]);
        let (x, _) = p.ball_argmax(&[3.0, 4.0, 2.0, 0.0]).unwrap();
        assert!((x[0] - 0.6).abs() < 1e-12 && (x[1] - 0.8).abs() < 1e-12);
        assert!((x[2] - 1.0).abs() < 1e-12 && x[3] == 0.0);
    }

    #[test]
    fn zprime_step_matches_projected_gradient() {
        let p = CompositeParams { d: 3, q: 1.0, a_z: 1.0, a_zp: 1.0, q_prime: 1.6 };
        let u = [1.2, -0.7, 0.4];
        let fast = p.zprime_argmax(&u);
        let f = |x: &[f64]| {
            let n = norm_p(x, 1.6);
            let g = mirror_map(x, 1.6);
            (dot(&u, x) - 0.5 * n * n, u.iter().zip(&g).map(|(a, b)| a - b).collect::<Vec<_>>())
        };
        let slow = crate::solvers::pga_maximize(
            f,
            &crate::solvers::FeasibleSet::L1Ball { radius: 1.0 },
            &[0.0; 3],
            crate::solvers::PgaOptions { tol: 1e-12, ..Default::default() },
        )
        .unwrap();
        assert!(norm2(&crate::vector::sub(&fast, &slow)) < 1e-6, "{fast:?} vs {slow:?}");
    }

    #[test]
    fn dual_respects_cuts() {
        let p = CompositeParams { d: 2, q: 1.0, a_z: 1.0, a_zp: 1.0, q_prime: 2.0 };
        let cuts = vec![vec![0.5, 0.5, 0.5, 0.5], vec![0.0, 0.0, 1.0, 0.0]];
        let w = [1.0, 0.2, 0.5, -0.3];
        let mut mu = Vec::new();
        let x = composite_argmax(&p, &cuts, &w, &mut mu, 1e-10).unwrap();
        for c in &cuts {
            assert!(dot(c, &x) <= 1e-9, "{x:?} {mu:?}");
        }
        // compare with projected gradient over the same set
        let set = crate::solvers::FeasibleSet::Intersection(vec![
            crate::solvers::FeasibleSet::Slice {
                start: 0,
                len: 2,
                set: Box::new(crate::solvers::FeasibleSet::L1Ball { radius: 1.0 }),
            },
            crate::solvers::FeasibleSet::Slice {
                start: 2,
                len: 2,
                set: Box::new(crate::solvers::FeasibleSet::L1Ball { radius: 1.0 }),
            },
            crate::solvers::FeasibleSet::Halfspace { normal: cuts[0].clone(), offset: 0.0 },
            crate::solvers::FeasibleSet::Halfspace { normal: cuts[1].clone(), offset: 0.0 },
        ]);
        let f = |x: &[f64]| (dot(&w, x) - p.value(x), w.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<_>>());
        let slow = crate::solvers::pga_maximize(f, &set, &[0.0; 4], Default::default()).unwrap();
        assert!(norm2(&crate::vector::sub(&x, &slow)) < 1e-5, "{x:?} vs {slow:?}");
    }

    #[test]
    fn zero_input_gives_origin() {
        let inst = GlobalCostInstance::new(3, f64::INFINITY).unwrap();
        let mut approx = PolarApprox::initial(3, f64::INFINITY).unwrap();
        let (x, nu) = ftrl_argmax_gc(&inst, &mut approx, &[0.0; 6], 0.1, 1e-9).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
        assert_eq!(nu, 0.0);
    }

    #[test]
    fn cutting_planes_drive_slack_down() {
        let inst = GlobalCostInstance::new(2, f64::INFINITY).unwrap().with_cut_budget(50).with_solver_tol(1e-10);
        let mut approx = PolarApprox::initial(2, f64::INFINITY).unwrap();
        let (x, nu) = ftrl_argmax_gc(&inst, &mut approx, &[1.0, 0.0, 0.0, 0.0], 0.05, 1e-10).unwrap();
        assert!(nu <= 1e-3, "nu = {nu}");
        assert!(approx.cuts.len() <= 2 + 50);
        for c in &approx.cuts {
            assert!(c.value(&x) <= 1e-8);
        }
    }
}
