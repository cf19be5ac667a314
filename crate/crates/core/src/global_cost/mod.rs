//! Online scheduling with a global cost: regret measured by
//! `‖Σ a_t ⊙ ℓ_t‖_p` against the best fixed allocation, reduced to
//! approachability of a cone in `ℝ^{2d}`.

mod leader;

pub use leader::{composite_argmax, ftrl_argmax_gc, CompositeParams, GlobalCostLeader};

use serde::{Deserialize, Serialize};

use crate::engine::Schedule;
use crate::error::{check_dim, Error, Result};
use crate::games::{EnvActions, Game, MixedAction, OracleOutput, PureAction, RegretTracker};
use crate::geometry::{ConeSpec, GeneratorSet, NormTag};
use crate::regularizers::{Certificate, Regularizer, RegularizerKind};
use crate::solvers::weighted::phi_with_gradient;
use crate::solvers::{min_weighted_lp_norm, nu_oracle, pga_maximize, FeasibleSet, PgaOptions};
use crate::vector::{conjugate_exponent, dot, norm_p};

pub const DEFAULT_CUT_BUDGET: usize = 200;
pub const DEFAULT_SOLVER_TOL: f64 = 1e-6;

/// Problem size plus the constants of the ℓp algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalCostInstance {
    pub d: usize,
    #[serde(with = "crate::geometry::norm::exponent")]
    pub p: f64,
    #[serde(with = "crate::geometry::norm::exponent")]
    pub q: f64,
    pub a: f64,
    pub q_prime: f64,
    pub cut_budget: usize,
    pub solver_tol: f64,
}

impl GlobalCostInstance {
    pub fn new(d: usize, p: f64) -> Result<Self> {
        if d < 2 || !(p > 1.0) {
            return Err(Error::input(format!("global cost needs d ≥ 2 and p > 1 (d = {d}, p = {p})")));
        }
        let df = d as f64;
        let a = if p.is_infinite() { 1.0 } else { df.powf(1.0 - 2.0 / p).min(1.0) };
        let raw = 1.0 + 1.0 / (2.0 * df.ln() - 1.0);
        let q_prime = if raw > 2.0 || raw <= 1.0 {
            log::info!("q' = {raw:.4} is outside (1, 2] at d = {d}; clamping to 2");
            2.0
        } else {
            raw
        };
        Ok(GlobalCostInstance {
            d,
            p,
            q: conjugate_exponent(p),
            a,
            q_prime,
            cut_budget: DEFAULT_CUT_BUDGET,
            solver_tol: DEFAULT_SOLVER_TOL,
        })
    }

    pub fn with_cut_budget(mut self, budget: usize) -> Self {
        self.cut_budget = budget;
        self
    }

    pub fn with_solver_tol(mut self, tol: f64) -> Self {
        self.solver_tol = tol;
        self
    }

    /// Range bound `½(A d^{max(2/p−1, 0)} + 1)` of the composite regularizer.
    pub fn delta(&self) -> f64 {
        let e = if self.p.is_infinite() { -1.0 } else { 2.0 / self.p - 1.0 };
        0.5 * (self.a * (self.d as f64).powf(e.max(0.0)) + 1.0)
    }

    /// `min{A, (q'−1) d^{2(1/q'−1)}}`.
    pub fn strong_convexity(&self) -> f64 {
        let qp = self.q_prime;
        self.a.min((qp - 1.0) * (self.d as f64).powf(2.0 * (1.0 / qp - 1.0)))
    }

    /// The stated regret bound `4/√T · max{d^{1/p−1/2}, √(2e log d)}`.
    pub fn stated_bound(&self, horizon: usize) -> f64 {
        let df = self.d as f64;
        let inv_p = if self.p.is_infinite() { 0.0 } else { 1.0 / self.p };
        let c = df.powf(inv_p - 0.5).max((2.0 * std::f64::consts::E * df.ln()).sqrt());
        4.0 * c / (horizon as f64).sqrt()
    }

    /// `2M√(Δ/(KT))` with the instance's own constants, which is tighter
    /// than [`Self::stated_bound`] for p = ∞.
    pub fn schedule_bound(&self, horizon: usize) -> f64 {
        4.0 * (self.delta() / (self.strong_convexity() * horizon as f64)).sqrt()
    }

    /// Unit ball of the dual analysis norm, `max{‖z‖_q, ‖z'‖₁} ≤ 1`.
    pub fn dual_norm(&self) -> NormTag {
        NormTag::GlobalCostDual { d: self.d, q: self.q }
    }

    pub fn cone(&self) -> ConeSpec {
        ConeSpec::GlobalCost { d: self.d, p: self.p }
    }
}

/// An element `(y, y')` of the global-cost cone used as a cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub y: Vec<f64>,
    pub y_prime: Vec<f64>,
}

impl Cut {
    pub fn concat(&self) -> Vec<f64> {
        let mut v = self.y.clone();
        v.extend_from_slice(&self.y_prime);
        v
    }

    /// `⟨(y, y'), (z, z')⟩`
    pub fn value(&self, x: &[f64]) -> f64 {
        let d = self.y.len();
        dot(&self.y, &x[..d]) + dot(&self.y_prime, &x[d..])
    }
}

/// Separation from the polar of the global-cost cone.
///
/// `(z, z')` is in the polar iff `max_{y'∈Δ} φ_p(y')‖z₊‖_q + ⟨z', y'⟩ ≤ 0`,
/// since for fixed `y'` the best `y` has `‖y‖_p = φ_p(y')` and is aligned
/// with `z₊`. Returns `None` when the maximum is at most `tol`, otherwise the
/// maximizing element of the cone.
pub fn separate(z: &[f64], z_prime: &[f64], p: f64, tol: f64) -> Result<Option<Cut>> {
    let d = z.len();
    check_dim("separation z'", z_prime.len(), d)?;
    if d < 2 {
        return Err(Error::input("separation needs d ≥ 2"));
    }
    let q = conjugate_exponent(p);
    let zp: Vec<f64> = z.iter().map(|v| v.max(0.0)).collect();
    let s = norm_p(&zp, q);
    let best_vertex = crate::vector::argmax(z_prime);
    let unit = |i: usize| {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        e
    };
    // a vertex y' = e_i has φ = 0, so (0, e_i) is in the cone
    if z_prime[best_vertex] > tol {
        return Ok(Some(Cut { y: vec![0.0; d], y_prime: unit(best_vertex) }));
    }
    if s == 0.0 {
        return Ok(None);
    }
    let objective = |y: &[f64]| -> (f64, Vec<f64>) {
        let floored: Vec<f64> = y.iter().map(|v| v.max(1e-300)).collect();
        match phi_with_gradient(&floored, p) {
            Ok((phi, g)) => {
                let val = s * phi + dot(z_prime, y);
                let grad = g.iter().zip(z_prime).map(|(gi, zi)| s * gi + zi).collect();
                (val, grad)
            }
            Err(_) => (f64::NEG_INFINITY, vec![0.0; d]),
        }
    };
    let opts = PgaOptions { tol: (tol * 1e-3).max(1e-13), max_iter: 5_000, initial_step: 1.0 };
    let set = FeasibleSet::Simplex(d);
    let mut starts = vec![vec![1.0 / d as f64; d]];
    for i in 0..d {
        let mut x = vec![0.5 / d as f64; d];
        x[i] += 0.5;
        starts.push(x);
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for x0 in starts {
        let y = match pga_maximize(objective, &set, &x0, opts) {
            Ok(y) => y,
            Err(Error::Solver { iterate, .. }) if !iterate.is_empty() => iterate,
            Err(e) => return Err(e),
        };
        let v = objective(&y).0;
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, y));
        }
    }
    let (value, y_prime) = best.expect("at least one start");
    if value <= tol {
        return Ok(None);
    }
    let (phi, _) = min_weighted_lp_norm(&y_prime, p)?;
    // unit-p-norm maximizer of ⟨·, z₊⟩
    let u: Vec<f64> = if q == 1.0 {
        zp.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect()
    } else {
        zp.iter().map(|&v| (v / s).powf(q - 1.0)).collect()
    };
    Ok(Some(Cut { y: u.iter().map(|v| phi * v).collect(), y_prime }))
}

/// [`separate`] with the instance's exponent.
pub fn polar_separation(z: &[f64], z_prime: &[f64], inst: &GlobalCostInstance, tol: f64) -> Result<Option<Cut>> {
    separate(z, z_prime, inst.p, tol)
}

/// Distance from `(y, y')` to the global-cost cone in the norm
/// `‖·‖_p + ‖·‖_∞`, which is the support function of `ℬ ∩ 𝒞°`.
///
/// For a fixed radius `s` on the y'-part the best cone point raises every
/// coordinate of y' by `s` (φ_p is monotone), and the y-part then costs the
/// distance to the nonnegative p-ball of radius φ_p. What remains is a
/// convex problem in `s ≥ ‖y'₋‖_∞`, solved by golden section.
pub fn cone_distance(y: &[f64], p: f64) -> Result<f64> {
    if !y.len().is_multiple_of(2) || y.len() < 4 {
        return Err(Error::input(format!("cone_distance needs (y, y') with d ≥ 2, got length {}", y.len())));
    }
    let d = y.len() / 2;
    let (yy, yp) = y.split_at(d);
    let pos: Vec<f64> = yy.iter().map(|v| v.max(0.0)).collect();
    let pos_norm = norm_p(&pos, p);
    let mut neg: Vec<f64> = yy.iter().map(|v| (-v).max(0.0)).collect();
    neg.push(0.0);
    let s0 = yp.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
    let f = |s: f64| -> Result<f64> {
        let raised: Vec<f64> = yp.iter().map(|v| (v + s).max(0.0)).collect();
        let (phi, _) = min_weighted_lp_norm(&raised, p)?;
        let mut rest = neg.clone();
        rest[d] = (pos_norm - phi).max(0.0);
        Ok(norm_p(&rest, p) + s)
    };
    let f0 = f(s0)?;
    // f(s) ≥ s, so the minimizer lies below s0 + f(s0)
    let (mut lo, mut hi) = (s0, s0 + f0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    while hi - lo > 1e-13 * (1.0 + hi) {
        if fa <= fb {
            hi = b;
            (b, fb) = (a, fa);
            a = hi - g * (hi - lo);
            fa = f(a)?;
        } else {
            lo = a;
            (a, fa) = (b, fb);
            b = lo + g * (hi - lo);
            fb = f(b)?;
        }
    }
    Ok(f0.min(fa).min(fb))
}

/// Outer approximation of `ℬ ∩ 𝒞°` by cuts from the cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarApprox {
    pub d: usize,
    #[serde(with = "crate::geometry::norm::exponent")]
    pub p: f64,
    pub cuts: Vec<Cut>,
}

impl PolarApprox {
    /// Starts from the canonical cuts that actually lie in the cone:
    /// `(0, e_i)` always does, `(e_i, 0)` never does.
    pub fn initial(d: usize, p: f64) -> Result<Self> {
        let cone = ConeSpec::GlobalCost { d, p };
        let mut cuts = Vec::new();
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            for cut in [Cut { y: e.clone(), y_prime: vec![0.0; d] }, Cut { y: vec![0.0; d], y_prime: e }] {
                if cone.contains(&cut.concat(), 1e-12)? {
                    cuts.push(cut);
                }
            }
        }
        Ok(PolarApprox { d, p, cuts })
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.cuts.iter().map(Cut::concat).collect()
    }

    pub fn generator(&self, norm: NormTag) -> GeneratorSet {
        GeneratorSet::ball_cap(norm, ConeSpec::GlobalCostPolar { d: self.d, p: self.p }, self.rows())
    }
}

/// The global-cost game: machines `0..d`, losses in `[0,1]^d`, payoff
/// `r(a, ℓ) = (a ⊙ ℓ, ℓ)`.
#[derive(Debug, Clone)]
pub struct GlobalCostGame {
    pub inst: GlobalCostInstance,
    env: EnvActions,
}

pub fn make_game(inst: GlobalCostInstance) -> GlobalCostGame {
    GlobalCostGame { inst, env: EnvActions::Box { dim: inst.d, lo: 0.0, hi: 1.0 } }
}

impl Game for GlobalCostGame {
    fn payoff_dim(&self) -> usize {
        2 * self.inst.d
    }

    fn env_actions(&self) -> &EnvActions {
        &self.env
    }

    fn pure_payoff(&self, i: PureAction, b: &[f64]) -> Vec<f64> {
        let d = self.inst.d;
        let mut r = vec![0.0; 2 * d];
        r[i as usize] = b[i as usize];
        r[d..].copy_from_slice(b);
        r
    }

    fn oracle(&self, x: &[f64]) -> Result<OracleOutput> {
        let d = self.inst.d;
        check_dim("global-cost oracle", x.len(), 2 * d)?;
        let (nu, a) = nu_oracle(&x[..d], &x[d..])?;
        Ok(OracleOutput { action: MixedAction::from_weights(&a), nu })
    }

    fn payoff_bound(&self) -> (f64, NormTag) {
        (2.0, NormTag::GlobalCostPrimal { d: self.inst.d, p: 1.0 })
    }

    fn pure_actions(&self) -> Option<Vec<PureAction>> {
        Some((0..self.inst.d as PureAction).collect())
    }

    fn adversary_score(&self, cumulative: &[f64]) -> f64 {
        let d = self.inst.d;
        regret_of_sums(&cumulative[..d], &cumulative[d..], self.inst.p).unwrap_or(0.0)
    }

    fn regret_tracker(&self) -> Box<dyn RegretTracker> {
        Box::new(GlobalCostTracker {
            p: self.inst.p,
            weighted: vec![0.0; self.inst.d],
            losses: vec![0.0; self.inst.d],
            t: 0,
        })
    }
}

fn regret_of_sums(weighted: &[f64], losses: &[f64], p: f64) -> Result<f64> {
    let clipped: Vec<f64> = losses.iter().map(|v| v.max(0.0)).collect();
    let (phi, _) = min_weighted_lp_norm(&clipped, p)?;
    Ok(norm_p(weighted, p) - phi)
}

struct GlobalCostTracker {
    p: f64,
    weighted: Vec<f64>,
    losses: Vec<f64>,
    t: usize,
}

impl RegretTracker for GlobalCostTracker {
    fn observe(&mut self, action: &MixedAction, pure: Option<PureAction>, b: &[f64]) -> f64 {
        self.t += 1;
        match pure {
            Some(i) => self.weighted[i as usize] += b[i as usize],
            None => {
                for &(i, w) in &action.atoms {
                    self.weighted[i as usize] += w * b[i as usize];
                }
            }
        }
        crate::vector::axpy(&mut self.losses, 1.0, b);
        let t = self.t as f64;
        let w: Vec<f64> = self.weighted.iter().map(|v| v / t).collect();
        let l: Vec<f64> = self.losses.iter().map(|v| v / t).collect();
        regret_of_sums(&w, &l, self.p).unwrap_or(f64::NAN)
    }
}

/// `‖(1/T)Σ a_t ⊙ ℓ_t‖_p − min_{a∈Δ} ‖a ⊙ (1/T)Σ ℓ_t‖_p`.
pub fn eval_regret(history: &[(Vec<f64>, Vec<f64>)], p: f64) -> Result<f64> {
    let (a0, _) = history.first().ok_or_else(|| Error::input("eval_regret: empty history"))?;
    let d = a0.len();
    let mut weighted = vec![0.0; d];
    let mut losses = vec![0.0; d];
    for (a, l) in history {
        check_dim("eval_regret action", a.len(), d)?;
        check_dim("eval_regret loss", l.len(), d)?;
        for i in 0..d {
            weighted[i] += a[i] * l[i];
            losses[i] += l[i];
        }
    }
    let t = history.len() as f64;
    weighted.iter_mut().for_each(|v| *v /= t);
    losses.iter_mut().for_each(|v| *v /= t);
    regret_of_sums(&weighted, &losses, p)
}

/// The ℓp algorithm: composite regularizer on `ℬ ∩ 𝒞°` and its step sizes.
pub fn configure_lp_algorithm(d: usize, p: f64) -> Result<(Regularizer, Schedule)> {
    let inst = GlobalCostInstance::new(d, p)?;
    let approx = PolarApprox::initial(d, p)?;
    let mut domain = approx.generator(inst.dual_norm());
    domain.delta = Some(inst.delta());
    let h = Regularizer::new(RegularizerKind::CompositeGlobalCost { a: inst.a, q_prime: inst.q_prime }, domain)?;
    let schedule = Schedule::new(inst.delta(), inst.strong_convexity(), 2.0)?;
    Ok((h, schedule))
}

/// The arbitrary-norm algorithm for cost `‖·‖_p`: `½‖x‖²_{q'}` on
/// `ℬ ∩ 𝒞°` with `η_t = d^{1/q'−1}√(Δ(q'−1)/t)`.
///
/// Without a supplied Δ the bound `½(c^{q'} + 1)^{2/q'}` is used, where
/// `c = d^{max(1/q'−1/q, 0)}` bounds `‖z‖_{q'}` on the `ℓq` ball; it follows
/// from `‖x‖_{q'}^{q'} = ‖z‖_{q'}^{q'} + ‖z'‖_{q'}^{q'}` and `‖z'‖_{q'} ≤ ‖z'‖₁`.
pub fn configure_norm_algorithm(
    d: usize,
    cost_norm: NormTag,
    q_prime: f64,
    delta: Option<f64>,
) -> Result<(Regularizer, Schedule)> {
    let NormTag::Lp { p } = cost_norm else {
        return Err(Error::capability("the arbitrary-norm algorithm is implemented for ℓp costs"));
    };
    if !(q_prime > 1.0 && q_prime <= 2.0) {
        return Err(Error::input(format!("q' must be in (1, 2], got {q_prime}")));
    }
    let inst = GlobalCostInstance::new(d, p)?;
    let df = d as f64;
    let c = df.powf((1.0 / q_prime - 1.0 / inst.q).max(0.0));
    let delta = match delta {
        Some(v) if v > 0.0 => v,
        Some(v) => return Err(Error::input(format!("Δ must be positive, got {v}"))),
        None => 0.5 * (c.powf(q_prime) + 1.0).powf(2.0 / q_prime),
    };
    let k = (q_prime - 1.0) * df.powf(2.0 * (1.0 / q_prime - 1.0));
    let mut domain = PolarApprox::initial(d, p)?.generator(inst.dual_norm());
    domain.delta = Some(delta);
    // the strong-convexity constant is stated with the cost dimension d
    let cert = Certificate { delta, k, norm: NormTag::l1() };
    let h = Regularizer::with_certificate(RegularizerKind::LpSquared { q_prime, scale: 1.0 }, domain, cert)?;
    Ok((h, Schedule::new(delta, k, 1.0)?))
}

/// `2 d^{1−1/q'} √(Δ/((q'−1)T))`
pub fn norm_algorithm_bound(d: usize, q_prime: f64, delta: f64, horizon: usize) -> f64 {
    2.0 * (d as f64).powf(1.0 - 1.0 / q_prime) * (delta / ((q_prime - 1.0) * horizon as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_constants() {
        let i = GlobalCostInstance::new(4, f64::INFINITY).unwrap();
        assert_eq!(i.a, 1.0);
        assert!((i.q_prime - (1.0 + 1.0 / (2.0 * 4f64.ln() - 1.0))).abs() < 1e-15);
        assert!((i.q_prime - 1.5641).abs() < 1e-4);
        assert_eq!(i.q, 1.0);
        assert_eq!(i.delta(), 1.0);
        let j = GlobalCostInstance::new(4, 2.0).unwrap();
        assert_eq!(j.a, 1.0);
        let k = GlobalCostInstance::new(2, 2.0).unwrap();
        assert_eq!(k.q_prime, 2.0);
        assert!(GlobalCostInstance::new(1, 2.0).is_err());
    }

    #[test]
    fn step_size_matches_closed_form() {
        for d in [3usize, 4, 7] {
            let (_, s) = configure_lp_algorithm(d, f64::INFINITY).unwrap();
            let df = d as f64;
            let c = df.powf(-1.0).max(std::f64::consts::E * (2.0 * df.ln() - 1.0));
            for t in [1usize, 10, 1000] {
                let expected = 1.0 / (2.0 * (t as f64 * c).sqrt());
                assert!((s.eta(t) - expected).abs() < 1e-12 * expected, "d={d} t={t}");
            }
        }
        // d = 4: η_t ≈ 1/(2√(4.8187 t))
        let (_, s) = configure_lp_algorithm(4, f64::INFINITY).unwrap();
        assert!((s.eta(1) - 1.0 / (2.0 * 4.8187f64.sqrt())).abs() < 1e-5);
    }

    #[test]
    fn stated_bound_value() {
        let i = GlobalCostInstance::new(3, f64::INFINITY).unwrap();
        let b = i.stated_bound(4096);
        assert!((b - 4.0 * (2.0 * std::f64::consts::E * 3f64.ln()).sqrt() / 64.0).abs() < 1e-15);
        assert!((b - 0.1527).abs() < 1e-4);
        assert!(i.schedule_bound(4096) < b);
    }

    #[test]
    fn norm_algorithm_schedule() {
        let (_, s) = configure_norm_algorithm(3, NormTag::Lp { p: 2.0 }, 1.5, Some(1.0)).unwrap();
        let expected = 3f64.powf(-1.0 / 3.0) * (0.5f64).sqrt();
        assert!((s.eta(1) - expected).abs() < 1e-12);
        let (h, s) = configure_norm_algorithm(2, NormTag::Lp { p: 2.0 }, 2.0, None).unwrap();
        assert_eq!(h.certificate.delta, 1.0);
        assert!((s.eta(4) - 2f64.powf(-0.5) * 0.5).abs() < 1e-12);
        assert!((norm_algorithm_bound(2, 2.0, 1.0, 100) - 2.0 * (2.0f64 / 100.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn payoff_examples() {
        let g = make_game(GlobalCostInstance::new(2, f64::INFINITY).unwrap());
        let a = MixedAction::from_weights(&[0.5, 0.5]);
        assert_eq!(g.payoff(&a, &[1.0, 1.0]), vec![0.5, 0.5, 1.0, 1.0]);
        assert_eq!(g.payoff(&a, &[0.0, 0.0]), vec![0.0; 4]);
    }

    #[test]
    fn regret_examples() {
        let h = vec![(vec![0.5, 0.5], vec![1.0, 1.0])];
        assert!(eval_regret(&h, f64::INFINITY).unwrap().abs() < 1e-15);
        let h = vec![(vec![0.3, 0.7], vec![0.0, 0.0]); 3];
        assert_eq!(eval_regret(&h, f64::INFINITY).unwrap(), 0.0);
        let h = vec![(vec![1.0, 0.0], vec![1.0, 0.0]); 5];
        assert_eq!(eval_regret(&h, f64::INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn separation_examples() {
        assert_eq!(separate(&[0.0, 0.0], &[0.0, 0.0], f64::INFINITY, 1e-9).unwrap(), None);
        assert_eq!(separate(&[0.0, 0.0], &[-1.0, -1.0], f64::INFINITY, 1e-9).unwrap(), None);
        let cut = separate(&[1.0, 0.0], &[0.0, 0.0], f64::INFINITY, 1e-9).unwrap().unwrap();
        assert!((cut.y_prime[0] - 0.5).abs() < 1e-6 && (cut.y_prime[1] - 0.5).abs() < 1e-6);
        // φ_∞(½, ½) = (Σ 1/y'_i)⁻¹ = ¼
        assert!((cut.value(&[1.0, 0.0, 0.0, 0.0]) - 0.25).abs() < 1e-9);
        let cone = ConeSpec::GlobalCost { d: 2, p: f64::INFINITY };
        assert!(cone.contains(&cut.concat(), 1e-8).unwrap());
    }

    #[test]
    fn canonical_cuts() {
        let a = PolarApprox::initial(3, 2.0).unwrap();
        assert_eq!(a.cuts.len(), 3);
        assert!(a.cuts.iter().all(|c| c.y.iter().all(|&v| v == 0.0)));
    }
}
