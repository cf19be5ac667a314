//! Blackwell's projection algorithm, orthant-target demo games, and the
//! step-by-step comparison with Euclidean FTRL.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{Leader, RunReport, Schedule, StepRecord};
use crate::error::{check_dim, Error, Result};
use crate::games::{
    EnvActions, Environment, EnvironmentSpec, Game, MixedAction, OracleOutput, PureAction, RegretTracker,
};
use crate::geometry::{cap_generator, ConeSpec, NormTag};
use crate::regularizers::{Regularizer, RegularizerKind};
use crate::vector::{axpy, cosine, dot, norm2, positive_part};

/// `r(i, v) = W(v − v_i·1)` with `W ≥ 0` of shape n×d, actions `0..d`,
/// environment `v ∈ [lo, hi]^d`, target `ℝⁿ₋`.
///
/// With `u = Wᵀx`, the mixed action `u/‖u‖₁` zeroes `⟨r(a, v), x⟩` for
/// every `v`, so the orthant is a B-set.
#[derive(Debug, Clone)]
pub struct WeightedDeviationGame {
    pub w: Vec<Vec<f64>>,
    env: EnvActions,
    /// Certified `max ‖r‖₂` over corners and pure actions.
    pub m_bound: f64,
}

impl WeightedDeviationGame {
    pub fn new(w: Vec<Vec<f64>>, lo: f64, hi: f64) -> Result<Self> {
        let d = w.first().map(Vec::len).ok_or_else(|| Error::input("empty payoff matrix"))?;
        if d < 2 {
            return Err(Error::input("need at least two actions"));
        }
        for row in &w {
            check_dim("payoff matrix row", row.len(), d)?;
            if row.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::input("payoff matrix entries must be finite and nonnegative"));
            }
        }
        if !(lo < hi) || d > 16 {
            return Err(Error::input("need lo < hi and d ≤ 16"));
        }
        let env = EnvActions::Box { dim: d, lo, hi };
        let mut g = WeightedDeviationGame { w, env, m_bound: 0.0 };
        // the norm is convex in v, so its maximum over the box is at a corner
        let mut m = 0.0_f64;
        for v in g.env.corners() {
            for i in 0..d as PureAction {
                m = m.max(norm2(&g.pure_payoff(i, &v)));
            }
        }
        g.m_bound = m;
        Ok(g)
    }

    pub fn identity(d: usize) -> Result<Self> {
        let w = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(w, 0.0, 1.0)
    }

    /// Entries uniform in `[0, 1]`, rows `n`, actions `d`, losses in `[0, 1]`.
    pub fn random(n: usize, d: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = (0..n).map(|_| (0..d).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        Self::new(w, 0.0, 1.0)
    }

    pub fn target(&self) -> ConeSpec {
        ConeSpec::nonpos_orthant(self.w.len())
    }

    fn d(&self) -> usize {
        self.w[0].len()
    }
}

impl Game for WeightedDeviationGame {
    fn payoff_dim(&self) -> usize {
        self.w.len()
    }

    fn env_actions(&self) -> &EnvActions {
        &self.env
    }

    fn pure_payoff(&self, i: PureAction, b: &[f64]) -> Vec<f64> {
        let vi = b[i as usize];
        self.w.iter().map(|row| row.iter().zip(b).map(|(wij, bj)| wij * (bj - vi)).sum()).collect()
    }

    fn oracle(&self, x: &[f64]) -> Result<OracleOutput> {
        check_dim("oracle input", x.len(), self.w.len())?;
        let d = self.d();
        let u_of = |x: &[f64]| -> Vec<f64> {
            (0..d).map(|j| self.w.iter().zip(x).map(|(row, xi)| row[j] * xi.max(0.0)).sum()).collect()
        };
        let mut u = u_of(x);
        if u.iter().sum::<f64>() <= 0.0 {
            // any action works at the origin; use the all-ones reference ray
            u = u_of(&vec![1.0; self.w.len()]);
        }
        let s: f64 = u.iter().sum();
        let a = if s > 0.0 { u.iter().map(|v| v / s).collect() } else { vec![1.0 / d as f64; d] };
        Ok(OracleOutput { action: MixedAction::from_weights(&a), nu: 0.0 })
    }

    fn payoff_bound(&self) -> (f64, NormTag) {
        (self.m_bound, NormTag::l2())
    }

    fn pure_actions(&self) -> Option<Vec<PureAction>> {
        Some((0..self.d() as PureAction).collect())
    }

    fn adversary_score(&self, cumulative: &[f64]) -> f64 {
        norm2(&positive_part(cumulative))
    }

    fn regret_tracker(&self) -> Box<dyn RegretTracker> {
        Box::new(DistanceTracker { sum: vec![0.0; self.w.len()], t: 0, n: self.w.len(), game: self.clone() })
    }
}

/// Euclidean distance of the average payoff to the nonpositive orthant.
struct DistanceTracker {
    sum: Vec<f64>,
    t: usize,
    n: usize,
    game: WeightedDeviationGame,
}

impl RegretTracker for DistanceTracker {
    fn observe(&mut self, action: &MixedAction, pure: Option<PureAction>, b: &[f64]) -> f64 {
        debug_assert_eq!(self.sum.len(), self.n);
        let r = match pure {
            Some(i) => self.game.pure_payoff(i, b),
            None => self.game.payoff(action, b),
        };
        axpy(&mut self.sum, 1.0, &r);
        self.t += 1;
        norm2(&positive_part(&self.sum)) / self.t as f64
    }
}

/// Running payoff sum for Blackwell's algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlackwellState {
    pub sum: Vec<f64>,
    pub t: usize,
}

impl BlackwellState {
    pub fn new(n: usize) -> Self {
        BlackwellState { sum: vec![0.0; n], t: 0 }
    }

    pub fn mean(&self) -> Vec<f64> {
        if self.t == 0 {
            return vec![0.0; self.sum.len()];
        }
        self.sum.iter().map(|v| v / self.t as f64).collect()
    }

    pub fn push(&mut self, r: &[f64]) {
        axpy(&mut self.sum, 1.0, r);
        self.t += 1;
    }
}

/// `(proj_{C°} r̄_{t−1}, oracle(proj_{C°} r̄_{t−1}))`.
pub fn blackwell_step(state: &BlackwellState, cone: &ConeSpec, game: &dyn Game) -> Result<(Vec<f64>, MixedAction)> {
    let x = cone.polar().project(&state.mean())?;
    let out = game.oracle(&x)?;
    Ok((x, out.action))
}

/// `2√2·M/√t`
pub fn blackwell_bound(m: f64, t: usize) -> f64 {
    2.0 * 2f64.sqrt() * m / (t as f64).sqrt()
}

/// Blackwell's algorithm against `env`. The report uses the engine's
/// record layout with `support_value` the Euclidean distance of `r̄_t` to
/// the target and `bound_value = 2√2·M/√t`.
pub fn run(game: &WeightedDeviationGame, env: &mut Environment, horizon: usize, seed: u64) -> Result<RunReport> {
    if horizon == 0 {
        return Err(Error::input("horizon must be at least 1"));
    }
    let cone = game.target();
    let mut state = BlackwellState::new(game.payoff_dim());
    let mut steps = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let (x, a) = blackwell_step(&state, &cone, game)?;
        let b = env.next(game, &a, &x, &state.sum);
        let r = game.payoff(&a, &b);
        let inner = dot(&r, &x);
        state.push(&r);
        let distance = norm2(&positive_part(&state.mean()));
        steps.push(StepRecord {
            t,
            x,
            action: a,
            pure: None,
            b,
            r,
            inner,
            nu: 0.0,
            support_value: distance,
            bound_value: blackwell_bound(game.m_bound, t),
            regret: distance,
        });
    }
    let last = steps.last().expect("horizon ≥ 1");
    Ok(RunReport {
        final_support: last.support_value,
        final_bound: last.bound_value,
        high_prob_bound: last.bound_value,
        slack_mean: 0.0,
        final_regret: last.regret,
        mean_payoff: state.mean(),
        guarantee_holds: last.support_value <= last.bound_value,
        mixed: false,
        seed,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub steps: usize,
    pub min_cosine: f64,
    pub max_action_gap: f64,
    /// First step where the oracle inputs stop being positively colinear.
    pub divergence: Option<Divergence>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    pub t: usize,
    pub blackwell_input: Vec<f64>,
    pub ftrl_input: Vec<f64>,
}

/// Runs Blackwell's algorithm and FTRL with `½‖·‖₂²` on `C° ∩ B₂` side by
/// side on the same payoff stream. The environment draws `b_t` uniformly,
/// independently of the actions, so both see the same `b_t`.
pub fn equivalence_check(game: &WeightedDeviationGame, horizon: usize, seed: u64) -> Result<EquivalenceReport> {
    let cone = game.target();
    let polar = cone.polar();
    let mut ftrl = Regularizer::new(RegularizerKind::EuclideanSquared, cap_generator(&polar, NormTag::l2()))?;
    // any positive step sizes give the same directions
    let schedule = Schedule::new(0.5, 1.0, game.m_bound.max(1e-12))?;
    let spec = EnvironmentSpec::UniformRandom { seed };
    let mut env = Environment::new(&spec, game, seed)?;
    let mut state = BlackwellState::new(game.payoff_dim());
    let mut min_cos = 1.0_f64;
    let mut max_gap = 0.0_f64;
    let mut divergence = None;
    for t in 1..=horizon {
        let (xb, ab) = blackwell_step(&state, &cone, game)?;
        let eta = schedule.eta(t.saturating_sub(1).max(1));
        let w: Vec<f64> = state.sum.iter().map(|v| eta * v).collect();
        let xf = ftrl.argmax(&w, 1e-12)?;
        let af = game.oracle(&xf)?.action;
        let (nb, nf) = (norm2(&xb), norm2(&xf));
        let colinear = if nb == 0.0 || nf == 0.0 {
            if nb == nf {
                true
            } else {
                min_cos = min_cos.min(0.0);
                false
            }
        } else {
            let c = cosine(&xb, &xf);
            min_cos = min_cos.min(c);
            c >= 1.0 - 1e-8
        };
        let d = game.d();
        let gap = ab.weights(d).iter().zip(af.weights(d)).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        max_gap = max_gap.max(gap);
        if !colinear && divergence.is_none() {
            divergence = Some(Divergence { t, blackwell_input: xb.clone(), ftrl_input: xf.clone() });
        }
        let b = env.next(game, &ab, &xb, &state.sum);
        state.push(&game.payoff(&ab, &b));
    }
    Ok(EquivalenceReport {
        steps: horizon,
        min_cosine: min_cos,
        max_action_gap: max_gap,
        passed: divergence.is_none() && max_gap <= 1e-9,
        divergence,
    })
}
