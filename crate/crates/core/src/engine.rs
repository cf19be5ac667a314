//! The FTRL approachability loop, its mixed-action variant, and the
//! bound formulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::games::{Environment, Game, MixedAction, PureAction};
use crate::regularizers::Regularizer;
use crate::vector::{axpy, dot};

/// Step sizes `η_t = √(ΔK/(M²t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub delta: f64,
    pub k: f64,
    pub m: f64,
}

impl Schedule {
    pub fn new(delta: f64, k: f64, m: f64) -> Result<Self> {
        // Δ = 0 is allowed: it is the range of a regularizer on a single point
        if !(delta >= 0.0 && k > 0.0 && m > 0.0) || !(delta * k * m).is_finite() {
            return Err(Error::input(format!("schedule needs Δ ≥ 0 and positive K, M (got {delta}, {k}, {m})")));
        }
        Ok(Schedule { delta, k, m })
    }

    pub fn eta(&self, t: usize) -> f64 {
        (self.delta * self.k / (self.m * self.m * t.max(1) as f64)).sqrt()
    }

    /// `2M√(Δ/(Kt))`
    pub fn bound(&self, t: usize) -> f64 {
        2.0 * self.m * (self.delta / (self.k * t as f64)).sqrt()
    }
}

/// `(2M√(Δ/(KT)), (M/√T)(2√(Δ/K) + radius·√(2 log(1/δ))))`.
pub fn bound_values(schedule: &Schedule, horizon: usize, radius: f64, delta_conf: f64) -> Result<(f64, f64)> {
    if horizon == 0 {
        return Err(Error::input("bound_values needs T ≥ 1"));
    }
    if !(delta_conf > 0.0 && delta_conf < 1.0) {
        return Err(Error::input(format!("confidence δ must be in (0, 1), got {delta_conf}")));
    }
    let Schedule { delta, k, m } = *schedule;
    let root_t = (horizon as f64).sqrt();
    let expectation = schedule.bound(horizon);
    let high_prob = m / root_t * (2.0 * (delta / k).sqrt() + radius * (2.0 * (1.0 / delta_conf).ln()).sqrt());
    Ok((expectation, high_prob))
}

/// Computes `argmax_{x∈X} ⟨w, x⟩ − h(x)` and the support function of X.
pub trait Leader: Send {
    fn dim(&self) -> usize;

    fn argmax(&mut self, w: &[f64], tol: f64) -> Result<Vec<f64>>;

    fn support(&mut self, y: &[f64], tol: f64) -> Result<f64>;

    /// `‖X‖` in the analysis norm.
    fn radius(&self) -> f64;

    /// Cutting planes added so far, for leaders that refine X.
    fn cut_count(&self) -> usize {
        0
    }
}

impl Leader for Regularizer {
    fn dim(&self) -> usize {
        self.domain.ambient_dim()
    }

    fn argmax(&mut self, w: &[f64], tol: f64) -> Result<Vec<f64>> {
        self.conj_argmax(w, tol)
    }

    fn support(&mut self, y: &[f64], tol: f64) -> Result<f64> {
        self.domain.support_function(y, tol)
    }

    fn radius(&self) -> f64 {
        self.domain.radius
    }
}

/// `conj_argmax(h, η_{t−1} Y)`.
pub fn ftrl_step(h: &Regularizer, cumulative: &[f64], eta_prev: f64, tol: f64) -> Result<Vec<f64>> {
    if !(eta_prev > 0.0) {
        return Err(Error::input(format!("η must be positive, got {eta_prev}")));
    }
    let w: Vec<f64> = cumulative.iter().map(|v| eta_prev * v).collect();
    h.conj_argmax(&w, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub x: Vec<f64>,
    pub action: MixedAction,
    pub pure: Option<PureAction>,
    pub b: Vec<f64>,
    pub r: Vec<f64>,
    /// `⟨r(a_t, b_t), x_t⟩` with the expected payoff of the mixed action.
    pub inner: f64,
    pub nu: f64,
    /// `I*_X(r̄_t)`
    pub support_value: f64,
    /// `2M√(Δ/(Kt))`
    pub bound_value: f64,
    pub regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub steps: Vec<StepRecord>,
    pub final_support: f64,
    pub final_bound: f64,
    pub high_prob_bound: f64,
    pub slack_mean: f64,
    pub final_regret: f64,
    pub mean_payoff: Vec<f64>,
    pub guarantee_holds: bool,
    pub mixed: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub horizon: usize,
    pub tol: f64,
    /// Abort when a step's oracle slack exceeds this.
    pub nu_hard_limit: Option<f64>,
    pub delta_conf: f64,
    pub seed: u64,
    /// Sample pure actions and play their realized payoffs.
    pub mixed: bool,
    /// Evaluate the support function at every step rather than only at
    /// the end; it is the expensive part for cut-refined generators.
    pub support_every_step: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            horizon: 1,
            tol: 1e-9,
            nu_hard_limit: None,
            delta_conf: 0.1,
            seed: 0,
            mixed: false,
            support_every_step: true,
        }
    }
}

/// Runs FTRL approachability against `env` for `settings.horizon` steps.
///
/// The environment sees `a_t` and `x_t` but never the drawn pure action,
/// which is sampled only after `b_t` is fixed.
pub fn run(
    game: &dyn Game,
    leader: &mut dyn Leader,
    schedule: &Schedule,
    env: &mut Environment,
    settings: &RunSettings,
) -> Result<RunReport> {
    let n = game.payoff_dim();
    check_dim("leader dimension", leader.dim(), n)?;
    if settings.horizon == 0 {
        return Err(Error::input("horizon must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(crate::harness::seeds::mix(settings.seed ^ 0x9a3e));
    let mut tracker = game.regret_tracker();
    let mut cumulative = vec![0.0; n];
    let mut steps = Vec::with_capacity(settings.horizon);
    let mut nu_sum = 0.0;
    for t in 1..=settings.horizon {
        let eta_prev = schedule.eta(t.saturating_sub(1).max(1));
        let w: Vec<f64> = cumulative.iter().map(|v| eta_prev * v).collect();
        let x = leader.argmax(&w, settings.tol)?;
        let out = game.oracle(&x)?;
        if let Some(limit) = settings.nu_hard_limit {
            if out.nu > limit {
                return Err(Error::SlackLimit { step: t, nu: out.nu, limit });
            }
        }
        let b = env.next(game, &out.action, &x, &cumulative);
        let expected = game.payoff(&out.action, &b);
        let inner = dot(&expected, &x);
        let (pure, r) = if settings.mixed {
            let u: f64 = rng.random();
            let i = out.action.sample(u);
            (Some(i), game.pure_payoff(i, &b))
        } else {
            (None, expected)
        };
        axpy(&mut cumulative, 1.0, &r);
        nu_sum += out.nu;
        let regret = tracker.observe(&out.action, pure, &b);
        let support_value = if settings.support_every_step || t == settings.horizon {
            let mean: Vec<f64> = cumulative.iter().map(|v| v / t as f64).collect();
            leader.support(&mean, settings.tol)?
        } else {
            f64::NAN
        };
        steps.push(StepRecord {
            t,
            x,
            action: out.action,
            pure,
            b,
            r,
            inner,
            nu: out.nu,
            support_value,
            bound_value: schedule.bound(t),
            regret,
        });
    }
    let horizon = settings.horizon;
    let (final_bound, high_prob_bound) = bound_values(schedule, horizon, leader.radius(), settings.delta_conf)?;
    let last = steps.last().expect("horizon ≥ 1");
    let final_support = last.support_value;
    let final_regret = last.regret;
    let slack_mean = nu_sum / horizon as f64;
    let target = if settings.mixed { high_prob_bound } else { final_bound };
    Ok(RunReport {
        final_support,
        final_bound,
        high_prob_bound,
        slack_mean,
        final_regret,
        mean_payoff: cumulative.iter().map(|v| v / horizon as f64).collect(),
        guarantee_holds: final_support <= target + slack_mean + settings.tol,
        mixed: settings.mixed,
        seed: settings.seed,
        steps,
    })
}

/// [`run`] with sampled pure actions.
pub fn run_mixed(
    game: &dyn Game,
    leader: &mut dyn Leader,
    schedule: &Schedule,
    env: &mut Environment,
    settings: &RunSettings,
) -> Result<RunReport> {
    if game.pure_actions().is_none() && game.payoff_dim() > 0 {
        log::debug!("mixed run on a game without an enumerable action list");
    }
    run(game, leader, schedule, env, &RunSettings { mixed: true, ..*settings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_examples() {
        let s = Schedule::new(12f64.ln(), 1.0, 2.0).unwrap();
        assert!((s.eta(1) - 12f64.ln().sqrt() / 2.0).abs() < 1e-15);
        assert!((s.eta(1) - 0.7881).abs() < 1e-4);
        assert!((s.eta(4) - s.eta(1) / 2.0).abs() < 1e-15);
        assert_eq!(Schedule::new(1.0, 1.0, 1.0).unwrap().eta(1), 1.0);
        assert!(Schedule::new(-1.0, 1.0, 1.0).is_err());
        assert!(Schedule::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn bound_examples() {
        let s = Schedule::new(12f64.ln(), 1.0, 2.0).unwrap();
        let (e, _) = bound_values(&s, 4096, 1.0, 0.1).unwrap();
        assert!((e - 4.0 * (12f64.ln() / 4096.0).sqrt()).abs() < 1e-15);
        let (e, h) = bound_values(&s, 100, 1.0, 1.0 - 1e-15).unwrap();
        assert!((h - e).abs() < 1e-6);
        let b = Schedule::new(0.5, 1.0, 1.0).unwrap();
        assert!((b.bound(100) - 2f64.sqrt() / 10.0).abs() < 1e-15);
        assert!(bound_values(&s, 0, 1.0, 0.1).is_err());
    }

    #[test]
    fn ftrl_step_examples() {
        let h = Regularizer::new(
            crate::regularizers::RegularizerKind::Entropic { d: 2 },
            crate::geometry::GeneratorSet::simplex(2),
        )
        .unwrap();
        assert_eq!(ftrl_step(&h, &[0.0, 0.0], 1.0, 1e-9).unwrap(), vec![0.5, 0.5]);
        let x = ftrl_step(&h, &[2f64.ln() * 2.0, 0.0], 0.5, 1e-9).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-15);
        // doubling η and halving Y is the same input
        assert_eq!(ftrl_step(&h, &[0.3, -1.1], 2.0, 1e-9).unwrap(), ftrl_step(&h, &[0.6, -2.2], 1.0, 1e-9).unwrap());
    }
}
