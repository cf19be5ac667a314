//! Games with vector payoffs, B-set oracles, environments, and the dual
//! condition checker.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConeSpec, NormTag};
use crate::solvers::{pga_maximize, FeasibleSet, PgaOptions};
use crate::vector::{axpy, dot, norm2};

/// Identifier of a pure decision action. Its meaning is game-specific
/// (an index, or a bitmask for subset games).
pub type PureAction = u64;

/// A finitely supported distribution over pure actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedAction {
    pub atoms: Vec<(PureAction, f64)>,
}

impl MixedAction {
    pub fn pure(i: PureAction) -> Self {
        MixedAction { atoms: vec![(i, 1.0)] }
    }

    /// Dense weights over actions `0..n`, dropping zero entries.
    pub fn from_weights(w: &[f64]) -> Self {
        MixedAction {
            atoms: w.iter().enumerate().filter(|(_, &v)| v > 0.0).map(|(i, &v)| (i as PureAction, v)).collect(),
        }
    }

    pub fn weights(&self, n: usize) -> Vec<f64> {
        let mut w = vec![0.0; n];
        for &(i, p) in &self.atoms {
            w[i as usize] += p;
        }
        w
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Inverse-CDF draw for `u ∈ [0, 1)`.
    pub fn sample(&self, u: f64) -> PureAction {
        let target = u * self.total();
        let mut acc = 0.0;
        for &(i, p) in &self.atoms {
            acc += p;
            if target < acc {
                return i;
            }
        }
        self.atoms.iter().rev().find(|a| a.1 > 0.0).map_or(self.atoms[0].0, |a| a.0)
    }

    pub fn is_distribution(&self, tol: f64) -> bool {
        !self.atoms.is_empty() && self.atoms.iter().all(|a| a.1 >= -tol) && (self.total() - 1.0).abs() <= tol
    }
}

/// The Environment's action set.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvActions {
    Box { dim: usize, lo: f64, hi: f64 },
    Finite(Vec<Vec<f64>>),
}

impl EnvActions {
    pub fn dim(&self) -> usize {
        match self {
            EnvActions::Box { dim, .. } => *dim,
            EnvActions::Finite(v) => v[0].len(),
        }
    }

    pub fn contains(&self, b: &[f64], tol: f64) -> bool {
        match self {
            EnvActions::Box { dim, lo, hi } => b.len() == *dim && b.iter().all(|&v| v >= lo - tol && v <= hi + tol),
            EnvActions::Finite(v) => {
                v.iter().any(|c| c.len() == b.len() && c.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol))
            }
        }
    }

    /// Box corners in binary order (bit i set means coordinate i at `hi`),
    /// or the finite set itself.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        match self {
            EnvActions::Box { dim, lo, hi } => (0..1u64 << dim)
                .map(|mask| (0..*dim).map(|i| if mask >> i & 1 == 1 { *hi } else { *lo }).collect())
                .collect(),
            EnvActions::Finite(v) => v.clone(),
        }
    }

    /// Regular grid with `levels` points per axis (boxes only).
    pub fn grid(&self, levels: usize) -> Vec<Vec<f64>> {
        match self {
            EnvActions::Box { dim, lo, hi } if levels >= 2 => {
                let total = levels.pow(*dim as u32);
                (0..total)
                    .map(|mut idx| {
                        (0..*dim)
                            .map(|_| {
                                let k = idx % levels;
                                idx /= levels;
                                lo + (hi - lo) * k as f64 / (levels - 1) as f64
                            })
                            .collect()
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        match self {
            EnvActions::Box { dim, lo, hi } => (0..*dim).map(|_| rng.random_range(*lo..=*hi)).collect(),
            EnvActions::Finite(v) => v[rng.random_range(0..v.len())].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutput {
    pub action: MixedAction,
    /// Certified slack: `⟨r(action, b), x⟩ ≤ nu` for every environment action b.
    pub nu: f64,
}

/// Incremental regret bookkeeping, one per run.
pub trait RegretTracker: Send {
    /// Records one step and returns the regret so far. `pure` is the drawn
    /// action in mixed runs; otherwise the mixed action is used in expectation.
    fn observe(&mut self, action: &MixedAction, pure: Option<PureAction>, b: &[f64]) -> f64;
}

/// A repeated game with vector payoffs, bi-affine in the two actions.
pub trait Game: Send + Sync {
    fn payoff_dim(&self) -> usize;

    fn env_actions(&self) -> &EnvActions;

    fn pure_payoff(&self, i: PureAction, b: &[f64]) -> Vec<f64>;

    fn payoff(&self, a: &MixedAction, b: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.payoff_dim()];
        for &(i, w) in &a.atoms {
            axpy(&mut r, w, &self.pure_payoff(i, b));
        }
        r
    }

    /// B-set oracle on the polar cone.
    fn oracle(&self, x: &[f64]) -> Result<OracleOutput>;

    /// `(M, norm)` with `‖r(a, b)‖ ≤ M` everywhere.
    fn payoff_bound(&self) -> (f64, NormTag);

    /// Pure decision actions, when there are few enough to list.
    fn pure_actions(&self) -> Option<Vec<PureAction>>;

    /// How far a cumulative payoff is from the target, in the game's own
    /// regret units. Used only to break ties in the adversarial environment.
    fn adversary_score(&self, cumulative: &[f64]) -> f64;

    fn regret_tracker(&self) -> Box<dyn RegretTracker>;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Lowest candidate index.
    #[default]
    Index,
    /// Candidate pushing the cumulative payoff furthest from the target,
    /// then lowest index.
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentSpec {
    /// Best response to `(a_t, x_t)` over box corners plus an optional grid.
    Adversarial {
        #[serde(default)]
        grid: usize,
        #[serde(default)]
        tie_break: TieBreak,
    },
    UniformRandom {
        #[serde(default)]
        seed: u64,
    },
    /// Replays the list cyclically.
    FixedSequence { actions: Vec<Vec<f64>> },
}

/// Runtime state of an environment for one run.
pub struct Environment {
    spec: EnvironmentSpec,
    candidates: Vec<Vec<f64>>,
    rng: ChaCha8Rng,
    t: usize,
}

impl Environment {
    pub fn new(spec: &EnvironmentSpec, game: &dyn Game, run_seed: u64) -> Result<Self> {
        let set = game.env_actions();
        let mut candidates = Vec::new();
        let mut stream = run_seed;
        match spec {
            EnvironmentSpec::Adversarial { grid, .. } => {
                if let EnvActions::Box { dim, .. } = set {
                    if *dim > 16 {
                        return Err(Error::input("adversarial corner enumeration needs dim ≤ 16"));
                    }
                }
                candidates = set.corners();
                candidates.extend(set.grid(*grid));
            }
            EnvironmentSpec::UniformRandom { seed } => {
                stream = crate::harness::seeds::mix(run_seed ^ seed.rotate_left(32));
            }
            EnvironmentSpec::FixedSequence { actions } => {
                if actions.is_empty() {
                    return Err(Error::input("fixed_sequence needs at least one action"));
                }
                for b in actions {
                    if !set.contains(b, 1e-12) {
                        return Err(Error::input(format!("fixed_sequence action {b:?} is outside the action set")));
                    }
                }
            }
        }
        Ok(Environment {
            spec: spec.clone(),
            candidates,
            rng: ChaCha8Rng::seed_from_u64(crate::harness::seeds::mix(stream ^ 0xe7)),
            t: 0,
        })
    }

    /// Environment action for step t, given the announced mixed action and
    /// the learner's point. Never sees the drawn pure action.
    pub fn next(&mut self, game: &dyn Game, a: &MixedAction, x: &[f64], cumulative: &[f64]) -> Vec<f64> {
        self.t += 1;
        match &self.spec {
            EnvironmentSpec::Adversarial { tie_break, .. } => {
                adversarial_pick(game, &self.candidates, a, x, cumulative, *tie_break)
            }
            EnvironmentSpec::UniformRandom { .. } => game.env_actions().sample(&mut self.rng),
            EnvironmentSpec::FixedSequence { actions } => actions[(self.t - 1) % actions.len()].clone(),
        }
    }
}

/// `argmax_b ⟨r(a, b), x⟩` over the candidates.
pub fn adversarial_env(game: &dyn Game, candidates: &[Vec<f64>], a: &MixedAction, x: &[f64]) -> Vec<f64> {
    adversarial_pick(game, candidates, a, x, &[], TieBreak::Index)
}

fn adversarial_pick(
    game: &dyn Game,
    candidates: &[Vec<f64>],
    a: &MixedAction,
    x: &[f64],
    cumulative: &[f64],
    tie_break: TieBreak,
) -> Vec<f64> {
    let payoffs: Vec<Vec<f64>> = candidates.iter().map(|b| game.payoff(a, b)).collect();
    let values: Vec<f64> = payoffs.iter().map(|r| dot(r, x)).collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-12 * (1.0 + best.abs());
    let ties = (0..candidates.len()).filter(|&k| values[k] >= best - slack);
    let pick = match tie_break {
        TieBreak::Index => ties.min().unwrap_or(0),
        TieBreak::Greedy => {
            let mut best_tie: Option<(usize, f64)> = None;
            for k in ties {
                let next: Vec<f64> = cumulative.iter().zip(&payoffs[k]).map(|(c, r)| c + r).collect();
                let s = game.adversary_score(&next);
                if best_tie.is_none_or(|(_, score)| s > score + 1e-12 * (1.0 + score.abs())) {
                    best_tie = Some((k, s));
                }
            }
            best_tie.map_or(0, |(k, _)| k)
        }
    };
    candidates[pick].clone()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualConditionReport {
    pub samples: usize,
    pub worst_residual: f64,
    pub residuals: Vec<f64>,
}

/// For sampled environment actions b, searches for a mixed action a with
/// `r(a, b) ∈ C` and reports the smallest membership residual found.
///
/// The residual is the Euclidean distance to C when C can be projected on,
/// and the norm excess `max(0, ‖y‖_p − φ_p(y'))` for the global-cost cone.
pub fn dual_condition_check(
    game: &dyn Game,
    cone: &ConeSpec,
    b_samples: usize,
    seed: u64,
) -> Result<DualConditionReport> {
    check_dim("dual condition cone", cone.dim(), game.payoff_dim())?;
    let actions =
        game.pure_actions().ok_or_else(|| Error::capability("dual condition check needs an enumerable action set"))?;
    let n = actions.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let residual = |r: &[f64]| -> Result<f64> {
        match cone {
            ConeSpec::GlobalCost { d, p } => {
                let yp: Vec<f64> = r[*d..].iter().map(|v| v.max(0.0)).collect();
                let (phi, _) = crate::solvers::min_weighted_lp_norm(&yp, *p)?;
                let neg: f64 = r.iter().map(|v| (-v).max(0.0)).sum();
                Ok((crate::vector::norm_p(&r[..*d], *p) - phi).max(0.0) + neg)
            }
            _ => Ok(norm2(&crate::vector::sub(r, &cone.project(r)?))),
        }
    };
    let mut residuals = Vec::with_capacity(b_samples);
    for _ in 0..b_samples {
        let b = game.env_actions().sample(&mut rng);
        let pure: Vec<Vec<f64>> = actions.iter().map(|&i| game.pure_payoff(i, &b)).collect();
        let mix = |w: &[f64]| {
            let mut r = vec![0.0; game.payoff_dim()];
            for (wi, ri) in w.iter().zip(&pure) {
                axpy(&mut r, *wi, ri);
            }
            r
        };
        // squared residual is smooth enough for a finite-difference ascent
        let objective = |w: &[f64]| {
            let f = |w: &[f64]| -residual(&mix(w)).map(|v| v * v).unwrap_or(f64::INFINITY);
            let f0 = f(w);
            let h = 1e-7;
            let g = (0..n)
                .map(|i| {
                    let mut wp = w.to_vec();
                    wp[i] += h;
                    (f(&wp) - f0) / h
                })
                .collect();
            (f0, g)
        };
        let opts = PgaOptions { tol: 1e-10, max_iter: 2_000, initial_step: 1.0 };
        let mut best = f64::INFINITY;
        let mut starts = vec![vec![1.0 / n as f64; n]];
        starts.extend((0..n.min(8)).map(|k| {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            e
        }));
        for x0 in starts {
            let w = match pga_maximize(objective, &FeasibleSet::Simplex(n), &x0, opts) {
                Ok(w) => w,
                Err(Error::Solver { iterate, .. }) if !iterate.is_empty() => iterate,
                Err(e) => return Err(e),
            };
            best = best.min(residual(&mix(&w))?);
        }
        residuals.push(best);
    }
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    Ok(DualConditionReport { samples: b_samples, worst_residual: worst, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_sampling() {
        let a = MixedAction { atoms: vec![(3, 0.25), (7, 0.75)] };
        assert_eq!(a.sample(0.0), 3);
        assert_eq!(a.sample(0.2499), 3);
        assert_eq!(a.sample(0.25), 7);
        assert_eq!(a.sample(0.999_999), 7);
        assert_eq!(MixedAction::pure(5).sample(0.7), 5);
    }

    #[test]
    fn corners_in_binary_order() {
        let c = EnvActions::Box { dim: 2, lo: -1.0, hi: 1.0 }.corners();
        assert_eq!(c, vec![vec![-1.0, -1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(EnvActions::Box { dim: 2, lo: 0.0, hi: 1.0 }.grid(3).len(), 9);
    }

    #[test]
    fn environment_spec_json() {
        let s: EnvironmentSpec = serde_json::from_str(r#"{"kind":"adversarial","tie_break":"greedy"}"#).unwrap();
        assert_eq!(s, EnvironmentSpec::Adversarial { grid: 0, tie_break: TieBreak::Greedy });
        assert!(serde_json::from_str::<EnvironmentSpec>(r#"{"kind":"adversarial","bogus":1}"#).is_err());
    }

    #[test]
    fn greedy_breaks_ties_towards_regret() {
        // every corner ties at 0 against the invariant measure
        let (g, mut h, _) =
            crate::phi_regret::configure(crate::phi_regret::PhiFamily::internal_pairs(3).unwrap()).unwrap();
        let x = crate::engine::Leader::argmax(&mut h, &[0.0; 6], 1e-12).unwrap();
        let a = g.oracle(&x).unwrap().action;
        let greedy = EnvironmentSpec::Adversarial { grid: 0, tie_break: TieBreak::Greedy };
        let b = Environment::new(&greedy, &g, 0).unwrap().next(&g, &a, &x, &[0.0; 6]);
        assert_eq!(b, vec![1.0, -1.0, -1.0]);
        let index = EnvironmentSpec::Adversarial { grid: 0, tie_break: TieBreak::Index };
        let b = Environment::new(&index, &g, 0).unwrap().next(&g, &a, &x, &[0.0; 6]);
        assert_eq!(b, vec![-1.0, -1.0, -1.0]);
    }
}
