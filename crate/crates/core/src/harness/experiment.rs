//! Building the learner for a config and running it over all seeds.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GcAlgorithm, PhiSpec, Problem};
use crate::blackwell::{self, WeightedDeviationGame};
use crate::combinatorial::{self, CombInstance};
use crate::engine::{self, Leader, RunReport, RunSettings, Schedule};
use crate::error::{Error, Result};
use crate::games::{Environment, Game};
use crate::geometry::NormTag;
use crate::global_cost::{self, GlobalCostInstance, GlobalCostLeader};
use crate::phi_regret::{self, PhiFamily};
use crate::regularizers::Regularizer;

/// One CSV row of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub seed: u64,
    pub t: usize,
    pub support_value: f64,
    pub bound_value: f64,
    pub inner: f64,
    pub nu: f64,
    pub regret: f64,
}

/// Per-seed outcome as stored in `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub seed: u64,
    #[serde(with = "super::output::nan_as_null")]
    pub final_support: f64,
    #[serde(with = "super::output::nan_as_null")]
    pub final_bound: f64,
    #[serde(with = "super::output::nan_as_null")]
    pub high_prob_bound: f64,
    /// Problem-specific regret at the horizon.
    #[serde(with = "super::output::nan_as_null")]
    pub regret: f64,
    #[serde(with = "super::output::nan_as_null")]
    pub slack_mean: f64,
    /// The stated closed-form bound where it differs from `final_bound`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stated_bound: Option<f64>,
    pub cuts_added: usize,
    pub guarantee_holds: bool,
    pub wall_time_s: f64,
    /// Set when the run stopped on the ν hard limit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub record: SummaryRecord,
    pub rows: Vec<StepRow>,
    /// Full report, kept only when requested.
    pub report: Option<RunReport>,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub outcomes: Vec<SeedOutcome>,
}

impl Experiment {
    pub fn any_aborted(&self) -> bool {
        self.outcomes.iter().any(|o| o.record.aborted.is_some())
    }

    pub fn records(&self) -> Vec<SummaryRecord> {
        self.outcomes.iter().map(|o| o.record.clone()).collect()
    }
}

enum LeaderRecipe {
    Plain(Regularizer),
    GlobalCost(GlobalCostInstance, Regularizer),
}

impl LeaderRecipe {
    fn build(&self) -> Result<Box<dyn Leader>> {
        Ok(match self {
            LeaderRecipe::Plain(h) => Box::new(h.clone()),
            LeaderRecipe::GlobalCost(inst, h) => Box::new(GlobalCostLeader::new(*inst, h)?),
        })
    }
}

/// Everything needed to run one seed.
pub struct Setup {
    game: SetupGame,
    pub schedule: Option<Schedule>,
    recipe: Option<LeaderRecipe>,
    pub stated_bound: Option<f64>,
    pub nu_hard_limit: Option<f64>,
}

enum SetupGame {
    Engine(Box<dyn Game>),
    Blackwell(WeightedDeviationGame),
}

impl Setup {
    pub fn game(&self) -> &dyn Game {
        match &self.game {
            SetupGame::Engine(g) => g.as_ref(),
            SetupGame::Blackwell(g) => g,
        }
    }
}

pub fn phi_family(cfg: &ExperimentConfig) -> Result<PhiFamily> {
    let d = cfg.d;
    match cfg.problem {
        Problem::Internal => PhiFamily::internal_pairs(d),
        _ => match &cfg.phi {
            None => PhiFamily::all_maps(d),
            Some(PhiSpec::Named(name)) => match name.as_str() {
                "transpositions" => PhiFamily::transpositions(d),
                "internal_pairs" => PhiFamily::internal_pairs(d),
                "all_maps" => PhiFamily::all_maps(d),
                other => Err(Error::Config(format!(
                    "field `phi`: unknown family `{other}` (expected transpositions, internal_pairs or all_maps)"
                ))),
            },
            Some(PhiSpec::Maps(maps)) => PhiFamily::custom(d, maps.clone()),
        },
    }
}

pub fn setup(cfg: &ExperimentConfig) -> Result<Setup> {
    let horizon = cfg.horizon;
    match cfg.problem {
        Problem::Swap | Problem::Internal => {
            let (game, h, schedule) = phi_regret::configure(phi_family(cfg)?)?;
            Ok(Setup {
                game: SetupGame::Engine(Box::new(game)),
                schedule: Some(schedule),
                recipe: Some(LeaderRecipe::Plain(h)),
                stated_bound: None,
                nu_hard_limit: cfg.nu_hard_limit,
            })
        }
        Problem::Combinatorial => {
            let m = cfg.m.ok_or_else(|| Error::Config("missing field `m`".into()))?;
            let (game, h, schedule) = combinatorial::configure(CombInstance::new(cfg.d, m)?)?;
            Ok(Setup {
                game: SetupGame::Engine(Box::new(game)),
                schedule: Some(schedule),
                recipe: Some(LeaderRecipe::Plain(h)),
                stated_bound: None,
                nu_hard_limit: cfg.nu_hard_limit,
            })
        }
        Problem::Globalcost => {
            let p = cfg.p.ok_or_else(|| Error::Config("missing field `p`".into()))?;
            let mut inst = GlobalCostInstance::new(cfg.d, p)?;
            if let Some(b) = cfg.cut_budget {
                inst = inst.with_cut_budget(b);
            }
            if let Some(t) = cfg.solver_tol {
                inst = inst.with_solver_tol(t);
            }
            let (h, schedule, stated) = match cfg.algorithm {
                GcAlgorithm::Lp => {
                    let (h, s) = global_cost::configure_lp_algorithm(cfg.d, p)?;
                    (h, s, inst.stated_bound(horizon))
                }
                GcAlgorithm::Norm => {
                    let q_prime = cfg.q_prime.ok_or_else(|| Error::Config("missing field `q_prime`".into()))?;
                    let (h, s) = global_cost::configure_norm_algorithm(cfg.d, NormTag::Lp { p }, q_prime, cfg.range)?;
                    let bound = global_cost::norm_algorithm_bound(cfg.d, q_prime, h.certificate.delta, horizon);
                    (h, s, bound)
                }
            };
            Ok(Setup {
                game: SetupGame::Engine(Box::new(global_cost::make_game(inst))),
                schedule: Some(schedule),
                recipe: Some(LeaderRecipe::GlobalCost(inst, h)),
                stated_bound: Some(stated),
                nu_hard_limit: Some(cfg.nu_hard_limit.unwrap_or(0.05 * stated)),
            })
        }
        Problem::BlackwellDemo => {
            let game = match (&cfg.weights, cfg.game_seed) {
                (Some(w), _) => WeightedDeviationGame::new(w.clone(), 0.0, 1.0)?,
                (None, Some(s)) => WeightedDeviationGame::random(cfg.d, cfg.d, s)?,
                (None, None) => WeightedDeviationGame::identity(cfg.d)?,
            };
            Ok(Setup {
                game: SetupGame::Blackwell(game),
                schedule: None,
                recipe: None,
                stated_bound: None,
                nu_hard_limit: None,
            })
        }
    }
}

fn rows_of(seed: u64, report: &RunReport) -> Vec<StepRow> {
    report
        .steps
        .iter()
        .map(|s| StepRow {
            seed,
            t: s.t,
            support_value: s.support_value,
            bound_value: s.bound_value,
            inner: s.inner,
            nu: s.nu,
            regret: s.regret,
        })
        .collect()
}

/// Runs one seed. A breach of the ν hard limit is reported in the record,
/// not as an error.
pub fn run_seed(cfg: &ExperimentConfig, setup: &Setup, seed: u64, keep_report: bool) -> Result<SeedOutcome> {
    let start = Instant::now();
    let mut env = Environment::new(&cfg.environment, setup.game(), seed)?;
    let result = match (&setup.game, &setup.recipe, &setup.schedule) {
        (SetupGame::Blackwell(g), _, _) => blackwell::run(g, &mut env, cfg.horizon, seed).map(|r| (r, 0)),
        (SetupGame::Engine(game), Some(recipe), Some(schedule)) => {
            let mut leader = recipe.build()?;
            let settings = RunSettings {
                horizon: cfg.horizon,
                tol: cfg.tol,
                nu_hard_limit: setup.nu_hard_limit,
                delta_conf: cfg.delta_conf,
                seed,
                mixed: cfg.mixed,
                support_every_step: cfg.support_every_step,
            };
            engine::run(game.as_ref(), leader.as_mut(), schedule, &mut env, &settings).map(|r| (r, leader.cut_count()))
        }
        _ => unreachable!("engine problems always carry a leader and a schedule"),
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    match result {
        Ok((report, cuts_added)) => {
            let record = SummaryRecord {
                seed,
                final_support: report.final_support,
                final_bound: report.final_bound,
                high_prob_bound: report.high_prob_bound,
                regret: report.final_regret,
                slack_mean: report.slack_mean,
                stated_bound: setup.stated_bound,
                cuts_added,
                guarantee_holds: report.guarantee_holds,
                wall_time_s,
                aborted: None,
            };
            let rows = rows_of(seed, &report);
            Ok(SeedOutcome { record, rows, report: keep_report.then_some(report) })
        }
        Err(e @ Error::SlackLimit { .. }) => {
            log::warn!("seed {seed}: {e}");
            let nan = f64::NAN;
            let record = SummaryRecord {
                seed,
                final_support: nan,
                final_bound: nan,
                high_prob_bound: nan,
                regret: nan,
                slack_mean: nan,
                stated_bound: setup.stated_bound,
                cuts_added: 0,
                guarantee_holds: false,
                wall_time_s,
                aborted: Some(e.to_string()),
            };
            Ok(SeedOutcome { record, rows: Vec::new(), report: None })
        }
        Err(e) => Err(e),
    }
}

/// Runs every seed of the config, in parallel, results in seed order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    run_experiment_with(cfg, false)
}

pub fn run_experiment_with(cfg: &ExperimentConfig, keep_reports: bool) -> Result<Experiment> {
    cfg.validate()?;
    let setup = setup(cfg)?;
    let seeds = cfg.seeds.list();
    let outcomes = seeds.par_iter().map(|&s| run_seed(cfg, &setup, s, keep_reports)).collect::<Result<Vec<_>>>()?;
    Ok(Experiment { config: cfg.clone(), outcomes })
}
