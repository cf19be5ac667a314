//! Configuration, experiment runs, verification suites and output files.
//!
//! Seeds: each listed seed is a run seed. Internal random streams are
//! derived from it with the SplitMix64 finalizer ([`seeds::mix`]), and a
//! master seed expands to run seeds as `mix(master ⊕ i)`, so results do not
//! depend on the order in which seeds execute.

pub mod config;
pub mod experiment;
pub mod output;
pub mod seeds;
pub mod sweep;
pub mod verify;

use std::path::Path;

pub use config::{ExperimentConfig, Problem};
pub use experiment::{run_experiment, Experiment, StepRow, SummaryRecord};

use crate::error::{Error, Result};

/// Exit status of a successful command.
pub const EXIT_OK: i32 = 0;
/// Config errors, failed checks and other failures.
pub const EXIT_FAILURE: i32 = 1;
/// Some seed stopped on the ν hard limit.
pub const EXIT_SLACK_LIMIT: i32 = 2;

/// `run --config <file> --out <dir>`.
pub fn cmd_run(config_path: &Path, out_dir: Option<&Path>) -> Result<i32> {
    let cfg = ExperimentConfig::load(config_path)?;
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| Error::Config("no output directory: pass --out or set field `output_dir`".into()))?;
    let exp = run_experiment(&cfg)?;
    let summary = output::write_outputs(&dir, &exp)?;
    for r in &summary.records {
        match &r.aborted {
            Some(why) => println!("seed {}: aborted ({why})", r.seed),
            None => println!(
                "seed {}: support {:.6e}  bound {:.6e}  regret {:.6e}  mean ν {:.3e}",
                r.seed, r.final_support, r.final_bound, r.regret, r.slack_mean
            ),
        }
    }
    println!("wrote {} and {}", dir.join("steps.csv").display(), dir.join("summary.json").display());
    Ok(if exp.any_aborted() { EXIT_SLACK_LIMIT } else { EXIT_OK })
}

pub fn print_checks(checks: &[verify::Check]) {
    let width = checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    println!("{:<width$}  {:>12}  {:>6}  detail", "check", "margin", "result");
    for c in checks {
        let pad = width - c.name.chars().count();
        println!(
            "{}{}  {:>12.4e}  {:>6}  {}",
            c.name,
            " ".repeat(pad),
            c.margin(),
            if c.passed { "pass" } else { "FAIL" },
            c.detail
        );
    }
}

/// `verify [--suite <name>]`.
pub fn cmd_verify(suite: &str) -> Result<i32> {
    let suite: verify::Suite = suite.parse()?;
    let checks = verify::run_suite(suite)?;
    print_checks(&checks);
    Ok(if checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_FAILURE })
}

/// `sweep --config <file> --T 256,1024,...`; output goes to `--out`, the
/// config's `output_dir`, or the current directory.
pub fn cmd_sweep(config_path: &Path, grid: &[usize], out_dir: Option<&Path>) -> Result<i32> {
    let cfg = ExperimentConfig::load(config_path)?;
    let dir = out_dir.map(Path::to_path_buf).or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| ".".into());
    let (rows, fit) = sweep::sweep(&cfg, grid)?;
    sweep::write_rates(&dir, &rows, &fit)?;
    for r in &rows {
        println!("T = {:>7}  mean support {:.6e}  mean bound {:.6e}", r.horizon, r.mean_support, r.mean_bound);
    }
    match &fit.note {
        Some(note) => println!("slope: NaN ({note})"),
        None => println!("slope: {:.4}", fit.slope),
    }
    Ok(EXIT_OK)
}
