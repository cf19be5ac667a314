//! Empirical rate: final support against the horizon on a log-log scale.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::experiment::run_experiment;
use super::output::fmt_real;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub horizon: usize,
    /// Mean over seeds of the final support value.
    pub mean_support: f64,
    pub mean_bound: f64,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Least-squares slope of log support against log T; NaN when a
    /// support value is not positive.
    pub slope: f64,
    pub intercept: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Ordinary least squares `y ≈ a + b x`, returning `(b, a)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (b, my - b * mx)
}

pub fn fit_rate(rows: &[RateRow]) -> RateFit {
    if let Some(r) = rows.iter().find(|r| !(r.mean_support > 0.0)) {
        return RateFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            note: Some(format!("support {} at T = {} has no logarithm", r.mean_support, r.horizon)),
        };
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.horizon as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_support.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    RateFit { slope, intercept, note: None }
}

/// Runs the config once per horizon in `grid` (ascending, at least four
/// points) and fits the rate.
pub fn sweep(cfg: &ExperimentConfig, grid: &[usize]) -> Result<(Vec<RateRow>, RateFit)> {
    if grid.len() < 4 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "field `T` grid must be strictly ascending with at least 4 points, got {grid:?}"
        )));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &horizon in grid {
        let mut c = cfg.clone();
        c.horizon = horizon;
        c.support_every_step = false;
        let exp = run_experiment(&c)?;
        if exp.any_aborted() {
            return Err(Error::input(format!("a run at T = {horizon} aborted on the slack limit")));
        }
        let recs = exp.records();
        let n = recs.len() as f64;
        rows.push(RateRow {
            horizon,
            mean_support: recs.iter().map(|r| r.final_support).sum::<f64>() / n,
            mean_bound: recs.iter().map(|r| r.final_bound).sum::<f64>() / n,
            seeds: recs.len(),
        });
    }
    let fit = fit_rate(&rows);
    Ok((rows, fit))
}

/// Writes `rates.csv` and `rate_fit.json`.
pub fn write_rates(dir: &Path, rows: &[RateRow], fit: &RateFit) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("rates.csv")).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(["T", "mean_support", "mean_bound", "seeds"]).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record([r.horizon.to_string(), fmt_real(r.mean_support), fmt_real(r.mean_bound), r.seeds.to_string()])
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    let json = serde_json::to_string_pretty(fit).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("rate_fit.json"), json + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let rows: Vec<RateRow> = [256usize, 1024, 4096, 16384]
            .iter()
            .map(|&t| RateRow { horizon: t, mean_support: 3.0 / (t as f64).sqrt(), mean_bound: 1.0, seeds: 1 })
            .collect();
        let fit = fit_rate(&rows);
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_support_has_no_slope() {
        let rows = vec![RateRow { horizon: 4, mean_support: 0.0, mean_bound: 1.0, seeds: 1 }; 4];
        let fit = fit_rate(&rows);
        assert!(fit.slope.is_nan() && fit.note.is_some());
    }
}
