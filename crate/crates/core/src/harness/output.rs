//! `steps.csv` and `summary.json`.
//!
//! Reals are written with 17 significant digits in scientific notation
//! (`{:.16e}`), which round-trips every f64 and does not depend on locale.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::experiment::{Experiment, StepRow, SummaryRecord};
use crate::error::{Error, Result};

pub const STEPS_HEADER: [&str; 7] = ["seed", "t", "support_value", "bound_value", "inner", "nu", "regret"];

pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_steps(path: &Path, rows: impl IntoIterator<Item = StepRow>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(STEPS_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.seed.to_string(),
            r.t.to_string(),
            fmt_real(r.support_value),
            fmt_real(r.bound_value),
            fmt_real(r.inner),
            fmt_real(r.nu),
            fmt_real(r.regret),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_steps(path: &Path) -> Result<Vec<StepRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(STEPS_HEADER) {
        return Err(Error::Io(format!("unexpected steps.csv header {header:?}")));
    }
    let real = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| Error::Io(format!("bad real `{s}`: {e}"))) };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        rows.push(StepRow {
            seed: rec[0].parse().map_err(|e| Error::Io(format!("bad seed: {e}")))?,
            t: rec[1].parse().map_err(|e| Error::Io(format!("bad step: {e}")))?,
            support_value: real(&rec[2])?,
            bound_value: real(&rec[3])?,
            inner: real(&rec[4])?,
            nu: real(&rec[5])?,
            regret: real(&rec[6])?,
        });
    }
    Ok(rows)
}

/// Mean, extremes and quantiles of one statistic over the completed seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub q50: f64,
    pub q90: f64,
}

/// Linear-interpolation quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn aggregate(values: &[f64]) -> Option<Aggregate> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(Aggregate {
        count: v.len(),
        mean: v.iter().sum::<f64>() / v.len() as f64,
        min: v[0],
        max: v[v.len() - 1],
        q50: quantile(&v, 0.5),
        q90: quantile(&v, 0.9),
    })
}

/// Aggregates keyed by statistic name, always recomputed from records.
pub fn aggregates(records: &[SummaryRecord]) -> BTreeMap<String, Aggregate> {
    let mut out = BTreeMap::new();
    type Stat = (&'static str, fn(&SummaryRecord) -> f64);
    let stats: [Stat; 5] = [
        ("final_support", |r| r.final_support),
        ("final_bound", |r| r.final_bound),
        ("regret", |r| r.regret),
        ("slack_mean", |r| r.slack_mean),
        ("wall_time_s", |r| r.wall_time_s),
    ];
    for (name, get) in stats {
        let values: Vec<f64> = records.iter().map(get).collect();
        if let Some(a) = aggregate(&values) {
            out.insert(name.to_string(), a);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub records: Vec<SummaryRecord>,
    pub aggregates: BTreeMap<String, Aggregate>,
    pub aborted_seeds: Vec<u64>,
}

impl Summary {
    pub fn of(exp: &Experiment) -> Self {
        let records = exp.records();
        Summary {
            config: exp.config.clone(),
            aggregates: aggregates(&records),
            aborted_seeds: records.iter().filter(|r| r.aborted.is_some()).map(|r| r.seed).collect(),
            records,
        }
    }
}

/// Writes `steps.csv` and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, exp: &Experiment) -> Result<Summary> {
    fs::create_dir_all(dir)?;
    write_steps(&dir.join("steps.csv"), exp.outcomes.iter().flat_map(|o| o.rows.iter().copied()))?;
    let summary = Summary::of(exp);
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("summary.json"), json + "\n")?;
    Ok(summary)
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Largest disagreement between `summary.json` and what `steps.csv`
/// implies: per-seed final support and regret, and the aggregates
/// recomputed from the records.
pub fn summary_discrepancy(dir: &Path) -> Result<f64> {
    let summary = read_summary(&dir.join("summary.json"))?;
    let rows = read_steps(&dir.join("steps.csv"))?;
    let mut last: BTreeMap<u64, StepRow> = BTreeMap::new();
    for r in rows {
        let e = last.entry(r.seed).or_insert(r);
        if r.t >= e.t {
            *e = r;
        }
    }
    let diff = |a: f64, b: f64| if a.is_nan() && b.is_nan() { 0.0 } else { (a - b).abs() };
    let mut worst = 0.0_f64;
    for rec in &summary.records {
        if rec.aborted.is_some() {
            if last.contains_key(&rec.seed) {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        let Some(row) = last.get(&rec.seed) else {
            return Ok(f64::INFINITY);
        };
        worst = worst.max(diff(row.support_value, rec.final_support));
        worst = worst.max(diff(row.regret, rec.regret));
    }
    for (name, agg) in aggregates(&summary.records) {
        let Some(stored) = summary.aggregates.get(&name) else {
            return Ok(f64::INFINITY);
        };
        for (a, b) in [(agg.mean, stored.mean), (agg.max, stored.max), (agg.q50, stored.q50), (agg.q90, stored.q90)] {
            worst = worst.max(diff(a, b));
        }
    }
    Ok(worst)
}

/// f64 fields that may be NaN: JSON has no NaN, so it is written as null.
pub(crate) mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}
