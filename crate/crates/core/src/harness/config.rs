//! Experiment configuration as read from JSON.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::EnvironmentSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Globalcost,
    Combinatorial,
    Swap,
    Internal,
    BlackwellDemo,
}

/// `"transpositions"`, `"internal_pairs"`, `"all_maps"`, or explicit maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiSpec {
    Named(String),
    Maps(Vec<Vec<usize>>),
}

/// Which global-cost algorithm to run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GcAlgorithm {
    /// The composite regularizer tuned to the ℓp cost.
    #[default]
    Lp,
    /// `½‖·‖²_{q'}` with a user-chosen q'.
    Norm,
}

/// Either explicit run seeds or `count` seeds derived from a master seed
/// by [`super::seeds::run_seed`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Master(MasterSeed),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MasterSeed {
    pub master: u64,
    pub count: usize,
}

impl SeedSpec {
    pub fn list(&self) -> Vec<u64> {
        match self {
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Master(m) => (0..m.count).map(|i| super::seeds::run_seed(m.master, i)).collect(),
        }
    }
}

fn default_delta_conf() -> f64 {
    0.1
}

fn default_tol() -> f64 {
    1e-9
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub d: usize,
    #[serde(default, with = "opt_exponent", skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(default)]
    pub algorithm: GcAlgorithm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_prime: Option<f64>,
    /// Range bound Δ for the norm algorithm; a closed-form default is used
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<f64>,
    /// Blackwell demo payoff weights (rows × actions).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
    /// Seed for a random Blackwell demo game when `weights` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game_seed: Option<u64>,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seeds: SeedSpec,
    pub environment: EnvironmentSpec,
    #[serde(default = "default_delta_conf")]
    pub delta_conf: f64,
    /// Sample pure actions instead of playing expected payoffs.
    #[serde(default)]
    pub mixed: bool,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_hard_limit: Option<f64>,
    #[serde(default = "default_true")]
    pub support_every_step: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// A config with every optional field at its default.
    pub fn new(problem: Problem, d: usize, horizon: usize, seeds: Vec<u64>, environment: EnvironmentSpec) -> Self {
        ExperimentConfig {
            problem,
            d,
            p: None,
            m: None,
            phi: None,
            algorithm: GcAlgorithm::Lp,
            q_prime: None,
            range: None,
            weights: None,
            game_seed: None,
            horizon,
            seeds: SeedSpec::List(seeds),
            environment,
            delta_conf: default_delta_conf(),
            mixed: false,
            tol: default_tol(),
            cut_budget: None,
            solver_tol: None,
            nu_hard_limit: None,
            support_every_step: true,
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Cross-field checks that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.horizon == 0 {
            return bad("field `T` must be at least 1".into());
        }
        if self.seeds.list().is_empty() {
            return bad("field `seeds` must list at least one seed".into());
        }
        if !(self.delta_conf > 0.0 && self.delta_conf < 1.0) {
            return bad(format!("field `delta_conf` must be in (0, 1), got {}", self.delta_conf));
        }
        if !(self.tol > 0.0) {
            return bad(format!("field `tol` must be positive, got {}", self.tol));
        }
        if self.d < 2 {
            return bad(format!("field `d` must be at least 2, got {}", self.d));
        }
        let only = |name: &str, present: bool, allowed: &[Problem]| -> Result<()> {
            if present && !allowed.contains(&self.problem) {
                return Err(Error::Config(format!("field `{name}` does not apply to problem {:?}", self.problem)));
            }
            Ok(())
        };
        use Problem::*;
        only("p", self.p.is_some(), &[Globalcost])?;
        only("m", self.m.is_some(), &[Combinatorial])?;
        only("phi", self.phi.is_some(), &[Swap])?;
        only("algorithm", self.algorithm != GcAlgorithm::Lp, &[Globalcost])?;
        only("q_prime", self.q_prime.is_some(), &[Globalcost])?;
        only("range", self.range.is_some(), &[Globalcost])?;
        only("cut_budget", self.cut_budget.is_some(), &[Globalcost])?;
        only("solver_tol", self.solver_tol.is_some(), &[Globalcost])?;
        only("weights", self.weights.is_some(), &[BlackwellDemo])?;
        only("game_seed", self.game_seed.is_some(), &[BlackwellDemo])?;
        match self.problem {
            Globalcost => {
                let Some(p) = self.p else {
                    return bad("missing field `p` for problem globalcost".into());
                };
                if !(p > 1.0) {
                    return bad(format!("field `p` must be in (1, ∞], got {p}"));
                }
                if self.algorithm == GcAlgorithm::Norm && self.q_prime.is_none() {
                    return bad("missing field `q_prime` for the norm algorithm".into());
                }
                if self.mixed {
                    return bad("field `mixed` is not supported for problem globalcost".into());
                }
            }
            Combinatorial => {
                if self.m.is_none() {
                    return bad("missing field `m` for problem combinatorial".into());
                }
            }
            BlackwellDemo => {
                if self.mixed {
                    return bad("field `mixed` is not supported for problem blackwell-demo".into());
                }
            }
            Swap | Internal => {}
        }
        Ok(())
    }
}

mod opt_exponent {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match p {
            Some(v) => crate::geometry::norm::exponent::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "crate::geometry::norm::exponent")] f64);
        Ok(Some(Wrap::deserialize(d)?.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWAP: &str = r#"{"problem": "swap", "d": 3, "T": 16, "seeds": [1, 2],
        "environment": {"kind": "adversarial"}}"#;

    #[test]
    fn parses_minimal_config() {
        let c = ExperimentConfig::from_json(SWAP).unwrap();
        assert_eq!(c.problem, Problem::Swap);
        assert_eq!(c.horizon, 16);
        assert_eq!(c.delta_conf, 0.1);
    }

    #[test]
    fn missing_horizon_names_the_field() {
        let text = SWAP.replace(r#""T": 16, "#, "");
        let e = ExperimentConfig::from_json(&text).unwrap_err().to_string();
        assert!(e.contains("`T`"), "{e}");
    }

    #[test]
    fn unknown_field_rejected() {
        let text = SWAP.replace(r#""d": 3"#, r#""d": 3, "colour": 1"#);
        let e = ExperimentConfig::from_json(&text).unwrap_err().to_string();
        assert!(e.contains("colour"), "{e}");
    }

    #[test]
    fn infinite_exponent() {
        let text = r#"{"problem": "globalcost", "d": 3, "p": "inf", "T": 4, "seeds": [0],
            "environment": {"kind": "uniform_random"}}"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(c.p, Some(f64::INFINITY));
        let back = serde_json::to_string(&c).unwrap();
        assert!(back.contains(r#""p":"inf""#));
        assert!(ExperimentConfig::from_json(&text.replace(r#", "p": "inf""#, "")).is_err());
    }

    #[test]
    fn master_seed_expansion() {
        let text = SWAP.replace("[1, 2]", r#"{"master": 9, "count": 3}"#);
        let c = ExperimentConfig::from_json(&text).unwrap();
        let seeds = c.seeds.list();
        assert_eq!(seeds.len(), 3);
        assert_eq!(seeds[2], crate::harness::seeds::run_seed(9, 2));
        let bad = SWAP.replace("[1, 2]", r#"{"master": 9, "count": 3, "stride": 2}"#);
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn explicit_maps() {
        let text = SWAP.replace(r#""d": 3"#, r#""d": 3, "phi": [[1, 0, 2], [0, 0, 2]]"#);
        let c = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(c.phi, Some(PhiSpec::Maps(vec![vec![1, 0, 2], vec![0, 0, 2]])));
    }
}
