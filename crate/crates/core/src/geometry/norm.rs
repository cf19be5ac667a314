use serde::{Deserialize, Serialize};

use crate::vector::{conjugate_exponent, norm1, norm_inf, norm_p};

/// Norms used by the analysis.
///
/// The two global-cost norms act on `(y, y') ∈ ℝ^d × ℝ^d` stored as one
/// vector of length `2d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm", rename_all = "snake_case")]
pub enum NormTag {
    Lp {
        #[serde(with = "exponent")]
        p: f64,
    },
    /// `‖y‖_p + ‖y'‖_∞`
    GlobalCostPrimal {
        d: usize,
        #[serde(with = "exponent")]
        p: f64,
    },
    /// `max{‖z‖_q, ‖z'‖₁}`
    GlobalCostDual {
        d: usize,
        #[serde(with = "exponent")]
        q: f64,
    },
}

impl NormTag {
    pub fn l1() -> Self {
        NormTag::Lp { p: 1.0 }
    }
    pub fn l2() -> Self {
        NormTag::Lp { p: 2.0 }
    }
    pub fn linf() -> Self {
        NormTag::Lp { p: f64::INFINITY }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            NormTag::Lp { p } => norm_p(x, p),
            NormTag::GlobalCostPrimal { d, p } => norm_p(&x[..d], p) + norm_inf(&x[d..]),
            NormTag::GlobalCostDual { d, q } => norm_p(&x[..d], q).max(norm1(&x[d..])),
        }
    }

    pub fn dual(&self) -> NormTag {
        match *self {
            NormTag::Lp { p } => NormTag::Lp { p: conjugate_exponent(p) },
            NormTag::GlobalCostPrimal { d, p } => NormTag::GlobalCostDual { d, q: conjugate_exponent(p) },
            NormTag::GlobalCostDual { d, q } => NormTag::GlobalCostPrimal { d, p: conjugate_exponent(q) },
        }
    }

    /// Fixed ambient dimension, when the norm carries one.
    pub fn ambient_dim(&self) -> Option<usize> {
        match *self {
            NormTag::Lp { .. } => None,
            NormTag::GlobalCostPrimal { d, .. } | NormTag::GlobalCostDual { d, .. } => Some(2 * d),
        }
    }
}

/// Exponents in `[1, ∞]`; JSON has no infinity, so `"inf"` is accepted and
/// emitted for it.
pub(crate) mod exponent {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
                other => other.parse::<f64>().map_err(|_| de::Error::custom(format!("invalid exponent `{t}`"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn global_cost_norms() {
        let x = [3.0, -4.0, 0.5, -2.0];
        let primal = NormTag::GlobalCostPrimal { d: 2, p: 2.0 };
        assert!((primal.eval(&x) - 7.0).abs() < 1e-12);
        let dual = primal.dual();
        assert_eq!(dual, NormTag::GlobalCostDual { d: 2, q: 2.0 });
        assert!((dual.eval(&x) - 5.0).abs() < 1e-12);
        assert_eq!(dual.dual(), primal);
    }

    #[test]
    fn infinite_exponent_round_trips_through_json() {
        let n = NormTag::GlobalCostPrimal { d: 3, p: f64::INFINITY };
        let s = serde_json::to_string(&n).unwrap();
        assert!(s.contains("\"inf\""));
        let back: NormTag = serde_json::from_str(&s).unwrap();
        assert_eq!(back, n);
        let l: NormTag = serde_json::from_str(r#"{"norm":"lp","p":2}"#).unwrap();
        assert_eq!(l, NormTag::l2());
    }
}
