//! Online combinatorial optimization over m-subsets of `{0, …, d−1}`.

use serde::{Deserialize, Serialize};

use crate::engine::Schedule;
use crate::error::{check_dim, Error, Result};
use crate::games::{EnvActions, Game, MixedAction, OracleOutput, PureAction, RegretTracker};
use crate::geometry::generator::top_m_sum;
use crate::geometry::{GeneratorSet, NormTag};
use crate::regularizers::{capped_softmax, Regularizer, RegularizerKind};
use crate::solvers::caratheodory_decompose;

/// All m-subsets of d items; subsets are bitmasks, so `d ≤ 64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombInstance {
    pub d: usize,
    pub m: usize,
}

impl CombInstance {
    pub fn new(d: usize, m: usize) -> Result<Self> {
        if m == 0 || m > d || d > 64 {
            return Err(Error::input(format!("need 1 ≤ m ≤ d ≤ 64 (d = {d}, m = {m})")));
        }
        Ok(CombInstance { d, m })
    }
}

pub fn mask_of(subset: &[usize]) -> PureAction {
    subset.iter().fold(0, |acc, &i| acc | 1 << i)
}

pub fn subset_of(mask: PureAction) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

fn masked_sum(mask: PureAction, v: &[f64]) -> f64 {
    v.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x).sum()
}

/// `v − (⟨v, e_p⟩/m)·1`
pub fn comb_payoff(mask: PureAction, v: &[f64], m: usize) -> Vec<f64> {
    let shift = masked_sum(mask, v) / m as f64;
    v.iter().map(|x| x - shift).collect()
}

/// The leader for the scaled entropy on the capped simplex.
pub fn comb_ftrl_step(cumulative: &[f64], eta: f64, inst: &CombInstance) -> Result<Vec<f64>> {
    check_dim("combinatorial step", cumulative.len(), inst.d)?;
    if !(eta > 0.0) {
        return Err(Error::input(format!("η must be positive, got {eta}")));
    }
    let w: Vec<f64> = cumulative.iter().map(|v| eta * v).collect();
    Ok(capped_softmax(&w, inst.m))
}

/// A distribution over m-subsets with mean `x`.
pub fn comb_oracle(x: &[f64], m: usize) -> Result<MixedAction> {
    let atoms = caratheodory_decompose(x, m)?;
    Ok(MixedAction { atoms: atoms.into_iter().map(|(s, w)| (mask_of(&s), w)).collect() })
}

/// `max_p Σ_t Σ_{i∈p} v_ti − Σ_t Σ_{i∈p_t} v_ti`.
pub fn comb_regret(history: &[(PureAction, Vec<f64>)], m: usize) -> Result<f64> {
    let (_, v0) = history.first().ok_or_else(|| Error::input("comb_regret: empty history"))?;
    let d = v0.len();
    let mut total = vec![0.0; d];
    let mut played = 0.0;
    for (mask, v) in history {
        check_dim("comb_regret loss", v.len(), d)?;
        crate::vector::axpy(&mut total, 1.0, v);
        played += masked_sum(*mask, v);
    }
    Ok(top_m_sum(&total, m) - played)
}

#[derive(Debug, Clone)]
pub struct CombGame {
    pub inst: CombInstance,
    env: EnvActions,
}

impl CombGame {
    pub fn new(inst: CombInstance) -> Self {
        CombGame { inst, env: EnvActions::Box { dim: inst.d, lo: -1.0, hi: 1.0 } }
    }
}

impl Game for CombGame {
    fn payoff_dim(&self) -> usize {
        self.inst.d
    }

    fn env_actions(&self) -> &EnvActions {
        &self.env
    }

    fn pure_payoff(&self, i: PureAction, b: &[f64]) -> Vec<f64> {
        comb_payoff(i, b, self.inst.m)
    }

    fn oracle(&self, x: &[f64]) -> Result<OracleOutput> {
        Ok(OracleOutput { action: comb_oracle(x, self.inst.m)?, nu: 0.0 })
    }

    fn payoff_bound(&self) -> (f64, NormTag) {
        (2.0, NormTag::linf())
    }

    fn pure_actions(&self) -> Option<Vec<PureAction>> {
        if self.inst.d > 20 {
            return None;
        }
        Some((0..1u64 << self.inst.d).filter(|k| k.count_ones() as usize == self.inst.m).collect())
    }

    fn adversary_score(&self, cumulative: &[f64]) -> f64 {
        top_m_sum(cumulative, self.inst.m)
    }

    fn regret_tracker(&self) -> Box<dyn RegretTracker> {
        Box::new(CombTracker { m: self.inst.m, total: vec![0.0; self.inst.d], played: 0.0 })
    }
}

struct CombTracker {
    m: usize,
    total: Vec<f64>,
    played: f64,
}

impl RegretTracker for CombTracker {
    fn observe(&mut self, action: &MixedAction, pure: Option<PureAction>, b: &[f64]) -> f64 {
        crate::vector::axpy(&mut self.total, 1.0, b);
        self.played += match pure {
            Some(mask) => masked_sum(mask, b),
            None => action.atoms.iter().map(|&(mask, w)| w * masked_sum(mask, b)).sum(),
        };
        top_m_sum(&self.total, self.m) - self.played
    }
}

/// Scaled entropy on the capped simplex, `η_t = √(log(d/m)/(4m²t))`.
pub fn configure(inst: CombInstance) -> Result<(CombGame, Regularizer, Schedule)> {
    let h = Regularizer::new(
        RegularizerKind::ScaledEntropic { d: inst.d, m: inst.m },
        GeneratorSet::scaled_capped_simplex(inst.d, inst.m)?,
    )?;
    let schedule = Schedule::new(h.certificate.delta, h.certificate.k, 2.0)?;
    Ok((CombGame::new(inst), h, schedule))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dot;

    #[test]
    fn payoff_examples() {
        let r = comb_payoff(mask_of(&[0, 1]), &[1.0, 0.0, -1.0], 2);
        assert_eq!(r, vec![0.5, -0.5, -1.5]);
        assert_eq!(comb_payoff(0b011, &[0.0; 3], 2), vec![0.0; 3]);
        assert_eq!(comb_payoff(0b101, &[0.7; 3], 2), vec![0.0; 3]);
    }

    #[test]
    fn step_examples() {
        let inst = CombInstance::new(5, 2).unwrap();
        let x = comb_ftrl_step(&[0.0; 5], 1.0, &inst).unwrap();
        assert!(x.iter().all(|v| (v - 0.4).abs() < 1e-15));
        // m = 1 is the softmax
        let one = CombInstance::new(2, 1).unwrap();
        let x = comb_ftrl_step(&[2f64.ln(), 0.0], 1.0, &one).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-15);
        // strongly preferred pair approaches its vertex
        let x = comb_ftrl_step(&[20.0, 20.0, 0.0, 0.0, 0.0], 1.0, &inst).unwrap();
        assert!(x[0] > 1.0 - 1e-12 && x[1] > 1.0 - 1e-12 && x[2] < 1e-12);
    }

    #[test]
    fn oracle_examples() {
        let a = comb_oracle(&[1.0, 0.5, 0.5], 2).unwrap();
        assert_eq!(a.atoms, vec![(0b011, 0.5), (0b101, 0.5)]);
        assert_eq!(comb_oracle(&[0.0, 1.0, 1.0], 2).unwrap().atoms, vec![(0b110, 1.0)]);
        let g = CombGame::new(CombInstance::new(4, 2).unwrap());
        let x = [0.9, 0.3, 0.5, 0.3];
        let a = g.oracle(&x).unwrap().action;
        for v in g.env_actions().corners() {
            assert!(dot(&g.payoff(&a, &v), &x).abs() < 1e-12);
        }
    }

    #[test]
    fn regret_examples() {
        assert_eq!(comb_regret(&[(0b110, vec![1.0, 0.0, -1.0])], 2).unwrap(), 2.0);
        assert_eq!(comb_regret(&[(0b011, vec![0.0; 3])], 2).unwrap(), 0.0);
        assert!(comb_regret(&[(0b011, vec![1.0, 0.5, -1.0])], 2).unwrap() <= 0.0);
    }

    #[test]
    fn pure_action_count() {
        let g = CombGame::new(CombInstance::new(8, 2).unwrap());
        assert_eq!(g.pure_actions().unwrap().len(), 28);
    }
}
