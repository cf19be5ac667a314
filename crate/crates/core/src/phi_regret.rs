//! Φ-regret (swap and internal regret) as approachability of the
//! nonpositive orthant in `ℝ^Φ`.

use serde::{Deserialize, Serialize};

use crate::engine::Schedule;
use crate::error::{check_dim, Error, Result};
use crate::games::{EnvActions, Game, MixedAction, OracleOutput, PureAction, RegretTracker};
use crate::geometry::{GeneratorSet, NormTag};
use crate::regularizers::{Regularizer, RegularizerKind};
use crate::solvers::stationary_distribution;
use crate::vector::softmax;

pub const MAX_ALL_MAPS_D: usize = 5;
pub const MAX_PAIR_D: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiKind {
    /// Exchange of two actions, `d(d−1)/2` maps.
    Transpositions,
    /// `i ↦ j` with every other action fixed, `d(d−1)` maps.
    InternalPairs,
    /// Every map `ℐ → ℐ`, `d^d` maps.
    AllMaps,
    Custom,
}

/// A nonempty family of maps on `{0, …, d−1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiFamily {
    pub d: usize,
    pub kind: PhiKind,
    pub maps: Vec<Vec<usize>>,
}

impl PhiFamily {
    pub fn transpositions(d: usize) -> Result<Self> {
        check_pair_dim(d)?;
        let mut maps = Vec::with_capacity(d * (d - 1) / 2);
        for i in 0..d {
            for j in i + 1..d {
                let mut m: Vec<usize> = (0..d).collect();
                m.swap(i, j);
                maps.push(m);
            }
        }
        Ok(PhiFamily { d, kind: PhiKind::Transpositions, maps })
    }

    pub fn internal_pairs(d: usize) -> Result<Self> {
        check_pair_dim(d)?;
        let mut maps = Vec::with_capacity(d * (d - 1));
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    let mut m: Vec<usize> = (0..d).collect();
                    m[i] = j;
                    maps.push(m);
                }
            }
        }
        Ok(PhiFamily { d, kind: PhiKind::InternalPairs, maps })
    }

    pub fn all_maps(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_ALL_MAPS_D {
            return Err(Error::input(format!("all_maps needs 1 ≤ d ≤ {MAX_ALL_MAPS_D}, got {d}")));
        }
        let total = d.pow(d as u32);
        let maps = (0..total)
            .map(|mut k| {
                (0..d)
                    .map(|_| {
                        let v = k % d;
                        k /= d;
                        v
                    })
                    .collect()
            })
            .collect();
        Ok(PhiFamily { d, kind: PhiKind::AllMaps, maps })
    }

    pub fn custom(d: usize, maps: Vec<Vec<usize>>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::input("Φ must be nonempty"));
        }
        for m in &maps {
            check_dim("Φ map", m.len(), d)?;
            if m.iter().any(|&j| j >= d) {
                return Err(Error::input(format!("Φ map {m:?} leaves the action set")));
            }
        }
        Ok(PhiFamily { d, kind: PhiKind::Custom, maps })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `x̃_{ij} = Σ_{φ: φ(i)=j} x_φ`
    pub fn transition_matrix(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut p = vec![vec![0.0; self.d]; self.d];
        for (xf, m) in x.iter().zip(&self.maps) {
            for (i, &j) in m.iter().enumerate() {
                p[i][j] += xf;
            }
        }
        p
    }
}

fn check_pair_dim(d: usize) -> Result<()> {
    if !(2..=MAX_PAIR_D).contains(&d) {
        return Err(Error::input(format!("pair families need 2 ≤ d ≤ {MAX_PAIR_D}, got {d}")));
    }
    Ok(())
}

/// `(v_{φ(i)} − v_i)_{φ∈Φ}`
pub fn phi_payoff(i: usize, v: &[f64], fam: &PhiFamily) -> Vec<f64> {
    fam.maps.iter().map(|m| v[m[i]] - v[i]).collect()
}

/// Exponential weights over Φ.
pub fn phi_ftrl_weights(cumulative: &[f64], eta: f64) -> Vec<f64> {
    let w: Vec<f64> = cumulative.iter().map(|v| eta * v).collect();
    softmax(&w)
}

/// A stationary distribution of the matrix induced by `x ∈ ℝ₊^Φ`.
pub fn phi_oracle(x: &[f64], fam: &PhiFamily) -> Result<Vec<f64>> {
    check_dim("Φ weights", x.len(), fam.len())?;
    let total: f64 = x.iter().sum();
    if x.iter().any(|&v| v < -1e-12) {
        return Err(Error::input("Φ weights must be nonnegative"));
    }
    if total <= 0.0 {
        return Ok(vec![1.0 / fam.d as f64; fam.d]);
    }
    let scaled: Vec<f64> = x.iter().map(|v| v.max(0.0) / total).collect();
    stationary_distribution(&fam.transition_matrix(&scaled))
}

/// Per-(i, j) sums `S_ij = Σ_{t: i_t = i} v_{tj}`, weighted by `a_t(i)`
/// for mixed actions.
#[derive(Debug, Clone)]
pub struct PhiAccumulator {
    fam: PhiFamily,
    sums: Vec<Vec<f64>>,
}

impl PhiAccumulator {
    pub fn new(fam: &PhiFamily) -> Self {
        PhiAccumulator { fam: fam.clone(), sums: vec![vec![0.0; fam.d]; fam.d] }
    }

    pub fn add(&mut self, i: usize, weight: f64, v: &[f64]) {
        for (s, vj) in self.sums[i].iter_mut().zip(v) {
            *s += weight * vj;
        }
    }

    pub fn regret(&self) -> f64 {
        let s = &self.sums;
        if self.fam.kind == PhiKind::AllMaps {
            // the max over all maps splits across i
            return (0..self.fam.d).map(|i| s[i].iter().map(|v| v - s[i][i]).fold(f64::NEG_INFINITY, f64::max)).sum();
        }
        self.fam
            .maps
            .iter()
            .map(|m| m.iter().enumerate().filter(|(i, j)| i != *j).map(|(i, &j)| s[i][j] - s[i][i]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `max_{φ∈Φ} Σ_t v_{tφ(i_t)} − Σ_t v_{t i_t}`.
pub fn phi_regret_eval(history: &[(usize, Vec<f64>)], fam: &PhiFamily) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::input("phi_regret_eval: empty history"));
    }
    let mut acc = PhiAccumulator::new(fam);
    for (i, v) in history {
        check_dim("Φ history loss", v.len(), fam.d)?;
        if *i >= fam.d {
            return Err(Error::input(format!("action {i} out of range")));
        }
        acc.add(*i, 1.0, v);
    }
    Ok(acc.regret())
}

/// Actions `0..d`, environment `v ∈ [−1,1]^d`, payoff indexed by Φ.
#[derive(Debug, Clone)]
pub struct SwapGame {
    pub family: PhiFamily,
    env: EnvActions,
}

impl SwapGame {
    pub fn new(family: PhiFamily) -> Self {
        let d = family.d;
        SwapGame { family, env: EnvActions::Box { dim: d, lo: -1.0, hi: 1.0 } }
    }
}

impl Game for SwapGame {
    fn payoff_dim(&self) -> usize {
        self.family.len()
    }

    fn env_actions(&self) -> &EnvActions {
        &self.env
    }

    fn pure_payoff(&self, i: PureAction, b: &[f64]) -> Vec<f64> {
        phi_payoff(i as usize, b, &self.family)
    }

    fn oracle(&self, x: &[f64]) -> Result<OracleOutput> {
        let a = phi_oracle(x, &self.family)?;
        Ok(OracleOutput { action: MixedAction::from_weights(&a), nu: 0.0 })
    }

    fn payoff_bound(&self) -> (f64, NormTag) {
        (2.0, NormTag::linf())
    }

    fn pure_actions(&self) -> Option<Vec<PureAction>> {
        Some((0..self.family.d as PureAction).collect())
    }

    fn adversary_score(&self, cumulative: &[f64]) -> f64 {
        crate::vector::max_entry(cumulative)
    }

    fn regret_tracker(&self) -> Box<dyn RegretTracker> {
        Box::new(PhiAccumulator::new(&self.family))
    }
}

impl RegretTracker for PhiAccumulator {
    fn observe(&mut self, action: &MixedAction, pure: Option<PureAction>, b: &[f64]) -> f64 {
        match pure {
            Some(i) => self.add(i as usize, 1.0, b),
            None => {
                for &(i, w) in &action.atoms {
                    self.add(i as usize, w, b);
                }
            }
        }
        self.regret()
    }
}

/// Exponential weights on `Δ(Φ)` with `η_t = √(log|Φ|/(4t))`.
pub fn configure(family: PhiFamily) -> Result<(SwapGame, Regularizer, Schedule)> {
    let n = family.len();
    let h = Regularizer::new(RegularizerKind::Entropic { d: n }, GeneratorSet::simplex(n))?;
    let schedule = Schedule::new(h.certificate.delta, h.certificate.k, 2.0)?;
    Ok((SwapGame::new(family), h, schedule))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::dot;

    #[test]
    fn family_sizes() {
        assert_eq!(PhiFamily::transpositions(4).unwrap().len(), 6);
        assert_eq!(PhiFamily::internal_pairs(4).unwrap().len(), 12);
        assert_eq!(PhiFamily::all_maps(3).unwrap().len(), 27);
        assert!(PhiFamily::all_maps(6).is_err());
    }

    #[test]
    fn payoff_examples() {
        let f = PhiFamily::transpositions(2).unwrap();
        let r = phi_payoff(0, &[0.2, 0.9], &f);
        assert!((r[0] - 0.7).abs() < 1e-15);
        assert_eq!(phi_payoff(1, &[0.4, 0.4], &f), vec![0.0]);
        let id = PhiFamily::custom(3, vec![vec![0, 1, 2], vec![1, 1, 2]]).unwrap();
        assert_eq!(phi_payoff(2, &[0.1, -0.5, 0.9], &id)[0], 0.0);
    }

    #[test]
    fn weights_examples() {
        assert_eq!(phi_ftrl_weights(&[0.0; 4], 0.3), vec![0.25; 4]);
        let w = phi_ftrl_weights(&[50.0, 0.0, 0.0], 1.0);
        assert!(w[0] >= 1.0 - 1e-20);
        assert_eq!(phi_ftrl_weights(&[3.0], 1.0), vec![1.0]);
    }

    #[test]
    fn oracle_examples() {
        let f = PhiFamily::transpositions(2).unwrap();
        let a = phi_oracle(&[1.0], &f).unwrap();
        assert!((a[0] - 0.5).abs() < 1e-12);
        let f3 = PhiFamily::transpositions(3).unwrap();
        let a = phi_oracle(&[1.0 / 3.0; 3], &f3).unwrap();
        assert!(a.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
        let id = PhiFamily::custom(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(phi_oracle(&[1.0], &id).unwrap().iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn oracle_zeroes_the_inner_product() {
        let f = PhiFamily::internal_pairs(4).unwrap();
        let g = SwapGame::new(f);
        let x: Vec<f64> = (0..12).map(|k| ((k * 7 % 5) as f64 + 0.5) / 30.0).collect();
        let a = g.oracle(&x).unwrap().action;
        for v in g.env_actions().corners() {
            assert!(dot(&g.payoff(&a, &v), &x).abs() < 1e-12);
        }
    }

    #[test]
    fn regret_examples() {
        let f = PhiFamily::transpositions(2).unwrap();
        assert_eq!(phi_regret_eval(&[(0, vec![0.0, 1.0])], &f).unwrap(), 1.0);
        // internal regret: max over i ≠ j of Σ 1{i_t = i}(v_tj − v_ti)
        let f = PhiFamily::internal_pairs(3).unwrap();
        let h = vec![(0, vec![0.1, 0.5, -0.2]), (2, vec![0.3, -0.4, 0.0]), (0, vec![-0.6, 0.2, 0.9])];
        let mut best = f64::NEG_INFINITY;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let s: f64 = h.iter().filter(|(it, _)| *it == i).map(|(_, v)| v[j] - v[i]).sum();
                    best = best.max(s);
                }
            }
        }
        assert!((phi_regret_eval(&h, &f).unwrap() - best).abs() < 1e-15);
    }

    #[test]
    fn all_maps_split_matches_enumeration() {
        let fam = PhiFamily::all_maps(3).unwrap();
        let custom = PhiFamily::custom(3, fam.maps.clone()).unwrap();
        let h = vec![(1, vec![0.3, -0.2, 0.8]), (0, vec![-1.0, 0.5, 0.1]), (1, vec![0.2, 0.2, -0.9])];
        let a = phi_regret_eval(&h, &fam).unwrap();
        let b = phi_regret_eval(&h, &custom).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn schedule_matches_closed_form() {
        let (_, _, s) = configure(PhiFamily::internal_pairs(4).unwrap()).unwrap();
        assert!((s.eta(3) - (12f64.ln() / 12.0).sqrt()).abs() < 1e-15);
    }
}
