//! Dense two-phase simplex method.
//!
//! Problems here have O(d) variables, so a dense tableau is simpler and more
//! exact than anything sparse. Pivoting uses the steepest reduced cost and
//! falls back to Bland's rule after a run of degenerate pivots, which rules
//! out cycling.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;
const DEGENERATE_STREAK: usize = 32;
const MAX_PIVOTS: usize = 50_000;

/// `minimize c·u  s.t.  A u ≤ b, u ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Vec<f64>>,
    pub bounds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub solution: Vec<f64>,
}

pub fn lp_solve(prob: &LpProblem) -> Result<LpSolution> {
    let n = prob.objective.len();
    if prob.constraints.len() != prob.bounds.len() {
        return Err(Error::input("lp_solve: constraint/bound count mismatch"));
    }
    let mut lp = LinearProgram::new(n);
    lp.minimize(prob.objective.clone());
    for (row, &b) in prob.constraints.iter().zip(&prob.bounds) {
        lp.constrain(row.clone(), Relation::Le, b)?;
    }
    lp.solve()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// General-form LP builder: mixed relations and optionally free variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    n: usize,
    objective: Vec<f64>,
    free: Vec<bool>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl LinearProgram {
    pub fn new(n: usize) -> Self {
        LinearProgram { n, objective: vec![0.0; n], free: vec![false; n], rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn minimize(&mut self, c: Vec<f64>) {
        assert_eq!(c.len(), self.n);
        self.objective = c;
    }

    pub fn set_free(&mut self, j: usize) {
        self.free[j] = true;
    }

    pub fn constrain(&mut self, row: Vec<f64>, rel: Relation, rhs: f64) -> Result<()> {
        if row.len() != self.n {
            return Err(Error::input(format!("constraint has {} coefficients, expected {}", row.len(), self.n)));
        }
        if !rhs.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite LP coefficient"));
        }
        self.rows.push((row, rel, rhs));
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution> {
        // split free variables u = u⁺ − u⁻
        let mut col_of = Vec::with_capacity(self.n);
        let mut ncols = 0;
        for j in 0..self.n {
            col_of.push(ncols);
            ncols += if self.free[j] { 2 } else { 1 };
        }
        let n_struct = ncols;
        let expand = |row: &[f64]| {
            let mut out = vec![0.0; n_struct];
            for j in 0..self.n {
                out[col_of[j]] = row[j];
                if self.free[j] {
                    out[col_of[j] + 1] = -row[j];
                }
            }
            out
        };

        let m = self.rows.len();
        let mut n_slack = 0;
        let mut n_art = 0;
        let mut norm_rows = Vec::with_capacity(m);
        for (row, rel, rhs) in &self.rows {
            let mut r = expand(row);
            let (mut rel, mut rhs) = (*rel, *rhs);
            if rhs < 0.0 {
                r.iter_mut().for_each(|v| *v = -*v);
                rhs = -rhs;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            match rel {
                Relation::Le => n_slack += 1,
                Relation::Ge => {
                    n_slack += 1;
                    n_art += 1
                }
                Relation::Eq => n_art += 1,
            }
            norm_rows.push((r, rel, rhs));
        }

        let art_start = n_struct + n_slack;
        let width = art_start + n_art;
        let mut tab = Tableau::new(m, width);
        let (mut s, mut a) = (n_struct, art_start);
        for (i, (r, rel, rhs)) in norm_rows.into_iter().enumerate() {
            tab.row_mut(i)[..n_struct].copy_from_slice(&r);
            tab.set_rhs(i, rhs);
            match rel {
                Relation::Le => {
                    tab.row_mut(i)[s] = 1.0;
                    tab.basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    tab.row_mut(i)[s] = -1.0;
                    s += 1;
                    tab.row_mut(i)[a] = 1.0;
                    tab.basis[i] = a;
                    a += 1;
                }
                Relation::Eq => {
                    tab.row_mut(i)[a] = 1.0;
                    tab.basis[i] = a;
                    a += 1;
                }
            }
        }

        if n_art > 0 {
            let mut cost = vec![0.0; width];
            cost[art_start..].iter_mut().for_each(|c| *c = 1.0);
            tab.load_objective(&cost);
            tab.optimize(width)?;
            let scale = 1.0 + self.rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
            if -tab.obj_rhs() > 1e-8 * scale {
                return Err(Error::Infeasible);
            }
            tab.expel_artificials(art_start);
        }

        let mut cost = vec![0.0; width];
        cost[..n_struct].copy_from_slice(&expand(&self.objective));
        tab.load_objective(&cost);
        tab.optimize(art_start)?;

        let mut x_ext = vec![0.0; n_struct];
        for i in 0..tab.m {
            if tab.active[i] && tab.basis[i] < n_struct {
                x_ext[tab.basis[i]] = tab.rhs(i).max(0.0);
            }
        }
        let solution: Vec<f64> = (0..self.n)
            .map(|j| {
                let v = x_ext[col_of[j]];
                if self.free[j] {
                    v - x_ext[col_of[j] + 1]
                } else {
                    v
                }
            })
            .collect();
        let value = crate::vector::dot(&self.objective, &solution);
        Ok(LpSolution { value, solution })
    }
}

struct Tableau {
    m: usize,
    width: usize,
    // row-major, each row has width + 1 entries (last = rhs); row m is the objective
    data: Vec<f64>,
    basis: Vec<usize>,
    active: Vec<bool>,
}

impl Tableau {
    fn new(m: usize, width: usize) -> Self {
        Tableau { m, width, data: vec![0.0; (m + 1) * (width + 1)], basis: vec![usize::MAX; m], active: vec![true; m] }
    }

    fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let w = self.width + 1;
        &mut self.data[i * w..(i + 1) * w]
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.width + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width)
    }

    fn set_rhs(&mut self, i: usize, v: f64) {
        let w = self.width;
        self.row_mut(i)[w] = v;
    }

    fn obj_rhs(&self) -> f64 {
        self.rhs(self.m)
    }

    /// Objective row holds reduced costs and minus the current value.
    fn load_objective(&mut self, cost: &[f64]) {
        let m = self.m;
        let w = self.width;
        {
            let obj = self.row_mut(m);
            obj[..w].copy_from_slice(cost);
            obj[w] = 0.0;
        }
        for i in 0..m {
            if !self.active[i] {
                continue;
            }
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..=w {
                    let v = self.at(i, j);
                    self.row_mut(m)[j] -= cb * v;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.width + 1;
        let p = self.at(r, s);
        for j in 0..w {
            self.data[r * w + j] /= p;
        }
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let update = |row: &mut [f64]| {
            let f = row[s];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[s] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(update);
        after.chunks_mut(w).for_each(update);
        self.basis[r] = s;
    }

    /// Runs simplex pivots over columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        let mut degenerate = 0;
        for _ in 0..MAX_PIVOTS {
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut enter = None;
            let mut best = -COST_EPS;
            for j in 0..allowed {
                let rc = self.at(self.m, j);
                if rc < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = rc;
                }
            }
            let Some(s) = enter else {
                return Ok(());
            };
            let mut leave: Option<usize> = None;
            let mut ratio = f64::INFINITY;
            for i in 0..self.m {
                if !self.active[i] {
                    continue;
                }
                let a = self.at(i, s);
                if a > PIVOT_EPS {
                    let q = self.rhs(i).max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            q < ratio - 1e-12 * (1.0 + ratio)
                                || (q <= ratio + 1e-12 * (1.0 + ratio) && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some(i);
                        ratio = q;
                    }
                }
            }
            let Some(r) = leave else {
                return Err(Error::Unbounded);
            };
            if ratio <= 1e-14 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, s);
        }
        Err(Error::Solver { solver: "simplex", best_value: -self.obj_rhs(), residual: f64::NAN, iterate: Vec::new() })
    }

    fn expel_artificials(&mut self, art_start: usize) {
        for i in 0..self.m {
            if !self.active[i] || self.basis[i] < art_start {
                continue;
            }
            let col = (0..art_start).find(|&j| self.at(i, j).abs() > 1e-9);
            match col {
                Some(j) => self.pivot(i, j),
                None => self.active[i] = false,
            }
        }
    }
}

/// Oracle LP for the global-cost game:
/// `min_{a∈Δ_d} Σ max(0, z_i a_i + z'_i)` as an LP in `(a, t)`.
///
/// Returns the optimal value ν and a minimizer.
pub fn nu_oracle(z: &[f64], z_prime: &[f64]) -> Result<(f64, Vec<f64>)> {
    let d = z.len();
    crate::error::check_dim("nu_oracle z'", z_prime.len(), d)?;
    if d == 0 {
        return Err(Error::input("nu_oracle: empty input"));
    }
    let mut lp = LinearProgram::new(2 * d);
    let mut c = vec![0.0; 2 * d];
    c[d..].iter_mut().for_each(|v| *v = 1.0);
    lp.minimize(c);
    for i in 0..d {
        let mut row = vec![0.0; 2 * d];
        row[i] = z[i];
        row[d + i] = -1.0;
        lp.constrain(row, Relation::Le, -z_prime[i])?;
    }
    let mut simplex_row = vec![0.0; 2 * d];
    simplex_row[..d].iter_mut().for_each(|v| *v = 1.0);
    lp.constrain(simplex_row, Relation::Eq, 1.0)?;
    let sol = lp.solve()?;
    let mut a: Vec<f64> = sol.solution[..d].iter().map(|v| v.max(0.0)).collect();
    let s: f64 = a.iter().sum();
    a.iter_mut().for_each(|v| *v /= s);
    // report the exact objective at the returned action
    let nu = (0..d).map(|i| (z[i] * a[i] + z_prime[i]).max(0.0)).sum();
    Ok((nu, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable_upper_bound() {
        let p = LpProblem { objective: vec![-1.0], constraints: vec![vec![1.0]], bounds: vec![1.0] };
        let s = lp_solve(&p).unwrap();
        assert!((s.value + 1.0).abs() < 1e-12);
        assert!((s.solution[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn covering_constraint_is_tight() {
        let p = LpProblem { objective: vec![1.0, 1.0], constraints: vec![vec![-1.0, -1.0]], bounds: vec![-1.0] };
        let s = lp_solve(&p).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = LpProblem { objective: vec![1.0], constraints: vec![vec![1.0], vec![-1.0]], bounds: vec![1.0, -2.0] };
        assert!(matches!(lp_solve(&p), Err(Error::Infeasible)));
        let p = LpProblem { objective: vec![-1.0, 0.0], constraints: vec![vec![0.0, 1.0]], bounds: vec![1.0] };
        assert!(matches!(lp_solve(&p), Err(Error::Unbounded)));
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x  s.t. x free, x ≥ −3, x + y = 2, y ≥ 0
        let mut lp = LinearProgram::new(2);
        lp.minimize(vec![1.0, 0.0]);
        lp.set_free(0);
        lp.constrain(vec![1.0, 0.0], Relation::Ge, -3.0).unwrap();
        lp.constrain(vec![1.0, 1.0], Relation::Eq, 2.0).unwrap();
        let s = lp.solve().unwrap();
        assert!((s.value + 3.0).abs() < 1e-10);
        assert!((s.solution[1] - 5.0).abs() < 1e-10);
    }

    // Grid oracle over Δ₂ at step 1e-3.
    fn grid_nu(z: &[f64], zp: &[f64]) -> f64 {
        (0..=1000)
            .map(|k| {
                let a = [k as f64 / 1000.0, 1.0 - k as f64 / 1000.0];
                (0..2).map(|i| (z[i] * a[i] + zp[i]).max(0.0)).sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn nu_oracle_examples() {
        let (nu, a) = nu_oracle(&[-1.0, -1.0], &[0.0, 0.0]).unwrap();
        assert!(nu.abs() < 1e-12);
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let (nu, _) = nu_oracle(&[1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert!((nu - 2.0).abs() < 1e-10);
        assert!((grid_nu(&[1.0, 1.0], &[0.5, 0.5]) - 2.0).abs() < 1e-9);

        let (nu, a) = nu_oracle(&[2.0, -1.0], &[-0.5, 0.0]).unwrap();
        assert!(nu.abs() < 1e-12);
        assert!(a[0] <= 0.25 + 1e-12);
        assert!(grid_nu(&[2.0, -1.0], &[-0.5, 0.0]).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // classic Beale cycling example
        let p = LpProblem {
            objective: vec![-0.75, 150.0, -0.02, 6.0],
            constraints: vec![vec![0.25, -60.0, -0.04, 9.0], vec![0.5, -90.0, -0.02, 3.0], vec![0.0, 0.0, 1.0, 0.0]],
            bounds: vec![0.0, 0.0, 1.0],
        };
        let s = lp_solve(&p).unwrap();
        assert!((s.value + 0.05).abs() < 1e-9);
    }
}
