//! Thin dense front end over `microlp`.
//!
//! Every LP in this crate is small and dense; rows are given as coefficient
//! slices over all variables and zero entries are skipped.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};

use crate::error::{Error, Result};

pub use microlp::ComparisonOp as Cmp;

pub struct DenseLp {
    problem: Problem,
    vars: Vec<Variable>,
}

pub struct LpSolution {
    pub objective: f64,
    pub values: Vec<f64>,
}

impl DenseLp {
    pub fn maximize() -> Self {
        Self { problem: Problem::new(OptimizationDirection::Maximize), vars: Vec::new() }
    }

    pub fn minimize() -> Self {
        Self { problem: Problem::new(OptimizationDirection::Minimize), vars: Vec::new() }
    }

    pub fn free_var(&mut self, obj: f64) -> usize {
        self.var(obj, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn nonneg_var(&mut self, obj: f64) -> usize {
        self.var(obj, 0.0, f64::INFINITY)
    }

    pub fn var(&mut self, obj: f64, lo: f64, hi: f64) -> usize {
        self.vars.push(self.problem.add_var(obj, (lo, hi)));
        self.vars.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Adds `sum_j coeffs[j] * x_j  (cmp)  rhs` over the variables listed by index.
    pub fn constraint(&mut self, terms: &[(usize, f64)], cmp: ComparisonOp, rhs: f64) {
        let expr: Vec<(Variable, f64)> = terms
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|&(i, c)| (self.vars[i], c))
            .collect();
        self.problem.add_constraint(expr.as_slice(), cmp, rhs);
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let outcome = self.problem.solve().map_err(|e| Error::Lp(e.to_string()))?;
        let sol = outcome.into_solution().map_err(|_| Error::Lp("interrupted".into()))?;
        let values = self.vars.iter().map(|&v| sol.var_value_raw(v)).collect();
        Ok(LpSolution { objective: sol.objective(), values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // max x + 2y s.t. x + y <= 4, x - y >= -2, x, y >= 0  -> (1, 3), value 7
        let mut lp = DenseLp::maximize();
        let x = lp.nonneg_var(1.0);
        let y = lp.nonneg_var(2.0);
        lp.constraint(&[(x, 1.0), (y, 1.0)], Cmp::Le, 4.0);
        lp.constraint(&[(x, 1.0), (y, -1.0)], Cmp::Ge, -2.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 7.0).abs() < 1e-9);
        assert!((s.values[0] - 1.0).abs() < 1e-9 && (s.values[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn free_variables() {
        // min t s.t. t >= x - 3, t >= 3 - x, x free  -> 0
        let mut lp = DenseLp::minimize();
        let t = lp.free_var(1.0);
        let x = lp.free_var(0.0);
        lp.constraint(&[(t, 1.0), (x, -1.0)], Cmp::Ge, -3.0);
        lp.constraint(&[(t, 1.0), (x, 1.0)], Cmp::Ge, 3.0);
        let s = lp.solve().unwrap();
        assert!(s.objective.abs() < 1e-9);
        assert!((s.values[x] - 3.0).abs() < 1e-9);
    }
}
