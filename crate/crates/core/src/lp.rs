//! Thin interface over the LP backend used by degree and fractional measures.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome, Variable};

use crate::error::{Error, Result};

/// Tolerance applied when comparing LP optima against thresholds.
pub const LP_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// Optimal objective and variable values in declaration order.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub objective: f64,
    pub values: Vec<f64>,
}

pub struct LinearProgram {
    problem: Problem,
    vars: Vec<Variable>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        let dir = match sense {
            Sense::Minimize => OptimizationDirection::Minimize,
            Sense::Maximize => OptimizationDirection::Maximize,
        };
        LinearProgram {
            problem: Problem::new(dir),
            vars: Vec::new(),
        }
    }

    /// Adds a variable and returns its index.
    pub fn var(&mut self, objective: f64, lo: f64, hi: f64) -> usize {
        self.vars.push(self.problem.add_var(objective, (lo, hi)));
        self.vars.len() - 1
    }

    pub fn free_var(&mut self, objective: f64) -> usize {
        self.var(objective, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn constraint(&mut self, terms: &[(usize, f64)], cmp: Cmp, rhs: f64) {
        let expr: Vec<(Variable, f64)> = terms
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|&(v, c)| (self.vars[v], c))
            .collect();
        let op = match cmp {
            Cmp::Le => ComparisonOp::Le,
            Cmp::Ge => ComparisonOp::Ge,
            Cmp::Eq => ComparisonOp::Eq,
        };
        self.problem.add_constraint(expr, op, rhs);
    }

    /// Solves the program; `Ok(None)` means infeasible.
    pub fn solve(&self) -> Result<Option<LpSolution>> {
        match self.problem.solve() {
            Ok(SolveOutcome::Solution(s)) => Ok(Some(LpSolution {
                objective: s.objective(),
                values: self.vars.iter().map(|&v| s.var_value_raw(v)).collect(),
            })),
            Ok(SolveOutcome::Interrupted(_)) => Err(Error::Lp("solve interrupted".into())),
            Err(microlp::Error::Infeasible) => Ok(None),
            Err(e) => Err(Error::Lp(e.to_string())),
        }
    }
}
