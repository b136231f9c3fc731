//! Dense linear programming with dual extraction, plus binary branch-and-bound.
//!
//! The simplex works on a condensed tableau whose size is
//! `rows × (structural variables)`: every constraint gets a logical variable
//! `r_i = a_i·x` with bounds taken from its relation, and variable bounds are
//! handled implicitly. This suits the problems solved here, which have at most
//! a few hundred variables (subproblem duals are `O(|E|)`, the master has
//! `|E|`) but may accumulate many rows.
//!
//! Sign convention for duals and reduced costs: both are reported as the rate
//! of change of the optimal objective (in the problem's own sense) per unit
//! increase of the right-hand side or of the active bound. Hence a binding `≥`
//! row of a minimization has a nonnegative dual, and a binding `≤` row of a
//! maximization has a nonnegative dual.

mod milp;
mod simplex;

pub use milp::{solve_binary_milp, solve_binary_milp_with, MilpOptions, MilpResult, MilpStatus};
pub use simplex::{solve_lp, solve_lp_with, SimplexOptions};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub cost: f64,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub vars: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// One per constraint, see the module docs for the sign convention.
    pub duals: Vec<f64>,
    /// One per variable; zero for basic variables.
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
    /// Elementary tableau updates performed; a machine-independent cost measure.
    pub work: u64,
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        LpProblem { sense, vars: Vec::new(), constraints: Vec::new() }
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.vars.push(Variable { cost, lower, upper, integer: false });
        self.vars.len() - 1
    }

    pub fn add_binary_var(&mut self, cost: f64) -> usize {
        self.vars.push(Variable { cost, lower: 0.0, upper: 1.0, integer: true });
        self.vars.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for (j, v) in self.vars.iter().enumerate() {
            if !v.cost.is_finite() {
                return Err(LpError::Invalid(format!("variable {j} has non-finite cost")));
            }
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(LpError::Invalid(format!("variable {j} has bounds [{}, {}]", v.lower, v.upper)));
            }
            if v.lower == f64::INFINITY || v.upper == f64::NEG_INFINITY {
                return Err(LpError::Invalid(format!("variable {j} has an empty domain")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(LpError::Invalid(format!("constraint {i} has non-finite rhs")));
            }
            for &(j, a) in &c.coeffs {
                if j >= self.vars.len() {
                    return Err(LpError::Invalid(format!("constraint {i} references undeclared variable {j}")));
                }
                if !a.is_finite() {
                    return Err(LpError::Invalid(format!("constraint {i} has a non-finite coefficient")));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.vars.iter().zip(x).map(|(v, &xj)| v.cost * xj).sum()
    }

    pub fn row_activity(&self, i: usize, x: &[f64]) -> f64 {
        self.constraints[i].coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Largest violation of any bound or constraint by `x`.
    pub fn max_primal_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (v, &xj) in self.vars.iter().zip(x) {
            worst = worst.max(v.lower - xj).max(xj - v.upper);
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let act = self.row_activity(i, x);
            let viol = match c.relation {
                Relation::Le => act - c.rhs,
                Relation::Ge => c.rhs - act,
                Relation::Eq => (act - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

impl LpSolution {
    fn without_solution(status: LpStatus, p: &LpProblem, pivots: usize, work: u64) -> Self {
        LpSolution {
            status,
            x: vec![0.0; p.vars.len()],
            duals: vec![0.0; p.constraints.len()],
            reduced_costs: vec![0.0; p.vars.len()],
            objective: 0.0,
            pivots,
            work,
        }
    }

    /// Objective of the dual solution implied by `duals`, with reduced costs
    /// recomputed from scratch and charged to the bound they point at. This is
    /// a valid bound on the primal optimum whenever [`Self::max_dual_violation`]
    /// is zero.
    pub fn dual_objective(&self, p: &LpProblem) -> f64 {
        let reduced = self.recomputed_reduced_costs(p);
        let mut z: f64 = p.constraints.iter().zip(&self.duals).map(|(c, y)| c.rhs * y).sum();
        for (v, d) in p.vars.iter().zip(reduced) {
            let toward_upper = match p.sense {
                Sense::Minimize => d < 0.0,
                Sense::Maximize => d > 0.0,
            };
            if d != 0.0 {
                let bound = if toward_upper { v.upper } else { v.lower };
                z += d * bound;
            }
        }
        z
    }

    /// Largest sign violation of the duals and recomputed reduced costs.
    pub fn max_dual_violation(&self, p: &LpProblem) -> f64 {
        let flip = match p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut worst = 0.0f64;
        for (c, &y) in p.constraints.iter().zip(&self.duals) {
            let y = flip * y;
            worst = worst.max(match c.relation {
                Relation::Le => y,
                Relation::Ge => -y,
                Relation::Eq => 0.0,
            });
        }
        for (v, d) in p.vars.iter().zip(self.recomputed_reduced_costs(p)) {
            let d = flip * d;
            if v.lower == f64::NEG_INFINITY {
                worst = worst.max(d);
            }
            if v.upper == f64::INFINITY {
                worst = worst.max(-d);
            }
        }
        worst
    }

    fn recomputed_reduced_costs(&self, p: &LpProblem) -> Vec<f64> {
        let mut d: Vec<f64> = p.vars.iter().map(|v| v.cost).collect();
        for (c, &y) in p.constraints.iter().zip(&self.duals) {
            for &(j, a) in &c.coeffs {
                d[j] -= a * y;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_input() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(1.0, 1.0, 0.0);
        assert!(p.validate().is_err());
        p.vars[x].upper = 2.0;
        p.add_constraint(vec![(3, 1.0)], Relation::Le, 1.0);
        assert!(p.validate().is_err());
        p.constraints[0].coeffs = vec![(0, f64::NAN)];
        assert!(p.validate().is_err());
        p.constraints[0].coeffs = vec![(0, 1.0)];
        assert!(p.validate().is_ok());
    }
}
