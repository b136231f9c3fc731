use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::simplex::solve_bounded;
use super::{LpError, LpProblem, LpStatus, Sense, SimplexOptions};

#[derive(Debug, Clone)]
pub struct MilpOptions {
    pub integrality_tol: f64,
    /// Nodes explored before giving up with the incumbent.
    pub node_limit: usize,
    pub simplex: SimplexOptions,
}

impl Default for MilpOptions {
    fn default() -> Self {
        MilpOptions { integrality_tol: 1e-6, node_limit: 200_000, simplex: SimplexOptions::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node limit hit; `values` holds the incumbent if one was found.
    NodeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpResult {
    pub status: MilpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub nodes: usize,
    /// Objective of the root relaxation in the problem's own sense.
    pub root_bound: f64,
    pub work: u64,
}

pub fn solve_binary_milp(p: &LpProblem) -> Result<MilpResult, LpError> {
    solve_binary_milp_with(p, &MilpOptions::default())
}

struct Node {
    bound: f64,
    seq: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // max-heap: smallest bound first, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then(other.seq.cmp(&self.seq))
    }
}

/// Best-first branch and bound over the variables marked `integer`.
/// Branches on the most fractional variable, lowest index on ties.
pub fn solve_binary_milp_with(p: &LpProblem, opts: &MilpOptions) -> Result<MilpResult, LpError> {
    p.validate()?;
    let flip = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let tol = opts.integrality_tol;
    let mut work = 0u64;
    let mut nodes = 0usize;
    let mut seq = 0usize;
    let mut incumbent: Option<(Vec<f64>, f64)> = None; // internal min sense
    let mut root_bound = f64::NAN;
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        seq,
        lower: p.vars.iter().map(|v| v.lower).collect(),
        upper: p.vars.iter().map(|v| v.upper).collect(),
    });

    let mut hit_limit = false;
    while let Some(node) = heap.pop() {
        if let Some((_, best)) = &incumbent {
            if node.bound >= best - 1e-9 {
                continue;
            }
        }
        if nodes >= opts.node_limit {
            hit_limit = true;
            break;
        }
        nodes += 1;
        let sol = solve_bounded(p, &node.lower, &node.upper, &opts.simplex)?;
        work += sol.work;
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Ok(MilpResult {
                    status: MilpStatus::Unbounded,
                    values: vec![0.0; p.vars.len()],
                    objective: flip * f64::NEG_INFINITY,
                    nodes,
                    root_bound: flip * f64::NEG_INFINITY,
                    work,
                });
            }
            LpStatus::Optimal => {}
        }
        let z = flip * sol.objective;
        if nodes == 1 {
            root_bound = sol.objective;
        }
        if let Some((_, best)) = &incumbent {
            if z >= best - 1e-9 {
                continue;
            }
        }
        let mut branch: Option<(usize, f64)> = None;
        for (j, v) in p.vars.iter().enumerate() {
            if !v.integer {
                continue;
            }
            let frac = sol.x[j] - sol.x[j].floor();
            let dist = frac.min(1.0 - frac);
            if dist > tol && branch.map_or(true, |(_, d)| dist > d) {
                branch = Some((j, dist));
            }
        }
        match branch {
            None => {
                let mut values = sol.x.clone();
                for (j, v) in p.vars.iter().enumerate() {
                    if v.integer {
                        values[j] = values[j].round();
                    }
                }
                let obj = flip * p.objective_value(&values);
                if incumbent.as_ref().map_or(true, |(_, best)| obj < *best) {
                    incumbent = Some((values, obj));
                }
            }
            Some((j, _)) => {
                let xj = sol.x[j];
                let mut down_upper = node.upper.clone();
                down_upper[j] = xj.floor();
                let mut up_lower = node.lower.clone();
                up_lower[j] = xj.ceil();
                seq += 1;
                heap.push(Node { bound: z, seq, lower: node.lower.clone(), upper: down_upper });
                seq += 1;
                heap.push(Node { bound: z, seq, lower: up_lower, upper: node.upper });
            }
        }
    }

    let status = match (&incumbent, hit_limit) {
        (_, true) => MilpStatus::NodeLimit,
        (Some(_), false) => MilpStatus::Optimal,
        (None, false) => MilpStatus::Infeasible,
    };
    let (values, objective) = match incumbent {
        Some((v, z)) => (v, flip * z),
        None => (vec![0.0; p.vars.len()], f64::NAN),
    };
    Ok(MilpResult { status, values, objective, nodes, root_bound, work })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Relation;

    #[test]
    fn single_binary() {
        let mut p = LpProblem::new(Sense::Minimize);
        p.add_binary_var(-1.0);
        let r = solve_binary_milp(&p).unwrap();
        assert_eq!(r.status, MilpStatus::Optimal);
        assert_eq!(r.values, vec![1.0]);
        assert_eq!(r.objective, -1.0);
    }

    #[test]
    fn small_knapsack() {
        // max 5a + 3b + 4c  s.t. 4a + 2b + 3c <= 5
        let mut p = LpProblem::new(Sense::Maximize);
        let a = p.add_binary_var(5.0);
        let b = p.add_binary_var(3.0);
        let c = p.add_binary_var(4.0);
        p.add_constraint(vec![(a, 4.0), (b, 2.0), (c, 3.0)], Relation::Le, 5.0);
        let r = solve_binary_milp(&p).unwrap();
        assert_eq!(r.status, MilpStatus::Optimal);
        assert_eq!(r.values, vec![0.0, 1.0, 1.0]);
        assert_eq!(r.objective, 7.0);
        assert!(r.root_bound >= 7.0);
    }

    #[test]
    fn pick_one_of_two() {
        let mut p = LpProblem::new(Sense::Maximize);
        let a = p.add_binary_var(2.0);
        let b = p.add_binary_var(3.0);
        p.add_constraint(vec![(a, 1.0), (b, 1.0)], Relation::Le, 1.0);
        let r = solve_binary_milp(&p).unwrap();
        assert_eq!(r.status, MilpStatus::Optimal);
        assert_eq!(r.values, vec![0.0, 1.0]);
        assert_eq!(r.objective, 3.0);
    }

    #[test]
    fn infeasible_integer_program() {
        // 2x = 1 has no binary solution
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_binary_var(1.0);
        p.add_constraint(vec![(x, 2.0)], Relation::Eq, 1.0);
        assert_eq!(solve_binary_milp(&p).unwrap().status, MilpStatus::Infeasible);
    }

    #[test]
    fn node_limit_reports_incumbent_state() {
        let mut p = LpProblem::new(Sense::Maximize);
        let v: Vec<usize> = (0..6).map(|k| p.add_binary_var(1.0 + k as f64 * 0.1)).collect();
        p.add_constraint(v.iter().map(|&j| (j, 2.0)).collect(), Relation::Le, 5.0);
        let opts = MilpOptions { node_limit: 1, ..Default::default() };
        let r = solve_binary_milp_with(&p, &opts).unwrap();
        assert_eq!(r.status, MilpStatus::NodeLimit);
        let full = solve_binary_milp(&p).unwrap();
        assert_eq!(full.status, MilpStatus::Optimal);
        assert!((full.objective - 2.9).abs() < 1e-9);
    }
}
