//! Classical cutting-plane solver over cycle inequalities with one negative edge.

use std::time::Instant;

use crate::graph::{
    components_where, cost_unchecked, is_integral, repair_by_positive_components, EdgeLabeling, Instance,
};
use crate::lp::MilpStatus;
use crate::master::{
    master_problem, solve_master_problem, BoundsTrace, Clock, Phase, SolveError, SolveResult, SolveStats, SolveStatus,
    SolverConfig, TraceRecord, WORK_PER_MS,
};
use crate::paths::positive_shortest_paths;
use crate::rounding::round_threshold;
use crate::subproblem::VIOLATION_TOL;

/// `Σ_{path} x ≥ x_negative`, the path running over positive edges between
/// the endpoints of the negative edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleConstraint {
    pub negative: usize,
    pub path: Vec<usize>,
}

impl CycleConstraint {
    /// Coefficients of the equivalent `≤ 0` row.
    pub fn coeffs(&self) -> Vec<(usize, f64)> {
        let mut c: Vec<(usize, f64)> = self.path.iter().map(|&k| (k, -1.0)).collect();
        c.push((self.negative, 1.0));
        c.sort_by_key(|&(k, _)| k);
        c
    }

    pub fn slack(&self, x: &[f64]) -> f64 {
        self.path.iter().map(|&k| x[k]).sum::<f64>() - x[self.negative]
    }
}

/// At most one violated inequality per negative edge, found by a shortest
/// path over positive edges weighted by `x`.
pub fn separate_cycles(inst: &Instance, x: &[f64]) -> Vec<CycleConstraint> {
    separate_with_work(inst, x).0
}

fn separate_with_work(inst: &Instance, x: &[f64]) -> (Vec<CycleConstraint>, Vec<u64>) {
    let mut found = Vec::new();
    let mut work = Vec::with_capacity(inst.negative_edges().len());
    for &k in inst.negative_edges() {
        let e = inst.edge(k);
        let sp = positive_shortest_paths(inst, e.i, x);
        work.push(sp.work);
        if sp.dist[e.j] < x[k] - VIOLATION_TOL {
            found.push(CycleConstraint { negative: k, path: sp.path_to(inst, e.j) });
        }
    }
    (found, work)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub result: SolveResult,
    pub constraints: Vec<CycleConstraint>,
}

/// LP relaxation with separation to a fixpoint, then ILP iterations until
/// the labeling is binary and no inequality is violated.
pub fn solve_baseline(inst: &Instance, cfg: &SolverConfig) -> Result<BaselineResult, SolveError> {
    cfg.validate()?;
    let m = inst.edge_count();
    let mut trace = BoundsTrace { clock: cfg.clock, records: Vec::new() };
    if inst.negative_edges().is_empty() {
        let x = EdgeLabeling::zeros(m);
        let result = SolveResult {
            cost: 0.0,
            partition: components_where(inst, |_| true),
            x,
            lower_bound: 0.0,
            status: SolveStatus::Optimal,
            trace,
            iterations: 0,
            lp_bound: None,
            rows: Vec::new(),
            master_solutions: Vec::new(),
            stats: SolveStats::default(),
        };
        return Ok(BaselineResult { result, constraints: Vec::new() });
    }

    let mut constraints: Vec<CycleConstraint> = Vec::new();
    let mut coeffs = Vec::new();
    let mut done_lp = false;
    let mut lp_bound = None;
    let mut history = Vec::new();
    let mut best: Option<(f64, EdgeLabeling)> = None;
    let mut elapsed_ms = 0.0;
    let limit_ms = cfg.time_limit_s * 1e3;

    for iteration in 0.. {
        let phase = if done_lp { Phase::Ilp } else { Phase::Lp };
        let t0 = Instant::now();
        let p = master_problem(inst, &coeffs, done_lp);
        let master = solve_master_problem(inst, &p, done_lp, cfg.milp_node_limit)?;
        let wall_master_ms = t0.elapsed().as_secs_f64() * 1e3;
        let x = master.x;
        if cfg.record_history {
            history.push(x.values.clone());
        }

        let t1 = Instant::now();
        let (found, work) = separate_with_work(inst, &x.values);
        let wall_sep_ms = t1.elapsed().as_secs_f64() * 1e3;
        let did_add = !found.is_empty();
        for c in found {
            coeffs.push(c.coeffs());
            constraints.push(c);
        }
        if !did_add && !done_lp {
            done_lp = true;
            lp_bound = Some(master.bound);
        }

        let finished = !did_add && x.values.iter().all(|&v| is_integral(v));
        let candidate =
            if finished { repair_by_positive_components(inst, &x.snapped()) } else { round_threshold(inst, &x) };
        let cand_cost = cost_unchecked(inst, &candidate.values);
        if best.as_ref().map_or(true, |(c, _)| cand_cost < *c) || finished {
            best = Some((cand_cost, candidate));
        }
        let ub = best.as_ref().map(|(c, _)| *c).unwrap_or(f64::INFINITY);

        let (master_ms, sub_ms): (f64, Vec<f64>) = match cfg.clock {
            Clock::Work => (master.work as f64 / WORK_PER_MS, work.iter().map(|&w| w as f64 / WORK_PER_MS).collect()),
            Clock::Wall => (wall_master_ms, vec![wall_sep_ms]),
        };
        let max_sub_ms = sub_ms.iter().copied().fold(0.0, f64::max);
        let sum_sub_ms: f64 = sub_ms.iter().sum();
        elapsed_ms += master_ms + sum_sub_ms;
        trace.records.push(TraceRecord {
            iteration,
            phase,
            master_ms,
            sub_ms,
            max_sub_ms,
            sum_sub_ms,
            lb: master.bound,
            ub,
            rows_std: constraints.len(),
            rows_mwr: 0,
            wall_master_ms,
            wall_max_sub_ms: wall_sep_ms,
            wall_sum_sub_ms: wall_sep_ms,
        });

        let status = if master.status == MilpStatus::NodeLimit {
            Some(SolveStatus::NodeLimit)
        } else if finished {
            Some(SolveStatus::Optimal)
        } else if elapsed_ms >= limit_ms {
            Some(SolveStatus::TimeLimit)
        } else {
            None
        };
        if let Some(status) = status {
            let (cost, x) = best.expect("a candidate exists after one iteration");
            let partition = components_where(inst, |k| !x.is_cut(k));
            let result = SolveResult {
                x,
                partition,
                cost,
                lower_bound: master.bound,
                status,
                trace,
                iterations: iteration + 1,
                lp_bound,
                rows: Vec::new(),
                master_solutions: history,
                stats: SolveStats::default(),
            };
            return Ok(BaselineResult { result, constraints });
        }
    }
    unreachable!("the loop only exits by returning")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::t1;

    #[test]
    fn separation_examples() {
        let t = t1();
        let cuts = separate_cycles(&t, &[0.0, 0.0, 1.0]);
        assert_eq!(cuts, vec![CycleConstraint { negative: 2, path: vec![0, 1] }]);
        assert_eq!(cuts[0].coeffs(), vec![(0, -1.0), (1, -1.0), (2, 1.0)]);
        assert!(separate_cycles(&t, &[1.0, 0.0, 1.0]).is_empty());
        let pos = Instance::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(separate_cycles(&pos, &[0.3, 0.9]).is_empty());
    }

    #[test]
    fn solves_t1_and_trivial_cases() {
        let r = solve_baseline(&t1(), &SolverConfig::default()).unwrap();
        assert_eq!(r.result.status, SolveStatus::Optimal);
        assert!((r.result.cost - 1.0).abs() < 1e-9);
        let pos = Instance::new(3, [(0, 1, 1.0)]).unwrap();
        let r = solve_baseline(&pos, &SolverConfig::default()).unwrap();
        assert_eq!((r.result.cost, r.result.iterations), (0.0, 0));
        assert_eq!(r.result.x.values, vec![0.0]);
    }
}
