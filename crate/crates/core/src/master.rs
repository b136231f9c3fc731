//! Restricted master problem, the Benders cutting-plane loop and the
//! transform showing that some optimum has zero repair cost everywhere.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use thiserror::Error;

use crate::decomposition::{decompose, CoverMode, Decomposition, DecompositionError, Subproblem};
use crate::graph::{
    components_where, cost_unchecked, is_integral, repair_by_positive_components, EdgeLabeling, Instance, Partition,
};
use crate::io::format_real;
use crate::lp::{
    solve_binary_milp_with, solve_lp, LpError, LpProblem, LpStatus, MilpOptions, MilpStatus, Relation, Sense,
};
use crate::paths::positive_shortest_paths;
use crate::rounding::{round, RoundingMethod};
use crate::subproblem::{
    mwr_row, mwr_stream, solve_weighted, violated_cycle, BendersRow, MwrObjective, RowKind, SubproblemError,
    VIOLATION_TOL,
};

/// Work units (elementary tableau updates, edge relaxations) per simulated millisecond.
pub const WORK_PER_MS: f64 = 1e6;
pub const DUALITY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Subproblem(#[from] SubproblemError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Source of the times written to traces and used for the time limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Clock {
    /// Deterministic operation counts converted at [`WORK_PER_MS`].
    #[default]
    Work,
    Wall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tau: f64,
    pub time_limit_s: f64,
    pub seed: u64,
    pub threads: usize,
    pub cover_mode: CoverMode,
    pub mwr_objective: MwrObjective,
    pub rounding: RoundingMethod,
    pub clock: Clock,
    /// Keep every master solution in the result.
    pub record_history: bool,
    pub milp_node_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tau: 0.5,
            time_limit_s: 600.0,
            seed: 0,
            threads: 1,
            cover_mode: CoverMode::Exact,
            mwr_objective: MwrObjective::Random,
            rounding: RoundingMethod::Threshold,
            clock: Clock::Work,
            record_history: false,
            milp_node_limit: 200_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(0.0..1.0).contains(&self.tau) {
            return Err(SolveError::Config(format!("tau must lie in [0,1), got {}", self.tau)));
        }
        if !(self.time_limit_s > 0.0) {
            return Err(SolveError::Config(format!("time limit must be positive, got {}", self.time_limit_s)));
        }
        if self.threads == 0 {
            return Err(SolveError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Lp,
    Ilp,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Lp => "LP",
            Phase::Ilp => "ILP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub phase: Phase,
    pub master_ms: f64,
    /// Per root (or per separated item), in ascending order.
    pub sub_ms: Vec<f64>,
    pub max_sub_ms: f64,
    pub sum_sub_ms: f64,
    pub lb: f64,
    pub ub: f64,
    pub rows_std: usize,
    pub rows_mwr: usize,
    pub wall_master_ms: f64,
    pub wall_max_sub_ms: f64,
    pub wall_sum_sub_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundsTrace {
    pub clock: Clock,
    pub records: Vec<TraceRecord>,
}

pub const TRACE_HEADER: &str = "iter,phase,master_ms,max_sub_ms,sum_sub_ms,lb,ub,rows_std,rows_mwr";

impl BoundsTrace {
    /// Master plus all subproblem time, one CPU.
    pub fn serial_total_ms(&self) -> f64 {
        self.records.iter().map(|r| r.master_ms + r.sum_sub_ms).sum()
    }

    /// Master plus the slowest subproblem, one CPU per subproblem.
    pub fn parallel_total_ms(&self) -> f64 {
        self.records.iter().map(|r| r.master_ms + r.max_sub_ms).sum()
    }

    pub fn master_total_ms(&self) -> f64 {
        self.records.iter().map(|r| r.master_ms).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.iteration,
                r.phase.as_str(),
                format_real(r.master_ms),
                format_real(r.max_sub_ms),
                format_real(r.sum_sub_ms),
                format_real(r.lb),
                format_real(r.ub),
                r.rows_std,
                r.rows_mwr
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    TimeLimit,
    NodeLimit,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::TimeLimit => "time-limit",
            SolveStatus::NodeLimit => "node-limit",
        }
    }
}

/// Counters over every subproblem solve of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveStats {
    pub subproblem_solves: usize,
    /// Solves whose primal and dual objectives differ by more than [`DUALITY_TOL`].
    pub duality_failures: usize,
    pub max_duality_gap: f64,
    /// Solves whose primal or dual certificate is infeasible beyond [`DUALITY_TOL`].
    pub certificate_failures: usize,
    pub mwr_solves: usize,
    /// MWRs whose original objective at the generating point fell below `tau * q`.
    pub mwr_tau_failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: EdgeLabeling,
    pub partition: Partition,
    pub cost: f64,
    pub lower_bound: f64,
    pub status: SolveStatus,
    pub trace: BoundsTrace,
    pub iterations: usize,
    /// Bound at the last iteration of the LP phase, if it completed.
    pub lp_bound: Option<f64>,
    pub rows: Vec<BendersRow>,
    /// Master solution per iteration; empty unless history was requested.
    pub master_solutions: Vec<Vec<f64>>,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn gap(&self) -> f64 {
        self.cost - self.lower_bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterSolution {
    pub x: EdgeLabeling,
    /// Objective including the constant term; a lower bound on the optimum.
    pub bound: f64,
    pub status: MilpStatus,
    pub work: u64,
}

pub(crate) fn master_problem(inst: &Instance, rows: &[Vec<(usize, f64)>], integral: bool) -> LpProblem {
    let mut p = LpProblem::new(Sense::Minimize);
    for e in inst.edges() {
        if integral {
            p.add_binary_var(e.weight);
        } else {
            p.add_var(e.weight, 0.0, 1.0);
        }
    }
    for r in rows {
        p.add_constraint(r.clone(), Relation::Le, 0.0);
    }
    p
}

pub(crate) fn solve_master_problem(
    inst: &Instance,
    p: &LpProblem,
    integral: bool,
    node_limit: usize,
) -> Result<MasterSolution, SolveError> {
    let offset = inst.objective_offset();
    if integral {
        let opts = MilpOptions { node_limit, ..MilpOptions::default() };
        let r = solve_binary_milp_with(p, &opts)?;
        match r.status {
            MilpStatus::Optimal | MilpStatus::NodeLimit => {}
            other => return Err(SolveError::Internal(format!("master ILP ended with {other:?}"))),
        }
        let bound = if r.status == MilpStatus::Optimal { r.objective + offset } else { r.root_bound + offset };
        Ok(MasterSolution { x: EdgeLabeling::new(r.values), bound, status: r.status, work: r.work })
    } else {
        let s = solve_lp(p)?;
        if s.status != LpStatus::Optimal {
            return Err(SolveError::Internal(format!("master LP ended with {:?}", s.status)));
        }
        let x = s.x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Ok(MasterSolution {
            x: EdgeLabeling::new(x),
            bound: s.objective + offset,
            status: MilpStatus::Optimal,
            work: s.work,
        })
    }
}

/// Minimizes the clustering objective subject to `rows`, over the unit box
/// or over binary labelings.
pub fn solve_master(inst: &Instance, rows: &[BendersRow], integral: bool) -> Result<MasterSolution, SolveError> {
    let coeffs: Vec<Vec<(usize, f64)>> = rows.iter().map(|r| r.coeffs.clone()).collect();
    let p = master_problem(inst, &coeffs, integral);
    solve_master_problem(inst, &p, integral, SolverConfig::default().milp_node_limit)
}

struct RootOutcome {
    standard: Option<BendersRow>,
    mwr: Option<BendersRow>,
    work: u64,
    wall_ms: f64,
    solves: usize,
    duality_failure: bool,
    duality_gap: f64,
    certificate_failure: bool,
    mwr_tau_failure: bool,
}

fn process_root(
    inst: &Instance,
    decomp: &Decomposition,
    sub: &Subproblem,
    weights: &[f64],
    x: &[f64],
    iteration: usize,
    cfg: &SolverConfig,
) -> Result<RootOutcome, SolveError> {
    let start = Instant::now();
    let (hit, sep_work) = violated_cycle(inst, sub, x);
    let mut out = RootOutcome {
        standard: None,
        mwr: None,
        work: sep_work,
        wall_ms: 0.0,
        solves: 0,
        duality_failure: false,
        duality_gap: 0.0,
        certificate_failure: false,
        mwr_tau_failure: false,
    };
    if hit.is_some() {
        let sol = solve_weighted(inst, sub, weights, x)?;
        out.work += sol.work;
        out.solves = 1;
        out.duality_gap = (sol.primal_value - sol.q_value).abs();
        out.duality_failure = out.duality_gap > DUALITY_TOL;
        out.certificate_failure =
            sol.primal_violation(inst, sub, x) > DUALITY_TOL || sol.dual_violation(inst, sub, weights) > DUALITY_TOL;
        out.standard = Some(sol.into_row(RowKind::Standard, iteration));
        if cfg.tau > 0.0 && sol.q_value > VIOLATION_TOL {
            let mut rng = mwr_stream(cfg.seed, iteration, sub.root);
            let m = mwr_row(inst, decomp, sub.root, x, sol.q_value, cfg.tau, cfg.mwr_objective, &mut rng, iteration)?;
            out.work += m.work;
            out.mwr_tau_failure = m.value_at_x < cfg.tau * sol.q_value - DUALITY_TOL;
            out.mwr = Some(m.row);
        }
    }
    out.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(out)
}

fn fan_out(
    inst: &Instance,
    decomp: &Decomposition,
    x: &[f64],
    iteration: usize,
    cfg: &SolverConfig,
) -> Result<Vec<RootOutcome>, SolveError> {
    let weights = inst.weights();
    let subs = &decomp.subproblems;
    let workers = cfg.threads.min(subs.len()).max(1);
    if workers == 1 {
        return subs.iter().map(|s| process_root(inst, decomp, s, &weights, x, iteration, cfg)).collect();
    }
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<RootOutcome, SolveError>>> = (0..subs.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= subs.len() {
                            break;
                        }
                        done.push((i, process_root(inst, decomp, &subs[i], &weights, x, iteration, cfg)));
                    }
                    done
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("subproblem worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every root processed")).collect()
}

fn to_ms(work: u64) -> f64 {
    work as f64 / WORK_PER_MS
}

/// Runs the Benders loop: LP masters until no subproblem reports a violated
/// cycle, then ILP masters until the solution is binary and clean.
pub fn bdcc(inst: &Instance, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    cfg.validate()?;
    let decomp = decompose(inst, cfg.cover_mode)?;
    bdcc_with(inst, &decomp, cfg)
}

pub fn bdcc_with(inst: &Instance, decomp: &Decomposition, cfg: &SolverConfig) -> Result<SolveResult, SolveError> {
    cfg.validate()?;
    let m = inst.edge_count();
    let mut trace = BoundsTrace { clock: cfg.clock, records: Vec::new() };
    if decomp.is_empty() {
        let x = EdgeLabeling::zeros(m);
        let partition = components_where(inst, |_| true);
        return Ok(SolveResult {
            cost: cost_unchecked(inst, &x.values),
            x,
            partition,
            lower_bound: 0.0,
            status: SolveStatus::Optimal,
            trace,
            iterations: 0,
            lp_bound: None,
            rows: Vec::new(),
            master_solutions: Vec::new(),
            stats: SolveStats::default(),
        });
    }

    let mut rows: Vec<BendersRow> = Vec::new();
    let mut coeffs: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut done_lp = false;
    let mut lp_bound = None;
    let mut stats = SolveStats::default();
    let mut history = Vec::new();
    let mut best: Option<(f64, EdgeLabeling)> = None;
    let mut elapsed_ms = 0.0;
    let (mut n_std, mut n_mwr) = (0usize, 0usize);
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

        let outcomes = fan_out(inst, decomp, &x.values, iteration, cfg)?;
        let mut did_add = false;
        let mut sub_ms = Vec::with_capacity(outcomes.len());
        let mut wall_sub = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            sub_ms.push(match cfg.clock {
                Clock::Work => to_ms(o.work),
                Clock::Wall => o.wall_ms,
            });
            wall_sub.push(o.wall_ms);
            stats.subproblem_solves += o.solves;
            stats.duality_failures += o.duality_failure as usize;
            stats.certificate_failures += o.certificate_failure as usize;
            stats.max_duality_gap = stats.max_duality_gap.max(o.duality_gap);
            stats.mwr_tau_failures += o.mwr_tau_failure as usize;
            if let Some(r) = o.standard {
                did_add = true;
                n_std += 1;
                coeffs.push(r.coeffs.clone());
                rows.push(r);
            }
            if let Some(r) = o.mwr {
                n_mwr += 1;
                stats.mwr_solves += 1;
                coeffs.push(r.coeffs.clone());
                rows.push(r);
            }
        }
        if !did_add && !done_lp {
            done_lp = true;
            lp_bound = Some(master.bound);
        }

        let finished = !did_add && x.values.iter().all(|&v| is_integral(v));
        let candidate = if finished {
            repair_by_positive_components(inst, &x.snapped())
        } else {
            round(inst, decomp, &x, cfg.rounding)
        };
        let cand_cost = cost_unchecked(inst, &candidate.values);
        if best.as_ref().map_or(true, |(c, _)| cand_cost < *c) || finished {
            best = Some((cand_cost, candidate));
        }
        let ub = best.as_ref().map(|(c, _)| *c).unwrap_or(f64::INFINITY);

        let master_ms = match cfg.clock {
            Clock::Work => to_ms(master.work),
            Clock::Wall => wall_master_ms,
        };
        let max_sub_ms = sub_ms.iter().copied().fold(0.0, f64::max);
        let sum_sub_ms: f64 = sub_ms.iter().sum();
        let wall_max_sub_ms = wall_sub.iter().copied().fold(0.0, f64::max);
        let wall_sum_sub_ms: f64 = wall_sub.iter().sum();
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
            rows_std: n_std,
            rows_mwr: n_mwr,
            wall_master_ms,
            wall_max_sub_ms,
            wall_sum_sub_ms,
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
            return Ok(SolveResult {
                x,
                partition,
                cost,
                lower_bound: master.bound,
                status,
                trace,
                iterations: iteration + 1,
                lp_bound,
                rows,
                master_solutions: history,
                stats,
            });
        }
    }
    unreachable!("the loop only exits by returning")
}

/// Objective of the augmented formulation for a master labeling `x` and one
/// subproblem labeling per root (`xs[r]` parallel to `decomp.subproblems`).
/// On owned negative edges `xs` marks edges that stay cut; on positive
/// edges it marks extra cuts.
pub fn cc2_objective(inst: &Instance, decomp: &Decomposition, x: &[f64], xs: &[Vec<f64>]) -> f64 {
    let mut z = cost_unchecked(inst, x);
    for (sub, xr) in decomp.subproblems.iter().zip(xs) {
        z += sub.negative.iter().map(|&k| -inst.weight(k) * (1.0 - xr[k])).sum::<f64>();
        z += inst.positive_edges().iter().map(|&k| inst.weight(k) * xr[k]).sum::<f64>();
    }
    z
}

/// Largest violation of the subproblem constraints by `(x, xs)`: for each
/// owned negative edge, the positive-path length under `x + x^s` against
/// `x + x^s − 1` on the negative edge.
pub fn cc2_violation(inst: &Instance, decomp: &Decomposition, x: &[f64], xs: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (sub, xr) in decomp.subproblems.iter().zip(xs) {
        let len: Vec<f64> = x.iter().zip(xr).map(|(a, b)| a + b).collect();
        let sp = positive_shortest_paths(inst, sub.root, &len);
        for &k in &sub.negative {
            let v = inst.edge(k).other(sub.root);
            worst = worst.max(x[k] + xr[k] - 1.0 - sp.dist[v]);
        }
    }
    worst
}

/// Moves all repairs from the subproblems into the master labeling. The
/// results are clamped to the unit interval.
pub fn zero_repair_transform(
    inst: &Instance,
    decomp: &Decomposition,
    x: &[f64],
    xs: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<Vec<f64>>), SolveError> {
    if x.len() != inst.edge_count() || xs.len() != decomp.len() || xs.iter().any(|r| r.len() != x.len()) {
        return Err(SolveError::Config("labeling sizes do not match the instance".into()));
    }
    let viol = cc2_violation(inst, decomp, x, xs);
    if viol > VIOLATION_TOL {
        return Err(SolveError::Config(format!("input violates subproblem constraints by {viol}")));
    }
    let mut xstar = x.to_vec();
    for &k in inst.positive_edges() {
        let extra = xs.iter().map(|r| r[k]).fold(0.0, f64::max);
        xstar[k] = (x[k] + extra).min(1.0);
    }
    let mut xs_star = vec![vec![0.0; x.len()]; xs.len()];
    for (r, sub) in decomp.subproblems.iter().enumerate() {
        for &k in &sub.negative {
            xstar[k] = (x[k] + xs[r][k] - 1.0).max(0.0);
            xs_star[r][k] = 1.0;
        }
    }
    Ok((xstar, xs_star))
}

/// Repair cost of every subproblem at `x`, in root order.
pub fn all_repair_costs(inst: &Instance, decomp: &Decomposition, x: &[f64]) -> Result<Vec<f64>, SolveError> {
    let w = inst.weights();
    decomp.subproblems.iter().map(|sub| Ok(solve_weighted(inst, sub, &w, x)?.q_value)).collect()
}
