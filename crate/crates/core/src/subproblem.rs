//! Per-root Benders subproblems: the repair-cost LP in dual form, Benders
//! rows compacted from its solutions, Magnanti-Wong rows, and the
//! shortest-path separation test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::decomposition::{Decomposition, Subproblem};
use crate::graph::Instance;
use crate::lp::{solve_lp, LpError, LpProblem, LpStatus, Relation, Sense};
use crate::paths::positive_shortest_paths;

pub const VIOLATION_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubproblemError {
    #[error("node {0} is not a subproblem root")]
    UnknownRoot(usize),
    #[error("labeling has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("subproblem LP ended with status {0:?}")]
    Status(LpStatus),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    Standard,
    Mwr,
}

/// Inequality `Σ coeffs·x ≤ 0` over edge indices.
#[derive(Debug, Clone, PartialEq)]
pub struct BendersRow {
    /// Sparse, ascending by edge index, no explicit zeros.
    pub coeffs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub root: usize,
    pub iteration: usize,
}

impl BendersRow {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(k, w)| w * x[k]).sum()
    }

    pub fn coefficient(&self, edge: usize) -> f64 {
        self.coeffs.iter().find(|&&(k, _)| k == edge).map_or(0.0, |&(_, w)| w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MwrObjective {
    #[default]
    Random,
    InverseWeight,
}

/// Which dual variable a column of the dual LP stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DualVar {
    LambdaMinus(usize),
    LambdaPlus(usize),
    PsiMinus(usize),
    PsiPlus(usize),
}

impl DualVar {
    fn edge(self) -> usize {
        match self {
            DualVar::LambdaMinus(k) | DualVar::LambdaPlus(k) | DualVar::PsiMinus(k) | DualVar::PsiPlus(k) => k,
        }
    }
}

/// Dual LP of one subproblem together with its column and row layout.
#[derive(Debug, Clone)]
pub(crate) struct DualLp {
    pub problem: LpProblem,
    vars: Vec<DualVar>,
    /// Row of each node, `None` for the root.
    node_rows: Vec<Option<usize>>,
    /// Capacity row per edge of E⁺ not touching the root.
    cap_rows: Vec<(usize, usize)>,
}

impl DualLp {
    /// Builds the dual LP with edge weights `w` (same sign pattern as the
    /// instance weights) at labeling `x`.
    pub fn build(inst: &Instance, sub: &Subproblem, w: &[f64], x: &[f64]) -> Self {
        let s = sub.root;
        let mut p = LpProblem::new(Sense::Maximize);
        let mut vars = Vec::new();
        let mut node_terms: Vec<Vec<(usize, f64)>> = vec![Vec::new(); inst.node_count()];
        let mut cap_rows = Vec::new();
        let mut caps = Vec::new();

        for &k in inst.positive_edges() {
            let e = inst.edge(k);
            if e.i == s || e.j == s {
                continue;
            }
            let lm = p.add_var(-x[k], 0.0, f64::INFINITY);
            vars.push(DualVar::LambdaMinus(k));
            let lp = p.add_var(-x[k], 0.0, f64::INFINITY);
            vars.push(DualVar::LambdaPlus(k));
            node_terms[e.i].push((lm, -1.0));
            node_terms[e.i].push((lp, 1.0));
            node_terms[e.j].push((lm, 1.0));
            node_terms[e.j].push((lp, -1.0));
            caps.push((k, lm, lp));
        }
        for &k in &sub.negative {
            let v = inst.edge(k).other(s);
            let var = p.add_var(x[k], 0.0, -w[k]);
            vars.push(DualVar::PsiMinus(k));
            node_terms[v].push((var, 1.0));
        }
        for &k in &sub.positive {
            let v = inst.edge(k).other(s);
            let var = p.add_var(-x[k], 0.0, w[k]);
            vars.push(DualVar::PsiPlus(k));
            node_terms[v].push((var, -1.0));
        }

        let mut node_rows = vec![None; inst.node_count()];
        for (v, terms) in node_terms.into_iter().enumerate() {
            if v != s {
                node_rows[v] = Some(p.add_constraint(terms, Relation::Le, 0.0));
            }
        }
        for (k, lm, lp) in caps {
            cap_rows.push((k, p.add_constraint(vec![(lm, 1.0), (lp, 1.0)], Relation::Le, w[k])));
        }
        DualLp { problem: p, vars, node_rows, cap_rows }
    }

    /// Original dual objective coefficients at `x`.
    fn objective_at(&self, x: &[f64]) -> Vec<(usize, f64)> {
        self.vars
            .iter()
            .enumerate()
            .map(|(col, v)| {
                let c = match *v {
                    DualVar::PsiMinus(k) => x[k],
                    other => -x[other.edge()],
                };
                (col, c)
            })
            .collect()
    }
}

/// Solution of one subproblem with both certificates, indexed by edge and
/// node so that callers need not know the LP layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    pub root: usize,
    /// Optimal value of the dual LP.
    pub q_value: f64,
    /// Objective of the primal certificate `(f, m)`.
    pub primal_value: f64,
    /// Repair amount per edge; zero outside E⁺ ∪ E⁻_s.
    pub f: Vec<f64>,
    /// Node labels, root fixed to 0.
    pub m: Vec<f64>,
    pub lambda_minus: Vec<f64>,
    pub lambda_plus: Vec<f64>,
    pub psi_minus: Vec<f64>,
    pub psi_plus: Vec<f64>,
    pub work: u64,
}

impl SubproblemSolution {
    fn from_lp(
        inst: &Instance,
        sub: &Subproblem,
        dual: &DualLp,
        w: &[f64],
        values: &[f64],
        duals: &[f64],
        reduced: &[f64],
        x: &[f64],
        work: u64,
    ) -> Self {
        let m_edges = inst.edge_count();
        let mut sol = SubproblemSolution {
            root: sub.root,
            q_value: 0.0,
            primal_value: 0.0,
            f: vec![0.0; m_edges],
            m: vec![0.0; inst.node_count()],
            lambda_minus: vec![0.0; m_edges],
            lambda_plus: vec![0.0; m_edges],
            psi_minus: vec![0.0; m_edges],
            psi_plus: vec![0.0; m_edges],
            work,
        };
        for (col, v) in dual.vars.iter().enumerate() {
            let upper = dual.problem.vars[col].upper;
            let val = values[col].max(0.0).min(upper);
            match *v {
                DualVar::LambdaMinus(k) => sol.lambda_minus[k] = val,
                DualVar::LambdaPlus(k) => sol.lambda_plus[k] = val,
                DualVar::PsiMinus(k) => {
                    sol.psi_minus[k] = val;
                    sol.f[k] = reduced[col].max(0.0);
                }
                DualVar::PsiPlus(k) => {
                    sol.psi_plus[k] = val;
                    sol.f[k] = reduced[col].max(0.0);
                }
            }
        }
        for &(k, row) in &dual.cap_rows {
            sol.f[k] = duals[row].max(0.0);
        }
        for (v, row) in dual.node_rows.iter().enumerate() {
            if let Some(r) = row {
                sol.m[v] = duals[*r].max(0.0);
            }
        }
        sol.q_value = sol.dual_value(x);
        sol.primal_value = inst.positive_edges().iter().map(|&k| w[k] * sol.f[k]).sum::<f64>()
            - sub.negative.iter().map(|&k| w[k] * sol.f[k]).sum::<f64>();
        sol
    }

    /// Value of this dual point's affine function at `x`.
    pub fn dual_value(&self, x: &[f64]) -> f64 {
        self.omega().iter().map(|&(k, w)| w * x[k]).sum()
    }

    /// Compacted coefficients over edges, zeros dropped.
    pub fn omega(&self) -> Vec<(usize, f64)> {
        (0..self.f.len())
            .filter_map(|k| {
                let w = -(self.lambda_minus[k] + self.lambda_plus[k]) - self.psi_plus[k] + self.psi_minus[k];
                (w != 0.0).then_some((k, w))
            })
            .collect()
    }

    /// Largest violation of any primal constraint by the certificate `(f, m)`.
    pub fn primal_violation(&self, inst: &Instance, sub: &Subproblem, x: &[f64]) -> f64 {
        let s = sub.root;
        let mut worst = 0.0f64;
        for &k in inst.positive_edges() {
            let e = inst.edge(k);
            if e.i == s || e.j == s {
                let v = e.other(s);
                worst = worst.max(self.m[v] - x[k] - self.f[k]);
            } else {
                worst = worst.max((self.m[e.i] - self.m[e.j]).abs() - x[k] - self.f[k]);
            }
        }
        for &k in &sub.negative {
            let v = inst.edge(k).other(s);
            worst = worst.max(x[k] - self.f[k] - self.m[v]);
        }
        worst
    }

    /// Largest violation of the dual constraints, with weights `w`.
    pub fn dual_violation(&self, inst: &Instance, sub: &Subproblem, w: &[f64]) -> f64 {
        let s = sub.root;
        let mut worst = 0.0f64;
        let mut balance = vec![0.0; inst.node_count()];
        for &k in inst.positive_edges() {
            let e = inst.edge(k);
            if e.i == s || e.j == s {
                worst = worst.max(self.psi_plus[k] - w[k]);
                balance[e.other(s)] -= self.psi_plus[k];
            } else {
                worst = worst.max(self.lambda_minus[k] + self.lambda_plus[k] - w[k]);
                let d = self.lambda_minus[k] - self.lambda_plus[k];
                balance[e.i] -= d;
                balance[e.j] += d;
            }
        }
        for &k in &sub.negative {
            worst = worst.max(self.psi_minus[k] + w[k]);
            balance[inst.edge(k).other(s)] += self.psi_minus[k];
        }
        for (v, b) in balance.into_iter().enumerate() {
            if v != s {
                worst = worst.max(b);
            }
        }
        worst
    }

    pub fn into_row(&self, kind: RowKind, iteration: usize) -> BendersRow {
        BendersRow { coeffs: self.omega(), kind, root: self.root, iteration }
    }
}

fn lookup<'a>(decomp: &'a Decomposition, s: usize) -> Result<&'a Subproblem, SubproblemError> {
    decomp.subproblem(s).ok_or(SubproblemError::UnknownRoot(s))
}

fn check_len(inst: &Instance, x: &[f64]) -> Result<(), SubproblemError> {
    if x.len() != inst.edge_count() {
        return Err(SubproblemError::LengthMismatch { expected: inst.edge_count(), found: x.len() });
    }
    Ok(())
}

/// Dual LP of subproblem `s` at `x`, maximization form.
pub fn build_subproblem_dual(
    inst: &Instance,
    decomp: &Decomposition,
    s: usize,
    x: &[f64],
) -> Result<LpProblem, SubproblemError> {
    check_len(inst, x)?;
    let sub = lookup(decomp, s)?;
    Ok(DualLp::build(inst, sub, &inst.weights(), x).problem)
}

/// Evaluates the repair cost of subproblem `s` at `x` and returns both
/// certificates.
pub fn solve_subproblem(
    inst: &Instance,
    decomp: &Decomposition,
    s: usize,
    x: &[f64],
) -> Result<SubproblemSolution, SubproblemError> {
    check_len(inst, x)?;
    let sub = lookup(decomp, s)?;
    solve_weighted(inst, sub, &inst.weights(), x)
}

/// Subproblem solve with arbitrary edge weights `w` in place of the
/// instance weights.
pub(crate) fn solve_weighted(
    inst: &Instance,
    sub: &Subproblem,
    w: &[f64],
    x: &[f64],
) -> Result<SubproblemSolution, SubproblemError> {
    let dual = DualLp::build(inst, sub, w, x);
    let lp = solve_lp(&dual.problem)?;
    if lp.status != LpStatus::Optimal {
        return Err(SubproblemError::Status(lp.status));
    }
    Ok(SubproblemSolution::from_lp(inst, sub, &dual, w, &lp.x, &lp.duals, &lp.reduced_costs, x, lp.work))
}

pub fn standard_row(sol: &SubproblemSolution, iteration: usize) -> BendersRow {
    sol.into_row(RowKind::Standard, iteration)
}

/// Deterministic random stream for one (seed, iteration, root) triple.
pub fn mwr_stream(seed: u64, iteration: usize, root: usize) -> ChaCha8Rng {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for part in [iteration as u64, root as u64] {
        h = splitmix(h ^ splitmix(part));
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MwrResult {
    pub row: BendersRow,
    /// Original dual objective of the returned point at the generating `x`.
    pub value_at_x: f64,
    pub work: u64,
}

/// Magnanti-Wong row: re-optimizes the dual LP under a negative objective
/// while keeping the original objective at least `tau * q_value`.
#[allow(clippy::too_many_arguments)]
pub fn mwr_row(
    inst: &Instance,
    decomp: &Decomposition,
    s: usize,
    x: &[f64],
    q_value: f64,
    tau: f64,
    objective: MwrObjective,
    rng: &mut impl Rng,
    iteration: usize,
) -> Result<MwrResult, SubproblemError> {
    check_len(inst, x)?;
    let sub = lookup(decomp, s)?;
    let mut dual = DualLp::build(inst, sub, &inst.weights(), x);
    let original = dual.objective_at(x);
    let mut c: Vec<f64> = match objective {
        MwrObjective::Random => (0..dual.vars.len()).map(|_| rng.gen_range(-1.0..=-1e-3)).collect(),
        MwrObjective::InverseWeight => {
            dual.vars.iter().map(|v| -1.0 / (0.0001 + inst.weight(v.edge()).abs())).collect()
        }
    };
    let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        c.iter_mut().for_each(|v| *v /= norm);
    }
    for (var, cj) in dual.problem.vars.iter_mut().zip(&c) {
        var.cost = *cj;
    }
    dual.problem.add_constraint(original, Relation::Ge, tau * q_value);
    let lp = solve_lp(&dual.problem)?;
    if lp.status != LpStatus::Optimal {
        return Err(SubproblemError::Status(lp.status));
    }
    let w = inst.weights();
    let sol = SubproblemSolution::from_lp(inst, sub, &dual, &w, &lp.x, &lp.duals, &lp.reduced_costs, x, lp.work);
    Ok(MwrResult { row: sol.into_row(RowKind::Mwr, iteration), value_at_x: sol.q_value, work: lp.work })
}

/// First owned negative edge (lowest index) whose endpoints are closer than
/// its own label along positive edges, with that distance.
pub fn has_violated_cycle(inst: &Instance, decomp: &Decomposition, s: usize, x: &[f64]) -> Option<(usize, f64)> {
    let sub = decomp.subproblem(s)?;
    violated_cycle(inst, sub, x).0
}

pub(crate) fn violated_cycle(inst: &Instance, sub: &Subproblem, x: &[f64]) -> (Option<(usize, f64)>, u64) {
    let sp = positive_shortest_paths(inst, sub.root, x);
    let hit = sub.negative.iter().find_map(|&k| {
        let d = sp.dist[inst.edge(k).other(sub.root)];
        (d < x[k] - VIOLATION_TOL).then_some((k, d))
    });
    (hit, sp.work)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{decompose, CoverMode};
    use crate::graph::tests::t1;

    fn t1_setup() -> (Instance, Decomposition) {
        let t = t1();
        let d = decompose(&t, CoverMode::Exact).unwrap();
        (t, d)
    }

    #[test]
    fn d1_dual_objective_and_row() {
        let (t, d) = t1_setup();
        let x = [0.0, 0.0, 1.0];
        let p = build_subproblem_dual(&t, &d, 0, &x).unwrap();
        assert_eq!(p.sense, Sense::Maximize);
        let sol = solve_subproblem(&t, &d, 0, &x).unwrap();
        assert!((sol.q_value - 1.0).abs() < 1e-9);
        assert!((sol.primal_value - 1.0).abs() < 1e-9);
        let row = standard_row(&sol, 0);
        assert_eq!(row.coeffs, vec![(0, -1.0), (1, -1.0), (2, 1.0)]);
        assert!(sol.primal_violation(&t, &d.subproblems[0], &x) < 1e-9);
        assert!(sol.dual_violation(&t, &d.subproblems[0], &t.weights()) < 1e-9);
    }

    #[test]
    fn q_vanishes_on_zero_and_feasible_labelings() {
        let (t, d) = t1_setup();
        for x in [[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [1.0, 0.0, 1.0]] {
            let sol = solve_subproblem(&t, &d, 0, &x).unwrap();
            assert!(sol.q_value.abs() < 1e-12, "{x:?}");
        }
        let zero = solve_subproblem(&t, &d, 0, &[0.0; 3]).unwrap();
        assert!(standard_row(&zero, 0).coeffs.iter().all(|&(_, w)| w == 0.0) || zero.q_value == 0.0);
    }

    #[test]
    fn repair_of_single_cut() {
        let (t, d) = t1_setup();
        let sol = solve_subproblem(&t, &d, 0, &[0.0, 0.0, 1.0]).unwrap();
        // one positive edge is cut to repair, the negative edge keeps its cut
        assert!((sol.f[0] + sol.f[1] - 1.0).abs() < 1e-9);
        assert!(sol.f[2].abs() < 1e-9);
    }

    #[test]
    fn mwr_respects_tau() {
        let (t, d) = t1_setup();
        let x = [0.0, 0.0, 1.0];
        for (tau, obj) in
            [(0.5, MwrObjective::Random), (0.999999, MwrObjective::Random), (0.5, MwrObjective::InverseWeight)]
        {
            let mut rng = mwr_stream(1, 0, 0);
            let r = mwr_row(&t, &d, 0, &x, 1.0, tau, obj, &mut rng, 0).unwrap();
            assert!(r.value_at_x >= tau - 1e-6);
            assert_eq!(r.row.kind, RowKind::Mwr);
        }
    }

    #[test]
    fn separation_examples() {
        let (t, d) = t1_setup();
        assert_eq!(has_violated_cycle(&t, &d, 0, &[0.0, 0.0, 1.0]), Some((2, 0.0)));
        assert_eq!(has_violated_cycle(&t, &d, 0, &[1.0, 0.0, 1.0]), None);
        assert_eq!(has_violated_cycle(&t, &d, 0, &[0.0, 0.0, 0.0]), None);
    }

    #[test]
    fn streams_differ_by_key() {
        let a: f64 = mwr_stream(1, 0, 0).gen();
        let b: f64 = mwr_stream(1, 0, 1).gen();
        let c: f64 = mwr_stream(1, 1, 0).gen();
        assert!(a != b && a != c && b != c);
        let again: f64 = mwr_stream(1, 0, 0).gen();
        assert_eq!(a, again);
    }
}
