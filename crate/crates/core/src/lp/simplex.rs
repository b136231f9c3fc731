use super::{LpError, LpProblem, LpSolution, LpStatus, Relation, Sense};

const FEAS_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Consecutive degenerate pivots after which Bland's rule takes over.
    pub bland_after: usize,
    /// Pivots between refactorizations of the tableau.
    pub refactor_every: usize,
    /// Hard cap on pivots; `None` derives one from the problem size.
    pub max_pivots: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { bland_after: 50, refactor_every: 150, max_pivots: None }
    }
}

pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, LpError> {
    solve_lp_with(p, &SimplexOptions::default())
}

pub fn solve_lp_with(p: &LpProblem, opts: &SimplexOptions) -> Result<LpSolution, LpError> {
    p.validate()?;
    let lower: Vec<f64> = p.vars.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = p.vars.iter().map(|v| v.upper).collect();
    solve_bounded(p, &lower, &upper, opts)
}

/// Solves `p` with the variable bounds replaced by `lower`/`upper`.
/// The problem is assumed validated.
pub(crate) fn solve_bounded(
    p: &LpProblem,
    lower: &[f64],
    upper: &[f64],
    opts: &SimplexOptions,
) -> Result<LpSolution, LpError> {
    let n = p.vars.len();
    if lower.iter().zip(upper).any(|(l, u)| l > u) {
        return Ok(LpSolution::without_solution(LpStatus::Infeasible, p, 0, 0));
    }

    // Densify rows, dropping empty ones after checking them.
    let mut kept = Vec::new();
    let mut a = Vec::new();
    for (i, c) in p.constraints.iter().enumerate() {
        let mut row = vec![0.0; n];
        for &(j, v) in &c.coeffs {
            row[j] += v;
        }
        if row.iter().all(|&v| v == 0.0) {
            let ok = match c.relation {
                Relation::Le => 0.0 <= c.rhs + FEAS_TOL,
                Relation::Ge => 0.0 >= c.rhs - FEAS_TOL,
                Relation::Eq => c.rhs.abs() <= FEAS_TOL,
            };
            if !ok {
                return Ok(LpSolution::without_solution(LpStatus::Infeasible, p, 0, 0));
            }
            continue;
        }
        kept.push(i);
        a.extend_from_slice(&row);
    }
    let m = kept.len();

    let flip = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let mut lo = Vec::with_capacity(n + m);
    let mut up = Vec::with_capacity(n + m);
    let mut cost = Vec::with_capacity(n + m);
    lo.extend_from_slice(lower);
    up.extend_from_slice(upper);
    cost.extend(p.vars.iter().map(|v| flip * v.cost));
    for &i in &kept {
        let c = &p.constraints[i];
        let (l, u) = match c.relation {
            Relation::Le => (f64::NEG_INFINITY, c.rhs),
            Relation::Ge => (c.rhs, f64::INFINITY),
            Relation::Eq => (c.rhs, c.rhs),
        };
        lo.push(l);
        up.push(u);
        cost.push(0.0);
    }

    let max_pivots = opts.max_pivots.unwrap_or(20_000 + 50 * (n + m));
    let mut engine = Engine::new(m, n, a, lo, up, cost);
    let status = engine.run(opts, max_pivots)?;

    if status != LpStatus::Optimal {
        return Ok(LpSolution::without_solution(status, p, engine.pivots, engine.work));
    }

    let x: Vec<f64> = engine.val[..n].to_vec();
    let mut duals = vec![0.0; p.constraints.len()];
    let mut reduced_costs = vec![0.0; n];
    for (col, &k) in engine.nonbasic.iter().enumerate() {
        let d = flip * engine.d[col];
        if k < n {
            reduced_costs[k] = d;
        } else {
            duals[kept[k - n]] = d;
        }
    }
    let objective = p.objective_value(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        duals,
        reduced_costs,
        objective,
        pivots: engine.pivots,
        work: engine.work,
    })
}

enum Step {
    Flip(f64),
    Pivot { row: usize, step: f64, leave_value: f64 },
    Unbounded,
}

/// Condensed tableau over `n` structural variables and `m` row logicals.
/// Variable `k < n` is structural, `n + i` is the logical of row `i`.
/// `t[i][c]` is the derivative of basic variable `basic[i]` with respect to
/// nonbasic variable `nonbasic[c]`.
struct Engine {
    m: usize,
    n: usize,
    a: Vec<f64>,
    t: Vec<f64>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    lo: Vec<f64>,
    up: Vec<f64>,
    cost: Vec<f64>,
    val: Vec<f64>,
    /// Phase-two reduced costs per nonbasic column.
    d: Vec<f64>,
    pivots: usize,
    work: u64,
    bland: bool,
    degenerate_streak: usize,
    since_refactor: usize,
}

impl Engine {
    fn new(m: usize, n: usize, a: Vec<f64>, lo: Vec<f64>, up: Vec<f64>, cost: Vec<f64>) -> Self {
        let mut val = vec![0.0; n + m];
        for j in 0..n {
            val[j] = if lo[j].is_finite() {
                lo[j]
            } else if up[j].is_finite() {
                up[j]
            } else {
                0.0
            };
        }
        for i in 0..m {
            val[n + i] = (0..n).map(|j| a[i * n + j] * val[j]).sum();
        }
        let d = cost[..n].to_vec();
        let nnz = a.iter().filter(|&&v| v != 0.0).count() as u64;
        Engine {
            m,
            n,
            t: a.clone(),
            a,
            basic: (n..n + m).collect(),
            nonbasic: (0..n).collect(),
            lo,
            up,
            cost,
            val,
            d,
            pivots: 0,
            work: nnz,
            bland: false,
            degenerate_streak: 0,
            since_refactor: 0,
        }
    }

    fn run(&mut self, opts: &SimplexOptions, max_pivots: usize) -> Result<LpStatus, LpError> {
        let mut fresh = true;
        let mut dd = vec![0.0; self.n];
        loop {
            if self.pivots > max_pivots {
                return Err(LpError::IterationLimit(max_pivots));
            }
            if self.since_refactor >= opts.refactor_every {
                self.refactor()?;
                fresh = true;
            }
            let phase1 = self.max_infeasibility() > FEAS_TOL;
            if phase1 {
                self.phase1_costs(&mut dd);
            } else {
                dd.copy_from_slice(&self.d);
            }
            let Some((col, dir)) = self.choose_entering(&dd) else {
                if !fresh {
                    // confirm on a clean tableau before declaring termination
                    self.refactor()?;
                    fresh = true;
                    continue;
                }
                return Ok(if phase1 { LpStatus::Infeasible } else { LpStatus::Optimal });
            };
            match self.ratio_test(col, dir, phase1) {
                Step::Unbounded => {
                    if phase1 {
                        return Err(LpError::Numerical("phase one ray without breakpoint".into()));
                    }
                    if !fresh {
                        self.refactor()?;
                        fresh = true;
                        continue;
                    }
                    return Ok(LpStatus::Unbounded);
                }
                Step::Flip(step) => {
                    self.advance(col, dir, step);
                    let k = self.nonbasic[col];
                    self.val[k] = if dir > 0.0 { self.up[k] } else { self.lo[k] };
                    self.note_step(step, opts);
                }
                Step::Pivot { row, step, leave_value } => {
                    self.advance(col, dir, step);
                    let leaving = self.basic[row];
                    self.val[leaving] = leave_value;
                    self.pivot(row, col);
                    self.note_step(step, opts);
                }
            }
            fresh = false;
            self.pivots += 1;
        }
    }

    fn note_step(&mut self, step: f64, opts: &SimplexOptions) {
        if step <= DEGENERATE_STEP {
            self.degenerate_streak += 1;
            if self.degenerate_streak >= opts.bland_after {
                self.bland = true;
            }
        } else {
            self.degenerate_streak = 0;
            self.bland = false;
        }
    }

    fn max_infeasibility(&self) -> f64 {
        self.basic.iter().map(|&k| (self.lo[k] - self.val[k]).max(self.val[k] - self.up[k])).fold(0.0, f64::max)
    }

    fn phase1_costs(&mut self, dd: &mut [f64]) {
        let n = self.n;
        dd.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.m {
            let k = self.basic[i];
            let g = if self.val[k] < self.lo[k] - FEAS_TOL {
                -1.0
            } else if self.val[k] > self.up[k] + FEAS_TOL {
                1.0
            } else {
                continue;
            };
            let row = &self.t[i * n..(i + 1) * n];
            for (d, &tij) in dd.iter_mut().zip(row) {
                *d += g * tij;
            }
            self.work += n as u64;
        }
    }

    fn choose_entering(&self, dd: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (col, &k) in self.nonbasic.iter().enumerate() {
            if self.lo[k] == self.up[k] {
                continue;
            }
            let dir = if dd[col] < -DUAL_TOL && self.val[k] < self.up[k] {
                1.0
            } else if dd[col] > DUAL_TOL && self.val[k] > self.lo[k] {
                -1.0
            } else {
                continue;
            };
            let score = dd[col].abs();
            let better = match best {
                None => true,
                Some((bcol, _, bscore)) => {
                    if self.bland {
                        k < self.nonbasic[bcol]
                    } else {
                        score > bscore || (score == bscore && k < self.nonbasic[bcol])
                    }
                }
            };
            if better {
                best = Some((col, dir, score));
            }
        }
        best.map(|(c, d, _)| (c, d))
    }

    fn ratio_test(&self, col: usize, dir: f64, phase1: bool) -> Step {
        let n = self.n;
        let entering = self.nonbasic[col];
        let mut best: Option<(usize, f64, f64, f64)> = None; // row, step, leave value, |alpha|
        for i in 0..self.m {
            let alpha = self.t[i * n + col] * dir;
            if alpha.abs() < PIVOT_TOL {
                continue;
            }
            let k = self.basic[i];
            let v = self.val[k];
            let (limit, bound) = if phase1 && v < self.lo[k] - FEAS_TOL {
                if alpha <= 0.0 {
                    continue;
                }
                ((self.lo[k] - v) / alpha, self.lo[k])
            } else if phase1 && v > self.up[k] + FEAS_TOL {
                if alpha >= 0.0 {
                    continue;
                }
                ((self.up[k] - v) / alpha, self.up[k])
            } else if alpha > 0.0 {
                if !self.up[k].is_finite() {
                    continue;
                }
                (((self.up[k] - v) / alpha).max(0.0), self.up[k])
            } else {
                if !self.lo[k].is_finite() {
                    continue;
                }
                (((self.lo[k] - v) / alpha).max(0.0), self.lo[k])
            };
            let take = match best {
                None => true,
                Some((brow, bstep, _, balpha)) => {
                    let tie = 1e-12 * bstep.max(1.0);
                    if limit < bstep - tie {
                        true
                    } else if limit <= bstep + tie {
                        if self.bland {
                            k < self.basic[brow]
                        } else {
                            alpha.abs() > balpha || (alpha.abs() == balpha && k < self.basic[brow])
                        }
                    } else {
                        false
                    }
                }
            };
            if take {
                best = Some((i, limit, bound, alpha.abs()));
            }
        }
        let flip = self.up[entering] - self.lo[entering];
        match best {
            Some((row, step, leave_value, _)) => {
                let flip_wins =
                    flip.is_finite() && (flip < step || (flip == step && (!self.bland || entering < self.basic[row])));
                if flip_wins {
                    Step::Flip(flip)
                } else {
                    Step::Pivot { row, step, leave_value }
                }
            }
            None if flip.is_finite() => Step::Flip(flip),
            None => Step::Unbounded,
        }
    }

    fn advance(&mut self, col: usize, dir: f64, step: f64) {
        if step == 0.0 {
            return;
        }
        let n = self.n;
        let entering = self.nonbasic[col];
        self.val[entering] += dir * step;
        for i in 0..self.m {
            let k = self.basic[i];
            self.val[k] += self.t[i * n + col] * dir * step;
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let n = self.n;
        let p = self.t[row * n + col];
        // new pivot row expresses the entering variable
        let mut prow: Vec<f64> = self.t[row * n..(row + 1) * n].iter().map(|v| -v / p).collect();
        prow[col] = 1.0 / p;
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.t[i * n + col];
            if f == 0.0 {
                continue;
            }
            self.work += n as u64;
            let r = &mut self.t[i * n..(i + 1) * n];
            for j in 0..n {
                if j == col {
                    r[j] = f / p;
                } else {
                    r[j] += f * prow[j];
                }
            }
        }
        let f = self.d[col];
        if f != 0.0 {
            for j in 0..n {
                if j == col {
                    self.d[j] = f / p;
                } else {
                    self.d[j] += f * prow[j];
                }
            }
        }
        self.t[row * n..(row + 1) * n].copy_from_slice(&prow);
        let leaving = self.basic[row];
        self.basic[row] = self.nonbasic[col];
        self.nonbasic[col] = leaving;
        self.work += 2 * n as u64;
        self.since_refactor += 1;
    }

    /// Rebuilds the tableau, basic values and reduced costs from the original
    /// rows and the current basis.
    fn refactor(&mut self) -> Result<(), LpError> {
        let (m, n) = (self.m, self.n);
        self.since_refactor = 0;
        // basic structurals and tight (nonbasic-logical) rows
        let sb: Vec<(usize, usize)> =
            self.basic.iter().enumerate().filter(|(_, &k)| k < n).map(|(i, &k)| (i, k)).collect();
        let tight: Vec<(usize, usize)> =
            self.nonbasic.iter().enumerate().filter(|(_, &k)| k >= n).map(|(c, &k)| (c, k - n)).collect();
        let k = sb.len();
        if tight.len() != k {
            return Err(LpError::Numerical("basis bookkeeping mismatch".into()));
        }
        let mut mat = vec![0.0; k * k];
        for (p, &(_, row)) in tight.iter().enumerate() {
            for (q, &(_, j)) in sb.iter().enumerate() {
                mat[p * k + q] = self.a[row * n + j];
            }
        }
        let inv = invert(&mat, k).ok_or_else(|| LpError::Numerical("singular basis".into()))?;

        // derivative of the basic structurals w.r.t. each nonbasic column
        let mut dxb = vec![0.0; k * n]; // q-major: dxb[q*n + c]
        for (c, &var) in self.nonbasic.iter().enumerate() {
            if var < n {
                for q in 0..k {
                    let s: f64 = (0..k).map(|p| inv[q * k + p] * self.a[tight[p].1 * n + var]).sum();
                    dxb[q * n + c] = -s;
                }
            } else {
                let p = tight.iter().position(|&(_, r)| r == var - n).expect("tight row");
                for q in 0..k {
                    dxb[q * n + c] = inv[q * k + p];
                }
            }
        }

        // values of basic structurals
        let mut rhs = vec![0.0; k];
        for (p, &(_, row)) in tight.iter().enumerate() {
            let mut r = self.val[n + row];
            for &var in &self.nonbasic {
                if var < n {
                    r -= self.a[row * n + var] * self.val[var];
                }
            }
            rhs[p] = r;
        }
        for (q, &(_, j)) in sb.iter().enumerate() {
            self.val[j] = (0..k).map(|p| inv[q * k + p] * rhs[p]).sum();
        }

        // refill the tableau
        for (q, &(i, _)) in sb.iter().enumerate() {
            self.t[i * n..(i + 1) * n].copy_from_slice(&dxb[q * n..(q + 1) * n]);
        }
        let mut ops = (k * k * k + k * k * n) as u64;
        for i in 0..m {
            let var = self.basic[i];
            if var < n {
                continue;
            }
            let row = var - n;
            let arow = &self.a[row * n..(row + 1) * n];
            let trow = &mut self.t[i * n..(i + 1) * n];
            for (c, &nb) in self.nonbasic.iter().enumerate() {
                trow[c] = if nb < n { arow[nb] } else { 0.0 };
            }
            for (q, &(_, j)) in sb.iter().enumerate() {
                let a = arow[j];
                if a == 0.0 {
                    continue;
                }
                for (t, &d) in trow.iter_mut().zip(&dxb[q * n..(q + 1) * n]) {
                    *t += a * d;
                }
                ops += n as u64;
            }
            self.val[var] = (0..n).map(|j| arow[j] * self.val[j]).sum();
            ops += 2 * n as u64;
        }

        for c in 0..n {
            self.d[c] = self.cost[self.nonbasic[c]];
        }
        for i in 0..m {
            let cb = self.cost[self.basic[i]];
            if cb == 0.0 {
                continue;
            }
            for c in 0..n {
                self.d[c] += cb * self.t[i * n + c];
            }
            ops += n as u64;
        }
        self.work += ops;
        Ok(())
    }
}

/// Gauss-Jordan inverse with partial pivoting; `None` if singular.
fn invert(mat: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut a = mat.to_vec();
    let mut inv = vec![0.0; k * k];
    for i in 0..k {
        inv[i * k + i] = 1.0;
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x * k + col].abs().total_cmp(&a[y * k + col].abs()))?;
        if a[piv * k + col].abs() < 1e-12 {
            return None;
        }
        if piv != col {
            for j in 0..k {
                a.swap(piv * k + j, col * k + j);
                inv.swap(piv * k + j, col * k + j);
            }
        }
        let p = a[col * k + col];
        for j in 0..k {
            a[col * k + j] /= p;
            inv[col * k + j] /= p;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = a[r * k + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..k {
                a[r * k + j] -= f * a[col * k + j];
                inv[r * k + j] -= f * inv[col * k + j];
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LpProblem, Relation, Sense};

    const INF: f64 = f64::INFINITY;

    #[test]
    fn max_single_upper_row() {
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(1.0, 0.0, INF);
        p.add_constraint(vec![(x, 1.0)], Relation::Le, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn min_covering_row() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(1.0, 0.0, INF);
        let y = p.add_var(1.0, 0.0, INF);
        p.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Ge, 2.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 2.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
        assert!((s.dual_objective(&p) - 2.0).abs() < 1e-12);
        assert!(s.max_dual_violation(&p) < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(1.0, 0.0, 1.0);
        p.add_constraint(vec![(x, 1.0)], Relation::Ge, 2.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);

        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(1.0, 0.0, INF);
        let y = p.add_var(0.0, 0.0, INF);
        p.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn empty_rows_are_dropped_or_infeasible() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(1.0, 0.0, 1.0);
        p.add_constraint(vec![(x, 0.0)], Relation::Le, 1.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.duals, vec![0.0]);
        p.add_constraint(vec![], Relation::Ge, 1.0);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x - y  s.t. x + y = 4, x - y >= -2, y free, x in [0, 10]
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(1.0, 0.0, 10.0);
        let y = p.add_var(-1.0, f64::NEG_INFINITY, INF);
        p.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Eq, 4.0);
        p.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Ge, -2.0);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-9 && (s.x[1] - 3.0).abs() < 1e-9);
        assert!((s.objective + 2.0).abs() < 1e-9);
        assert!((s.dual_objective(&p) - s.objective).abs() < 1e-9);
        assert!(s.max_dual_violation(&p) < 1e-9);
        assert!(p.max_primal_violation(&s.x) < 1e-9);
    }

    #[test]
    fn upper_bounded_below_unbounded_variable() {
        // max x with x <= 3 only through its bound, starting at the upper end
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(1.0, f64::NEG_INFINITY, 3.0);
        p.add_constraint(vec![(x, 1.0)], Relation::Ge, -5.0);
        let s = solve_lp(&p).unwrap();
        assert!((s.objective - 3.0).abs() < 1e-12);
        assert!((s.reduced_costs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates_under_bland() {
        // classic Beale cycling example
        let mut p = LpProblem::new(Sense::Minimize);
        let v: Vec<usize> = [-0.75, 150.0, -0.02, 6.0].iter().map(|&c| p.add_var(c, 0.0, INF)).collect();
        p.add_constraint(vec![(v[0], 0.25), (v[1], -60.0), (v[2], -0.04), (v[3], 9.0)], Relation::Le, 0.0);
        p.add_constraint(vec![(v[0], 0.5), (v[1], -90.0), (v[2], -0.02), (v[3], 3.0)], Relation::Le, 0.0);
        p.add_constraint(vec![(v[2], 1.0)], Relation::Le, 1.0);
        let opts = SimplexOptions { bland_after: 1, ..Default::default() };
        let s = solve_lp_with(&p, &opts).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 0.05).abs() < 1e-9);
    }

    #[test]
    fn deterministic_pivots() {
        let mut p = LpProblem::new(Sense::Maximize);
        let a = p.add_var(3.0, 0.0, INF);
        let b = p.add_var(2.0, 0.0, INF);
        let c = p.add_var(4.0, 0.0, 2.0);
        p.add_constraint(vec![(a, 1.0), (b, 1.0), (c, 2.0)], Relation::Le, 4.0);
        p.add_constraint(vec![(a, 2.0), (c, 3.0)], Relation::Le, 5.0);
        p.add_constraint(vec![(a, 2.0), (b, 1.0), (c, 3.0)], Relation::Le, 7.0);
        let s1 = solve_lp(&p).unwrap();
        let s2 = solve_lp(&p).unwrap();
        assert_eq!(s1, s2);
        assert!((s1.dual_objective(&p) - s1.objective).abs() < 1e-9);
    }

    #[test]
    fn inverse_of_permutation() {
        let m = [0.0, 1.0, 2.0, 0.0];
        let inv = invert(&m, 2).unwrap();
        assert_eq!(inv, vec![0.0, 0.5, 1.0, 0.0]);
        assert!(invert(&[1.0, 2.0, 2.0, 4.0], 2).is_none());
    }
}
