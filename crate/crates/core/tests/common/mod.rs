//! Oracles shared by the integration tests. None of them call the solver
//! paths they are used to check.

#![allow(dead_code)]

use ccbend::decomposition::Subproblem;
use ccbend::generate::random_instance;
use ccbend::graph::Instance;
use ccbend::lp::{solve_lp, LpProblem, LpStatus, Relation, Sense};

/// The seeded random suite: n cycles through 4..=8, edge probability 0.6.
pub fn suite_instance(seed: u64) -> Instance {
    random_instance(4 + (seed % 5) as usize, 0.6, seed).expect("valid generator parameters")
}

pub fn suite(count: u64) -> Vec<Instance> {
    (0..count).map(suite_instance).collect()
}

pub fn cost(inst: &Instance, x: &[f64]) -> f64 {
    inst.edges().iter().zip(x).map(|(e, &v)| if e.weight >= 0.0 { e.weight * v } else { e.weight * (v - 1.0) }).sum()
}

/// Calls `f` once per set partition of `0..n`, given as restricted growth
/// labels.
pub fn for_each_labeling(n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(labels: &mut Vec<usize>, n: usize, max: usize, f: &mut dyn FnMut(&[usize])) {
        if labels.len() == n {
            f(labels);
            return;
        }
        for c in 0..=max + 1 {
            labels.push(c);
            rec(labels, n, max.max(c), f);
            labels.pop();
        }
    }
    if n == 0 {
        f(&[]);
        return;
    }
    let mut labels = vec![0];
    rec(&mut labels, n, 0, &mut f);
}

pub fn cut_of(inst: &Instance, labels: &[usize]) -> Vec<f64> {
    inst.edges().iter().map(|e| if labels[e.i] != labels[e.j] { 1.0 } else { 0.0 }).collect()
}

pub fn exhaustive_optimum(inst: &Instance) -> f64 {
    let mut best = f64::INFINITY;
    for_each_labeling(inst.node_count(), |l| best = best.min(cost(inst, &cut_of(inst, l))));
    best
}

/// Binary, and no cut edge has its endpoints joined by uncut edges.
pub fn is_feasible_cut(inst: &Instance, x: &[f64]) -> bool {
    if x.len() != inst.edge_count() || x.iter().any(|&v| v != 0.0 && v != 1.0) {
        return false;
    }
    let n = inst.node_count();
    let mut comp = vec![usize::MAX; n];
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = start;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for (k, e) in inst.edges().iter().enumerate() {
                if x[k] == 0.0 && (e.i == u || e.j == u) {
                    let v = if e.i == u { e.j } else { e.i };
                    if comp[v] == usize::MAX {
                        comp[v] = start;
                        stack.push(v);
                    }
                }
            }
        }
    }
    inst.edges().iter().zip(x).all(|(e, &v)| v == 0.0 || comp[e.i] != comp[e.j])
}

/// Repair cost of a subproblem at `x`, from the primal LP over node labels
/// `m` and repair amounts `f`.
pub fn primal_repair_cost(inst: &Instance, sub: &Subproblem, x: &[f64]) -> f64 {
    let s = sub.root;
    let n = inst.node_count();
    let mut p = LpProblem::new(Sense::Minimize);
    let m: Vec<Option<usize>> = (0..n).map(|v| (v != s).then(|| p.add_var(0.0, 0.0, f64::INFINITY))).collect();
    for &k in inst.positive_edges() {
        let e = inst.edge(k);
        let f = p.add_var(e.weight, 0.0, f64::INFINITY);
        match (m[e.i], m[e.j]) {
            (Some(a), Some(b)) => {
                p.add_constraint(vec![(a, 1.0), (b, -1.0), (f, -1.0)], Relation::Le, x[k]);
                p.add_constraint(vec![(b, 1.0), (a, -1.0), (f, -1.0)], Relation::Le, x[k]);
            }
            (Some(a), None) | (None, Some(a)) => {
                p.add_constraint(vec![(a, 1.0), (f, -1.0)], Relation::Le, x[k]);
            }
            (None, None) => unreachable!("no self loops"),
        }
    }
    for &k in &sub.negative {
        let e = inst.edge(k);
        let f = p.add_var(-e.weight, 0.0, f64::INFINITY);
        let v = m[e.other(s)].expect("neighbour of the root");
        p.add_constraint(vec![(v, 1.0), (f, 1.0)], Relation::Ge, x[k]);
    }
    let sol = solve_lp(&p).expect("well-formed LP");
    assert_eq!(sol.status, LpStatus::Optimal);
    sol.objective
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
