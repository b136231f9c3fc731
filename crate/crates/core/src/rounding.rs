//! Feasible integer labelings from arbitrary master solutions.

use crate::decomposition::{Decomposition, Subproblem};
use crate::graph::{components_where, induced_cut, EdgeLabeling, Instance, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoundingMethod {
    #[default]
    Threshold,
    Parallel,
    Serial,
}

/// Cuts every edge above one half, then takes the cut of the resulting
/// components.
pub fn round_threshold(inst: &Instance, x: &EdgeLabeling) -> EdgeLabeling {
    let p = components_where(inst, |k| x.values[k] <= 0.5);
    cut_of(inst, &p)
}

/// Edge weights that make the current labeling cheap to keep:
/// `φ(1−x)` on positive edges and `φx` on negative ones.
pub fn kappa(inst: &Instance, x: &EdgeLabeling) -> Vec<f64> {
    inst.edges()
        .iter()
        .zip(&x.values)
        .map(|(e, &v)| if e.is_negative() { e.weight * v } else { e.weight * (1.0 - v) })
        .collect()
}

/// Cut of the minimum-cost 2-partition separating the root of `sub` from its
/// owned negative neighbours under weights `w`. Among minimum cuts the one
/// with the smallest root side is taken: the nodes that can still reach the
/// root in the residual graph of a maximum flow.
fn root_cut(inst: &Instance, sub: &Subproblem, w: &[f64]) -> Vec<bool> {
    let n = inst.node_count();
    let source = n;
    let mut net = FlowNetwork::new(n + 1);
    for &k in inst.positive_edges() {
        let e = inst.edge(k);
        net.add_edge(e.i, e.j, w[k].max(0.0), w[k].max(0.0));
    }
    for &k in &sub.negative {
        net.add_edge(source, inst.edge(k).other(sub.root), (-w[k]).max(0.0), 0.0);
    }
    net.max_flow(source, sub.root);
    let root_side = net.reaching(sub.root);
    inst.edges().iter().map(|e| root_side[e.i] != root_side[e.j]).collect()
}

const FLOW_EPS: f64 = 1e-12;

/// Residual network with paired arcs (`a ^ 1` is the reverse of `a`).
struct FlowNetwork {
    head: Vec<usize>,
    residual: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        FlowNetwork { head: Vec::new(), residual: Vec::new(), adj: vec![Vec::new(); n] }
    }

    fn add_edge(&mut self, u: usize, v: usize, forward: f64, backward: f64) {
        self.adj[u].push(self.head.len());
        self.head.push(v);
        self.residual.push(forward);
        self.adj[v].push(self.head.len());
        self.head.push(u);
        self.residual.push(backward);
    }

    /// Edmonds-Karp.
    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let mut via = vec![usize::MAX; self.adj.len()];
            let mut queue = std::collections::VecDeque::from([s]);
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &a in &self.adj[u] {
                    let v = self.head[a];
                    if !seen[v] && self.residual[a] > FLOW_EPS {
                        seen[v] = true;
                        via[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let a = via[v];
                push = push.min(self.residual[a]);
                v = self.head[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = via[v];
                self.residual[a] -= push;
                self.residual[a ^ 1] += push;
                v = self.head[a ^ 1];
            }
            total += push;
        }
    }

    /// Nodes with a residual path to `t`.
    fn reaching(&self, t: usize) -> Vec<bool> {
        let mut mark = vec![false; self.adj.len()];
        mark[t] = true;
        let mut stack = vec![t];
        while let Some(v) = stack.pop() {
            for &a in &self.adj[v] {
                // `a` leaves v; its reverse enters v from `u`.
                let u = self.head[a];
                if !mark[u] && self.residual[a ^ 1] > FLOW_EPS {
                    mark[u] = true;
                    stack.push(u);
                }
            }
        }
        mark
    }
}

/// Independent per-root cuts combined by maximum on positive edges and by
/// ownership on negative edges, followed by a components pass.
pub fn round_parallel(inst: &Instance, decomp: &Decomposition, x: &EdgeLabeling) -> EdgeLabeling {
    let w = kappa(inst, x);
    let mut plus = vec![false; inst.edge_count()];
    for sub in &decomp.subproblems {
        let cut = root_cut(inst, sub, &w);
        for (k, e) in inst.edges().iter().enumerate() {
            if e.is_negative() {
                if decomp.owner[k] == Some(sub.root) {
                    plus[k] = cut[k];
                }
            } else if cut[k] {
                plus[k] = true;
            }
        }
    }
    let p = components_where(inst, |k| !plus[k]);
    cut_of(inst, &p)
}

/// Roots visited in ascending order; edges cut so far become free for the
/// roots that follow.
pub fn round_serial(inst: &Instance, decomp: &Decomposition, x: &EdgeLabeling) -> EdgeLabeling {
    let mut w = kappa(inst, x);
    let mut plus = vec![false; inst.edge_count()];
    for sub in &decomp.subproblems {
        let cut = root_cut(inst, sub, &w);
        for k in 0..plus.len() {
            plus[k] |= cut[k];
            if plus[k] {
                w[k] = 0.0;
            }
        }
    }
    let p = components_where(inst, |k| !plus[k]);
    cut_of(inst, &p)
}

pub fn round(inst: &Instance, decomp: &Decomposition, x: &EdgeLabeling, method: RoundingMethod) -> EdgeLabeling {
    match method {
        RoundingMethod::Threshold => round_threshold(inst, x),
        RoundingMethod::Parallel => round_parallel(inst, decomp, x),
        RoundingMethod::Serial => round_serial(inst, decomp, x),
    }
}

fn cut_of(inst: &Instance, p: &Partition) -> EdgeLabeling {
    induced_cut(inst, p).expect("partition built over the same instance")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{build_decomposition, decompose, CoverMode};
    use crate::graph::tests::t1;
    use crate::graph::{cc_cost, is_multicut_feasible};
    use std::collections::BTreeSet;

    fn lab(v: &[f64]) -> EdgeLabeling {
        EdgeLabeling::new(v.to_vec())
    }

    #[test]
    fn threshold_examples() {
        let t = t1();
        let r = round_threshold(&t, &lab(&[0.9, 0.1, 0.95]));
        assert_eq!(r.values, vec![1.0, 0.0, 1.0]);
        assert_eq!(cc_cost(&t, &r).unwrap(), 1.0);
        let r = round_threshold(&t, &lab(&[0.0, 0.0, 0.9]));
        assert_eq!(r.values, vec![0.0, 0.0, 0.0]);
        assert_eq!(cc_cost(&t, &r).unwrap(), 2.0);
        let feasible = lab(&[1.0, 0.0, 1.0]);
        assert_eq!(round_threshold(&t, &feasible), feasible);
    }

    #[test]
    fn kappa_signs() {
        let t = t1();
        assert_eq!(kappa(&t, &lab(&[0.25, 1.0, 0.5])), vec![0.75, 0.0, -1.0]);
    }

    #[test]
    fn t1_single_root_rounders_agree() {
        let t = t1();
        let d = decompose(&t, CoverMode::Exact).unwrap();
        let x = lab(&[0.0, 0.0, 1.0]);
        let a = round_parallel(&t, &d, &x);
        let b = round_serial(&t, &d, &x);
        assert_eq!(a, b);
        assert!(is_multicut_feasible(&t, &a).unwrap());
        assert_eq!(cc_cost(&t, &a).unwrap(), 1.0);
        assert_eq!(a.values[2], 1.0);
    }

    #[test]
    fn all_positive_gives_zero() {
        let inst = Instance::new(3, [(0, 1, 1.0), (1, 2, 0.5)]).unwrap();
        let d = decompose(&inst, CoverMode::Exact).unwrap();
        for x in [lab(&[1.0, 1.0]), lab(&[0.3, 0.9])] {
            assert_eq!(round_parallel(&inst, &d, &x).values, vec![0.0, 0.0]);
            assert_eq!(round_serial(&inst, &d, &x).values, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn negative_triangle_all_cut() {
        let tri = Instance::new(3, [(0, 1, -1.0), (1, 2, -1.0), (0, 2, -1.0)]).unwrap();
        let d = build_decomposition(&tri, &BTreeSet::from([0, 1])).unwrap();
        let r = round_serial(&tri, &d, &lab(&[1.0, 1.0, 1.0]));
        assert!(is_multicut_feasible(&tri, &r).unwrap());
        assert_eq!(cc_cost(&tri, &r).unwrap(), 0.0);
    }

    #[test]
    fn ties_keep_root_components() {
        let inst = crate::graph::parse_instance(
            "p cc 5 7\ne 0 3 -0.8\ne 0 4 0.39\ne 1 2 0.91\ne 1 4 -0.65\ne 2 3 0.64\ne 2 4 -0.24\ne 3 4 -0.46\n",
        )
        .unwrap();
        let d = decompose(&inst, CoverMode::Exact).unwrap();
        assert_eq!(d.roots(), vec![0, 4]);
        // Clusters {0,1,2,3} and {4}; node 0 reaches the rest only through a negative edge.
        let x = lab(&[0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let before = cc_cost(&inst, &x).unwrap();
        for out in [round_parallel(&inst, &d, &x), round_serial(&inst, &d, &x)] {
            assert!(is_multicut_feasible(&inst, &out).unwrap());
            assert!(cc_cost(&inst, &out).unwrap() <= before + 1e-12);
            assert_eq!(out.values[1], 1.0);
            assert_eq!(out.values[3], 1.0);
        }
    }

    #[test]
    fn unjustified_cut_is_dropped() {
        // The only negative edge is owned by root 0; cutting (2,3) serves no purpose.
        let inst = Instance::new(4, [(0, 1, -1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let d = decompose(&inst, CoverMode::Exact).unwrap();
        let x = lab(&[1.0, 0.0, 1.0]);
        assert!(is_multicut_feasible(&inst, &x).unwrap());
        for out in [round_parallel(&inst, &d, &x), round_serial(&inst, &d, &x)] {
            assert_eq!(out.values, vec![1.0, 0.0, 0.0]);
        }
    }
}
