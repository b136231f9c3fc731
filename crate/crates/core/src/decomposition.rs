//! Vertex cover of the negative edges and the per-root subproblem layout.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::Instance;
use crate::lp::{solve_binary_milp, LpError, LpProblem, MilpStatus, Relation, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverMode {
    #[default]
    Exact,
    Greedy,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompositionError {
    #[error("negative edge ({i},{j}) has no endpoint in the cover")]
    Uncovered { i: usize, j: usize },
    #[error("cover node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("vertex cover ILP stopped early: {0:?}")]
    CoverIlp(MilpStatus),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// One Benders subproblem: a root and the negative edges it is responsible for.
#[derive(Debug, Clone, PartialEq)]
pub struct Subproblem {
    pub root: usize,
    /// Owned negative edges (indices into the instance edge list), ascending.
    pub negative: Vec<usize>,
    /// Positive edges incident to the root, ascending.
    pub positive: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Sorted by root id.
    pub subproblems: Vec<Subproblem>,
    /// Owner root per edge; `None` for positive edges.
    pub owner: Vec<Option<usize>>,
}

impl Decomposition {
    pub fn roots(&self) -> Vec<usize> {
        self.subproblems.iter().map(|s| s.root).collect()
    }

    pub fn len(&self) -> usize {
        self.subproblems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subproblems.is_empty()
    }

    pub fn subproblem(&self, root: usize) -> Option<&Subproblem> {
        self.subproblems.iter().find(|s| s.root == root)
    }
}

/// Vertex cover of the graph formed by the negative edges.
///
/// Exact mode minimizes cardinality; among minimum covers it prefers the one
/// with lowest ids, via tiny id-dependent perturbations of the unit costs.
pub fn min_vertex_cover(inst: &Instance, mode: CoverMode) -> Result<BTreeSet<usize>, DecompositionError> {
    let neg = inst.negative_edges();
    if neg.is_empty() {
        return Ok(BTreeSet::new());
    }
    match mode {
        CoverMode::Greedy => Ok(greedy_cover(inst)),
        CoverMode::Exact => exact_cover(inst),
    }
}

fn greedy_cover(inst: &Instance) -> BTreeSet<usize> {
    let n = inst.node_count();
    let mut covered = vec![false; inst.edge_count()];
    let mut remaining = inst.negative_edges().len();
    let mut cover = BTreeSet::new();
    while remaining > 0 {
        let mut best = (0usize, 0usize);
        for v in 0..n {
            let gain = inst.incident(v).iter().filter(|&&k| inst.edge(k).is_negative() && !covered[k]).count();
            if gain > best.1 {
                best = (v, gain);
            }
        }
        let v = best.0;
        cover.insert(v);
        for &k in inst.incident(v) {
            if inst.edge(k).is_negative() && !covered[k] {
                covered[k] = true;
                remaining -= 1;
            }
        }
    }
    cover
}

fn exact_cover(inst: &Instance) -> Result<BTreeSet<usize>, DecompositionError> {
    let n = inst.node_count();
    // only nodes touching a negative edge matter
    let mut touched: Vec<usize> =
        inst.negative_edges().iter().flat_map(|&k| [inst.edge(k).i, inst.edge(k).j]).collect();
    touched.sort_unstable();
    touched.dedup();
    let var_of = |v: usize| touched.binary_search(&v).expect("touched node");

    let scale = ((n + 1) * (n + 1)) as f64;
    let mut p = LpProblem::new(Sense::Minimize);
    for &v in &touched {
        p.add_binary_var(1.0 + (v + 1) as f64 / scale);
    }
    for &k in inst.negative_edges() {
        let e = inst.edge(k);
        p.add_constraint(vec![(var_of(e.i), 1.0), (var_of(e.j), 1.0)], Relation::Ge, 1.0);
    }
    let r = solve_binary_milp(&p)?;
    if r.status != MilpStatus::Optimal {
        return Err(DecompositionError::CoverIlp(r.status));
    }
    Ok(touched.iter().zip(&r.values).filter(|(_, &y)| y > 0.5).map(|(&v, _)| v).collect())
}

/// Assigns each negative edge to its lowest-id endpoint in `cover` and drops
/// roots that own nothing.
pub fn build_decomposition(inst: &Instance, cover: &BTreeSet<usize>) -> Result<Decomposition, DecompositionError> {
    if let Some(&v) = cover.iter().find(|&&v| v >= inst.node_count()) {
        return Err(DecompositionError::NodeOutOfRange(v));
    }
    let mut owner = vec![None; inst.edge_count()];
    for &k in inst.negative_edges() {
        let e = inst.edge(k);
        let root = if cover.contains(&e.i) {
            e.i
        } else if cover.contains(&e.j) {
            e.j
        } else {
            return Err(DecompositionError::Uncovered { i: e.i, j: e.j });
        };
        owner[k] = Some(root);
    }
    let mut subproblems = Vec::new();
    for &root in cover {
        let negative: Vec<usize> = inst.incident(root).iter().copied().filter(|&k| owner[k] == Some(root)).collect();
        if negative.is_empty() {
            continue;
        }
        let mut negative = negative;
        negative.sort_unstable();
        let mut positive: Vec<usize> =
            inst.incident(root).iter().copied().filter(|&k| !inst.edge(k).is_negative()).collect();
        positive.sort_unstable();
        subproblems.push(Subproblem { root, negative, positive });
    }
    Ok(Decomposition { subproblems, owner })
}

/// Cover plus assignment in one step.
pub fn decompose(inst: &Instance, mode: CoverMode) -> Result<Decomposition, DecompositionError> {
    let cover = min_vertex_cover(inst, mode)?;
    build_decomposition(inst, &cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::t1;

    fn negative_triangle() -> Instance {
        Instance::new(3, [(0, 1, -1.0), (1, 2, -1.0), (0, 2, -1.0)]).unwrap()
    }

    #[test]
    fn covers_of_examples() {
        let t = t1();
        assert_eq!(min_vertex_cover(&t, CoverMode::Exact).unwrap(), BTreeSet::from([0]));
        assert_eq!(min_vertex_cover(&t, CoverMode::Greedy).unwrap(), BTreeSet::from([0]));
        let star = Instance::new(6, (0..6).filter(|&v| v != 4).map(|v| (v, 4, -1.0))).unwrap();
        assert_eq!(min_vertex_cover(&star, CoverMode::Exact).unwrap(), BTreeSet::from([4]));
        assert_eq!(min_vertex_cover(&star, CoverMode::Greedy).unwrap(), BTreeSet::from([4]));
        assert_eq!(min_vertex_cover(&negative_triangle(), CoverMode::Exact).unwrap(), BTreeSet::from([0, 1]));
    }

    #[test]
    fn t1_decomposition() {
        let t = t1();
        let d = build_decomposition(&t, &BTreeSet::from([0])).unwrap();
        assert_eq!(d.roots(), vec![0]);
        assert_eq!(d.subproblems[0].negative, vec![2]);
        assert_eq!(d.subproblems[0].positive, vec![0]);
    }

    #[test]
    fn triangle_ownership_and_dropped_roots() {
        let tri = negative_triangle();
        let d = build_decomposition(&tri, &BTreeSet::from([0, 1])).unwrap();
        assert_eq!(d.owner, vec![Some(0), Some(1), Some(0)]);
        let extra = Instance::new(4, [(0, 1, -1.0)]).unwrap();
        let d = build_decomposition(&extra, &BTreeSet::from([0, 3])).unwrap();
        assert_eq!(d.roots(), vec![0]);
    }

    #[test]
    fn uncovered_edge_is_rejected() {
        let t = t1();
        assert_eq!(build_decomposition(&t, &BTreeSet::from([1])), Err(DecompositionError::Uncovered { i: 0, j: 2 }));
    }

    #[test]
    fn empty_negative_set() {
        let inst = Instance::new(3, [(0, 1, 1.0)]).unwrap();
        assert!(min_vertex_cover(&inst, CoverMode::Exact).unwrap().is_empty());
        assert!(decompose(&inst, CoverMode::Greedy).unwrap().is_empty());
    }
}
