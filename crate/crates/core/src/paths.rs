use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::graph::Instance;

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) struct ShortestPaths {
    pub dist: Vec<f64>,
    /// Edge used to reach each node, `None` for the source and unreachable nodes.
    pub pred: Vec<Option<usize>>,
    /// Edge relaxations performed.
    pub work: u64,
}

impl ShortestPaths {
    /// Edge indices of the path from the source to `target`, source side first.
    pub fn path_to(&self, inst: &Instance, target: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut v = target;
        while let Some(k) = self.pred[v] {
            path.push(k);
            v = inst.edge(k).other(v);
        }
        path.reverse();
        path
    }
}

/// Dijkstra from `source` over nonnegative-weight edges only, with lengths
/// `x` clamped to be nonnegative.
pub(crate) fn positive_shortest_paths(inst: &Instance, source: usize, x: &[f64]) -> ShortestPaths {
    let n = inst.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut work = 0u64;
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry { dist: 0.0, node: source });
    while let Some(Entry { dist: d, node: v }) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &k in inst.incident(v) {
            let e = inst.edge(k);
            if e.is_negative() {
                continue;
            }
            work += 1;
            let u = e.other(v);
            let nd = d + x[k].max(0.0);
            if nd < dist[u] {
                dist[u] = nd;
                pred[u] = Some(k);
                heap.push(Entry { dist: nd, node: u });
            }
        }
    }
    ShortestPaths { dist, pred, work }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::t1;

    #[test]
    fn skips_negative_edges() {
        let t = t1();
        let sp = positive_shortest_paths(&t, 0, &[0.25, 0.5, 0.0]);
        assert_eq!(sp.dist, vec![0.0, 0.25, 0.75]);
        assert_eq!(sp.path_to(&t, 2), vec![0, 1]);
    }
}
