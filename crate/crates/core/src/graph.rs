//! Weighted sparse graphs, edge labelings and partitions.
//!
//! Edges are stored once, canonically oriented with `i < j`, in the order they
//! were read. Every other module addresses edges by their index in this list.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Distance from {0,1} under which a value counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Slack allowed on bound and constraint checks.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// Largest node count accepted by [`brute_force_optimal`].
pub const BRUTE_FORCE_MAX_NODES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: node id {node} out of range for {n} nodes")]
    NodeOutOfRange { line: usize, node: usize, n: usize },
    #[error("line {line}: duplicate edge ({i},{j})")]
    DuplicateEdge { line: usize, i: usize, j: usize },
    #[error("line {line}: weight is not finite")]
    NonFiniteWeight { line: usize },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("missing `p cc <n> <m>` header")]
    MissingHeader,
    #[error("labeling has {found} entries, instance has {expected} edges")]
    LengthMismatch { expected: usize, found: usize },
    #[error("labeling is not binary at edge {edge} (value {value})")]
    NotBinary { edge: usize, value: f64 },
    #[error("partition covers {found} nodes, instance has {expected}")]
    PartitionSize { expected: usize, found: usize },
    #[error("instance has {n} nodes; brute force is limited to {max}")]
    TooLarge { n: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

impl Edge {
    pub fn is_negative(&self) -> bool {
        self.weight < 0.0
    }

    /// The endpoint that is not `v`.
    pub fn other(&self, v: usize) -> usize {
        if self.i == v {
            self.j
        } else {
            self.i
        }
    }
}

/// Correlation clustering instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    node_count: usize,
    edges: Vec<Edge>,
    positive: Vec<usize>,
    negative: Vec<usize>,
    incident: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance from `(i, j, weight)` triples. Orientation is
    /// canonicalized; errors report the 1-based position of the offending edge.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self, GraphError> {
        let triples: Vec<_> = edges.into_iter().enumerate().map(|(k, e)| (k + 1, e)).collect();
        Self::from_numbered(node_count, triples)
    }

    fn from_numbered(node_count: usize, triples: Vec<(usize, (usize, usize, f64))>) -> Result<Self, GraphError> {
        let mut seen = HashMap::with_capacity(triples.len());
        let mut edges = Vec::with_capacity(triples.len());
        for (line, (a, b, w)) in triples {
            for node in [a, b] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { line, node, n: node_count });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { line, node: a });
            }
            if !w.is_finite() {
                return Err(GraphError::NonFiniteWeight { line });
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if seen.insert((i, j), edges.len()).is_some() {
                return Err(GraphError::DuplicateEdge { line, i, j });
            }
            edges.push(Edge { i, j, weight: w });
        }
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        let mut incident = vec![Vec::new(); node_count];
        for (k, e) in edges.iter().enumerate() {
            if e.is_negative() {
                negative.push(k);
            } else {
                positive.push(k);
            }
            incident[e.i].push(k);
            incident[e.j].push(k);
        }
        Ok(Instance { node_count, edges, positive, negative, incident })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Edge {
        &self.edges[k]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.edges[k].weight
    }

    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    /// Indices of edges with weight >= 0.
    pub fn positive_edges(&self) -> &[usize] {
        &self.positive
    }

    /// Indices of edges with weight < 0.
    pub fn negative_edges(&self) -> &[usize] {
        &self.negative
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.incident.get(i)?.iter().copied().find(|&k| self.edges[k].i == i && self.edges[k].j == j)
    }

    /// Constant term of the objective once it is written as `Σ φ_e x_e + const`.
    pub fn objective_offset(&self) -> f64 {
        -self.negative.iter().map(|&k| self.edges[k].weight).sum::<f64>()
    }
}

/// Parses the text instance format:
///
/// ```text
/// # comment
/// p cc <n> <m>
/// e <i> <j> <w>      (exactly m times)
/// ```
pub fn parse_instance(text: &str) -> Result<Instance, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut triples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let malformed = |msg: &str| GraphError::Malformed { line, msg: msg.to_string() };
        match fields[0] {
            "p" => {
                if header.is_some() {
                    return Err(malformed("second header line"));
                }
                if fields.len() != 4 || fields[1] != "cc" {
                    return Err(malformed("expected `p cc <n> <m>`"));
                }
                let n = fields[2].parse().map_err(|_| malformed("bad node count"))?;
                let m = fields[3].parse().map_err(|_| malformed("bad edge count"))?;
                header = Some((n, m));
            }
            "e" => {
                if header.is_none() {
                    return Err(malformed("edge line before header"));
                }
                if fields.len() != 4 {
                    return Err(malformed("expected `e <i> <j> <w>`"));
                }
                let i = fields[1].parse().map_err(|_| malformed("bad node id"))?;
                let j = fields[2].parse().map_err(|_| malformed("bad node id"))?;
                let w: f64 = fields[3].parse().map_err(|_| malformed("bad weight"))?;
                triples.push((line, (i, j, w)));
            }
            other => return Err(malformed(&format!("unknown line type `{other}`"))),
        }
    }
    let (n, m) = header.ok_or(GraphError::MissingHeader)?;
    if triples.len() != m {
        return Err(GraphError::EdgeCount { expected: m, found: triples.len() });
    }
    Instance::from_numbered(n, triples)
}

/// Serializes an instance; `parse_instance(&write_instance(g))` reproduces `g`.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = format!("p cc {} {}\n", inst.node_count(), inst.edge_count());
    for e in inst.edges() {
        out.push_str(&format!("e {} {} {}\n", e.i, e.j, e.weight));
    }
    out
}

/// Per-edge cut values, parallel to `Instance::edges`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLabeling {
    pub values: Vec<f64>,
}

impl EdgeLabeling {
    pub fn new(values: Vec<f64>) -> Self {
        EdgeLabeling { values }
    }

    pub fn zeros(m: usize) -> Self {
        EdgeLabeling { values: vec![0.0; m] }
    }

    pub fn ones(m: usize) -> Self {
        EdgeLabeling { values: vec![1.0; m] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| is_integral(v))
    }

    /// Copy with every value snapped to the nearest of {0, 1}.
    pub fn snapped(&self) -> Self {
        EdgeLabeling { values: self.values.iter().map(|&v| if v >= 0.5 { 1.0 } else { 0.0 }).collect() }
    }

    pub fn is_cut(&self, k: usize) -> bool {
        self.values[k] >= 0.5
    }

    fn check_len(&self, inst: &Instance) -> Result<(), GraphError> {
        if self.values.len() != inst.edge_count() {
            return Err(GraphError::LengthMismatch { expected: inst.edge_count(), found: self.values.len() });
        }
        Ok(())
    }

    fn check_binary(&self, inst: &Instance) -> Result<(), GraphError> {
        self.check_len(inst)?;
        for (edge, &value) in self.values.iter().enumerate() {
            if !is_integral(value) {
                return Err(GraphError::NotBinary { edge, value });
            }
        }
        Ok(())
    }
}

pub fn is_integral(v: f64) -> bool {
    v.abs() <= INTEGRALITY_TOL || (v - 1.0).abs() <= INTEGRALITY_TOL
}

/// Node → component id, ids contiguous from 0 and numbered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    pub component_id: Vec<usize>,
}

impl Partition {
    /// Relabels arbitrary block labels into canonical first-occurrence order.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = HashMap::new();
        let component_id = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Partition { component_id }
    }

    pub fn single(n: usize) -> Self {
        Partition { component_id: vec![0; n] }
    }

    pub fn singletons(n: usize) -> Self {
        Partition { component_id: (0..n).collect() }
    }

    pub fn component_count(&self) -> usize {
        self.component_id.iter().max().map_or(0, |m| m + 1)
    }

    /// Blocks are intersections of blocks of `self` and `other`.
    pub fn refine(&self, other: &Partition) -> Partition {
        let pairs: Vec<(usize, usize)> =
            self.component_id.iter().zip(&other.component_id).map(|(&a, &b)| (a, b)).collect();
        let mut map = HashMap::new();
        let component_id = pairs
            .iter()
            .map(|p| {
                let next = map.len();
                *map.entry(*p).or_insert(next)
            })
            .collect();
        Partition { component_id }
    }
}

/// Correlation clustering cost `Σ_{E⁻} −φ(1−x) + Σ_{E⁺} φ x`.
pub fn cc_cost(inst: &Instance, x: &EdgeLabeling) -> Result<f64, GraphError> {
    x.check_len(inst)?;
    Ok(cost_unchecked(inst, &x.values))
}

pub(crate) fn cost_unchecked(inst: &Instance, x: &[f64]) -> f64 {
    inst.edges().iter().zip(x).map(|(e, &v)| if e.is_negative() { -e.weight * (1.0 - v) } else { e.weight * v }).sum()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller id as representative
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).map(|v| self.find(v)).collect();
        Partition::from_labels(&roots)
    }
}

/// Connected components of the subgraph of uncut edges.
pub fn components_of(inst: &Instance, x: &EdgeLabeling) -> Result<Partition, GraphError> {
    x.check_binary(inst)?;
    Ok(components_where(inst, |k| !x.is_cut(k)))
}

/// Components over the edges selected by `joined`.
pub(crate) fn components_where(inst: &Instance, mut joined: impl FnMut(usize) -> bool) -> Partition {
    let mut uf = UnionFind::new(inst.node_count());
    for (k, e) in inst.edges().iter().enumerate() {
        if joined(k) {
            uf.union(e.i, e.j);
        }
    }
    uf.into_partition()
}

/// Cut of a partition: an edge is cut iff its endpoints lie in different blocks.
pub fn induced_cut(inst: &Instance, p: &Partition) -> Result<EdgeLabeling, GraphError> {
    if p.component_id.len() != inst.node_count() {
        return Err(GraphError::PartitionSize { expected: inst.node_count(), found: p.component_id.len() });
    }
    Ok(EdgeLabeling {
        values: inst
            .edges()
            .iter()
            .map(|e| if p.component_id[e.i] != p.component_id[e.j] { 1.0 } else { 0.0 })
            .collect(),
    })
}

pub fn is_multicut_feasible(inst: &Instance, x: &EdgeLabeling) -> Result<bool, GraphError> {
    let p = components_of(inst, x)?;
    Ok(inst.edges().iter().enumerate().all(|(k, e)| x.is_cut(k) == (p.component_id[e.i] != p.component_id[e.j])))
}

/// Repairs a binary labeling that satisfies every cycle inequality with one
/// negative edge into a multicut-feasible one of no greater cost: components
/// are taken over uncut positive edges only.
pub(crate) fn repair_by_positive_components(inst: &Instance, x: &EdgeLabeling) -> EdgeLabeling {
    let p = components_where(inst, |k| !inst.edge(k).is_negative() && !x.is_cut(k));
    induced_cut(inst, &p).expect("partition built over the same instance")
}

/// Exhaustive minimum over all set partitions of the nodes (restricted growth
/// strings, visited in lexicographic order so the first minimizer wins ties).
pub fn brute_force_optimal(inst: &Instance) -> Result<(f64, Partition), GraphError> {
    let n = inst.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(GraphError::TooLarge { n, max: BRUTE_FORCE_MAX_NODES });
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_partition(n, |labels| {
        let cost: f64 = inst
            .edges()
            .iter()
            .map(|e| {
                let cut = labels[e.i] != labels[e.j];
                match (e.is_negative(), cut) {
                    (true, false) => -e.weight,
                    (false, true) => e.weight,
                    _ => 0.0,
                }
            })
            .sum();
        if best.as_ref().map_or(true, |(b, _)| cost < *b - 1e-12) {
            best = Some((cost, labels.to_vec()));
        }
    });
    let (cost, labels) = best.unwrap_or((0.0, Vec::new()));
    Ok((cost, Partition { component_id: labels }))
}

/// Calls `f` with every set partition of `0..n` as a restricted growth string.
pub fn for_each_partition(n: usize, mut f: impl FnMut(&[usize])) {
    if n == 0 {
        f(&[]);
        return;
    }
    let mut labels = vec![0usize; n];
    // max label used among labels[..i]
    let mut prefix_max = vec![0usize; n];
    loop {
        f(&labels);
        // find rightmost position that can be incremented
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            if labels[i] <= prefix_max[i - 1] {
                break;
            }
            i -= 1;
        }
        labels[i] += 1;
        prefix_max[i] = prefix_max[i - 1].max(labels[i]);
        for k in i + 1..n {
            labels[k] = 0;
            prefix_max[k] = prefix_max[k - 1];
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.component_count();
        let blocks: Vec<String> = (0..k)
            .map(|c| {
                let members: Vec<String> = self
                    .component_id
                    .iter()
                    .enumerate()
                    .filter(|(_, &id)| id == c)
                    .map(|(v, _)| v.to_string())
                    .collect();
                format!("{{{}}}", members.join(","))
            })
            .collect();
        write!(f, "{}", blocks.join(" "))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn t1() -> Instance {
        parse_instance("p cc 3 3\ne 0 1 1.0\ne 1 2 1.0\ne 0 2 -2.0").unwrap()
    }

    fn lab(v: &[f64]) -> EdgeLabeling {
        EdgeLabeling::new(v.to_vec())
    }

    #[test]
    fn parse_triangle() {
        let g = t1();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.positive_edges(), &[0, 1]);
        assert_eq!(g.negative_edges(), &[2]);
        assert_eq!(g.edge(2).i, 0);
        assert_eq!(g.edge(2).j, 2);
    }

    #[test]
    fn parse_single_negative_and_comments() {
        let g = parse_instance("# hello\np cc 2 1\n\ne 1 0 -3.0\n").unwrap();
        assert_eq!(g.negative_edges(), &[0]);
        assert_eq!((g.edge(0).i, g.edge(0).j), (0, 1));
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert_eq!(
            parse_instance("p cc 2 2\ne 0 1 1\ne 1 0 2"),
            Err(GraphError::DuplicateEdge { line: 3, i: 0, j: 1 })
        );
        assert_eq!(parse_instance("p cc 2 1\ne 0 2 1"), Err(GraphError::NodeOutOfRange { line: 2, node: 2, n: 2 }));
        assert_eq!(parse_instance("p cc 2 1\ne 1 1 1"), Err(GraphError::SelfLoop { line: 2, node: 1 }));
        assert_eq!(parse_instance("p cc 2 1\ne 0 1 inf"), Err(GraphError::NonFiniteWeight { line: 2 }));
        assert_eq!(parse_instance("p cc 2 1\ne 0 1 NaN"), Err(GraphError::NonFiniteWeight { line: 2 }));
        assert!(matches!(parse_instance("p cc 2 1\ne 0 x 1"), Err(GraphError::Malformed { line: 2, .. })));
        assert!(matches!(parse_instance("p cc 2 1\nq"), Err(GraphError::Malformed { line: 2, .. })));
        assert_eq!(
            parse_instance("e 0 1 1"),
            Err(GraphError::Malformed { line: 1, msg: "edge line before header".into() })
        );
        assert_eq!(parse_instance(""), Err(GraphError::MissingHeader));
        assert_eq!(parse_instance("p cc 3 2\ne 0 1 1"), Err(GraphError::EdgeCount { expected: 2, found: 1 }));
    }

    #[test]
    fn write_then_parse() {
        let g = Instance::new(4, vec![(0, 1, 0.1 + 0.2), (3, 2, -1e-17), (1, 3, 0.0)]).unwrap();
        assert_eq!(parse_instance(&write_instance(&g)).unwrap(), g);
        // zero weights are positive
        assert_eq!(g.positive_edges(), &[0, 2]);
    }

    #[test]
    fn cost_examples() {
        let g = t1();
        assert_eq!(cc_cost(&g, &lab(&[0.0, 0.0, 0.0])).unwrap(), 2.0);
        assert_eq!(cc_cost(&g, &lab(&[1.0, 0.0, 1.0])).unwrap(), 1.0);
        let pos = Instance::new(3, vec![(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(cc_cost(&pos, &EdgeLabeling::zeros(2)).unwrap(), 0.0);
        assert!(matches!(cc_cost(&g, &lab(&[0.0])), Err(GraphError::LengthMismatch { .. })));
    }

    #[test]
    fn feasibility_examples() {
        let g = t1();
        assert!(!is_multicut_feasible(&g, &lab(&[0.0, 0.0, 1.0])).unwrap());
        assert!(is_multicut_feasible(&g, &lab(&[1.0, 0.0, 1.0])).unwrap());
        let tree = Instance::new(4, vec![(0, 1, 1.0), (1, 2, -1.0), (1, 3, 2.0)]).unwrap();
        assert!(is_multicut_feasible(&tree, &EdgeLabeling::ones(3)).unwrap());
        assert!(matches!(is_multicut_feasible(&g, &lab(&[0.5, 0.0, 1.0])), Err(GraphError::NotBinary { edge: 0, .. })));
    }

    #[test]
    fn components_and_induced_cut() {
        let g = t1();
        let p = components_of(&g, &lab(&[1.0, 0.0, 1.0])).unwrap();
        assert_eq!(p.component_id, vec![0, 1, 1]);
        assert_eq!(induced_cut(&g, &Partition::single(3)).unwrap().values, vec![0.0, 0.0, 0.0]);
        assert_eq!(induced_cut(&g, &p).unwrap().values, vec![1.0, 0.0, 1.0]);
        assert_eq!(induced_cut(&g, &Partition::singletons(3)).unwrap().values, vec![1.0, 1.0, 1.0]);
        assert!(matches!(components_of(&g, &lab(&[0.3, 0.0, 1.0])), Err(GraphError::NotBinary { .. })));
    }

    #[test]
    fn disconnected_graph_components() {
        let g = Instance::new(5, vec![(0, 1, 1.0), (3, 4, -1.0)]).unwrap();
        let p = components_of(&g, &lab(&[0.0, 1.0])).unwrap();
        assert_eq!(p.component_id, vec![0, 0, 1, 2, 3]);
    }

    #[test]
    fn partition_enumeration_counts_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203, 877];
        for (n, &b) in bell.iter().enumerate() {
            let mut count = 0;
            for_each_partition(n, |_| count += 1);
            assert_eq!(count, b, "n = {n}");
        }
    }

    #[test]
    fn brute_force_examples() {
        let (c, p) = brute_force_optimal(&t1()).unwrap();
        assert_eq!(c, 1.0);
        assert_eq!(cc_cost(&t1(), &induced_cut(&t1(), &p).unwrap()).unwrap(), 1.0);
        let single = parse_instance("p cc 2 1\ne 0 1 -3.0").unwrap();
        let (c, p) = brute_force_optimal(&single).unwrap();
        assert_eq!(c, 0.0);
        assert_eq!(p.component_id, vec![0, 1]);
        let pos = Instance::new(3, vec![(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let (c, p) = brute_force_optimal(&pos).unwrap();
        assert_eq!(c, 0.0);
        assert_eq!(p.component_count(), 1);
        let big = Instance::new(13, Vec::new()).unwrap();
        assert!(matches!(brute_force_optimal(&big), Err(GraphError::TooLarge { .. })));
    }

    #[test]
    fn all_ones_cost_is_positive_weight_sum() {
        let g = Instance::new(4, vec![(0, 1, 1.5), (1, 2, -1.0), (2, 3, 0.25), (0, 3, -0.5)]).unwrap();
        assert!(is_multicut_feasible(&g, &EdgeLabeling::ones(4)).unwrap());
        assert_eq!(cc_cost(&g, &EdgeLabeling::ones(4)).unwrap(), 1.75);
    }

    #[test]
    fn refinement_blocks() {
        let a = Partition::from_labels(&[0, 0, 1, 1]);
        let b = Partition::from_labels(&[0, 1, 1, 1]);
        assert_eq!(a.refine(&b).component_id, vec![0, 1, 2, 2]);
        assert_eq!(a.to_string(), "{0,1} {2,3}");
    }
}
