//! Directed network, per-edge weights and per-node costs.
//!
//! Nodes are dense ids `0..n`; edges carry stable ids `0..m` in insertion
//! order. Loading from an edge list re-indexes the original integer labels
//! in ascending numeric order and keeps the labels for output.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use rand::Rng;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    out_adjacency: Vec<Vec<(EdgeId, NodeId)>>,
    labels: Vec<u64>,
}

impl DirectedGraph {
    /// Builds a graph over nodes `0..node_count`, labelled by their own ids.
    pub fn from_edges(node_count: usize, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        let labels = (0..node_count as u64).collect();
        Self::with_labels(labels, edges)
    }

    fn with_labels(labels: Vec<u64>, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        let node_count = labels.len();
        if node_count == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut out_adjacency = vec![Vec::new(); node_count];
        for (id, &(u, v)) in edges.iter().enumerate() {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on node {}", labels[u])));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge {} -> {}",
                    labels[u], labels[v]
                )));
            }
            out_adjacency[u].push((id, v));
        }
        Ok(Self {
            node_count,
            edges,
            out_adjacency,
            labels,
        })
    }

    /// Parses a SNAP-style edge list: `#` comments, one `u v` pair per line.
    pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Self> {
        let mut raw = Vec::new();
        for (index, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = index + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let mut next = |name: &str| -> Result<u64> {
                let field = fields.next().ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!("missing {name} node"),
                })?;
                field.parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid {name} node {field:?}"),
                })
            };
            let u = next("source")?;
            let v = next("target")?;
            if fields.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected exactly two fields".into(),
                });
            }
            raw.push((u, v));
        }
        let labels: Vec<u64> = raw
            .iter()
            .flat_map(|&(u, v)| [u, v])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index_of = |label: u64| labels.binary_search(&label).expect("label collected above");
        let edges = raw
            .iter()
            .map(|&(u, v)| (index_of(u), index_of(v)))
            .collect();
        Self::with_labels(labels, edges)
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        Self::load_edge_list(text.as_bytes())
    }

    /// Edge-list text using the original labels, in edge-id order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{} {}", self.labels[u], self.labels[v]);
        }
        out
    }

    /// Complete digraph on `n` nodes (both directions between every pair).
    pub fn complete(n: usize) -> Result<Self> {
        let edges = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        Self::from_edges(n, edges)
    }

    /// Directed path `0 -> 1 -> ... -> n-1`.
    pub fn path(n: usize) -> Result<Self> {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v)).collect())
    }

    /// Star with node 0 pointing at each of the `leaves`.
    pub fn star(leaves: usize) -> Result<Self> {
        Self::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v)).collect())
    }

    /// Each ordered pair `(u, v)`, `u != v`, is an edge independently with probability `density`.
    pub fn random<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::InvalidValue(format!("edge density {density} not in [0, 1]")));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(density) {
                    edges.push((u, v));
                }
            }
        }
        Self::from_edges(n, edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (NodeId, NodeId) {
        self.edges[id]
    }

    /// Outgoing `(edge id, target)` pairs of `node`.
    pub fn out_edges(&self, node: NodeId) -> &[(EdgeId, NodeId)] {
        &self.out_adjacency[node]
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.out_adjacency[node].len()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.out_adjacency.iter().map(Vec::len).collect()
    }

    pub fn label(&self, node: NodeId) -> u64 {
        self.labels[node]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        if node < self.node_count {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node,
                node_count: self.node_count,
            })
        }
    }

    /// True when every node is connected to every other ignoring edge direction.
    pub fn is_weakly_connected(&self) -> bool {
        let mut undirected = vec![Vec::new(); self.node_count];
        for &(u, v) in &self.edges {
            undirected[u].push(v);
            undirected[v].push(u);
        }
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &undirected[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.node_count
    }
}

/// Per-edge influence probabilities, indexed by edge id.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::InvalidValue(format!("edge weight {bad} not in [0, 1]")));
        }
        Ok(Self(values))
    }

    pub fn for_graph(graph: &DirectedGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.edge_count() {
            return Err(Error::LengthMismatch {
                what: "weight vector",
                expected: graph.edge_count(),
                actual: values.len(),
            });
        }
        Self::new(values)
    }

    pub fn constant(edge_count: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; edge_count])
    }

    /// Independent `U(0, hi)` draws, one per edge.
    pub fn uniform<R: Rng + ?Sized>(edge_count: usize, hi: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&hi) {
            return Err(Error::InvalidValue(format!("weight upper bound {hi} not in [0, 1]")));
        }
        Self::new((0..edge_count).map(|_| rng.gen::<f64>() * hi).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, edge: EdgeId) -> f64 {
        self.0[edge]
    }
}

/// Per-node costs plus the fixed per-round cost `c0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostVector {
    nodes: Vec<f64>,
    fixed: f64,
}

impl CostVector {
    pub fn new(nodes: Vec<f64>, fixed: f64) -> Result<Self> {
        if let Some(bad) = nodes.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::InvalidValue(format!("node cost {bad} not in [0, 1]")));
        }
        if !(fixed > 0.0 && fixed <= 1.0) {
            return Err(Error::InvalidValue(format!("fixed cost {fixed} not in (0, 1]")));
        }
        Ok(Self { nodes, fixed })
    }

    /// Cost estimates may legitimately drive the fixed cost to zero (lower
    /// confidence bounds), so this skips the `c0 > 0` check.
    pub(crate) fn estimate(nodes: Vec<f64>, fixed: f64) -> Self {
        debug_assert!(nodes.iter().all(|c| (0.0..=1.0).contains(c)));
        debug_assert!((0.0..=1.0).contains(&fixed));
        Self { nodes, fixed }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, node: NodeId) -> f64 {
        self.nodes[node]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn fixed(&self) -> f64 {
        self.fixed
    }

    /// `c(S) + c0`.
    pub fn total(&self, set: &[NodeId]) -> f64 {
        set.iter().map(|&i| self.nodes[i]).sum::<f64>() + self.fixed
    }
}

/// `c_i = d_i / max_j d_j`, with fixed cost `c0`.
pub fn degree_proportional_costs(graph: &DirectedGraph, c0: f64) -> Result<CostVector> {
    let degrees = graph.out_degrees();
    let max = degrees.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return Err(Error::InvalidGraph(
            "degree-proportional costs need at least one edge".into(),
        ));
    }
    CostVector::new(
        degrees.iter().map(|&d| d as f64 / max as f64).collect(),
        c0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn loads_small_path() {
        let g = DirectedGraph::parse_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.out_degrees(), vec![1, 1, 0]);
    }

    #[test]
    fn reindexes_labels_densely() {
        let g = DirectedGraph::parse_edge_list("# c\n5 7\n7 5").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.out_degrees(), vec![1, 1]);
        assert_eq!(g.labels(), &[5, 7]);
        assert_eq!(g.edge(0), (0, 1));
    }

    #[test]
    fn rejects_malformed_lines_with_line_number() {
        let err = DirectedGraph::parse_edge_list("0 1\n# ok\n1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = DirectedGraph::parse_edge_list("0 1 2").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = DirectedGraph::parse_edge_list("-1 2").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(matches!(
            DirectedGraph::parse_edge_list("3 3"),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(
            DirectedGraph::parse_edge_list("0 1\n1 2\n0 1"),
            Err(Error::InvalidGraph(_))
        ));
        // Opposite directions are distinct edges.
        assert!(DirectedGraph::parse_edge_list("0 1\n1 0").is_ok());
    }

    #[test]
    fn degree_costs_examples() {
        let path = DirectedGraph::path(3).unwrap();
        let c = degree_proportional_costs(&path, 1.0).unwrap();
        assert_eq!(c.nodes(), &[1.0, 1.0, 0.0]);
        assert_eq!(c.fixed(), 1.0);

        let complete = DirectedGraph::complete(10).unwrap();
        let c = degree_proportional_costs(&complete, 1.0).unwrap();
        assert!(c.nodes().iter().all(|&x| x == 1.0));

        let star = DirectedGraph::star(4).unwrap();
        let c = degree_proportional_costs(&star, 0.5).unwrap();
        assert_eq!(c.nodes(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.fixed(), 0.5);

        let empty = DirectedGraph::from_edges(3, vec![]).unwrap();
        assert!(degree_proportional_costs(&empty, 1.0).is_err());
    }

    #[test]
    fn cost_vector_requires_positive_fixed_cost() {
        assert!(CostVector::new(vec![0.5], 0.0).is_err());
        assert!(CostVector::new(vec![1.5], 1.0).is_err());
        assert!(WeightVector::new(vec![0.2, -0.1]).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = DirectedGraph> {
        (2usize..9, proptest::collection::vec(any::<(u8, u8)>(), 1..30)).prop_filter_map(
            "needs at least one valid edge",
            |(n, pairs)| {
                let mut seen = HashSet::new();
                let edges: Vec<_> = pairs
                    .into_iter()
                    .map(|(a, b)| (a as usize % n, b as usize % n))
                    .filter(|&(u, v)| u != v && seen.insert((u, v)))
                    .collect();
                if edges.is_empty() {
                    return None;
                }
                // Scatter labels so that re-indexing is exercised.
                let text: String = edges
                    .iter()
                    .map(|&(u, v)| format!("{} {}\n", u * 7 + 3, v * 7 + 3))
                    .collect();
                DirectedGraph::parse_edge_list(&text).ok()
            },
        )
    }

    proptest! {
        #[test]
        fn edge_list_round_trip(g in arb_graph()) {
            let reloaded = DirectedGraph::parse_edge_list(&g.to_edge_list()).unwrap();
            prop_assert_eq!(&reloaded, &g);
        }

        #[test]
        fn adjacency_consistent_with_edges(g in arb_graph()) {
            prop_assert_eq!(g.out_degrees().iter().sum::<usize>(), g.edge_count());
            for (id, &(u, v)) in g.edges().iter().enumerate() {
                let hits = g.out_edges(u).iter().filter(|&&(e, _)| e == id).count();
                prop_assert_eq!(hits, 1);
                prop_assert!(g.out_edges(u).contains(&(id, v)));
            }
        }
    }
}
