//! Independent-cascade realizations, reachability and edge-level feedback,
//! plus the exhaustive (enumeration) spread oracle used as ground truth on
//! small graphs.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, EdgeId, NodeId, WeightVector};

/// Largest edge count the enumeration oracle accepts.
pub const MAX_ENUMERATION_EDGES: usize = 25;
/// Largest node count for the all-subsets spread table.
pub const MAX_TABLE_NODES: usize = 20;
/// Largest node count for the all-subsets probability table.
pub const MAX_PROB_TABLE_NODES: usize = 12;

/// One draw of the live/dead status of every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiveEdgeRealization(Vec<bool>);

impl LiveEdgeRealization {
    pub fn new(live: Vec<bool>) -> Self {
        Self(live)
    }

    pub fn all(edge_count: usize, live: bool) -> Self {
        Self(vec![live; edge_count])
    }

    pub fn is_live(&self, edge: EdgeId) -> bool {
        self.0[edge]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }
}

/// Draws every edge independently: edge `e` is live with probability `w_e`.
pub fn sample_realization<R: Rng + ?Sized>(w: &WeightVector, rng: &mut R) -> LiveEdgeRealization {
    LiveEdgeRealization(w.as_slice().iter().map(|&p| rng.gen::<f64>() < p).collect())
}

/// Nodes reachable from `seeds` through live edges, in ascending order.
pub fn reachable_set(
    graph: &DirectedGraph,
    live: &LiveEdgeRealization,
    seeds: &[NodeId],
) -> Result<Vec<NodeId>> {
    check_realization(graph, live)?;
    let mut visited = vec![false; graph.node_count()];
    bfs(graph, live, seeds, &mut visited)?;
    Ok((0..graph.node_count()).filter(|&i| visited[i]).collect())
}

fn check_realization(graph: &DirectedGraph, live: &LiveEdgeRealization) -> Result<()> {
    if live.len() != graph.edge_count() {
        return Err(Error::LengthMismatch {
            what: "realization",
            expected: graph.edge_count(),
            actual: live.len(),
        });
    }
    Ok(())
}

/// Breadth-first traversal from `seeds` (ascending id order), marking `visited`.
fn bfs(
    graph: &DirectedGraph,
    live: &LiveEdgeRealization,
    seeds: &[NodeId],
    visited: &mut [bool],
) -> Result<usize> {
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut queue = VecDeque::new();
    for &s in &sorted {
        graph.check_node(s)?;
        visited[s] = true;
        queue.push_back(s);
    }
    let mut count = sorted.len();
    while let Some(u) = queue.pop_front() {
        for &(e, v) in graph.out_edges(u) {
            if live.is_live(e) && !visited[v] {
                visited[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    Ok(count)
}

/// Costs revealed after a round: the fixed cost and one entry per seed.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservedCosts {
    pub fixed: f64,
    pub seeds: BTreeMap<NodeId, f64>,
}

impl ObservedCosts {
    pub fn total(&self) -> f64 {
        self.seeds.values().sum::<f64>() + self.fixed
    }
}

/// What the agent sees after playing a seed set.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackRecord {
    /// Every out-edge of every influenced node, with its live status.
    pub observed_edges: BTreeMap<EdgeId, bool>,
    pub observed_costs: ObservedCosts,
    pub realized_spread: usize,
}

impl FeedbackRecord {
    /// Influenced nodes implied by the feedback: the seeds plus the targets of
    /// observed live edges.
    pub fn influenced(&self, graph: &DirectedGraph, seeds: &[NodeId]) -> Vec<NodeId> {
        let mut hit = vec![false; graph.node_count()];
        for &s in seeds {
            hit[s] = true;
        }
        for (&e, &live) in &self.observed_edges {
            if live {
                hit[graph.edge(e).1] = true;
            }
        }
        (0..graph.node_count()).filter(|&i| hit[i]).collect()
    }
}

/// Builds the semi-bandit feedback for playing `seeds` under `live`.
pub fn edge_level_feedback(
    graph: &DirectedGraph,
    live: &LiveEdgeRealization,
    seeds: &[NodeId],
    costs: ObservedCosts,
) -> Result<FeedbackRecord> {
    let influenced = reachable_set(graph, live, seeds)?;
    let mut expected: Vec<NodeId> = seeds.to_vec();
    expected.sort_unstable();
    expected.dedup();
    let observed: Vec<NodeId> = costs.seeds.keys().copied().collect();
    if observed != expected {
        return Err(Error::InvalidValue(format!(
            "realized costs cover {observed:?}, seed set is {expected:?}"
        )));
    }
    let observed_edges = influenced
        .iter()
        .flat_map(|&i| graph.out_edges(i))
        .map(|&(e, _)| (e, live.is_live(e)))
        .collect();
    Ok(FeedbackRecord {
        observed_edges,
        observed_costs: costs,
        realized_spread: influenced.len(),
    })
}

fn check_enumerable(graph: &DirectedGraph, w: &WeightVector) -> Result<()> {
    if w.len() != graph.edge_count() {
        return Err(Error::LengthMismatch {
            what: "weight vector",
            expected: graph.edge_count(),
            actual: w.len(),
        });
    }
    if graph.edge_count() > MAX_ENUMERATION_EDGES {
        return Err(Error::GuardExceeded {
            what: "edge count for exact enumeration",
            limit: MAX_ENUMERATION_EDGES,
            actual: graph.edge_count(),
            hint: "use the Monte-Carlo oracle instead",
        });
    }
    Ok(())
}

/// Calls `visit(realization, probability)` for all `2^|E|` realizations with
/// positive probability.
fn enumerate_realizations<F>(w: &WeightVector, mut visit: F)
where
    F: FnMut(&LiveEdgeRealization, f64),
{
    fn recurse<F: FnMut(&LiveEdgeRealization, f64)>(
        w: &[f64],
        index: usize,
        prob: f64,
        live: &mut LiveEdgeRealization,
        visit: &mut F,
    ) {
        if index == w.len() {
            visit(live, prob);
            return;
        }
        let p = w[index];
        if p > 0.0 {
            live.0[index] = true;
            recurse(w, index + 1, prob * p, live, visit);
        }
        if p < 1.0 {
            live.0[index] = false;
            recurse(w, index + 1, prob * (1.0 - p), live, visit);
        }
    }
    let mut live = LiveEdgeRealization::all(w.len(), false);
    recurse(w.as_slice(), 0, 1.0, &mut live, &mut visit);
}

/// `p_i(S; w)` for every node, by enumerating all live-edge realizations.
pub fn exact_influence_probs(
    graph: &DirectedGraph,
    w: &WeightVector,
    seeds: &[NodeId],
) -> Result<Vec<f64>> {
    check_enumerable(graph, w)?;
    for &s in seeds {
        graph.check_node(s)?;
    }
    let n = graph.node_count();
    let mut probs = vec![0.0; n];
    let mut visited = vec![false; n];
    enumerate_realizations(w, |live, prob| {
        visited.iter_mut().for_each(|v| *v = false);
        bfs(graph, live, seeds, &mut visited).expect("seeds validated");
        for (p, &hit) in probs.iter_mut().zip(&visited) {
            if hit {
                *p += prob;
            }
        }
    });
    for &s in seeds {
        probs[s] = 1.0;
    }
    Ok(probs)
}

/// `σ(S; w) = Σ_i p_i(S; w)` by enumeration.
pub fn exact_spread(graph: &DirectedGraph, w: &WeightVector, seeds: &[NodeId]) -> Result<f64> {
    Ok(exact_influence_probs(graph, w, seeds)?.iter().sum())
}

/// Seed set encoded as a bitmask over node ids.
pub fn mask_to_set(mask: usize) -> Vec<NodeId> {
    (0..usize::BITS as usize)
        .filter(|&i| mask >> i & 1 == 1)
        .collect()
}

pub fn set_to_mask(set: &[NodeId]) -> usize {
    set.iter().fold(0, |m, &i| m | 1 << i)
}

/// Per-node reachability closures of one realization as bitmasks.
fn closures(graph: &DirectedGraph, live: &LiveEdgeRealization, out: &mut [u32]) {
    let n = graph.node_count();
    let mut stack = Vec::with_capacity(n);
    for (start, slot) in out.iter_mut().enumerate() {
        let mut reach = 1u32 << start;
        stack.clear();
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &(e, v) in graph.out_edges(u) {
                if live.is_live(e) && reach >> v & 1 == 0 {
                    reach |= 1 << v;
                    stack.push(v);
                }
            }
        }
        *slot = reach;
    }
}

/// Visits every subset mask with its reached-node mask for one realization.
fn for_each_subset_reach(closure: &[u32], reach: &mut [u32], mut visit: impl FnMut(usize, u32)) {
    reach[0] = 0;
    visit(0, 0);
    for mask in 1..reach.len() {
        let low = mask.trailing_zeros() as usize;
        reach[mask] = reach[mask & (mask - 1)] | closure[low];
        visit(mask, reach[mask]);
    }
}

/// Exact spread of every subset, indexed by bitmask.
pub fn exact_subset_spreads(graph: &DirectedGraph, w: &WeightVector) -> Result<Vec<f64>> {
    check_enumerable(graph, w)?;
    let n = graph.node_count();
    if n > MAX_TABLE_NODES {
        return Err(Error::GuardExceeded {
            what: "node count for the subset spread table",
            limit: MAX_TABLE_NODES,
            actual: n,
            hint: "use the approximate procedures instead",
        });
    }
    let mut spreads = vec![0.0; 1 << n];
    let mut closure = vec![0u32; n];
    let mut reach = vec![0u32; 1 << n];
    enumerate_realizations(w, |live, prob| {
        closures(graph, live, &mut closure);
        for_each_subset_reach(&closure, &mut reach, |mask, r| {
            spreads[mask] += prob * r.count_ones() as f64;
        });
    });
    // Seeds are reached with certainty; the float sum of the masses may not
    // be exactly one, so pin the trivial cases.
    spreads[0] = 0.0;
    spreads[(1 << n) - 1] = n as f64;
    Ok(spreads)
}

/// Exact `p_i(S)` for every subset, row-major by bitmask (`n` entries per row).
pub fn exact_subset_probs(graph: &DirectedGraph, w: &WeightVector) -> Result<Vec<f64>> {
    check_enumerable(graph, w)?;
    let n = graph.node_count();
    if n > MAX_PROB_TABLE_NODES {
        return Err(Error::GuardExceeded {
            what: "node count for the subset probability table",
            limit: MAX_PROB_TABLE_NODES,
            actual: n,
            hint: "evaluate subsets individually",
        });
    }
    let mut probs = vec![0.0; n << n];
    let mut closure = vec![0u32; n];
    let mut reach = vec![0u32; 1 << n];
    enumerate_realizations(w, |live, prob| {
        closures(graph, live, &mut closure);
        for_each_subset_reach(&closure, &mut reach, |mask, mut r| {
            let row = &mut probs[mask * n..(mask + 1) * n];
            while r != 0 {
                let i = r.trailing_zeros() as usize;
                row[i] += prob;
                r &= r - 1;
            }
        });
    });
    for mask in 0..1usize << n {
        for i in 0..n {
            if mask >> i & 1 == 1 {
                probs[mask * n + i] = 1.0;
            }
        }
    }
    Ok(probs)
}

/// Expectation of `f(reached set)` over all realizations, for a seed set.
pub(crate) fn exact_expectation(
    graph: &DirectedGraph,
    w: &WeightVector,
    seeds: &[NodeId],
    mut f: impl FnMut(&[bool]) -> f64,
) -> Result<f64> {
    check_enumerable(graph, w)?;
    for &s in seeds {
        graph.check_node(s)?;
    }
    let mut visited = vec![false; graph.node_count()];
    let mut total = 0.0;
    enumerate_realizations(w, |live, prob| {
        visited.iter_mut().for_each(|v| *v = false);
        bfs(graph, live, seeds, &mut visited).expect("seeds validated");
        total += prob * f(&visited);
    });
    Ok(total)
}
