//! Greedy maximization of `f(S) / (c(S) + c0)` and related routines.
//!
//! [`lazy_greedy_ratio`] builds the full greedy chain `S_0 ⊂ S_1 ⊂ … ⊂ S_|V|`
//! by bang-per-buck, re-evaluating stale bounds only when they reach the top
//! of the priority queue, then returns the prefix with the best ratio.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;

use crate::diffusion::{self, mask_to_set, MAX_TABLE_NODES};
use crate::error::{Error, Result};
use crate::graph::{CostVector, DirectedGraph, NodeId, WeightVector};

/// Incrementally evaluated set function over nodes `0..ground_size`.
pub trait SetFunction {
    fn ground_size(&self) -> usize;

    /// `f(S)` for the committed set `S`.
    fn current_value(&self) -> f64;

    /// `f(S ∪ {j}) - f(S)`.
    fn marginal(&mut self, j: NodeId) -> f64;

    fn commit(&mut self, j: NodeId);
}

/// Adapts a plain `f(&[NodeId]) -> f64` closure. Every marginal query
/// re-evaluates `f` on the extended set.
pub struct FnObjective<F> {
    ground_size: usize,
    f: F,
    members: Vec<NodeId>,
    value: f64,
}

impl<F: FnMut(&[NodeId]) -> f64> FnObjective<F> {
    pub fn new(ground_size: usize, mut f: F) -> Self {
        let value = f(&[]);
        Self {
            ground_size,
            f,
            members: Vec::new(),
            value,
        }
    }
}

impl<F: FnMut(&[NodeId]) -> f64> SetFunction for FnObjective<F> {
    fn ground_size(&self) -> usize {
        self.ground_size
    }

    fn current_value(&self) -> f64 {
        self.value
    }

    fn marginal(&mut self, j: NodeId) -> f64 {
        self.members.push(j);
        let v = (self.f)(&self.members);
        self.members.pop();
        v - self.value
    }

    fn commit(&mut self, j: NodeId) {
        self.members.push(j);
        self.value = (self.f)(&self.members);
    }
}

/// Set function backed by a table indexed by bitmask.
pub fn table_objective(table: &[f64]) -> FnObjective<impl FnMut(&[NodeId]) -> f64 + '_> {
    let n = table.len().trailing_zeros() as usize;
    FnObjective::new(n, move |set: &[NodeId]| table[diffusion::set_to_mask(set)])
}

/// `f(S) / cost` with the conventions for a zero denominator.
pub fn ratio(value: f64, cost: f64) -> f64 {
    if cost > 0.0 {
        value / cost
    } else if value > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyChain {
    /// Node added at step `k + 1`.
    pub order: Vec<NodeId>,
    /// Bang-per-buck of each added node when it was chosen.
    pub gains: Vec<f64>,
    /// `f(S_k)` for `k = 0..=|V|`.
    pub values: Vec<f64>,
    /// `c(S_k) + c0` for `k = 0..=|V|`.
    pub costs: Vec<f64>,
    /// `f(S_k) / (c(S_k) + c0)`.
    pub ratios: Vec<f64>,
    /// Index `k'` of the best prefix (smallest on ties).
    pub best: usize,
}

impl GreedyChain {
    /// `S_k`, sorted by node id.
    pub fn prefix(&self, k: usize) -> Vec<NodeId> {
        let mut set = self.order[..k].to_vec();
        set.sort_unstable();
        set
    }

    pub fn chosen(&self) -> Vec<NodeId> {
        self.prefix(self.best)
    }

    pub fn best_ratio(&self) -> f64 {
        self.ratios[self.best]
    }

    fn argmax_upto(&self, last: usize) -> usize {
        let mut best = 0;
        for k in 1..=last {
            if self.ratios[k] > self.ratios[best] {
                best = k;
            }
        }
        best
    }
}

/// Relative slack below zero tolerated in a marginal before the objective is
/// declared non-monotone.
const MONOTONE_TOLERANCE: f64 = 1e-9;

fn checked_gain(node: NodeId, gain: f64, scale: f64) -> Result<f64> {
    if gain.is_nan() || gain < -MONOTONE_TOLERANCE * scale.abs().max(1.0) {
        return Err(Error::NonMonotone { node, gain });
    }
    Ok(gain.max(0.0))
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    bound: f64,
    node: NodeId,
    step: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Max-heap: larger bound first, then smaller id.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.node.cmp(&self.node))
    }
}

fn check_costs(f: &dyn SetFunction, costs: &CostVector) -> Result<()> {
    if costs.node_count() != f.ground_size() {
        return Err(Error::LengthMismatch {
            what: "cost vector",
            expected: f.ground_size(),
            actual: costs.node_count(),
        });
    }
    Ok(())
}

/// Lazy greedy for the ratio. Zero-cost nodes are taken first in id order;
/// the rest by bang-per-buck with ties to the smaller id.
pub fn lazy_greedy_ratio(f: &mut dyn SetFunction, costs: &CostVector) -> Result<GreedyChain> {
    check_costs(f, costs)?;
    let n = f.ground_size();
    let mut chain = GreedyChain {
        order: Vec::with_capacity(n),
        gains: Vec::with_capacity(n),
        values: vec![f.current_value()],
        costs: vec![costs.fixed()],
        ratios: Vec::with_capacity(n + 1),
        best: 0,
    };
    let mut spent = 0.0;
    let mut push = |chain: &mut GreedyChain, f: &mut dyn SetFunction, j: NodeId, gain: f64| {
        f.commit(j);
        spent += costs.node(j);
        chain.order.push(j);
        chain.gains.push(gain);
        chain.values.push(f.current_value());
        chain.costs.push(spent + costs.fixed());
    };

    for j in (0..n).filter(|&j| costs.node(j) <= 0.0) {
        let gain = f.marginal(j);
        checked_gain(j, gain, f.current_value())?;
        push(&mut chain, f, j, f64::INFINITY);
    }

    let mut heap = BinaryHeap::with_capacity(n);
    for j in (0..n).filter(|&j| costs.node(j) > 0.0) {
        let gain = checked_gain(j, f.marginal(j), f.current_value())?;
        heap.push(Entry {
            bound: gain / costs.node(j),
            node: j,
            step: chain.order.len(),
        });
    }
    while let Some(top) = heap.pop() {
        let step = chain.order.len();
        if top.step == step {
            push(&mut chain, f, top.node, top.bound);
            continue;
        }
        let gain = checked_gain(top.node, f.marginal(top.node), f.current_value())?;
        heap.push(Entry {
            bound: gain / costs.node(top.node),
            node: top.node,
            step,
        });
    }

    chain.ratios = chain
        .values
        .iter()
        .zip(&chain.costs)
        .map(|(&v, &c)| ratio(v, c))
        .collect();
    chain.best = chain.argmax_upto(n);
    Ok(chain)
}

/// Output of the budget-constrained greedy.
#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackChoice {
    pub chain: GreedyChain,
    /// First chain index whose cost exceeds `b`, if any.
    pub boundary: Option<usize>,
    /// Probability of playing `S_j` rather than `S_{j-1}` when randomized.
    pub mix_probability: Option<f64>,
    /// Chain index actually played.
    pub played: usize,
    pub expected_value: f64,
    pub expected_cost: f64,
}

impl KnapsackChoice {
    pub fn set(&self) -> Vec<NodeId> {
        self.chain.prefix(self.played)
    }

    /// `E[f(S)] / E[c(S) + c0]`.
    pub fn expected_ratio(&self) -> f64 {
        ratio(self.expected_value, self.expected_cost)
    }
}

/// Greedy under `E[c(S) + c0] <= b`: restrict the ratio argmax to the chain
/// up to the first over-budget index `j`, and if that argmax is `S_j` mix
/// `S_j` and `S_{j-1}` so the expected cost is exactly `b`.
pub fn greedy_ratio_knapsack<R: Rng + ?Sized>(
    f: &mut dyn SetFunction,
    costs: &CostVector,
    b: f64,
    rng: &mut R,
) -> Result<KnapsackChoice> {
    if !(b >= costs.fixed()) {
        return Err(Error::InvalidValue(format!(
            "per-round budget {b} is below the fixed cost {}",
            costs.fixed()
        )));
    }
    let chain = lazy_greedy_ratio(f, costs)?;
    let n = chain.order.len();
    let boundary = (0..=n).find(|&k| chain.costs[k] > b);
    let Some(j) = boundary else {
        let played = chain.best;
        return Ok(KnapsackChoice {
            expected_value: chain.values[played],
            expected_cost: chain.costs[played],
            played,
            boundary,
            mix_probability: None,
            chain,
        });
    };
    let best = chain.argmax_upto(j);
    if best != j {
        return Ok(KnapsackChoice {
            expected_value: chain.values[best],
            expected_cost: chain.costs[best],
            played: best,
            boundary,
            mix_probability: None,
            chain,
        });
    }
    let step_cost = costs.node(chain.order[j - 1]);
    let q = (b - chain.costs[j - 1]) / step_cost;
    let played = if rng.gen::<f64>() < q { j } else { j - 1 };
    Ok(KnapsackChoice {
        expected_value: q * chain.values[j] + (1.0 - q) * chain.values[j - 1],
        expected_cost: chain.costs[j - 1] + q * step_cost,
        played,
        boundary,
        mix_probability: Some(q),
        chain,
    })
}

/// Best ratio over all subsets from a bitmask-indexed value table; ties go to
/// the lexicographically smallest sorted node list.
pub fn best_ratio_in_table(table: &[f64], costs: &CostVector) -> (Vec<NodeId>, f64) {
    let mut best_set = Vec::new();
    let mut best = ratio(table[0], costs.fixed());
    for (mask, &value) in table.iter().enumerate().skip(1) {
        let set = mask_to_set(mask);
        let r = ratio(value, costs.total(&set));
        if r > best || (r == best && set < best_set) {
            best = r;
            best_set = set;
        }
    }
    (best_set, best)
}

/// Exact `argmax_S σ(S; w) / (c(S) + c0)` and its value `λ*`, by enumerating
/// every subset (at most 20 nodes).
pub fn brute_force_ratio(
    graph: &DirectedGraph,
    w: &WeightVector,
    costs: &CostVector,
) -> Result<(Vec<NodeId>, f64)> {
    if graph.node_count() > MAX_TABLE_NODES {
        return Err(Error::GuardExceeded {
            what: "node count for brute-force ratio",
            limit: MAX_TABLE_NODES,
            actual: graph.node_count(),
            hint: "use the approximate lambda-star procedure in the evaluation module",
        });
    }
    if costs.node_count() != graph.node_count() {
        return Err(Error::LengthMismatch {
            what: "cost vector",
            expected: graph.node_count(),
            actual: costs.node_count(),
        });
    }
    let table = diffusion::exact_subset_spreads(graph, w)?;
    Ok(best_ratio_in_table(&table, costs))
}

/// Lazy greedy on `f(S) - λ c(S)`, stopping once no marginal is positive.
pub fn regularized_greedy(f: &mut dyn SetFunction, costs: &CostVector, lambda: f64) -> Result<Vec<NodeId>> {
    check_costs(f, costs)?;
    let n = f.ground_size();
    let mut heap = BinaryHeap::with_capacity(n);
    for j in 0..n {
        let gain = checked_gain(j, f.marginal(j), f.current_value())?;
        heap.push(Entry {
            bound: gain - lambda * costs.node(j),
            node: j,
            step: 0,
        });
    }
    let mut chosen = Vec::new();
    while let Some(top) = heap.pop() {
        if top.bound <= 0.0 {
            break;
        }
        if top.step == chosen.len() {
            f.commit(top.node);
            chosen.push(top.node);
            continue;
        }
        let gain = checked_gain(top.node, f.marginal(top.node), f.current_value())?;
        heap.push(Entry {
            bound: gain - lambda * costs.node(top.node),
            node: top.node,
            step: chosen.len(),
        });
    }
    chosen.sort_unstable();
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn costs(nodes: &[f64], fixed: f64) -> CostVector {
        CostVector::new(nodes.to_vec(), fixed).unwrap()
    }

    #[test]
    fn single_node() {
        let mut f = FnObjective::new(1, |s: &[NodeId]| 2.0 * s.len() as f64);
        let chain = lazy_greedy_ratio(&mut f, &costs(&[0.5], 1.0)).unwrap();
        assert_eq!(chain.chosen(), vec![0]);
        assert_abs_diff_eq!(chain.best_ratio(), 4.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn modular_objective_orders_by_bang_per_buck() {
        let weights = [1.0, 3.0, 2.0, 0.5];
        let mut f = FnObjective::new(4, |s: &[NodeId]| s.iter().map(|&j| weights[j]).sum());
        let chain = lazy_greedy_ratio(&mut f, &costs(&[0.5, 1.0, 0.5, 1.0], 1.0)).unwrap();
        assert_eq!(chain.order, vec![2, 1, 0, 3]);
        assert_eq!(chain.values.len(), 5);
        // Ratios 0, 2/1.5, 5/2.5, 6/3, 6.5/4: tie between k = 2 and 3 goes to 2.
        assert_eq!(chain.best, 2);
    }

    #[test]
    fn zero_cost_nodes_come_first() {
        let mut f = FnObjective::new(3, |s: &[NodeId]| s.len() as f64);
        let chain = lazy_greedy_ratio(&mut f, &costs(&[0.4, 0.0, 0.0], 1.0)).unwrap();
        assert_eq!(&chain.order[..2], &[1, 2]);
        assert_eq!(chain.gains[0], f64::INFINITY);
    }

    #[test]
    fn non_monotone_objective_is_rejected() {
        let mut f = FnObjective::new(2, |s: &[NodeId]| if s.contains(&1) { -1.0 } else { 0.0 });
        assert!(matches!(
            lazy_greedy_ratio(&mut f, &costs(&[0.5, 0.5], 1.0)),
            Err(Error::NonMonotone { node: 1, .. })
        ));
    }

    #[test]
    fn knapsack_mixes_at_the_boundary() {
        let mut f = FnObjective::new(2, |s: &[NodeId]| 10.0 * s.len() as f64);
        let c = costs(&[0.4, 0.4], 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let choice = greedy_ratio_knapsack(&mut f, &c, 1.6, &mut rng).unwrap();
        assert_eq!(choice.boundary, Some(2));
        assert_abs_diff_eq!(choice.mix_probability.unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(choice.expected_cost, 1.6, epsilon = 1e-12);
        assert!(choice.played == 1 || choice.played == 2);

        let mut hits = 0;
        for seed in 0..2000 {
            let mut f = FnObjective::new(2, |s: &[NodeId]| 10.0 * s.len() as f64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            hits += (greedy_ratio_knapsack(&mut f, &c, 1.6, &mut rng).unwrap().played == 2) as u32;
        }
        assert!((hits as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn knapsack_inactive_constraint_matches_unconstrained() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = costs(&[0.3, 0.6, 0.2], 0.5);
        let value = |s: &[NodeId]| (s.len() as f64).sqrt() + s.iter().map(|&j| j as f64 * 0.1).sum::<f64>();
        let mut f = FnObjective::new(3, value);
        let free = lazy_greedy_ratio(&mut f, &c).unwrap();
        let mut f = FnObjective::new(3, value);
        let choice = greedy_ratio_knapsack(&mut f, &c, 10.0, &mut rng).unwrap();
        assert_eq!(choice.boundary, None);
        assert_eq!(choice.set(), free.chosen());
        let mut f = FnObjective::new(3, value);
        assert!(greedy_ratio_knapsack(&mut f, &c, 0.4, &mut rng).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let g = DirectedGraph::from_edges(1, vec![]).unwrap();
        let (set, lambda) = brute_force_ratio(&g, &WeightVector::new(vec![]).unwrap(), &costs(&[0.5], 1.0)).unwrap();
        assert_eq!(set, vec![0]);
        assert_abs_diff_eq!(lambda, 2.0 / 3.0, epsilon = 1e-15);

        let g = DirectedGraph::path(3).unwrap();
        let w = WeightVector::constant(2, 0.5).unwrap();
        let c = costs(&[0.2, 0.2, 0.2], 1.0);
        let (set, lambda) = brute_force_ratio(&g, &w, &c).unwrap();
        // {0}: 1.75/1.2; {0,2}: 2.5/1.4; {0,1}: 2.5/1.4; {0,1,2}: 3/1.6.
        assert_eq!(set, vec![0, 1, 2]);
        assert_abs_diff_eq!(lambda, 3.0 / 1.6, epsilon = 1e-12);
    }

    #[test]
    fn brute_force_prefers_lexicographically_smallest() {
        let table = [0.0, 1.0, 1.0, 1.2];
        let (set, _) = best_ratio_in_table(&table, &costs(&[0.5, 0.5], 1.0));
        assert_eq!(set, vec![0]);
    }

    #[test]
    fn regularized_extremes() {
        let g = DirectedGraph::complete(4).unwrap();
        let w = WeightVector::constant(g.edge_count(), 0.2).unwrap();
        let table = diffusion::exact_subset_spreads(&g, &w).unwrap();
        let c = costs(&[1.0; 4], 1.0);
        let mut f = table_objective(&table);
        assert_eq!(regularized_greedy(&mut f, &c, 0.0).unwrap(), vec![0, 1, 2, 3]);
        let mut f = table_objective(&table);
        assert!(regularized_greedy(&mut f, &c, 100.0).unwrap().is_empty());
    }
}
