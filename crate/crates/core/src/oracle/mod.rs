//! Interchangeable estimators of `σ(S; w)` and `p_i(S; w)`.
//!
//! [`ExactOracle`] enumerates realizations on small graphs,
//! [`MonteCarloOracle`] averages over a fixed set of sampled live-edge
//! graphs (so repeated queries share random numbers), and the [`sketch`]
//! module provides bottom-k reachability sketches with a cost-aware
//! selection rule.

mod coverage;
mod sample;
pub mod sketch;

pub use coverage::CoverageObjective;
pub use sample::{replicate_rng, LiveEdgeSample};

use crate::diffusion;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId, WeightVector};

pub trait SpreadOracle {
    fn node_count(&self) -> usize;

    /// `p_i(S; w)` for every node.
    fn influence_probs(&self, seeds: &[NodeId]) -> Result<Vec<f64>>;

    /// `σ(S; w)`; by default the sum of [`SpreadOracle::influence_probs`].
    fn spread(&self, seeds: &[NodeId]) -> Result<f64> {
        Ok(self.influence_probs(seeds)?.iter().sum())
    }

    /// `E[f(reached set)]` over live-edge realizations.
    fn expectation(&self, seeds: &[NodeId], f: &mut dyn FnMut(&[NodeId]) -> f64) -> Result<f64>;
}

/// Enumeration over all `2^|E|` realizations (`|E| <= 25`).
pub struct ExactOracle<'g> {
    graph: &'g DirectedGraph,
    weights: WeightVector,
}

impl<'g> ExactOracle<'g> {
    pub fn new(graph: &'g DirectedGraph, weights: &WeightVector) -> Result<Self> {
        if graph.edge_count() > diffusion::MAX_ENUMERATION_EDGES {
            return Err(Error::GuardExceeded {
                what: "edge count for exact enumeration",
                limit: diffusion::MAX_ENUMERATION_EDGES,
                actual: graph.edge_count(),
                hint: "use the Monte-Carlo oracle instead",
            });
        }
        Ok(Self {
            graph,
            weights: weights.clone(),
        })
    }
}

impl SpreadOracle for ExactOracle<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn influence_probs(&self, seeds: &[NodeId]) -> Result<Vec<f64>> {
        diffusion::exact_influence_probs(self.graph, &self.weights, seeds)
    }

    fn expectation(&self, seeds: &[NodeId], f: &mut dyn FnMut(&[NodeId]) -> f64) -> Result<f64> {
        let mut reached = Vec::new();
        diffusion::exact_expectation(self.graph, &self.weights, seeds, |visited| {
            reached.clear();
            reached.extend((0..visited.len()).filter(|&i| visited[i]));
            f(&reached)
        })
    }
}

impl SpreadOracle for LiveEdgeSample {
    fn node_count(&self) -> usize {
        LiveEdgeSample::node_count(self)
    }

    fn influence_probs(&self, seeds: &[NodeId]) -> Result<Vec<f64>> {
        LiveEdgeSample::influence_probs(self, seeds)
    }

    fn expectation(&self, seeds: &[NodeId], f: &mut dyn FnMut(&[NodeId]) -> f64) -> Result<f64> {
        LiveEdgeSample::expectation(self, seeds, f)
    }
}

/// Averages over `replicates` live-edge graphs drawn once at construction.
/// Replicate `r` is drawn from stream `r` of `seed`, so results do not depend
/// on evaluation order.
pub struct MonteCarloOracle {
    sample: LiveEdgeSample,
}

impl MonteCarloOracle {
    pub fn new(graph: &DirectedGraph, weights: &WeightVector, replicates: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            sample: LiveEdgeSample::draw_compact(graph, weights, replicates, seed)?,
        })
    }

    pub fn replicates(&self) -> usize {
        self.sample.realizations()
    }

    pub fn sample(&self) -> &LiveEdgeSample {
        &self.sample
    }

    /// Mean spread over the replicates, identical to the sum of [`Self::influence_probs`].
    pub fn mc_spread(&self, seeds: &[NodeId]) -> Result<f64> {
        self.spread(seeds)
    }

    pub fn mc_influence_probs(&self, seeds: &[NodeId]) -> Result<Vec<f64>> {
        self.influence_probs(seeds)
    }

    /// Spread with its standard error.
    pub fn spread_with_error(&self, seeds: &[NodeId]) -> Result<(f64, f64)> {
        self.sample.spread_with_error(seeds)
    }
}

impl SpreadOracle for MonteCarloOracle {
    fn node_count(&self) -> usize {
        self.sample.node_count()
    }

    fn influence_probs(&self, seeds: &[NodeId]) -> Result<Vec<f64>> {
        self.sample.influence_probs(seeds)
    }

    fn expectation(&self, seeds: &[NodeId], f: &mut dyn FnMut(&[NodeId]) -> f64) -> Result<f64> {
        self.sample.expectation(seeds, f)
    }
}

/// Replicate count for round `t`:
/// `ceil(max(floor, ε^-2 |V| ln(t + 3)))`, optionally capped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McSchedule {
    pub epsilon: f64,
    pub floor: usize,
    pub cap: Option<usize>,
}

impl Default for McSchedule {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            floor: 1000,
            cap: None,
        }
    }
}

impl McSchedule {
    pub fn replicates(&self, t: u64, node_count: usize) -> usize {
        let scaled = node_count as f64 * ((t + 3) as f64).ln() / (self.epsilon * self.epsilon);
        let n = scaled.max(self.floor as f64).ceil() as usize;
        match self.cap {
            Some(cap) => n.min(cap).max(1),
            None => n.max(1),
        }
    }
}
