//! The hidden environment: true weights, true costs and the cost noise model.
//!
//! Policies interact with it only through [`Environment::play`], which draws
//! a live-edge realization and realized costs and returns the semi-bandit
//! feedback. The true parameters are readable for evaluation and for the
//! known-cost setting.

use std::collections::BTreeMap;

use rand::Rng;

use crate::diffusion::{edge_level_feedback, sample_realization, FeedbackRecord, ObservedCosts};
use crate::error::{Error, Result};
use crate::graph::{CostVector, DirectedGraph, NodeId, WeightVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CostNoise {
    /// Realized costs equal the true costs.
    Deterministic,
    /// `C_i = c_i + U(-h_i, h_i)` with `h_i = min(h, c_i, 1 - c_i)`, so the
    /// realization stays in `[0, 1]` and its mean is exactly `c_i`.
    ClippedUniform { half_width: f64 },
}

#[derive(Clone, Debug)]
pub struct Environment {
    graph: DirectedGraph,
    weights: WeightVector,
    costs: CostVector,
    noise: CostNoise,
}

/// One played round as seen by the agent.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub feedback: FeedbackRecord,
    /// `Σ_{i∈S} C_i + C_0`.
    pub paid: f64,
}

impl Environment {
    pub fn new(graph: DirectedGraph, weights: WeightVector, costs: CostVector, noise: CostNoise) -> Result<Self> {
        if weights.len() != graph.edge_count() {
            return Err(Error::LengthMismatch {
                what: "weight vector",
                expected: graph.edge_count(),
                actual: weights.len(),
            });
        }
        if costs.node_count() != graph.node_count() {
            return Err(Error::LengthMismatch {
                what: "cost vector",
                expected: graph.node_count(),
                actual: costs.node_count(),
            });
        }
        if let CostNoise::ClippedUniform { half_width } = noise {
            if !(0.0..=1.0).contains(&half_width) {
                return Err(Error::InvalidValue(format!(
                    "noise half-width must lie in [0, 1], got {half_width}"
                )));
            }
        }
        Ok(Self {
            graph,
            weights,
            costs,
            noise,
        })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    /// True weights `w*`.
    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    /// True mean costs `c*`.
    pub fn costs(&self) -> &CostVector {
        &self.costs
    }

    pub fn noise(&self) -> CostNoise {
        self.noise
    }

    fn realize_cost<R: Rng + ?Sized>(&self, mean: f64, rng: &mut R) -> f64 {
        match self.noise {
            CostNoise::Deterministic => mean,
            CostNoise::ClippedUniform { half_width } => {
                let h = half_width.min(mean).min(1.0 - mean);
                if h <= 0.0 {
                    mean
                } else {
                    (mean + rng.gen_range(-h..h)).clamp(0.0, 1.0)
                }
            }
        }
    }

    /// Plays `seeds`: draws the realization (one uniform per edge in edge-id
    /// order), then the fixed cost, then the seed costs in ascending id.
    pub fn play<R: Rng + ?Sized>(&self, seeds: &[NodeId], rng: &mut R) -> Result<Outcome> {
        for &s in seeds {
            self.graph.check_node(s)?;
        }
        let live = sample_realization(&self.weights, rng);
        let fixed = self.realize_cost(self.costs.fixed(), rng);
        let mut sorted = seeds.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let seed_costs: BTreeMap<NodeId, f64> = sorted
            .iter()
            .map(|&i| (i, self.realize_cost(self.costs.node(i), rng)))
            .collect();
        let costs = ObservedCosts {
            fixed,
            seeds: seed_costs,
        };
        let paid = costs.total();
        let feedback = edge_level_feedback(&self.graph, &live, &sorted, costs)?;
        Ok(Outcome { feedback, paid })
    }
}
