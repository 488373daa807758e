//! Bandit statistics: trigger and cost counters, empirical means, optimistic
//! weights, pessimistic costs and the weight confidence ellipsoid.
//!
//! The weight counter of an edge `ij` is the trigger counter of its source
//! `i`: the number of past rounds in which `i` was influenced. All logarithms
//! are natural.

use std::fmt::Write as _;

use crate::diffusion::{FeedbackRecord, ObservedCosts};
use crate::error::{Error, Result};
use crate::graph::{CostVector, DirectedGraph, NodeId, WeightVector};

const CHECKPOINT_HEADER: &str = "boim-bandit-state v1";

#[derive(Clone, Debug, PartialEq)]
pub struct BanditState {
    round: u64,
    initial_budget: f64,
    /// Running sum of paid costs; the remaining budget is `B - spent`, so
    /// `B_t >= 0` holds exactly when the paid total does not exceed `B`.
    spent: f64,
    weight_counters: Vec<u64>,
    edge_live_counts: Vec<u64>,
    cost_counters: Vec<u64>,
    cost_sums: Vec<f64>,
    fixed_counter: u64,
    fixed_sum: f64,
}

impl BanditState {
    /// Fresh state at round 1 with the whole budget available.
    pub fn new(graph: &DirectedGraph, budget: f64) -> Self {
        let n = graph.node_count();
        Self {
            round: 1,
            initial_budget: budget,
            spent: 0.0,
            weight_counters: vec![0; n],
            edge_live_counts: vec![0; graph.edge_count()],
            cost_counters: vec![0; n],
            cost_sums: vec![0.0; n],
            fixed_counter: 0,
            fixed_sum: 0.0,
        }
    }

    /// Current round `t` (the round about to be played).
    pub fn round(&self) -> u64 {
        self.round
    }

    /// Remaining budget `B_t`.
    pub fn budget(&self) -> f64 {
        self.initial_budget - self.spent
    }

    pub fn initial_budget(&self) -> f64 {
        self.initial_budget
    }

    /// Total paid so far.
    pub fn spent(&self) -> f64 {
        self.spent
    }

    pub fn weight_counters(&self) -> &[u64] {
        &self.weight_counters
    }

    pub fn weight_counter(&self, node: NodeId) -> u64 {
        self.weight_counters[node]
    }

    pub fn edge_live_counts(&self) -> &[u64] {
        &self.edge_live_counts
    }

    pub fn cost_counters(&self) -> &[u64] {
        &self.cost_counters
    }

    pub fn cost_sums(&self) -> &[f64] {
        &self.cost_sums
    }

    pub fn fixed_counter(&self) -> u64 {
        self.fixed_counter
    }

    pub fn fixed_sum(&self) -> f64 {
        self.fixed_sum
    }

    fn check_graph(&self, graph: &DirectedGraph) -> Result<()> {
        if graph.node_count() != self.weight_counters.len()
            || graph.edge_count() != self.edge_live_counts.len()
        {
            return Err(Error::InvalidValue(
                "bandit state was built for a different graph".into(),
            ));
        }
        Ok(())
    }

    fn record_costs(&mut self, seeds: &[NodeId], costs: &ObservedCosts) -> Result<()> {
        let mut sorted = seeds.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if !costs.seeds.keys().copied().eq(sorted.iter().copied()) {
            return Err(Error::InconsistentFeedback(format!(
                "cost entries {:?} do not match seeds {sorted:?}",
                costs.seeds.keys().collect::<Vec<_>>()
            )));
        }
        for (&i, &c) in &costs.seeds {
            if i >= self.cost_counters.len() {
                return Err(Error::NodeOutOfRange {
                    node: i,
                    node_count: self.cost_counters.len(),
                });
            }
            self.cost_counters[i] += 1;
            self.cost_sums[i] += c;
        }
        self.fixed_counter += 1;
        self.fixed_sum += costs.fixed;
        self.spent += costs.total();
        Ok(())
    }

    /// Folds one played round into the statistics and advances `t`.
    pub fn update(
        &mut self,
        graph: &DirectedGraph,
        seeds: &[NodeId],
        feedback: &FeedbackRecord,
    ) -> Result<()> {
        self.check_graph(graph)?;
        for &s in seeds {
            graph.check_node(s)?;
        }
        let influenced = feedback.influenced(graph, seeds);
        if influenced.len() != feedback.realized_spread {
            return Err(Error::InconsistentFeedback(format!(
                "realized spread {} but {} influenced nodes are implied",
                feedback.realized_spread,
                influenced.len()
            )));
        }
        let expected_edges = influenced.iter().map(|&i| graph.out_degree(i)).sum::<usize>();
        let mut is_influenced = vec![false; graph.node_count()];
        for &i in &influenced {
            is_influenced[i] = true;
        }
        for &e in feedback.observed_edges.keys() {
            if e >= graph.edge_count() || !is_influenced[graph.edge(e).0] {
                return Err(Error::InconsistentFeedback(format!(
                    "edge {e} observed but its source was not influenced"
                )));
            }
        }
        if feedback.observed_edges.len() != expected_edges {
            return Err(Error::InconsistentFeedback(
                "some out-edges of influenced nodes are missing".into(),
            ));
        }
        // Validate costs before mutating anything.
        let mut next = self.clone();
        next.record_costs(seeds, &feedback.observed_costs)?;
        for &i in &influenced {
            next.weight_counters[i] += 1;
        }
        for (&e, &live) in &feedback.observed_edges {
            next.edge_live_counts[e] += live as u64;
        }
        next.round += 1;
        *self = next;
        Ok(())
    }

    /// The budget-exhausting round: its costs are observed and paid, its
    /// diffusion feedback is discarded.
    pub fn record_exhausting_round(&mut self, seeds: &[NodeId], costs: &ObservedCosts) -> Result<()> {
        let mut next = self.clone();
        next.record_costs(seeds, costs)?;
        next.round += 1;
        *self = next;
        Ok(())
    }

    /// Empirical edge means `w̄`, with 1 for edges whose source was never influenced.
    pub fn mean_weights(&self, graph: &DirectedGraph) -> WeightVector {
        let values = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(i, _))| match self.weight_counters[i] {
                0 => 1.0,
                n => self.edge_live_counts[e] as f64 / n as f64,
            })
            .collect();
        WeightVector::new(values).expect("means of binary observations lie in [0, 1]")
    }

    /// `w_ij,t = min(1, w̄_ij + sqrt(1.5 ln t / N_i))`, or 1 when `N_i = 0`.
    pub fn weight_ucb(&self, graph: &DirectedGraph) -> WeightVector {
        let values = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(i, _))| {
                let n = self.weight_counters[i];
                let mean = if n == 0 { 1.0 } else { self.edge_live_counts[e] as f64 / n as f64 };
                optimistic_weight(mean, n, self.round)
            })
            .collect();
        WeightVector::new(values).expect("clamped to [0, 1]")
    }

    /// `c_i,t = max(0, c̄_i - sqrt(1.5 ln t / N^c_i))`, or 0 when `N^c_i = 0`.
    pub fn cost_lcb(&self) -> CostVector {
        let t = self.round;
        let bound = |sum: f64, n: u64| {
            let mean = if n == 0 { 0.0 } else { sum / n as f64 };
            pessimistic_cost(mean, n, t)
        };
        let nodes = self
            .cost_sums
            .iter()
            .zip(&self.cost_counters)
            .map(|(&s, &n)| bound(s, n))
            .collect();
        let fixed = bound(self.fixed_sum, self.fixed_counter);
        CostVector::estimate(nodes, fixed)
    }

    /// Empirical cost means (0 where nothing was observed).
    pub fn mean_costs(&self) -> (Vec<f64>, f64) {
        let mean = |s: f64, n: u64| if n == 0 { 0.0 } else { s / n as f64 };
        (
            self.cost_sums
                .iter()
                .zip(&self.cost_counters)
                .map(|(&s, &n)| mean(s, n))
                .collect(),
            mean(self.fixed_sum, self.fixed_counter),
        )
    }

    /// Whether `w` lies in the confidence ellipsoid
    /// `Σ_ij N_i (w_ij - w̄_ij)^2 <= δ(t)`. Edges with `N_i = 0` contribute nothing.
    pub fn ellipsoid_contains(&self, graph: &DirectedGraph, w: &WeightVector) -> bool {
        let deviation: f64 = graph
            .edges()
            .iter()
            .enumerate()
            .filter(|&(_, &(i, _))| self.weight_counters[i] > 0)
            .map(|(e, &(i, _))| {
                let n = self.weight_counters[i] as f64;
                let mean = self.edge_live_counts[e] as f64 / n;
                n * (w.get(e) - mean).powi(2)
            })
            .sum();
        deviation <= ellipsoid_radius(self.round, graph.edge_count())
    }

    /// Versioned `key = value` text form.
    pub fn to_checkpoint(&self) -> String {
        fn join<T: ToString>(values: &[T]) -> String {
            values.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
        }
        let mut out = String::new();
        let _ = writeln!(out, "{CHECKPOINT_HEADER}");
        let _ = writeln!(out, "round = {}", self.round);
        let _ = writeln!(out, "initial_budget = {}", self.initial_budget);
        let _ = writeln!(out, "spent = {}", self.spent);
        let _ = writeln!(out, "fixed_counter = {}", self.fixed_counter);
        let _ = writeln!(out, "fixed_sum = {}", self.fixed_sum);
        let _ = writeln!(out, "weight_counters = {}", join(&self.weight_counters));
        let _ = writeln!(out, "edge_live_counts = {}", join(&self.edge_live_counts));
        let _ = writeln!(out, "cost_counters = {}", join(&self.cost_counters));
        let _ = writeln!(out, "cost_sums = {}", join(&self.cost_sums));
        out
    }

    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(CHECKPOINT_HEADER) {
            return Err(Error::Checkpoint(format!("missing header {CHECKPOINT_HEADER:?}")));
        }
        let mut fields = std::collections::HashMap::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Checkpoint(format!("malformed line {line:?}")))?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        let field = |key: &str| {
            fields
                .get(key)
                .ok_or_else(|| Error::Checkpoint(format!("missing field {key}")))
        };
        fn scalar<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
            raw.parse()
                .map_err(|_| Error::Checkpoint(format!("bad value for {key}: {raw:?}")))
        }
        fn list<T: std::str::FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
            raw.split_whitespace().map(|v| scalar(key, v)).collect()
        }
        let state = Self {
            round: scalar("round", field("round")?)?,
            initial_budget: scalar("initial_budget", field("initial_budget")?)?,
            spent: scalar("spent", field("spent")?)?,
            fixed_counter: scalar("fixed_counter", field("fixed_counter")?)?,
            fixed_sum: scalar("fixed_sum", field("fixed_sum")?)?,
            weight_counters: list("weight_counters", field("weight_counters")?)?,
            edge_live_counts: list("edge_live_counts", field("edge_live_counts")?)?,
            cost_counters: list("cost_counters", field("cost_counters")?)?,
            cost_sums: list("cost_sums", field("cost_sums")?)?,
        };
        if state.cost_counters.len() != state.weight_counters.len()
            || state.cost_sums.len() != state.weight_counters.len()
        {
            return Err(Error::Checkpoint("per-node fields differ in length".into()));
        }
        Ok(state)
    }
}

/// `min(1, mean + sqrt(1.5 ln t / count))`; 1 when `count = 0`.
pub fn optimistic_weight(mean: f64, count: u64, t: u64) -> f64 {
    if count == 0 {
        return 1.0;
    }
    (mean + (1.5 * (t as f64).ln() / count as f64).sqrt()).min(1.0)
}

/// `max(0, mean - sqrt(1.5 ln t / count))`; 0 when `count = 0`.
pub fn pessimistic_cost(mean: f64, count: u64, t: u64) -> f64 {
    if count == 0 {
        return 0.0;
    }
    (mean - (1.5 * (t as f64).ln() / count as f64).sqrt()).max(0.0)
}

/// `δ(t) = 2 ln t + 2 (|E| + 2) ln ln t + 1`, evaluated at `max(t, 3)` so that
/// `ln ln t` stays positive.
pub fn ellipsoid_radius(t: u64, edge_count: usize) -> f64 {
    let t = t.max(3) as f64;
    2.0 * t.ln() + 2.0 * (edge_count as f64 + 2.0) * t.ln().ln() + 1.0
}
