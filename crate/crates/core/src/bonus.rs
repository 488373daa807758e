//! Exploration bonuses built on the weight confidence ellipsoid.
//!
//! With `a_i = δ(t) d_i / N_i` for nodes with a positive trigger counter
//! (and `a_i = 0` otherwise):
//!
//! * `bonus  = |V| sqrt(Σ a_i p_i^2)` (not submodular)
//! * `bonus1 = Σ_{j∈S} bonus({j})` (modular)
//! * `bonus2 = |V| Σ p_i sqrt(a_i)`
//! * `bonus3 = |V| sqrt(Σ a_i p_i)`
//! * `bonus4 = E[|V| sqrt(Σ_{i reached} a_i)]` over live-edge realizations
//! * `bonus5 = |V| sqrt(δ(t) Σ_{j∈S} |E| min(8 / N^c_j, 1))` (weight free)

use crate::error::Result;
use crate::estimation::{ellipsoid_radius, BanditState};
use crate::graph::{DirectedGraph, NodeId};
use crate::oracle::SpreadOracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BonusKind {
    /// The ellipsoid bonus itself.
    Raw,
    One,
    Two,
    Three,
    Four,
    Five,
}

impl BonusKind {
    pub const ALL: [BonusKind; 6] = [
        BonusKind::Raw,
        BonusKind::One,
        BonusKind::Two,
        BonusKind::Three,
        BonusKind::Four,
        BonusKind::Five,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BonusKind::Raw => "bonus",
            BonusKind::One => "bonus1",
            BonusKind::Two => "bonus2",
            BonusKind::Three => "bonus3",
            BonusKind::Four => "bonus4",
            BonusKind::Five => "bonus5",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BonusContext {
    node_count: usize,
    edge_count: usize,
    radius: f64,
    /// `δ(t) d_i / N_i`, zero for nodes never influenced.
    node_terms: Vec<f64>,
    /// `δ(t) |E| min(8 / N^c_j, 1)`.
    cost_terms: Vec<f64>,
}

impl BonusContext {
    pub fn new(graph: &DirectedGraph, state: &BanditState) -> Self {
        Self::from_counters(
            graph,
            state.weight_counters(),
            state.cost_counters(),
            state.round(),
        )
    }

    pub fn from_counters(
        graph: &DirectedGraph,
        weight_counters: &[u64],
        cost_counters: &[u64],
        round: u64,
    ) -> Self {
        let radius = ellipsoid_radius(round, graph.edge_count());
        Self::with_radius(graph, weight_counters, cost_counters, radius)
    }

    /// Context with an explicit radius in place of `δ(t)`.
    pub fn with_radius(
        graph: &DirectedGraph,
        weight_counters: &[u64],
        cost_counters: &[u64],
        radius: f64,
    ) -> Self {
        let edge_count = graph.edge_count();
        let node_terms = weight_counters
            .iter()
            .enumerate()
            .map(|(i, &n)| match n {
                0 => 0.0,
                n => radius * graph.out_degree(i) as f64 / n as f64,
            })
            .collect();
        let cost_terms = cost_counters
            .iter()
            .map(|&n| {
                let share = if n == 0 { 1.0 } else { (8.0 / n as f64).min(1.0) };
                radius * edge_count as f64 * share
            })
            .collect();
        Self {
            node_count: graph.node_count(),
            edge_count,
            radius,
            node_terms,
            cost_terms,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node_terms(&self) -> &[f64] {
        &self.node_terms
    }

    pub fn cost_terms(&self) -> &[f64] {
        &self.cost_terms
    }

    fn scale(&self) -> f64 {
        self.node_count as f64
    }
}

pub fn bonus(ctx: &BonusContext, probs: &[f64]) -> f64 {
    let inner: f64 = ctx.node_terms.iter().zip(probs).map(|(a, p)| a * p * p).sum();
    ctx.scale() * inner.sqrt()
}

/// Sum of singleton bonuses; `singleton_probs[k]` holds `p(· ; {j_k})` for the k-th seed.
pub fn bonus1(ctx: &BonusContext, singleton_probs: &[Vec<f64>]) -> f64 {
    singleton_probs.iter().map(|p| bonus(ctx, p)).sum()
}

pub fn bonus2(ctx: &BonusContext, probs: &[f64]) -> f64 {
    let total: f64 = ctx.node_terms.iter().zip(probs).map(|(a, p)| p * a.sqrt()).sum();
    ctx.scale() * total
}

pub fn bonus3(ctx: &BonusContext, probs: &[f64]) -> f64 {
    let inner: f64 = ctx.node_terms.iter().zip(probs).map(|(a, p)| a * p).sum();
    ctx.scale() * inner.sqrt()
}

/// `|V| sqrt(Σ_{i reached} a_i)` for one realization's reached set.
pub fn bonus4_realization(ctx: &BonusContext, reached: &[NodeId]) -> f64 {
    let inner: f64 = reached.iter().map(|&i| ctx.node_terms[i]).sum();
    ctx.scale() * inner.sqrt()
}

/// Expectation of [`bonus4_realization`] under the oracle's realizations.
pub fn bonus4(ctx: &BonusContext, seeds: &[NodeId], oracle: &dyn SpreadOracle) -> Result<f64> {
    if seeds.is_empty() {
        return Ok(0.0);
    }
    oracle.expectation(seeds, &mut |reached| bonus4_realization(ctx, reached))
}

pub fn bonus5(ctx: &BonusContext, seeds: &[NodeId]) -> f64 {
    let inner: f64 = seeds.iter().map(|&j| ctx.cost_terms[j]).sum();
    ctx.scale() * inner.sqrt()
}

/// Bonus of the given kind for `seeds`, evaluated with the oracle's probabilities.
pub fn evaluate_bonus(
    ctx: &BonusContext,
    kind: BonusKind,
    seeds: &[NodeId],
    oracle: &dyn SpreadOracle,
) -> Result<f64> {
    if seeds.is_empty() {
        return Ok(0.0);
    }
    Ok(match kind {
        BonusKind::Raw => bonus(ctx, &oracle.influence_probs(seeds)?),
        BonusKind::One => {
            let singles = seeds
                .iter()
                .map(|&j| oracle.influence_probs(&[j]))
                .collect::<Result<Vec<_>>>()?;
            bonus1(ctx, &singles)
        }
        BonusKind::Two => bonus2(ctx, &oracle.influence_probs(seeds)?),
        BonusKind::Three => bonus3(ctx, &oracle.influence_probs(seeds)?),
        BonusKind::Four => bonus4(ctx, seeds, oracle)?,
        BonusKind::Five => bonus5(ctx, seeds),
    })
}

/// `σ(S; w̄) + bonus_kind(S; w̄)`, where the oracle is built on `w̄`.
pub fn optimistic_spread(
    ctx: &BonusContext,
    seeds: &[NodeId],
    oracle: &dyn SpreadOracle,
    kind: BonusKind,
) -> Result<f64> {
    if seeds.is_empty() {
        return Ok(0.0);
    }
    Ok(oracle.spread(seeds)? + evaluate_bonus(ctx, kind, seeds, oracle)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightVector;
    use crate::oracle::ExactOracle;
    use approx::assert_abs_diff_eq;

    fn three_nodes() -> DirectedGraph {
        // Node 0 has out-degree 2.
        DirectedGraph::from_edges(3, vec![(0, 1), (0, 2)]).unwrap()
    }

    #[test]
    fn zero_counters_give_zero_bonus() {
        let g = three_nodes();
        let ctx = BonusContext::from_counters(&g, &[0, 0, 0], &[0, 0, 0], 50);
        let p = [1.0, 0.4, 0.2];
        assert_eq!(bonus(&ctx, &p), 0.0);
        assert_eq!(bonus2(&ctx, &p), 0.0);
        assert_eq!(bonus3(&ctx, &p), 0.0);
        assert_eq!(bonus1(&ctx, &[]), 0.0);
    }

    #[test]
    fn bonus_closed_form() {
        let g = three_nodes();
        let ctx = BonusContext::with_radius(&g, &[8, 0, 0], &[0, 0, 0], 46.864);
        let p = [0.5, 0.0, 0.0];
        let expected = 3.0 * (46.864f64 * 2.0 * 0.25 / 8.0).sqrt();
        assert_abs_diff_eq!(bonus(&ctx, &p), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(bonus(&ctx, &p), 5.134, epsilon = 5e-4);
        assert_eq!(bonus(&ctx, &[0.0; 3]), 0.0);
        // A single supported node makes bonus2 collapse onto bonus.
        assert_abs_diff_eq!(bonus2(&ctx, &p), bonus(&ctx, &p), epsilon = 1e-12);
        // With probabilities in {0, 1}, p^2 = p.
        let ones = [1.0, 1.0, 0.0];
        assert_abs_diff_eq!(bonus3(&ctx, &ones), bonus(&ctx, &ones), epsilon = 1e-12);
    }

    #[test]
    fn bonus5_closed_form() {
        // Five nodes, ten edges.
        let g = DirectedGraph::from_edges(
            5,
            vec![
                (0, 1), (0, 2), (0, 3), (0, 4), (1, 2),
                (1, 3), (1, 4), (2, 3), (2, 4), (3, 4),
            ],
        )
        .unwrap();
        let ctx = BonusContext::with_radius(&g, &[0; 5], &[32, 0, 8, 3, 0], 46.864);
        assert_eq!(bonus5(&ctx, &[]), 0.0);
        assert_abs_diff_eq!(bonus5(&ctx, &[0]), 5.0 * (46.864f64 * 10.0 * 0.25).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(bonus5(&ctx, &[0]), 54.12, epsilon = 5e-3);
        // N^c <= 8 saturates the min term at 1.
        for j in [1, 2, 3] {
            assert_abs_diff_eq!(ctx.cost_terms()[j], 46.864 * 10.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn bonus4_cases() {
        let g = DirectedGraph::path(3).unwrap();
        let ctx = BonusContext::from_counters(&g, &[4, 2, 1], &[0; 3], 20);
        let ones = WeightVector::constant(2, 1.0).unwrap();
        let oracle = ExactOracle::new(&g, &ones).unwrap();
        assert_eq!(bonus4(&ctx, &[], &oracle).unwrap(), 0.0);
        // Deterministic: everything downstream of node 0 is reached.
        let a = ctx.node_terms();
        let want = 3.0 * (a[0] + a[1] + a[2]).sqrt();
        assert_abs_diff_eq!(bonus4(&ctx, &[0], &oracle).unwrap(), want, epsilon = 1e-12);

        let half = WeightVector::constant(2, 0.5).unwrap();
        let oracle = ExactOracle::new(&g, &half).unwrap();
        // Reached sets {0}, {0,1}, {0,1,2} with masses 1/2, 1/4, 1/4.
        let want = 3.0
            * (0.5 * a[0].sqrt() + 0.25 * (a[0] + a[1]).sqrt() + 0.25 * (a[0] + a[1] + a[2]).sqrt());
        assert_abs_diff_eq!(bonus4(&ctx, &[0], &oracle).unwrap(), want, epsilon = 1e-12);
    }

    #[test]
    fn optimistic_spread_on_fresh_state() {
        let g = DirectedGraph::path(3).unwrap();
        let state = BanditState::new(&g, 10.0);
        let ctx = BonusContext::new(&g, &state);
        let w_bar = state.mean_weights(&g);
        let oracle = ExactOracle::new(&g, &w_bar).unwrap();
        assert_eq!(optimistic_spread(&ctx, &[], &oracle, BonusKind::Five).unwrap(), 0.0);
        // Fresh means are 1, so the spread is plain reachability; only bonus5 is non-zero.
        for kind in [BonusKind::Raw, BonusKind::One, BonusKind::Two, BonusKind::Three, BonusKind::Four] {
            assert_eq!(optimistic_spread(&ctx, &[1], &oracle, kind).unwrap(), 2.0);
        }
        let b5 = bonus5(&ctx, &[1]);
        assert!(b5 > 0.0);
        assert_abs_diff_eq!(
            optimistic_spread(&ctx, &[1], &oracle, BonusKind::Five).unwrap(),
            2.0 + b5,
            epsilon = 1e-12
        );
    }
}
