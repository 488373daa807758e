//! Stored collections of live-edge graphs.
//!
//! A sample is either `n` Monte-Carlo draws (unit weight each) or the full
//! enumeration of realizations (weight = probability). Every estimate is a
//! weighted average over the stored graphs, so the exact and Monte-Carlo
//! paths share one evaluation engine.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffusion::MAX_ENUMERATION_EDGES;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId, WeightVector};

/// Independent stream for replicate `index` under `seed`. Streams depend only
/// on the pair, never on evaluation order.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Graphs with at most this many nodes get precomputed reachability bitmasks.
const CLOSURE_NODE_LIMIT: usize = 64;

#[derive(Clone, Debug)]
pub struct LiveEdgeSample {
    node_count: usize,
    realizations: usize,
    /// `realizations * (node_count + 1)` CSR offsets into `targets`.
    offsets: Vec<u32>,
    targets: Vec<u32>,
    /// Per realization weight; `None` means unit weights.
    weights: Option<Vec<f64>>,
    total_weight: f64,
    /// Per (realization, node) reachability bitmask when the graph is small.
    closures: Option<Vec<u64>>,
}

struct Builder {
    node_count: usize,
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Builder {
    fn new(node_count: usize) -> Self {
        Self {
            node_count,
            offsets: Vec::new(),
            targets: Vec::new(),
        }
    }

    fn push(&mut self, graph: &DirectedGraph, live: impl Fn(usize) -> bool) {
        for u in 0..self.node_count {
            self.offsets.push(self.targets.len() as u32);
            for &(e, v) in graph.out_edges(u) {
                if live(e) {
                    self.targets.push(v as u32);
                }
            }
        }
        self.offsets.push(self.targets.len() as u32);
    }
}

fn check_weights(graph: &DirectedGraph, w: &WeightVector) -> Result<()> {
    if w.len() != graph.edge_count() {
        return Err(Error::LengthMismatch {
            what: "weight vector",
            expected: graph.edge_count(),
            actual: w.len(),
        });
    }
    Ok(())
}

/// Calls `visit` with the per-edge uniforms of every replicate; replicate
/// `r` reads stream `r` of `seed` from its start.
fn for_each_draw(edge_count: usize, replicates: usize, seed: u64, mut visit: impl FnMut(&[u32])) {
    let mut uniforms = vec![0u32; edge_count];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 0..replicates {
        rng.set_stream(r as u64);
        rng.set_word_pos(0);
        rng.fill(&mut uniforms[..]);
        visit(&uniforms);
    }
}

/// Transitive closure of adjacency bitmasks (each including its own node),
/// in place, by Warshall's algorithm.
fn close(reach: &mut [u64]) {
    for k in 0..reach.len() {
        let via = reach[k];
        for slot in reach.iter_mut() {
            if *slot >> k & 1 == 1 {
                *slot |= via;
            }
        }
    }
}

/// Live iff `u32 < w * 2^32`; weight 1 is always live, weight 0 never.
fn threshold(w: f64) -> u64 {
    (w * 4_294_967_296.0).ceil() as u64
}

impl LiveEdgeSample {
    /// `replicates` independent draws. Draw `r` uses stream `r` of `seed` and
    /// consumes one uniform per edge in edge-id order, so two samples drawn
    /// with the same seed under different weights are coupled edge by edge.
    pub fn draw(graph: &DirectedGraph, w: &WeightVector, replicates: usize, seed: u64) -> Result<Self> {
        check_weights(graph, w)?;
        if replicates == 0 {
            return Err(Error::InvalidValue("replicate count must be at least 1".into()));
        }
        let thresholds: Vec<u64> = w.as_slice().iter().map(|&p| threshold(p)).collect();
        let mut builder = Builder::new(graph.node_count());
        let expected: f64 = w.as_slice().iter().sum();
        builder.targets.reserve((expected * replicates as f64 * 1.1) as usize + 16);
        builder.offsets.reserve(replicates * (graph.node_count() + 1));
        for_each_draw(graph.edge_count(), replicates, seed, |uniforms| {
            builder.push(graph, |e| (uniforms[e] as u64) < thresholds[e]);
        });
        Ok(Self::finish(builder, replicates, None))
    }

    /// Same realizations as [`LiveEdgeSample::draw`], but graphs with at most
    /// 64 nodes keep only the reachability bitmasks. Such samples support
    /// every estimate; the sketch builder needs the full form.
    pub fn draw_compact(graph: &DirectedGraph, w: &WeightVector, replicates: usize, seed: u64) -> Result<Self> {
        let n = graph.node_count();
        if n > CLOSURE_NODE_LIMIT {
            return Self::draw(graph, w, replicates, seed);
        }
        check_weights(graph, w)?;
        if replicates == 0 {
            return Err(Error::InvalidValue("replicate count must be at least 1".into()));
        }
        let thresholds: Vec<u64> = w.as_slice().iter().map(|&p| threshold(p)).collect();
        let edges = graph.edges();
        let mut closures = vec![0u64; replicates * n];
        let mut reach = closures.chunks_exact_mut(n.max(1));
        for_each_draw(graph.edge_count(), replicates, seed, |uniforms| {
            let Some(adj) = reach.next() else { return };
            for (u, slot) in adj.iter_mut().enumerate() {
                *slot = 1 << u;
            }
            for (e, &(u, v)) in edges.iter().enumerate() {
                adj[u] |= (((uniforms[e] as u64) < thresholds[e]) as u64) << v;
            }
            close(adj);
        });
        Ok(Self {
            node_count: n,
            realizations: replicates,
            offsets: Vec::new(),
            targets: Vec::new(),
            weights: None,
            total_weight: replicates as f64,
            closures: Some(closures),
        })
    }

    /// Every realization with positive probability, weighted by that probability.
    pub fn enumerate(graph: &DirectedGraph, w: &WeightVector) -> Result<Self> {
        check_weights(graph, w)?;
        if graph.edge_count() > MAX_ENUMERATION_EDGES {
            return Err(Error::GuardExceeded {
                what: "edge count for exact enumeration",
                limit: MAX_ENUMERATION_EDGES,
                actual: graph.edge_count(),
                hint: "use a Monte-Carlo sample instead",
            });
        }
        let probs = w.as_slice();
        // Edges with weight 0 or 1 are deterministic and not branched on.
        let free: Vec<usize> = (0..probs.len())
            .filter(|&e| probs[e] > 0.0 && probs[e] < 1.0)
            .collect();
        let mut builder = Builder::new(graph.node_count());
        let mut weights = Vec::with_capacity(1 << free.len());
        let mut live: Vec<bool> = probs.iter().map(|&p| p >= 1.0).collect();
        for bits in 0..1usize << free.len() {
            let mut mass = 1.0;
            for (k, &e) in free.iter().enumerate() {
                let on = bits >> k & 1 == 1;
                live[e] = on;
                mass *= if on { probs[e] } else { 1.0 - probs[e] };
            }
            builder.push(graph, |e| live[e]);
            weights.push(mass);
        }
        let count = weights.len();
        Ok(Self::finish(builder, count, Some(weights)))
    }

    fn finish(builder: Builder, realizations: usize, weights: Option<Vec<f64>>) -> Self {
        let total_weight = weights
            .as_ref()
            .map_or(realizations as f64, |w| w.iter().sum());
        let mut sample = Self {
            node_count: builder.node_count,
            realizations,
            offsets: builder.offsets,
            targets: builder.targets,
            weights,
            total_weight,
            closures: None,
        };
        if sample.node_count <= CLOSURE_NODE_LIMIT {
            sample.closures = Some(sample.compute_closures());
        }
        sample
    }

    fn compute_closures(&self) -> Vec<u64> {
        let n = self.node_count;
        let mut out = vec![0u64; self.realizations * n];
        for (r, reach) in out.chunks_exact_mut(n.max(1)).enumerate().take(self.realizations) {
            for (u, slot) in reach.iter_mut().enumerate() {
                *slot = self.live_targets(r, u).iter().fold(1u64 << u, |m, &v| m | 1 << v);
            }
            close(reach);
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn realizations(&self) -> usize {
        self.realizations
    }

    /// True for Monte-Carlo samples (unit weights).
    pub fn is_monte_carlo(&self) -> bool {
        self.weights.is_none()
    }

    pub fn weight(&self, r: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[r])
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Live out-neighbours of `u` in realization `r` (not available on compact samples).
    pub(crate) fn live_targets(&self, r: usize, u: usize) -> &[u32] {
        let base = r * (self.node_count + 1);
        let lo = self.offsets[base + u] as usize;
        let hi = self.offsets[base + u + 1] as usize;
        &self.targets[lo..hi]
    }

    pub(crate) fn closure(&self, r: usize, u: usize) -> Option<u64> {
        self.closures.as_ref().map(|c| c[r * self.node_count + u])
    }

    fn check_seeds(&self, seeds: &[NodeId]) -> Result<()> {
        for &s in seeds {
            if s >= self.node_count {
                return Err(Error::NodeOutOfRange {
                    node: s,
                    node_count: self.node_count,
                });
            }
        }
        Ok(())
    }

    /// Calls `visit(r, reached)` for every realization, with `reached` the
    /// nodes influenced by `seeds` in realization `r` (unordered).
    pub fn for_each_reached(
        &self,
        seeds: &[NodeId],
        mut visit: impl FnMut(usize, &[NodeId]),
    ) -> Result<()> {
        self.check_seeds(seeds)?;
        let mut reached = Vec::with_capacity(self.node_count);
        let mut stamp = vec![u32::MAX; self.node_count];
        for r in 0..self.realizations {
            reached.clear();
            if let Some(closures) = &self.closures {
                let base = r * self.node_count;
                let mut mask = seeds.iter().fold(0u64, |m, &s| m | closures[base + s]);
                while mask != 0 {
                    reached.push(mask.trailing_zeros() as usize);
                    mask &= mask - 1;
                }
            } else {
                let tag = r as u32;
                for &s in seeds {
                    if stamp[s] != tag {
                        stamp[s] = tag;
                        reached.push(s);
                    }
                }
                let mut head = 0;
                while head < reached.len() {
                    let u = reached[head];
                    head += 1;
                    for &v in self.live_targets(r, u) {
                        let v = v as usize;
                        if stamp[v] != tag {
                            stamp[v] = tag;
                            reached.push(v);
                        }
                    }
                }
            }
            visit(r, &reached);
        }
        Ok(())
    }

    /// Weighted mean of `f(reached set)` over the sample.
    pub fn expectation(&self, seeds: &[NodeId], mut f: impl FnMut(&[NodeId]) -> f64) -> Result<f64> {
        let mut total = 0.0;
        self.for_each_reached(seeds, |r, reached| total += self.weight(r) * f(reached))?;
        Ok(total / self.total_weight)
    }

    /// Per-node influence frequencies; seeds are exactly 1.
    pub fn influence_probs(&self, seeds: &[NodeId]) -> Result<Vec<f64>> {
        let mut hits = vec![0.0; self.node_count];
        self.for_each_reached(seeds, |r, reached| {
            let w = self.weight(r);
            for &i in reached {
                hits[i] += w;
            }
        })?;
        let mut probs: Vec<f64> = hits.iter().map(|h| h / self.total_weight).collect();
        for &s in seeds {
            probs[s] = 1.0;
        }
        Ok(probs)
    }

    /// Spread estimate with its standard error (zero for enumerations).
    pub fn spread_with_error(&self, seeds: &[NodeId]) -> Result<(f64, f64)> {
        let spread = self.influence_probs(seeds)?.iter().sum::<f64>();
        if !self.is_monte_carlo() || self.realizations < 2 {
            return Ok((spread, 0.0));
        }
        let mut sq = 0.0;
        self.for_each_reached(seeds, |_, reached| {
            sq += (reached.len() as f64 - spread).powi(2);
        })?;
        let n = self.realizations as f64;
        Ok((spread, (sq / (n - 1.0) / n).sqrt()))
    }

    /// Spread of every subset of a graph with at most 20 nodes, by bitmask,
    /// using common random numbers across subsets.
    pub fn subset_spreads(&self) -> Result<Vec<f64>> {
        let n = self.node_count;
        if n > crate::diffusion::MAX_TABLE_NODES {
            return Err(Error::GuardExceeded {
                what: "node count for subset enumeration",
                limit: crate::diffusion::MAX_TABLE_NODES,
                actual: n,
                hint: "use the greedy approximation instead",
            });
        }
        let closures = self.closures.as_ref().expect("small graphs carry closures");
        let mut spreads = vec![0.0; 1 << n];
        let mut reach = vec![0u64; 1 << n];
        for r in 0..self.realizations {
            let w = self.weight(r);
            let base = r * n;
            for mask in 1..1usize << n {
                let low = mask.trailing_zeros() as usize;
                reach[mask] = reach[mask & (mask - 1)] | closures[base + low];
                spreads[mask] += w * reach[mask].count_ones() as f64;
            }
        }
        for s in spreads.iter_mut() {
            *s /= self.total_weight;
        }
        spreads[(1 << n) - 1] = n as f64;
        Ok(spreads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{exact_influence_probs, exact_subset_spreads};
    use approx::assert_abs_diff_eq;

    #[test]
    fn enumeration_matches_exact_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = DirectedGraph::random(6, 0.3, &mut rng).unwrap();
        let w = WeightVector::uniform(g.edge_count(), 1.0, &mut rng).unwrap();
        let sample = LiveEdgeSample::enumerate(&g, &w).unwrap();
        assert_abs_diff_eq!(sample.total_weight(), 1.0, epsilon = 1e-12);
        for seeds in [vec![0], vec![1, 4], vec![]] {
            let got = sample.influence_probs(&seeds).unwrap();
            let want = exact_influence_probs(&g, &w, &seeds).unwrap();
            for (a, b) in got.iter().zip(&want) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
        let table = exact_subset_spreads(&g, &w).unwrap();
        for (a, b) in sample.subset_spreads().unwrap().iter().zip(&table) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn replicate_r_uses_stream_r() {
        use rand::RngCore;
        let g = DirectedGraph::complete(4).unwrap();
        let w = WeightVector::constant(g.edge_count(), 0.5).unwrap();
        let sample = LiveEdgeSample::draw(&g, &w, 5, 21).unwrap();
        for r in 0..5 {
            let mut rng = replicate_rng(21, r as u64);
            let live: Vec<u32> = (0..g.edge_count())
                .filter(|_| (rng.next_u32() as u64) < threshold(0.5))
                .map(|e| g.edge(e).1 as u32)
                .collect();
            let drawn: Vec<u32> = (0..4).flat_map(|u| sample.live_targets(r, u).to_vec()).collect();
            assert_eq!(drawn, live);
        }
    }

    #[test]
    fn compact_draw_matches_full_draw() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = DirectedGraph::random(9, 0.3, &mut rng).unwrap();
        let w = WeightVector::uniform(g.edge_count(), 0.7, &mut rng).unwrap();
        let full = LiveEdgeSample::draw(&g, &w, 300, 17).unwrap();
        let compact = LiveEdgeSample::draw_compact(&g, &w, 300, 17).unwrap();
        assert_eq!(full.closures, compact.closures);
        assert_eq!(full.total_weight(), compact.total_weight());
        assert_eq!(full.subset_spreads().unwrap(), compact.subset_spreads().unwrap());
    }

    #[test]
    fn draws_are_coupled_across_weights() {
        let g = DirectedGraph::complete(5).unwrap();
        let lo = WeightVector::constant(g.edge_count(), 0.2).unwrap();
        let hi = WeightVector::constant(g.edge_count(), 0.6).unwrap();
        let a = LiveEdgeSample::draw(&g, &lo, 200, 11).unwrap();
        let b = LiveEdgeSample::draw(&g, &hi, 200, 11).unwrap();
        for r in 0..200 {
            for u in 0..5 {
                let low = a.closure(r, u).unwrap();
                let high = b.closure(r, u).unwrap();
                assert_eq!(low & !high, 0, "lower weights must reach a subset");
            }
        }
    }

    #[test]
    fn bfs_and_closure_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = DirectedGraph::random(12, 0.2, &mut rng).unwrap();
        let w = WeightVector::uniform(g.edge_count(), 0.8, &mut rng).unwrap();
        let with = LiveEdgeSample::draw(&g, &w, 300, 5).unwrap();
        let mut without = with.clone();
        without.closures = None;
        for seeds in [vec![0], vec![3, 7, 11]] {
            assert_eq!(
                with.influence_probs(&seeds).unwrap(),
                without.influence_probs(&seeds).unwrap()
            );
        }
    }
}
