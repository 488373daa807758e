//! Bottom-k reachability sketches over `r` sampled live-edge graphs, and a
//! cost-aware sketch greedy for the spread/cost ratio.
//!
//! Every (instance, node) pair gets an independent uniform rank. A node's
//! sketch holds the `k` smallest ranks among the pairs it reaches, so the
//! number of pairs reached by a seed set is estimated with the usual
//! `(k - 1) / τ_k` bottom-k estimator, and the spread by dividing by `r`.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::graph::{CostVector, DirectedGraph, NodeId, WeightVector};
use crate::greedy::{ratio, GreedyChain};

use super::sample::{replicate_rng, LiveEdgeSample};

/// `floor(ε^-2 ln(1/δ))`.
pub fn k_from_accuracy(epsilon: f64, delta: f64) -> Result<usize> {
    if !(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidValue(format!(
            "sketch accuracy needs epsilon > 0 and delta in (0, 1), got ({epsilon}, {delta})"
        )));
    }
    let k = ((1.0 / delta).ln() / (epsilon * epsilon)).floor() as usize;
    Ok(k.max(1))
}

/// Default instance count for a given `k`: `ceil(4k)`.
pub fn default_instances(k: usize) -> usize {
    4 * k
}

/// A rank: 64 random bits, ties broken by the earlier pair index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Rank {
    bits: u64,
    pair: u32,
}

impl Rank {
    fn value(self) -> f64 {
        // The top 53 bits, centred so the value lies strictly inside (0, 1).
        ((self.bits >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }
}

/// Sampled instances with reverse adjacency and pair ranks.
struct Instances {
    sample: LiveEdgeSample,
    node_count: usize,
    count: usize,
    rev_offsets: Vec<u32>,
    rev_sources: Vec<u32>,
    /// Ranks indexed by pair `instance * n + node`.
    ranks: Vec<Rank>,
}

impl Instances {
    fn draw(graph: &DirectedGraph, w: &WeightVector, count: usize, seed: u64) -> Result<Self> {
        let sample = LiveEdgeSample::draw(graph, w, count, seed)?;
        let n = graph.node_count();
        let pairs = n * count;
        if pairs > u32::MAX as usize {
            return Err(Error::GuardExceeded {
                what: "sketch (instance, node) pairs",
                limit: u32::MAX as usize,
                actual: pairs,
                hint: "reduce the instance count",
            });
        }
        let mut rev_offsets = Vec::with_capacity(count * (n + 1));
        let mut rev_sources = Vec::new();
        let mut incoming: Vec<Vec<u32>> = vec![Vec::new(); n];
        for r in 0..count {
            incoming.iter_mut().for_each(Vec::clear);
            for u in 0..n {
                for &v in sample.live_targets(r, u) {
                    incoming[v as usize].push(u as u32);
                }
            }
            for list in &incoming {
                rev_offsets.push(rev_sources.len() as u32);
                rev_sources.extend_from_slice(list);
            }
            rev_offsets.push(rev_sources.len() as u32);
        }
        // Ranks come from a stream disjoint from the instance streams.
        let mut rng = replicate_rng(seed, u64::MAX);
        let ranks = (0..pairs)
            .map(|pair| Rank {
                bits: rng.next_u64(),
                pair: pair as u32,
            })
            .collect();
        Ok(Self {
            sample,
            node_count: n,
            count,
            rev_offsets,
            rev_sources,
            ranks,
        })
    }

    fn sources(&self, r: usize, v: usize) -> &[u32] {
        let base = r * (self.node_count + 1);
        let lo = self.rev_offsets[base + v] as usize;
        let hi = self.rev_offsets[base + v + 1] as usize;
        &self.rev_sources[lo..hi]
    }

    fn pairs_by_rank(&self) -> Vec<Rank> {
        let mut order = self.ranks.clone();
        order.sort_unstable();
        order
    }

    /// Breadth-first walk from `start` in instance `r`, forward or reverse.
    fn walk(
        &self,
        r: usize,
        start: usize,
        forward: bool,
        seen: &mut Stamp,
        queue: &mut Vec<usize>,
        mut visit: impl FnMut(usize) -> bool,
    ) {
        seen.next();
        queue.clear();
        if !visit(start) {
            return;
        }
        seen.mark(start);
        queue.push(start);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            let next = if forward {
                self.sample.live_targets(r, u)
            } else {
                self.sources(r, u)
            };
            for &x in next {
                let x = x as usize;
                if !seen.is_marked(x) {
                    seen.mark(x);
                    if visit(x) {
                        queue.push(x);
                    }
                }
            }
        }
    }
}

/// Generation-stamped visited set.
struct Stamp {
    marks: Vec<u32>,
    tag: u32,
}

impl Stamp {
    fn new(n: usize) -> Self {
        Self {
            marks: vec![0; n],
            tag: 0,
        }
    }

    fn next(&mut self) {
        self.tag = self.tag.wrapping_add(1);
        if self.tag == 0 {
            self.marks.iter_mut().for_each(|m| *m = 0);
            self.tag = 1;
        }
    }

    fn mark(&mut self, i: usize) {
        self.marks[i] = self.tag;
    }

    fn is_marked(&self, i: usize) -> bool {
        self.marks[i] == self.tag
    }
}

#[derive(Clone, Debug)]
pub struct SketchSet {
    k: usize,
    instances: usize,
    node_count: usize,
    sketches: Vec<Vec<Rank>>,
}

/// Builds bottom-`k` sketches over `r` live-edge instances drawn from `seed`.
pub fn build_sketches(
    graph: &DirectedGraph,
    w: &WeightVector,
    k: usize,
    r: usize,
    seed: u64,
) -> Result<SketchSet> {
    if k == 0 || r == 0 {
        return Err(Error::InvalidValue(format!(
            "sketches need k >= 1 and r >= 1, got k = {k}, r = {r}"
        )));
    }
    let inst = Instances::draw(graph, w, r, seed)?;
    let n = graph.node_count();
    let mut sketches: Vec<Vec<Rank>> = vec![Vec::with_capacity(k); n];
    let mut full = 0;
    let mut seen = Stamp::new(n);
    let mut queue = Vec::new();
    for rank in inst.pairs_by_rank() {
        if full == n {
            break;
        }
        let (i, v) = (rank.pair as usize / n, rank.pair as usize % n);
        // Full sketches still pass the walk on: their ancestors may not be full.
        inst.walk(i, v, false, &mut seen, &mut queue, |u| {
            let sketch = &mut sketches[u];
            if sketch.len() < k {
                sketch.push(rank);
                if sketch.len() == k {
                    full += 1;
                }
            }
            true
        });
    }
    Ok(SketchSet {
        k,
        instances: r,
        node_count: n,
        sketches,
    })
}

impl SketchSet {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn instances(&self) -> usize {
        self.instances
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// The node's ranks in ascending order.
    pub fn ranks(&self, node: NodeId) -> Vec<f64> {
        self.sketches[node].iter().map(|r| r.value()).collect()
    }
}

/// Spread estimate of `seeds` from the union of their sketches. With fewer
/// than `k` distinct ranks in the union, every reached pair is in it and the
/// count is exact.
pub fn sketch_spread_estimate(sk: &SketchSet, seeds: &[NodeId]) -> Result<f64> {
    let mut union: Vec<Rank> = Vec::new();
    for &s in seeds {
        if s >= sk.node_count {
            return Err(Error::NodeOutOfRange {
                node: s,
                node_count: sk.node_count,
            });
        }
        union.extend_from_slice(&sk.sketches[s]);
    }
    union.sort_unstable();
    union.dedup();
    let pairs = if union.len() >= sk.k {
        (sk.k - 1) as f64 / union[sk.k - 1].value()
    } else {
        union.len() as f64
    };
    Ok(pairs / sk.instances as f64)
}

/// Parameters of [`skim_ratio_greedy`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkimParams {
    pub epsilon: f64,
    pub delta: f64,
    /// Instance count; `None` means `4k`.
    pub instances: Option<usize>,
}

impl SkimParams {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            instances: None,
        }
    }
}

/// Sketch greedy for `σ(S) / (c(S) + c0)` under weights `w`.
///
/// Pairs are processed by ascending rank; each processed, uncovered pair adds
/// one to the running sketch size of every node reaching it. A node is chosen
/// once its size reaches `k c_i / c_min`, where `c_min` is the smallest
/// positive cost among unchosen nodes, recomputed after every choice. With
/// uniform costs this is the cardinality rule (size `> k - 1`). Choosing a
/// node covers every pair it reaches and removes processed covered pairs from
/// the sizes. Zero-cost nodes are chosen first. Once the ranks run out, the
/// remaining nodes are taken by exact residual coverage per unit cost.
/// The returned chain records `σ̂(S_k)` (covered pairs / `r`) and its best
/// prefix by estimated ratio.
pub fn skim_ratio_greedy(
    graph: &DirectedGraph,
    w: &WeightVector,
    costs: &CostVector,
    params: SkimParams,
    seed: u64,
) -> Result<GreedyChain> {
    skim_ratio_greedy_with_bonus(graph, w, costs, params, seed, &mut |_, _| 0.0)
}

/// [`skim_ratio_greedy`] with a bonus term: `bonus_gain(S, i)` returns
/// `bonus(S ∪ {i}) - bonus(S)` and lowers node `i`'s threshold by that gain
/// expressed in pairs at the current rank.
pub fn skim_ratio_greedy_with_bonus(
    graph: &DirectedGraph,
    w: &WeightVector,
    costs: &CostVector,
    params: SkimParams,
    seed: u64,
    bonus_gain: &mut dyn FnMut(&[NodeId], NodeId) -> f64,
) -> Result<GreedyChain> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::InvalidGraph("sketch greedy needs at least one node".into()));
    }
    if costs.node_count() != n {
        return Err(Error::LengthMismatch {
            what: "cost vector",
            expected: n,
            actual: costs.node_count(),
        });
    }
    let k = k_from_accuracy(params.epsilon, params.delta)?;
    let r = params.instances.unwrap_or_else(|| default_instances(k));
    let inst = Instances::draw(graph, w, r, seed)?;
    let mut run = SkimRun {
        inst: &inst,
        costs,
        k,
        n,
        covered: vec![false; n * r],
        processed: vec![false; n * r],
        size: vec![0; n],
        chosen: vec![false; n],
        members: Vec::new(),
        covered_count: 0,
        chain: GreedyChain {
            order: Vec::new(),
            gains: Vec::new(),
            values: vec![0.0],
            costs: vec![costs.fixed()],
            ratios: Vec::new(),
            best: 0,
        },
        seen: Stamp::new(n),
        queue: Vec::new(),
    };

    for j in 0..n {
        if costs.node(j) <= 0.0 {
            run.choose(j, f64::INFINITY);
        }
    }
    let open = |run: &SkimRun| run.members.len() < n;
    for rank in inst.pairs_by_rank() {
        if !open(&run) {
            break;
        }
        let pair = rank.pair as usize;
        run.processed[pair] = true;
        if run.covered[pair] {
            continue;
        }
        let tau = rank.value();
        let (i, v) = (pair / n, pair % n);
        let size = &mut run.size;
        let chosen = &run.chosen;
        inst.walk(i, v, false, &mut run.seen, &mut run.queue, |u| {
            if !chosen[u] {
                size[u] += 1;
            }
            true
        });
        while let Some(j) = run.ready(tau, bonus_gain) {
            let gain = (run.size[j].saturating_sub(1)) as f64 / tau / r as f64 / costs.node(j);
            run.choose(j, gain);
        }
    }
    // Ranks exhausted: sizes are now exact residual coverage counts.
    while open(&run) {
        let mut best: Option<(f64, NodeId)> = None;
        for j in (0..n).filter(|&j| !run.chosen[j]) {
            let per_cost = run.size[j] as f64 / r as f64 / costs.node(j);
            if run.size[j] > 0 && best.map_or(true, |(b, _)| per_cost > b) {
                best = Some((per_cost, j));
            }
        }
        let Some((gain, j)) = best else { break };
        run.choose(j, gain);
    }
    let mut chain = run.chain;
    chain.ratios = chain
        .values
        .iter()
        .zip(&chain.costs)
        .map(|(&v, &c)| ratio(v, c))
        .collect();
    chain.best = (0..chain.ratios.len()).fold(0, |b, k| if chain.ratios[k] > chain.ratios[b] { k } else { b });
    Ok(chain)
}

struct SkimRun<'a> {
    inst: &'a Instances,
    costs: &'a CostVector,
    k: usize,
    n: usize,
    covered: Vec<bool>,
    processed: Vec<bool>,
    /// Processed, uncovered pairs reached by each unchosen node.
    size: Vec<usize>,
    chosen: Vec<bool>,
    members: Vec<NodeId>,
    covered_count: usize,
    chain: GreedyChain,
    seen: Stamp,
    queue: Vec<usize>,
}

impl SkimRun<'_> {
    /// The unchosen node whose size has reached its threshold, best size per
    /// unit cost first and lowest id on ties.
    fn ready(&self, tau: f64, bonus_gain: &mut dyn FnMut(&[NodeId], NodeId) -> f64) -> Option<NodeId> {
        let c_min = (0..self.n)
            .filter(|&j| !self.chosen[j])
            .map(|j| self.costs.node(j))
            .fold(f64::INFINITY, f64::min);
        let pairs_per_unit = tau * self.inst.count as f64;
        let mut best: Option<(f64, NodeId)> = None;
        for j in (0..self.n).filter(|&j| !self.chosen[j]) {
            let c = self.costs.node(j);
            let threshold = self.k as f64 * c / c_min - bonus_gain(&self.members, j) * pairs_per_unit;
            if (self.size[j] as f64) < threshold {
                continue;
            }
            let score = self.size[j] as f64 / c;
            if best.map_or(true, |(b, _)| score > b) {
                best = Some((score, j));
            }
        }
        best.map(|(_, j)| j)
    }

    fn choose(&mut self, j: NodeId, gain: f64) {
        let n = self.n;
        let inst = self.inst;
        let mut newly: Vec<usize> = Vec::new();
        for i in 0..inst.count {
            let covered = &mut self.covered;
            inst.walk(i, j, true, &mut self.seen, &mut self.queue, |x| {
                let pair = i * n + x;
                if covered[pair] {
                    return false;
                }
                covered[pair] = true;
                newly.push(pair);
                true
            });
        }
        self.covered_count += newly.len();
        self.chosen[j] = true;
        self.members.push(j);
        for pair in newly {
            if !self.processed[pair] {
                continue;
            }
            let (i, x) = (pair / n, pair % n);
            let size = &mut self.size;
            let chosen = &self.chosen;
            inst.walk(i, x, false, &mut self.seen, &mut self.queue, |u| {
                if !chosen[u] {
                    size[u] -= 1;
                }
                true
            });
        }
        let spent = self.chain.costs.last().copied().unwrap_or(0.0) + self.costs.node(j);
        self.chain.order.push(j);
        self.chain.gains.push(gain);
        self.chain
            .values
            .push(self.covered_count as f64 / inst.count as f64);
        self.chain.costs.push(spent);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::exact_spread;

    #[test]
    fn k_from_accuracy_examples() {
        assert_eq!(k_from_accuracy(0.2, 0.05).unwrap(), 74);
        // ln(10) / 0.01 = 230.26
        assert_eq!(k_from_accuracy(0.1, 0.1).unwrap(), 230);
        assert!(k_from_accuracy(0.0, 0.1).is_err());
    }

    #[test]
    fn strongly_connected_single_instance() {
        let g = DirectedGraph::complete(5).unwrap();
        let w = WeightVector::constant(g.edge_count(), 1.0).unwrap();
        let sk = build_sketches(&g, &w, 1, 1, 7).unwrap();
        let first = sk.ranks(0);
        assert_eq!(first.len(), 1);
        for u in 1..5 {
            assert_eq!(sk.ranks(u), first);
        }
    }

    #[test]
    fn isolated_node_keeps_own_ranks() {
        let g = DirectedGraph::from_edges(3, vec![(0, 1)]).unwrap();
        let w = WeightVector::constant(1, 0.5).unwrap();
        let sk = build_sketches(&g, &w, 4, 10, 3).unwrap();
        let ranks = sk.ranks(2);
        assert_eq!(ranks.len(), 4);
        assert!(ranks.windows(2).all(|p| p[0] < p[1]));
        // Only node 2's own pairs reach node 2; they are the 4 smallest of 10.
        let own = build_sketches(&g, &w, 10, 10, 3).unwrap().ranks(2);
        assert_eq!(&own[..4], &ranks[..]);
    }

    #[test]
    fn estimates() {
        let g = DirectedGraph::complete(10).unwrap();
        let ones = WeightVector::constant(g.edge_count(), 1.0).unwrap();
        let sk = build_sketches(&g, &ones, 20, 3, 1).unwrap();
        assert_eq!(sketch_spread_estimate(&sk, &[]).unwrap(), 0.0);
        // 30 pairs exist, more than k, so the estimator is used; with k > pairs it is exact.
        let exact = build_sketches(&g, &ones, 40, 3, 1).unwrap();
        assert_eq!(sketch_spread_estimate(&exact, &[4]).unwrap(), 10.0);
        assert_eq!(sketch_spread_estimate(&exact, &[1, 8]).unwrap(), 10.0);

        let path = DirectedGraph::path(3).unwrap();
        let half = WeightVector::constant(2, 0.5).unwrap();
        let sk = build_sketches(&path, &half, 100, 10_000, 9).unwrap();
        let truth = exact_spread(&path, &half, &[0]).unwrap();
        let est = sketch_spread_estimate(&sk, &[0]).unwrap();
        assert!((est - truth).abs() <= 0.1 * truth, "{est} vs {truth}");
    }

    #[test]
    fn skim_single_node() {
        let g = DirectedGraph::from_edges(1, vec![]).unwrap();
        let w = WeightVector::new(vec![]).unwrap();
        let c = CostVector::new(vec![0.5], 1.0).unwrap();
        let chain = skim_ratio_greedy(&g, &w, &c, SkimParams::new(0.3, 0.1), 1).unwrap();
        assert_eq!(chain.chosen(), vec![0]);
        assert!((chain.best_ratio() - 1.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn skim_covers_deterministic_star() {
        // The center reaches everything; it must come first.
        let g = DirectedGraph::star(6).unwrap();
        let w = WeightVector::constant(g.edge_count(), 1.0).unwrap();
        let c = CostVector::new(vec![0.5; 7], 1.0).unwrap();
        let chain = skim_ratio_greedy(&g, &w, &c, SkimParams::new(0.3, 0.1), 4).unwrap();
        assert_eq!(chain.order[0], 0);
        assert_eq!(chain.values[1], 7.0);
        assert_eq!(chain.chosen(), vec![0]);
    }
}
