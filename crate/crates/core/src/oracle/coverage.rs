//! Incremental set objective over a stored sample.
//!
//! Tracks, per realization, the nodes already reached by the committed
//! seeds, so a marginal query only walks the newly reached part. The value is
//! `σ(S) + bonus(S)` for an optional bonus kind, all computed from the same
//! realizations.

use crate::bonus::{self, BonusContext, BonusKind};
use crate::error::Result;
use crate::graph::NodeId;
use crate::greedy::SetFunction;

use super::LiveEdgeSample;

pub struct CoverageObjective<'a> {
    sample: &'a LiveEdgeSample,
    bonus: Option<(&'a BonusContext, BonusKind)>,
    members: Vec<NodeId>,
    words: usize,
    covered: Vec<u64>,
    /// Per-node hit mass; only maintained when the bonus needs probabilities.
    hits: Vec<f64>,
    per_node: bool,
    committed_mass: f64,
    /// Per realization `Σ a_i` over reached nodes (bonus4 only).
    reached_terms: Vec<f64>,
    /// `bonus({j})` for every node (bonus1 only).
    singleton_bonus: Vec<f64>,
    value: f64,
    // Scratch reused by every marginal query.
    delta_mass: f64,
    delta_hits: Vec<f64>,
    touched: Vec<NodeId>,
    delta_terms: Vec<(usize, f64)>,
    queue: Vec<NodeId>,
    seen: Vec<u32>,
    tag: u32,
}

impl<'a> CoverageObjective<'a> {
    /// Plain spread objective.
    pub fn spread(sample: &'a LiveEdgeSample) -> Self {
        Self::build(sample, None).expect("spread objective never fails")
    }

    /// `σ(S) + bonus_kind(S)`, with probabilities taken from the sample.
    pub fn with_bonus(sample: &'a LiveEdgeSample, ctx: &'a BonusContext, kind: BonusKind) -> Result<Self> {
        Self::build(sample, Some((ctx, kind)))
    }

    fn build(sample: &'a LiveEdgeSample, bonus: Option<(&'a BonusContext, BonusKind)>) -> Result<Self> {
        let n = sample.node_count();
        let words = n.div_ceil(64).max(1);
        let singleton_bonus = match bonus {
            Some((ctx, BonusKind::One)) => (0..n)
                .map(|j| Ok(bonus::bonus(ctx, &sample.influence_probs(&[j])?)))
                .collect::<Result<Vec<_>>>()?,
            _ => Vec::new(),
        };
        Ok(Self {
            sample,
            bonus,
            members: Vec::new(),
            words,
            covered: vec![0; sample.realizations() * words],
            hits: vec![0.0; n],
            per_node: matches!(
                bonus,
                Some((_, BonusKind::Raw | BonusKind::Two | BonusKind::Three))
            ),
            committed_mass: 0.0,
            reached_terms: vec![0.0; sample.realizations()],
            singleton_bonus,
            value: 0.0,
            delta_mass: 0.0,
            delta_hits: vec![0.0; n],
            touched: Vec::new(),
            delta_terms: Vec::new(),
            queue: Vec::new(),
            seen: vec![0; n],
            tag: 0,
        })
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    fn is_covered(&self, r: usize, v: usize) -> bool {
        self.covered[r * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Fills the scratch buffers with what adding `j` would newly reach.
    fn explore(&mut self, j: NodeId) {
        for &v in &self.touched {
            self.delta_hits[v] = 0.0;
        }
        self.touched.clear();
        self.delta_terms.clear();
        self.delta_mass = 0.0;
        let node_terms = match self.bonus {
            Some((ctx, BonusKind::Four)) => Some(ctx.node_terms()),
            _ => None,
        };
        let sample = self.sample;
        for r in 0..sample.realizations() {
            if self.is_covered(r, j) {
                continue;
            }
            let weight = sample.weight(r);
            let mut term = 0.0;
            if let Some(closure) = sample.closure(r, j) {
                let mut fresh = closure & !self.covered[r];
                self.delta_mass += weight * fresh.count_ones() as f64;
                if !self.per_node && node_terms.is_none() {
                    continue;
                }
                while fresh != 0 {
                    let v = fresh.trailing_zeros() as usize;
                    fresh &= fresh - 1;
                    if self.delta_hits[v] == 0.0 {
                        self.touched.push(v);
                    }
                    self.delta_hits[v] += weight;
                    if let Some(a) = node_terms {
                        term += a[v];
                    }
                }
            } else {
                self.tag = self.tag.wrapping_add(1);
                if self.tag == 0 {
                    self.seen.iter_mut().for_each(|s| *s = 0);
                    self.tag = 1;
                }
                let tag = self.tag;
                self.queue.clear();
                self.queue.push(j);
                self.seen[j] = tag;
                let mut head = 0;
                while head < self.queue.len() {
                    let u = self.queue[head];
                    head += 1;
                    self.delta_mass += weight;
                    if self.delta_hits[u] == 0.0 {
                        self.touched.push(u);
                    }
                    self.delta_hits[u] += weight;
                    if let Some(a) = node_terms {
                        term += a[u];
                    }
                    for &v in sample.live_targets(r, u) {
                        let v = v as usize;
                        if self.seen[v] != tag && !self.is_covered(r, v) {
                            self.seen[v] = tag;
                            self.queue.push(v);
                        }
                    }
                }
            }
            if node_terms.is_some() {
                self.delta_terms.push((r, term));
            }
        }
    }

    /// Objective value for the committed hits plus the scratch deltas.
    fn value_with_scratch(&self, extra: Option<NodeId>) -> f64 {
        let total = self.sample.total_weight();
        let spread = (self.committed_mass + self.delta_mass) / total;
        let Some((ctx, kind)) = self.bonus else {
            return spread;
        };
        let has_seeds = !self.members.is_empty() || extra.is_some();
        if !has_seeds {
            return 0.0;
        }
        let probs = || -> Vec<f64> {
            self.hits
                .iter()
                .zip(&self.delta_hits)
                .map(|(h, d)| ((h + d) / total).min(1.0))
                .collect()
        };
        let extra_bonus = match kind {
            BonusKind::Raw => bonus::bonus(ctx, &probs()),
            BonusKind::Two => bonus::bonus2(ctx, &probs()),
            BonusKind::Three => bonus::bonus3(ctx, &probs()),
            BonusKind::One => {
                self.members.iter().chain(extra.iter()).map(|&j| self.singleton_bonus[j]).sum()
            }
            BonusKind::Five => {
                let mut seeds = self.members.clone();
                seeds.extend(extra);
                bonus::bonus5(ctx, &seeds)
            }
            BonusKind::Four => {
                let scale = ctx.node_count() as f64;
                let mut delta = self.delta_terms.iter().peekable();
                let mut acc = 0.0;
                for (r, base) in self.reached_terms.iter().enumerate() {
                    let mut inner = *base;
                    if let Some(&&(dr, d)) = delta.peek() {
                        if dr == r {
                            inner += d;
                            delta.next();
                        }
                    }
                    acc += self.sample.weight(r) * inner.sqrt();
                }
                scale * acc / total
            }
        };
        spread + extra_bonus
    }

    fn apply_scratch(&mut self, j: NodeId) {
        let sample = self.sample;
        for &v in &self.touched {
            self.hits[v] += self.delta_hits[v];
        }
        self.committed_mass += self.delta_mass;
        for &(r, d) in &self.delta_terms {
            self.reached_terms[r] += d;
        }
        // Mark newly covered nodes per realization.
        for r in 0..sample.realizations() {
            if self.is_covered(r, j) {
                continue;
            }
            if let Some(closure) = sample.closure(r, j) {
                self.covered[r] |= closure;
            } else {
                self.queue.clear();
                self.queue.push(j);
                let base = r * self.words;
                self.covered[base + j / 64] |= 1 << (j % 64);
                let mut head = 0;
                while head < self.queue.len() {
                    let u = self.queue[head];
                    head += 1;
                    for &v in sample.live_targets(r, u) {
                        let v = v as usize;
                        if !self.is_covered(r, v) {
                            self.covered[base + v / 64] |= 1 << (v % 64);
                            self.queue.push(v);
                        }
                    }
                }
            }
        }
        self.members.push(j);
    }
}

impl SetFunction for CoverageObjective<'_> {
    fn ground_size(&self) -> usize {
        self.sample.node_count()
    }

    fn current_value(&self) -> f64 {
        self.value
    }

    fn marginal(&mut self, j: NodeId) -> f64 {
        self.explore(j);
        self.value_with_scratch(Some(j)) - self.value
    }

    fn commit(&mut self, j: NodeId) {
        self.explore(j);
        let value = self.value_with_scratch(Some(j));
        self.apply_scratch(j);
        self.value = value;
    }
}
