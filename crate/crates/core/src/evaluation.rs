//! Gaps against the `(1 - 1/e - ε) λ*` benchmark, cumulative gap-regret
//! curves and the per-node constants appearing in the regret bounds.

use std::collections::HashMap;
use std::io::Write;

use crate::diffusion::{self, exact_subset_probs, mask_to_set, MAX_ENUMERATION_EDGES, MAX_PROB_TABLE_NODES, MAX_TABLE_NODES};
use crate::error::{Error, Result};
use crate::graph::{CostVector, DirectedGraph, NodeId, WeightVector};
use crate::greedy::{best_ratio_in_table, greedy_ratio_knapsack, lazy_greedy_ratio, ratio};
use crate::oracle::{CoverageObjective, LiveEdgeSample, SpreadOracle};
use crate::policy::EpisodeTrace;

/// Largest edge count for which the exact oracle is kept in memory.
const STORED_ENUMERATION_EDGES: usize = 16;
/// Largest node count for brute force over a Monte-Carlo subset table.
const MC_TABLE_NODES: usize = 14;

/// Default replicate count of the Monte-Carlo truth (ten times the in-round floor).
pub const TRUTH_REPLICATES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    Approximate,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::Approximate => "approximate",
        }
    }
}

/// Two seed sets played with probabilities `1 - q` and `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mixture {
    pub cheap: Vec<NodeId>,
    pub expensive: Vec<NodeId>,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaStar {
    pub value: f64,
    /// Best single seed set (within the per-round budget when one is set).
    pub set: Vec<NodeId>,
    /// Set when a mixture at expected cost exactly `b` beats every single set.
    pub mixture: Option<Mixture>,
    pub provenance: Provenance,
}

enum Truth {
    Stored(LiveEdgeSample),
    Streamed,
    MonteCarlo(LiveEdgeSample),
}

/// `σ(·; w*)` and `c*` of an instance: exact when `|E| <= 25`, otherwise a
/// fixed Monte-Carlo sample shared by every query.
pub struct GroundTruth {
    graph: DirectedGraph,
    weights: WeightVector,
    costs: CostVector,
    truth: Truth,
}

impl GroundTruth {
    pub fn new(graph: &DirectedGraph, weights: &WeightVector, costs: &CostVector, replicates: usize, seed: u64) -> Result<Self> {
        if costs.node_count() != graph.node_count() {
            return Err(Error::LengthMismatch {
                what: "cost vector",
                expected: graph.node_count(),
                actual: costs.node_count(),
            });
        }
        let truth = if graph.edge_count() <= STORED_ENUMERATION_EDGES {
            Truth::Stored(LiveEdgeSample::enumerate(graph, weights)?)
        } else if graph.edge_count() <= MAX_ENUMERATION_EDGES {
            if weights.len() != graph.edge_count() {
                return Err(Error::LengthMismatch {
                    what: "weight vector",
                    expected: graph.edge_count(),
                    actual: weights.len(),
                });
            }
            Truth::Streamed
        } else {
            Truth::MonteCarlo(LiveEdgeSample::draw_compact(graph, weights, replicates, seed)?)
        };
        Ok(Self {
            graph: graph.clone(),
            weights: weights.clone(),
            costs: costs.clone(),
            truth,
        })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn costs(&self) -> &CostVector {
        &self.costs
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.truth, Truth::MonteCarlo(_))
    }

    /// `σ(S; w*)` and its standard error (zero when exact).
    pub fn spread(&self, seeds: &[NodeId]) -> Result<(f64, f64)> {
        match &self.truth {
            Truth::Stored(sample) => Ok((sample.spread(seeds)?, 0.0)),
            Truth::Streamed => Ok((diffusion::exact_spread(&self.graph, &self.weights, seeds)?, 0.0)),
            Truth::MonteCarlo(sample) => sample.spread_with_error(seeds),
        }
    }

    fn subset_table(&self) -> Option<Result<Vec<f64>>> {
        let n = self.graph.node_count();
        match &self.truth {
            Truth::Stored(_) | Truth::Streamed if n <= MAX_TABLE_NODES => {
                Some(diffusion::exact_subset_spreads(&self.graph, &self.weights))
            }
            Truth::MonteCarlo(sample) if n <= MC_TABLE_NODES => Some(sample.subset_spreads()),
            _ => None,
        }
    }

    /// `λ* = max_S σ(S; w*) / (c*(S) + c0*)`; with a per-round budget `b`
    /// the comparator is every set of cost at most `b` and every mixture of
    /// two sets with expected cost exactly `b`.
    pub fn lambda_star(&self, knapsack_budget: Option<f64>) -> Result<LambdaStar> {
        let provenance = if self.is_exact() {
            Provenance::Exact
        } else {
            Provenance::Approximate
        };
        if let Some(table) = self.subset_table() {
            let table = table?;
            return Ok(match knapsack_budget {
                None => {
                    let (set, value) = best_ratio_in_table(&table, &self.costs);
                    LambdaStar {
                        value,
                        set,
                        mixture: None,
                        provenance,
                    }
                }
                Some(b) => {
                    let mut best = knapsack_table_optimum(&table, &self.costs, b)?;
                    best.provenance = provenance;
                    best
                }
            });
        }
        // Large graphs: greedy over a sample of the truth.
        let sample = match &self.truth {
            Truth::MonteCarlo(sample) => sample,
            _ => unreachable!("exact truth always has a subset table for small graphs"),
        };
        let mut f = CoverageObjective::spread(sample);
        let (set, value, mixture) = match knapsack_budget {
            None => {
                let chain = lazy_greedy_ratio(&mut f, &self.costs)?;
                (chain.chosen(), chain.best_ratio(), None)
            }
            Some(b) => {
                let mut rng = rand::rngs::mock::StepRng::new(0, 0);
                let choice = greedy_ratio_knapsack(&mut f, &self.costs, b, &mut rng)?;
                let mixture = choice.mix_probability.map(|q| {
                    let j = choice.boundary.expect("mixing happens at the boundary");
                    Mixture {
                        cheap: choice.chain.prefix(j - 1),
                        expensive: choice.chain.prefix(j),
                        q,
                    }
                });
                let set = match &mixture {
                    Some(m) => m.cheap.clone(),
                    None => choice.set(),
                };
                (set, choice.expected_ratio(), mixture)
            }
        };
        Ok(LambdaStar {
            value,
            set,
            mixture,
            provenance: Provenance::Approximate,
        })
    }
}

/// Knapsack comparator over a full subset table. The best mixture at cost
/// `b` is the upper concave envelope of the `(cost, value)` points at `b`.
fn knapsack_table_optimum(table: &[f64], costs: &CostVector, b: f64) -> Result<LambdaStar> {
    if !(b >= costs.fixed()) {
        return Err(Error::InvalidValue(format!(
            "per-round budget {b} is below the fixed cost {}",
            costs.fixed()
        )));
    }
    let mut points: Vec<(f64, f64, usize)> = table
        .iter()
        .enumerate()
        .map(|(mask, &v)| (costs.total(&mask_to_set(mask)), v, mask))
        .collect();
    let mut best_mask = 0;
    let mut best = ratio(table[0], costs.fixed());
    for &(c, v, mask) in &points {
        let r = ratio(v, c);
        if c <= b && (r > best || (r == best && mask_to_set(mask) < mask_to_set(best_mask))) {
            best = r;
            best_mask = mask;
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut hull: Vec<(f64, f64, usize)> = Vec::new();
    for p in points {
        if hull.last().is_some_and(|h| h.0 == p.0) {
            continue;
        }
        while hull.len() >= 2 {
            let (a, m) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop `m` when it lies on or below the chord from `a` to `p`.
            if (m.1 - a.1) * (p.0 - a.0) <= (p.1 - a.1) * (m.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut mixture = None;
    if let Some(k) = hull.iter().position(|h| h.0 > b) {
        if k > 0 && hull[k - 1].0 < b {
            let (lo, hi) = (hull[k - 1], hull[k]);
            let q = (b - lo.0) / (hi.0 - lo.0);
            let value = (1.0 - q) * lo.1 + q * hi.1;
            let r = ratio(value, b);
            if r > best {
                best = r;
                mixture = Some(Mixture {
                    cheap: mask_to_set(lo.2),
                    expensive: mask_to_set(hi.2),
                    q,
                });
            }
        }
    }
    Ok(LambdaStar {
        value: best,
        set: mask_to_set(best_mask),
        mixture,
        provenance: Provenance::Exact,
    })
}

/// λ* of an instance with the default truth (exact when `|E| <= 25`).
pub fn lambda_star(graph: &DirectedGraph, weights: &WeightVector, costs: &CostVector) -> Result<LambdaStar> {
    GroundTruth::new(graph, weights, costs, TRUTH_REPLICATES, 0)?.lambda_star(None)
}

/// `Δ(S) = (1 - 1/e - ε) λ* (c*(S) + c0*) - σ(S; w*)` with the standard
/// error of the spread term.
pub fn gap(truth: &GroundTruth, lambda_star: f64, epsilon: f64, seeds: &[NodeId]) -> Result<(f64, f64)> {
    let (spread, se) = truth.spread(seeds)?;
    let factor = 1.0 - (-1.0f64).exp() - epsilon;
    Ok((factor * lambda_star * truth.costs().total(seeds) - spread, se))
}

/// Gap of every counted round, memoized per distinct seed set.
pub fn trace_gaps(truth: &GroundTruth, lambda_star: f64, epsilon: f64, trace: &EpisodeTrace) -> Result<Vec<f64>> {
    let mut cache: HashMap<Vec<NodeId>, f64> = HashMap::new();
    trace
        .counted()
        .map(|r| {
            if let Some(&g) = cache.get(&r.seeds) {
                return Ok(g);
            }
            let (g, _) = gap(truth, lambda_star, epsilon, &r.seeds)?;
            cache.insert(r.seeds.clone(), g);
            Ok(g)
        })
        .collect()
}

/// `(budget consumed, Σ Δ(S_s) for s <= t)` over the counted rounds, with
/// consumption measured in realized paid cost.
pub fn regret_curve(trace: &EpisodeTrace, gaps: &[f64]) -> Result<Vec<(f64, f64)>> {
    let counted: Vec<_> = trace.counted().collect();
    if counted.len() != gaps.len() {
        return Err(Error::LengthMismatch {
            what: "gap series",
            expected: counted.len(),
            actual: gaps.len(),
        });
    }
    let mut consumed = 0.0;
    let mut total = 0.0;
    Ok(counted
        .iter()
        .zip(gaps)
        .map(|(r, g)| {
            consumed += r.paid;
            total += g;
            (consumed, total)
        })
        .collect())
}

/// Left-continuous value of a cumulative step curve at `x`: the total of
/// the steps taken strictly before `x`.
pub fn curve_value_at(curve: &[(f64, f64)], x: f64) -> f64 {
    let k = curve.partition_point(|&(c, _)| c < x);
    if k == 0 {
        0.0
    } else {
        curve[k - 1].1
    }
}

/// Budget checkpoints `B k / points` for `k = 1..=points`.
pub fn checkpoints(budget: f64, points: usize) -> Vec<f64> {
    (1..=points).map(|k| budget * k as f64 / points as f64).collect()
}

/// Mean of several curves at the given checkpoints.
pub fn average_curves(curves: &[Vec<(f64, f64)>], at: &[f64]) -> Vec<(f64, f64)> {
    at.iter()
        .map(|&x| {
            let sum: f64 = curves.iter().map(|c| curve_value_at(c, x)).sum();
            (x, if curves.is_empty() { 0.0 } else { sum / curves.len() as f64 })
        })
        .collect()
}

/// Per-node constants of the regret bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeDiagnostics {
    pub node: NodeId,
    pub out_degree: usize,
    /// Smallest positive gap over sets that influence the node; `None` if
    /// every such set has a non-positive gap.
    pub delta_min: Option<f64>,
    /// `max Σ_k d_k p_k(S)` over sets that influence the node.
    pub p_max: f64,
}

/// Leading terms of the regret bounds (without the `log B` factor and
/// constants), summed over nodes with a defined `Δ_{i,min}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReference {
    pub cucb_unknown_costs: f64,
    pub cucb_known_costs: f64,
    pub cucb5: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub nodes: Vec<NodeDiagnostics>,
    pub bounds: BoundReference,
}

pub fn diagnostics(
    graph: &DirectedGraph,
    weights: &WeightVector,
    costs: &CostVector,
    lambda_star: f64,
    epsilon: f64,
) -> Result<Diagnostics> {
    let n = graph.node_count();
    if n > MAX_PROB_TABLE_NODES {
        return Err(Error::GuardExceeded {
            what: "node count for diagnostics",
            limit: MAX_PROB_TABLE_NODES,
            actual: n,
            hint: "diagnostics enumerate every subset and node",
        });
    }
    let probs = exact_subset_probs(graph, weights)?;
    let degrees = graph.out_degrees();
    let factor = 1.0 - (-1.0f64).exp() - epsilon;
    let mut delta_min: Vec<Option<f64>> = vec![None; n];
    let mut p_max = vec![0.0f64; n];
    for mask in 0..1usize << n {
        let row = &probs[mask * n..(mask + 1) * n];
        let set = mask_to_set(mask);
        let spread: f64 = row.iter().sum();
        let gap = factor * lambda_star * costs.total(&set) - spread;
        let load: f64 = row.iter().zip(&degrees).map(|(p, &d)| d as f64 * p).sum();
        for i in 0..n {
            if row[i] > 0.0 {
                p_max[i] = p_max[i].max(load);
                if gap > 0.0 {
                    delta_min[i] = Some(delta_min[i].map_or(gap, |d: f64| d.min(gap)));
                }
            }
        }
    }
    let nodes: Vec<NodeDiagnostics> = (0..n)
        .map(|i| NodeDiagnostics {
            node: i,
            out_degree: degrees[i],
            delta_min: delta_min[i],
            p_max: p_max[i],
        })
        .collect();
    let v = n as f64;
    let e = graph.edge_count() as f64;
    let log_v2 = v.ln().powi(2);
    let mut bounds = BoundReference {
        cucb_unknown_costs: 0.0,
        cucb_known_costs: 0.0,
        cucb5: lambda_star * v * v,
    };
    for d in &nodes {
        if let Some(gap) = d.delta_min {
            let dp = d.out_degree as f64 * d.p_max;
            bounds.cucb_unknown_costs += v * (lambda_star + dp * v) / gap;
            bounds.cucb_known_costs += dp * v * v / gap;
            bounds.cucb5 += v * (lambda_star + v * e * log_v2) / gap;
        }
    }
    Ok(Diagnostics { nodes, bounds })
}

/// Per-round CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundRow {
    pub run_id: String,
    pub t: u64,
    pub budget_consumed: f64,
    pub seed_set_size: usize,
    pub paid_cost: f64,
    pub spread: usize,
    pub gap: f64,
    pub cumulative_gap: f64,
}

pub const ROUND_COLUMNS: [&str; 8] = [
    "run_id",
    "t",
    "budget_consumed",
    "seed_set_size",
    "paid_cost",
    "spread",
    "gap",
    "cumulative_gap",
];

/// Rows for the counted rounds of one trace.
pub fn round_rows(run_id: &str, trace: &EpisodeTrace, gaps: &[f64]) -> Result<Vec<RoundRow>> {
    let curve = regret_curve(trace, gaps)?;
    Ok(trace
        .counted()
        .zip(gaps)
        .zip(curve)
        .map(|((r, &g), (consumed, cumulative))| RoundRow {
            run_id: run_id.to_string(),
            t: r.t,
            budget_consumed: consumed,
            seed_set_size: r.seeds.len(),
            paid_cost: r.paid,
            spread: r.spread,
            gap: g,
            cumulative_gap: cumulative,
        })
        .collect())
}

pub fn write_round_csv<W: Write>(out: W, rows: &[RoundRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROUND_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.run_id.clone(),
            r.t.to_string(),
            r.budget_consumed.to_string(),
            r.seed_set_size.to_string(),
            r.paid_cost.to_string(),
            r.spread.to_string(),
            r.gap.to_string(),
            r.cumulative_gap.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::brute_force_ratio;
    use crate::policy::{Condition, RoundLog, Variant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn path_instance() -> (DirectedGraph, WeightVector, CostVector) {
        let g = DirectedGraph::path(3).unwrap();
        let w = WeightVector::new(vec![0.5, 0.5]).unwrap();
        let c = CostVector::new(vec![0.2, 0.3, 0.4], 1.0).unwrap();
        (g, w, c)
    }

    fn trace_of(rounds: &[(Vec<NodeId>, f64)]) -> EpisodeTrace {
        EpisodeTrace {
            variant: Variant::Cucb,
            budget: 100.0,
            rounds: rounds
                .iter()
                .enumerate()
                .map(|(t, (s, paid))| RoundLog {
                    t: t as u64 + 1,
                    seeds: s.clone(),
                    paid: *paid,
                    spread: s.len(),
                    condition: Condition::NotApplicable,
                    augmented: None,
                    budget_after: 0.0,
                    counted: true,
                })
                .collect(),
            exhausted: false,
        }
    }

    #[test]
    fn single_node_lambda() {
        let g = DirectedGraph::from_edges(1, vec![]).unwrap();
        let w = WeightVector::new(vec![]).unwrap();
        let c = CostVector::new(vec![0.5], 1.0).unwrap();
        let l = lambda_star(&g, &w, &c).unwrap();
        assert_eq!(l.value, 1.0 / 1.5);
        assert_eq!(l.set, vec![0]);
        assert_eq!(l.provenance, Provenance::Exact);
    }

    #[test]
    fn path_lambda_matches_brute_force() {
        let (g, w, c) = path_instance();
        let l = lambda_star(&g, &w, &c).unwrap();
        let (set, value) = brute_force_ratio(&g, &w, &c).unwrap();
        assert_eq!(l.value, value);
        assert_eq!(l.set, set);
    }

    #[test]
    fn large_graph_is_approximate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = DirectedGraph::random(40, 0.05, &mut rng).unwrap();
        let w = WeightVector::uniform(g.edge_count(), 0.1, &mut rng).unwrap();
        let c = crate::graph::degree_proportional_costs(&g, 1.0).unwrap();
        let l = GroundTruth::new(&g, &w, &c, 2000, 3).unwrap().lambda_star(None).unwrap();
        assert_eq!(l.provenance, Provenance::Approximate);
        assert!(l.value > 0.0);
    }

    #[test]
    fn gap_signs() {
        let (g, w, c) = path_instance();
        let truth = GroundTruth::new(&g, &w, &c, 0, 0).unwrap();
        let l = truth.lambda_star(None).unwrap();
        let (at_opt, _) = gap(&truth, l.value, 0.0, &l.set).unwrap();
        let (spread, _) = truth.spread(&l.set).unwrap();
        assert!((at_opt + spread / 1f64.exp()).abs() < 1e-12);
        let (empty, _) = gap(&truth, l.value, 0.1, &[]).unwrap();
        assert!((empty - (1.0 - 1.0 / 1f64.exp() - 0.1) * l.value).abs() < 1e-12);
    }

    #[test]
    fn gap_sign_flips_with_epsilon() {
        // S = {1} on the path: ratio 1.5 / 1.3; the benchmark factor crosses it.
        let (g, w, c) = path_instance();
        let truth = GroundTruth::new(&g, &w, &c, 0, 0).unwrap();
        let l = truth.lambda_star(None).unwrap();
        let r = 1.5 / 1.3 / l.value;
        let eps_zero = 1.0 - 1.0 / 1f64.exp() - r;
        let (below, _) = gap(&truth, l.value, eps_zero - 0.01, &[1]).unwrap();
        let (above, _) = gap(&truth, l.value, eps_zero + 0.01, &[1]).unwrap();
        assert!(below > 0.0 && above < 0.0);
    }

    #[test]
    fn constant_gap_curve_is_linear() {
        let trace = trace_of(&[(vec![0], 1.5), (vec![0], 1.5), (vec![0], 1.5)]);
        let curve = regret_curve(&trace, &[0.2, 0.2, 0.2]).unwrap();
        for (k, (x, y)) in curve.iter().enumerate() {
            assert!((x - 1.5 * (k + 1) as f64).abs() < 1e-12);
            assert!((y / x - 0.2 / 1.5).abs() < 1e-12);
        }
        assert!(regret_curve(&trace_of(&[]), &[]).unwrap().is_empty());
    }

    #[test]
    fn curves_concatenate() {
        let a = trace_of(&[(vec![0], 1.0), (vec![1], 2.0)]);
        let b = trace_of(&[(vec![2], 0.5)]);
        let joined = trace_of(&[(vec![0], 1.0), (vec![1], 2.0), (vec![2], 0.5)]);
        let ca = regret_curve(&a, &[0.1, -0.3]).unwrap();
        let cb = regret_curve(&b, &[0.7]).unwrap();
        let cj = regret_curve(&joined, &[0.1, -0.3, 0.7]).unwrap();
        let (xa, ya) = *ca.last().unwrap();
        assert!((cj[2].0 - (xa + cb[0].0)).abs() < 1e-12);
        assert!((cj[2].1 - (ya + cb[0].1)).abs() < 1e-12);
    }

    #[test]
    fn left_continuous_checkpoints() {
        let curve = vec![(1.0, 0.5), (2.0, 1.5)];
        assert_eq!(curve_value_at(&curve, 1.0), 0.0);
        assert_eq!(curve_value_at(&curve, 1.5), 0.5);
        assert_eq!(curve_value_at(&curve, 2.0), 0.5);
        assert_eq!(curve_value_at(&curve, 2.1), 1.5);
        let avg = average_curves(&[curve.clone(), vec![]], &[3.0]);
        assert_eq!(avg, vec![(3.0, 0.75)]);
    }

    #[test]
    fn knapsack_hull_matches_pair_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let n = rng.gen_range(2..=5);
            let table: Vec<f64> = (0..1usize << n)
                .map(|m| if m == 0 { 0.0 } else { m.count_ones() as f64 + rng.gen::<f64>() })
                .collect();
            let c = CostVector::new((0..n).map(|_| rng.gen_range(0.05..1.0)).collect(), rng.gen_range(0.1..1.0)).unwrap();
            let b = c.fixed() + rng.gen_range(0.0..c.nodes().iter().sum::<f64>());
            let got = knapsack_table_optimum(&table, &c, b).unwrap().value;
            let cost = |m: usize| c.total(&mask_to_set(m));
            let mut want = 0.0f64;
            for a in 0..table.len() {
                if cost(a) <= b {
                    want = want.max(table[a] / cost(a));
                }
                for h in 0..table.len() {
                    if cost(a) < b && cost(h) > b {
                        let q = (b - cost(a)) / (cost(h) - cost(a));
                        want = want.max(((1.0 - q) * table[a] + q * table[h]) / b);
                    }
                }
            }
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn single_node_diagnostics() {
        let g = DirectedGraph::from_edges(1, vec![]).unwrap();
        let w = WeightVector::new(vec![]).unwrap();
        let c = CostVector::new(vec![0.5], 1.0).unwrap();
        let d = diagnostics(&g, &w, &c, 2.0 / 3.0, 0.0).unwrap();
        // Δ({0}) = (1 - 1/e) (2/3) 1.5 - 1 < 0, so no positive gap exists.
        assert_eq!(d.nodes[0].delta_min, None);
        assert_eq!(d.nodes[0].p_max, 0.0);
    }

    #[test]
    fn unreachable_node_needs_itself() {
        // Node 2 has no in-edges: only sets containing it influence it.
        let g = DirectedGraph::from_edges(3, vec![(0, 1), (2, 0)]).unwrap();
        let w = WeightVector::new(vec![0.5, 0.5]).unwrap();
        let c = CostVector::new(vec![0.3, 0.3, 0.9], 1.0).unwrap();
        let l = lambda_star(&g, &w, &c).unwrap();
        let d = diagnostics(&g, &w, &c, l.value, 0.0).unwrap();
        let probs = exact_subset_probs(&g, &w).unwrap();
        let factor = 1.0 - 1.0 / 1f64.exp();
        let mut want: Option<f64> = None;
        for mask in [0b100usize, 0b101, 0b110, 0b111] {
            let spread: f64 = probs[mask * 3..mask * 3 + 3].iter().sum();
            let gap = factor * l.value * c.total(&mask_to_set(mask)) - spread;
            if gap > 0.0 {
                want = Some(want.map_or(gap, |x| x.min(gap)));
            }
        }
        assert_eq!(d.nodes[2].delta_min, want);
    }

    #[test]
    fn csv_has_expected_header() {
        let trace = trace_of(&[(vec![0, 1], 1.5)]);
        let rows = round_rows("cucb-0", &trace, &[0.25]).unwrap();
        let mut buf = Vec::new();
        write_round_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "run_id,t,budget_consumed,seed_set_size,paid_cost,spread,gap,cumulative_gap\ncucb-0,1,1.5,2,1.5,2,0.25,0.25\n"
        );
    }
}
