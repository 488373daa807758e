//! Self-check suites over seeded random corpora.
//!
//! Each suite returns the invariants it checked and every violation found.
//! The bonus formulas are injected so a deliberately broken implementation
//! can be shown to fail with the name of the invariant it breaks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bonus::{self, BonusContext};
use crate::diffusion::{exact_influence_probs, exact_subset_spreads, MAX_ENUMERATION_EDGES};
use crate::error::Result;
use crate::graph::{CostVector, DirectedGraph, NodeId, WeightVector};
use crate::greedy::{best_ratio_in_table, lazy_greedy_ratio};
use crate::oracle::sketch::{build_sketches, default_instances, k_from_accuracy, sketch_spread_estimate};
use crate::oracle::{replicate_rng, CoverageObjective, LiveEdgeSample};

/// Float slack for inequalities that hold exactly in real arithmetic.
const ROUNDING: f64 = 1e-12;

/// The bonus formulas under test.
pub trait BonusFormulas {
    fn bonus(&self, ctx: &BonusContext, probs: &[f64]) -> f64;
    fn bonus1(&self, ctx: &BonusContext, singleton_probs: &[Vec<f64>]) -> f64;
    fn bonus2(&self, ctx: &BonusContext, probs: &[f64]) -> f64;
    fn bonus3(&self, ctx: &BonusContext, probs: &[f64]) -> f64;
    fn bonus4(&self, ctx: &BonusContext, seeds: &[NodeId], sample: &LiveEdgeSample) -> Result<f64>;
}

/// The library's own formulas.
pub struct LibraryBonuses;

impl BonusFormulas for LibraryBonuses {
    fn bonus(&self, ctx: &BonusContext, probs: &[f64]) -> f64 {
        bonus::bonus(ctx, probs)
    }
    fn bonus1(&self, ctx: &BonusContext, singleton_probs: &[Vec<f64>]) -> f64 {
        bonus::bonus1(ctx, singleton_probs)
    }
    fn bonus2(&self, ctx: &BonusContext, probs: &[f64]) -> f64 {
        bonus::bonus2(ctx, probs)
    }
    fn bonus3(&self, ctx: &BonusContext, probs: &[f64]) -> f64 {
        bonus::bonus3(ctx, probs)
    }
    fn bonus4(&self, ctx: &BonusContext, seeds: &[NodeId], sample: &LiveEdgeSample) -> Result<f64> {
        bonus::bonus4(ctx, seeds, sample)
    }
}

/// `bonus2` with one term negated.
pub struct NegatedTermBonus;

impl BonusFormulas for NegatedTermBonus {
    fn bonus(&self, ctx: &BonusContext, probs: &[f64]) -> f64 {
        LibraryBonuses.bonus(ctx, probs)
    }
    fn bonus1(&self, ctx: &BonusContext, singleton_probs: &[Vec<f64>]) -> f64 {
        LibraryBonuses.bonus1(ctx, singleton_probs)
    }
    fn bonus2(&self, ctx: &BonusContext, probs: &[f64]) -> f64 {
        let terms = ctx.node_terms();
        let total: f64 = terms
            .iter()
            .zip(probs)
            .enumerate()
            .map(|(i, (a, p))| if i == 0 { -p * a.sqrt() } else { p * a.sqrt() })
            .sum();
        ctx.node_count() as f64 * total
    }
    fn bonus3(&self, ctx: &BonusContext, probs: &[f64]) -> f64 {
        LibraryBonuses.bonus3(ctx, probs)
    }
    fn bonus4(&self, ctx: &BonusContext, seeds: &[NodeId], sample: &LiveEdgeSample) -> Result<f64> {
        LibraryBonuses.bonus4(ctx, seeds, sample)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub invariant: &'static str,
    pub case: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random instances per suite.
    pub cases: usize,
    /// Sketch rebuilds per sketch instance.
    pub rebuilds: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            cases: 200,
            rebuilds: 100,
        }
    }
}

/// Random graph with `|V|` in `nodes` and between 1 and `max_edges` edges.
pub fn random_small_graph<R: Rng>(rng: &mut R, nodes: std::ops::RangeInclusive<usize>, max_edges: usize) -> DirectedGraph {
    loop {
        let n = rng.gen_range(nodes.clone());
        let density = rng.gen_range(0.15..0.6);
        let g = DirectedGraph::random(n, density, rng).expect("valid density");
        if (1..=max_edges).contains(&g.edge_count()) {
            return g;
        }
    }
}

fn random_set<R: Rng>(rng: &mut R, n: usize) -> Vec<NodeId> {
    loop {
        let set: Vec<NodeId> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        if !set.is_empty() {
            return set;
        }
    }
}

pub fn smoothness_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = replicate_rng(opts.seed, 1);
    let mut violations = Vec::new();
    for case in 0..opts.cases {
        let g = random_small_graph(&mut rng, 3..=6, 12);
        let w = WeightVector::uniform(g.edge_count(), 1.0, &mut rng)?;
        let w2 = WeightVector::uniform(g.edge_count(), 1.0, &mut rng)?;
        let s = random_set(&mut rng, g.node_count());
        let p = exact_influence_probs(&g, &w, &s)?;
        let p2 = exact_influence_probs(&g, &w2, &s)?;
        let rhs: f64 = g
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(i, _))| p[i] * (w.get(e) - w2.get(e)).abs())
            .sum();
        for k in 0..g.node_count() {
            let lhs = (p[k] - p2[k]).abs();
            if lhs > rhs + ROUNDING {
                violations.push(Violation {
                    invariant: "per-node smoothness",
                    case,
                    detail: format!("node {k}: {lhs} > {rhs}"),
                });
            }
        }
        let spread_gap = (p.iter().sum::<f64>() - p2.iter().sum::<f64>()).abs();
        let bound = g.node_count() as f64 * rhs;
        if spread_gap > bound + ROUNDING {
            violations.push(Violation {
                invariant: "spread smoothness",
                case,
                detail: format!("{spread_gap} > {bound}"),
            });
        }
    }
    Ok(SuiteReport {
        name: "smoothness",
        cases: opts.cases,
        violations,
    })
}

/// Random counters and radius for a small graph.
pub fn random_context<R: Rng>(rng: &mut R, g: &DirectedGraph) -> BonusContext {
    let weight_counters: Vec<u64> = (0..g.node_count())
        .map(|_| if rng.gen_bool(0.2) { 0 } else { rng.gen_range(1..200) })
        .collect();
    let cost_counters: Vec<u64> = (0..g.node_count()).map(|_| rng.gen_range(0..200)).collect();
    let round = rng.gen_range(2..10_000);
    BonusContext::from_counters(g, &weight_counters, &cost_counters, round)
}

pub fn bonus_order_suite(opts: &VerifyOptions, formulas: &dyn BonusFormulas) -> Result<SuiteReport> {
    let mut rng = replicate_rng(opts.seed, 2);
    let mut violations = Vec::new();
    for case in 0..opts.cases {
        let g = random_small_graph(&mut rng, 3..=6, 12);
        let w = WeightVector::uniform(g.edge_count(), 1.0, &mut rng)?;
        let ctx = random_context(&mut rng, &g);
        let s = random_set(&mut rng, g.node_count());
        let exact = LiveEdgeSample::enumerate(&g, &w)?;
        let probs = exact_influence_probs(&g, &w, &s)?;
        let singles = s
            .iter()
            .map(|&j| exact_influence_probs(&g, &w, &[j]))
            .collect::<Result<Vec<_>>>()?;
        let b = formulas.bonus(&ctx, &probs);
        let b1 = formulas.bonus1(&ctx, &singles);
        let b2 = formulas.bonus2(&ctx, &probs);
        let b3 = formulas.bonus3(&ctx, &probs);
        let b4 = formulas.bonus4(&ctx, &s, &exact)?;
        let slack = ROUNDING * (1.0 + b.abs());
        let checks: [(&'static str, bool, String); 7] = [
            ("bonus <= bonus1", b <= b1 + slack, format!("{b} > {b1}")),
            ("bonus1 <= |S| bonus", b1 <= s.len() as f64 * b + slack, format!("{b1} > {} * {b}", s.len())),
            ("bonus <= bonus2", b <= b2 + slack, format!("{b} > {b2}")),
            (
                "bonus2 <= sqrt|V| bonus",
                b2 <= (g.node_count() as f64).sqrt() * b + slack,
                format!("{b2} > sqrt({}) * {b}", g.node_count()),
            ),
            ("bonus <= bonus3", b <= b3 + slack, format!("{b} > {b3}")),
            ("bonus4 <= bonus3", b4 <= b3 + slack, format!("{b4} > {b3}")),
            ("bonus >= 0", b >= 0.0, format!("{b}")),
        ];
        for (invariant, ok, detail) in checks {
            if !ok {
                violations.push(Violation { invariant, case, detail });
            }
        }
    }
    Ok(SuiteReport {
        name: "bonus orderings",
        cases: opts.cases,
        violations,
    })
}

/// Random costs in `(0, 1]` and `c0` in `(0, 1]`.
pub fn random_costs<R: Rng>(rng: &mut R, n: usize) -> CostVector {
    let draw = |rng: &mut R| 1.0 - rng.gen::<f64>();
    let nodes = (0..n).map(|_| draw(rng)).collect();
    let fixed = draw(rng);
    CostVector::new(nodes, fixed).expect("costs in (0, 1]")
}

pub fn greedy_ratio_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut rng = replicate_rng(opts.seed, 3);
    let mut violations = Vec::new();
    let factor = 1.0 - (-1.0f64).exp();
    for case in 0..opts.cases {
        let g = random_small_graph(&mut rng, 4..=6, MAX_ENUMERATION_EDGES.min(16));
        let w = WeightVector::uniform(g.edge_count(), 1.0, &mut rng)?;
        let c = random_costs(&mut rng, g.node_count());
        let sample = LiveEdgeSample::enumerate(&g, &w)?;
        let mut f = CoverageObjective::spread(&sample);
        let chain = lazy_greedy_ratio(&mut f, &c)?;
        let table = exact_subset_spreads(&g, &w)?;
        let (_, best) = best_ratio_in_table(&table, &c);
        if chain.best_ratio() < factor * best - ROUNDING {
            violations.push(Violation {
                invariant: "greedy ratio >= (1 - 1/e) optimum",
                case,
                detail: format!("{} < {factor} * {best}", chain.best_ratio()),
            });
        }
    }
    Ok(SuiteReport {
        name: "greedy ratio guarantee",
        cases: opts.cases,
        violations,
    })
}

/// `P(|(k - 1) / G - 1| > ε)` for `G ~ Gamma(k, 1)`: the large-population
/// failure probability of the bottom-k estimator.
pub fn bottom_k_tail(k: usize, epsilon: f64) -> f64 {
    // Gamma(k, 1) CDF via the Poisson sum: P(G <= x) = 1 - Σ_{i<k} e^{-x} x^i / i!.
    // Terms are accumulated in log space; e^{-x} alone underflows for large k.
    let cdf = |x: f64| {
        let mut log_term = -x;
        let mut sum = log_term.exp();
        for i in 1..k {
            log_term += (x / i as f64).ln();
            sum += log_term.exp();
        }
        1.0 - sum.min(1.0)
    };
    let m = (k - 1) as f64;
    cdf(m / (1.0 + epsilon)) + (1.0 - cdf(m / (1.0 - epsilon)))
}

/// Sketch estimates against exact spreads: the failure frequency at
/// `ε = 0.2` must stay within two points of the estimator's own tail.
pub fn sketch_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let (epsilon, delta) = (0.2, 0.05);
    let k = k_from_accuracy(epsilon, delta)?;
    let r = default_instances(k);
    let mut rng = replicate_rng(opts.seed, 4);
    let graphs = (opts.cases / 40).max(1);
    let mut failures = 0;
    let mut total = 0;
    for _ in 0..graphs {
        let g = random_small_graph(&mut rng, 4..=8, 15);
        let w = WeightVector::uniform(g.edge_count(), 1.0, &mut rng)?;
        let s = vec![rng.gen_range(0..g.node_count())];
        let truth = exact_influence_probs(&g, &w, &s)?.iter().sum::<f64>();
        for _ in 0..opts.rebuilds {
            let sk = build_sketches(&g, &w, k, r, rng.gen())?;
            let est = sketch_spread_estimate(&sk, &s)?;
            if ((est - truth) / truth).abs() > epsilon {
                failures += 1;
            }
            total += 1;
        }
    }
    let rate = failures as f64 / total as f64;
    let allowed = bottom_k_tail(k, epsilon) + 0.02;
    let violations = if rate > allowed {
        vec![Violation {
            invariant: "sketch error rate within the estimator tail",
            case: 0,
            detail: format!("{failures}/{total} = {rate:.4} > {allowed:.4}"),
        }]
    } else {
        Vec::new()
    };
    Ok(SuiteReport {
        name: "sketch accuracy",
        cases: total,
        violations,
    })
}

pub fn run_suites(opts: &VerifyOptions, formulas: &dyn BonusFormulas) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        smoothness_suite(opts)?,
        bonus_order_suite(opts, formulas)?,
        greedy_ratio_suite(opts)?,
        sketch_suite(opts)?,
    ])
}

/// One line per suite plus one per violation.
pub fn render(reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status} {} ({} cases, {} violations)\n", r.name, r.cases, r.violations.len()));
        for v in &r.violations {
            out.push_str(&format!("  {} [case {}]: {}\n", v.invariant, v.case, v.detail));
        }
    }
    out
}

/// Seeded generator for callers building their own corpora.
pub fn corpus_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyOptions {
        VerifyOptions {
            seed: 5,
            cases: 40,
            rebuilds: 20,
        }
    }

    #[test]
    fn library_passes() {
        let reports = run_suites(&small(), &LibraryBonuses).unwrap();
        assert!(reports.iter().all(|r| r.passed()), "{}", render(&reports));
    }

    #[test]
    fn negated_term_is_caught() {
        let report = bonus_order_suite(&small(), &NegatedTermBonus).unwrap();
        assert!(report.violations.iter().any(|v| v.invariant == "bonus <= bonus2"));
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_suites(&small(), &LibraryBonuses).unwrap();
        let b = run_suites(&small(), &LibraryBonuses).unwrap();
        assert_eq!(render(&a), render(&b));
    }

    #[test]
    fn gamma_tail_values() {
        // Reference values from an independent incomplete-gamma evaluation.
        assert!((bottom_k_tail(74, 0.2) - 0.0839446).abs() < 1e-6);
        assert!((bottom_k_tail(1000, 0.1) - 0.0017864).abs() < 1e-6);
    }
}
