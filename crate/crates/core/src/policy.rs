//! Seed-selection policies and the budgeted episode loop.
//!
//! Every variant starts from the optimistic ratio greedy on `σ(·; w_t)` with
//! costs `c_t` (true costs when they are known, lower confidence bounds
//! otherwise). The bonus variants then check
//! `σ(S_t; w_t) <= σ(S_t; w̄) + bonus(S_t)` and, when it fails, re-run the
//! greedy on `σ(·; w̄) + bonus(·)`; finally one under-explored node may be
//! added to the seed set.

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::bonus::{evaluate_bonus, BonusContext, BonusKind};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::estimation::{ellipsoid_radius, BanditState};
use crate::graph::{CostVector, DirectedGraph, NodeId, WeightVector};
use crate::greedy::{greedy_ratio_knapsack, lazy_greedy_ratio, regularized_greedy, SetFunction};
use crate::oracle::{replicate_rng, CoverageObjective, LiveEdgeSample, McSchedule, SpreadOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Cucb,
    Cucb1,
    Cucb4,
    Cucb5,
    CucbPlus,
    Regularized,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Cucb,
        Variant::Cucb1,
        Variant::Cucb4,
        Variant::Cucb5,
        Variant::CucbPlus,
        Variant::Regularized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Cucb => "cucb",
            Variant::Cucb1 => "cucb1",
            Variant::Cucb4 => "cucb4",
            Variant::Cucb5 => "cucb5",
            Variant::CucbPlus => "cucb_plus",
            Variant::Regularized => "regularized",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown policy variant {name:?}")))
    }

    /// Bonus used by the acceptance test and the replacement greedy.
    pub fn bonus_kind(self) -> Option<BonusKind> {
        match self {
            Variant::Cucb1 => Some(BonusKind::One),
            Variant::Cucb4 => Some(BonusKind::Four),
            Variant::Cucb5 => Some(BonusKind::Five),
            Variant::CucbPlus => Some(BonusKind::Raw),
            Variant::Cucb | Variant::Regularized => None,
        }
    }

    /// Whether node `j` with trigger counter `count` is under-explored at round `t`.
    fn needs_exploration(self, count: u64, t: u64, edge_count: usize) -> bool {
        let delta = ellipsoid_radius(t, edge_count);
        match self {
            Variant::Cucb5 | Variant::CucbPlus => (count as f64) < delta,
            Variant::Cucb1 | Variant::Cucb4 => (count as f64) <= edge_count as f64 * delta,
            Variant::Cucb | Variant::Regularized => false,
        }
    }
}

/// How spreads are evaluated inside a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleChoice {
    /// Exact enumeration when `|E| <= 10`, Monte-Carlo otherwise.
    Auto,
    Exact,
    MonteCarlo,
}

const AUTO_EXACT_EDGES: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyConfig {
    pub variant: Variant,
    /// Approximation slack `ε`.
    pub epsilon: f64,
    /// Use the true costs instead of lower confidence bounds.
    pub known_costs: bool,
    /// Per-round expected-cost budget `b` (requires known costs).
    pub knapsack_budget: Option<f64>,
    /// `λ` of the regularized baseline.
    pub lambda: f64,
    pub schedule: McSchedule,
    pub oracle: OracleChoice,
    pub seed: u64,
    /// Episodes stop after this many rounds even with budget left.
    pub max_rounds: u64,
}

impl PolicyConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            epsilon: 0.1,
            known_costs: false,
            knapsack_budget: None,
            lambda: 1.0,
            schedule: McSchedule::default(),
            oracle: OracleChoice::Auto,
            seed: 0,
            max_rounds: 100_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.variant == Variant::Regularized && !(self.lambda > 0.0) {
            return Err(Error::Config(format!(
                "the regularized variant needs lambda > 0, got {}",
                self.lambda
            )));
        }
        if self.knapsack_budget.is_some() && !self.known_costs {
            return Err(Error::Config("a per-round budget requires known costs".into()));
        }
        if !(self.schedule.epsilon > 0.0) || self.schedule.cap == Some(0) {
            return Err(Error::Config("invalid Monte-Carlo schedule".into()));
        }
        Ok(())
    }
}

/// Outcome of the acceptance check for the candidate seed set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Accepted,
    Replaced,
    NotApplicable,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Accepted => "accepted",
            Condition::Replaced => "replaced",
            Condition::NotApplicable => "n/a",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub seeds: Vec<NodeId>,
    pub condition: Condition,
    pub augmented: Option<NodeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundLog {
    pub t: u64,
    pub seeds: Vec<NodeId>,
    pub paid: f64,
    pub spread: usize,
    pub condition: Condition,
    pub augmented: Option<NodeId>,
    /// `B_t`.
    pub budget_after: f64,
    /// False for the budget-exhausting round, whose feedback is discarded.
    pub counted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeTrace {
    pub variant: Variant,
    pub budget: f64,
    pub rounds: Vec<RoundLog>,
    /// True when the loop ended by exhausting the budget rather than the round cap.
    pub exhausted: bool,
}

impl EpisodeTrace {
    /// Rounds `1..τ_B - 1`.
    pub fn counted(&self) -> impl Iterator<Item = &RoundLog> {
        self.rounds.iter().filter(|r| r.counted)
    }

    /// Total reward `Σ σ_t` over counted rounds.
    pub fn reward(&self) -> usize {
        self.counted().map(|r| r.spread).sum()
    }
}

/// A policy sees the graph, its configuration, the bandit state and, in the
/// known-cost setting, the true costs. Nothing else of the environment.
pub struct Policy {
    graph: DirectedGraph,
    config: PolicyConfig,
    known_costs: Option<CostVector>,
}

impl Policy {
    pub fn new(graph: &DirectedGraph, config: PolicyConfig, known_costs: Option<CostVector>) -> Result<Self> {
        config.validate()?;
        if config.known_costs != known_costs.is_some() {
            return Err(Error::Config("known_costs flag and supplied costs disagree".into()));
        }
        if let Some(c) = &known_costs {
            if c.node_count() != graph.node_count() {
                return Err(Error::LengthMismatch {
                    what: "cost vector",
                    expected: graph.node_count(),
                    actual: c.node_count(),
                });
            }
        }
        if config.oracle == OracleChoice::Exact && graph.edge_count() > crate::diffusion::MAX_ENUMERATION_EDGES {
            return Err(Error::GuardExceeded {
                what: "edge count for the exact in-round oracle",
                limit: crate::diffusion::MAX_ENUMERATION_EDGES,
                actual: graph.edge_count(),
                hint: "use the Monte-Carlo oracle",
            });
        }
        Ok(Self {
            graph: graph.clone(),
            config,
            known_costs,
        })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    fn exact(&self) -> bool {
        match self.config.oracle {
            OracleChoice::Exact => true,
            OracleChoice::MonteCarlo => false,
            OracleChoice::Auto => self.graph.edge_count() <= AUTO_EXACT_EDGES,
        }
    }

    /// Sample for weights `w` at round `t`. Samples built at the same round
    /// share their seed, so `w_t` and `w̄` are compared on coupled draws.
    fn sample_at(&self, w: &WeightVector, t: u64, seed: u64) -> Result<LiveEdgeSample> {
        if self.exact() {
            LiveEdgeSample::enumerate(&self.graph, w)
        } else {
            let n = self.config.schedule.replicates(t, self.graph.node_count());
            LiveEdgeSample::draw_compact(&self.graph, w, n, seed)
        }
    }

    fn ratio_select(&self, f: &mut dyn SetFunction, costs: &CostVector, rng: &mut ChaCha8Rng) -> Result<Vec<NodeId>> {
        match self.config.knapsack_budget {
            Some(b) => Ok(greedy_ratio_knapsack(f, costs, b, rng)?.set()),
            None => Ok(lazy_greedy_ratio(f, costs)?.chosen()),
        }
    }

    /// Seed set for the round `state.round()`.
    pub fn select(&self, state: &BanditState) -> Result<Selection> {
        let g = &self.graph;
        let t = state.round();
        let mut rng = replicate_rng(self.config.seed, t);
        let sample_seed = rng.next_u64();
        let costs = match &self.known_costs {
            Some(c) => c.clone(),
            None => state.cost_lcb(),
        };
        let w_t = state.weight_ucb(g);
        let optimistic = self.sample_at(&w_t, t, sample_seed)?;
        let variant = self.config.variant;

        if variant == Variant::Regularized {
            let mut f = CoverageObjective::spread(&optimistic);
            let seeds = regularized_greedy(&mut f, &costs, self.config.lambda)?;
            return Ok(Selection {
                seeds,
                condition: Condition::NotApplicable,
                augmented: None,
            });
        }

        let mut f = CoverageObjective::spread(&optimistic);
        let candidate = self.ratio_select(&mut f, &costs, &mut rng)?;
        let Some(kind) = variant.bonus_kind() else {
            return Ok(Selection {
                seeds: candidate,
                condition: Condition::NotApplicable,
                augmented: None,
            });
        };

        let w_bar = state.mean_weights(g);
        let empirical = self.sample_at(&w_bar, t, sample_seed)?;
        let ctx = BonusContext::new(g, state);
        let lhs = optimistic.spread(&candidate)?;
        let rhs = empirical.spread(&candidate)? + evaluate_bonus(&ctx, kind, &candidate, &empirical)?;
        let (mut seeds, condition) = if lhs <= rhs {
            (candidate, Condition::Accepted)
        } else {
            let mut f = CoverageObjective::with_bonus(&empirical, &ctx, kind)?;
            (self.ratio_select(&mut f, &costs, &mut rng)?, Condition::Replaced)
        };

        // One node per round: the smallest id whose counter is below the threshold.
        let mut augmented = None;
        let counters = state.weight_counters();
        if let Some(j) = (0..g.node_count()).find(|&j| variant.needs_exploration(counters[j], t, g.edge_count())) {
            if let Err(pos) = seeds.binary_search(&j) {
                seeds.insert(pos, j);
                augmented = Some(j);
            }
        }
        Ok(Selection {
            seeds,
            condition,
            augmented,
        })
    }
}

/// Runs one budgeted episode. The environment draws from a stream seeded
/// by `env_seed`; the policy from `config.seed`.
pub fn run_episode(env: &Environment, config: &PolicyConfig, budget: f64, env_seed: u64) -> Result<EpisodeTrace> {
    if !(budget > 0.0) {
        return Err(Error::InvalidValue(format!("total budget must be positive, got {budget}")));
    }
    let known = config.known_costs.then(|| env.costs().clone());
    let policy = Policy::new(env.graph(), config.clone(), known)?;
    let graph = env.graph();
    let mut state = BanditState::new(graph, budget);
    let mut env_rng = ChaCha8Rng::seed_from_u64(env_seed);
    let mut rounds = Vec::new();
    let mut exhausted = false;
    while (rounds.len() as u64) < config.max_rounds {
        let t = state.round();
        let selection = policy.select(&state)?;
        let outcome = env.play(&selection.seeds, &mut env_rng)?;
        let feedback = &outcome.feedback;
        let counted = state.initial_budget() - (state.spent() + outcome.paid) >= 0.0;
        if counted {
            state.update(graph, &selection.seeds, feedback)?;
        } else {
            state.record_exhausting_round(&selection.seeds, &feedback.observed_costs)?;
        }
        rounds.push(RoundLog {
            t,
            seeds: selection.seeds,
            paid: outcome.paid,
            spread: feedback.realized_spread,
            condition: selection.condition,
            augmented: selection.augmented,
            budget_after: state.budget(),
            counted,
        });
        if !counted {
            exhausted = true;
            break;
        }
    }
    Ok(EpisodeTrace {
        variant: config.variant,
        budget,
        rounds,
        exhausted,
    })
}
