//! Experiment configuration, presets and multi-run orchestration.
//!
//! A config is a TOML document:
//!
//! ```toml
//! seed = 7            # master seed
//! runs = 10
//! budget = 15000.0
//! max_rounds = 100000 # optional
//! output = "out"      # optional; CSVs are written here
//!
//! [graph]             # kind = complete | path | random | file
//! kind = "complete"
//! n = 10
//!
//! [weights]           # kind = uniform (hi, seed) | explicit (values)
//! kind = "uniform"
//! hi = 0.1
//!
//! [costs]             # kind = degree | uniform (lo, hi, seed) | explicit (values)
//! kind = "uniform"
//! c0 = 1.0
//! noise = 0.0         # clipped-uniform half-width, 0 = deterministic
//!
//! [truth]             # optional
//! replicates = 100000
//!
//! [[policy]]
//! variant = "cucb"    # cucb | cucb1 | cucb4 | cucb5 | cucb_plus | regularized
//! known_costs = true
//! ```
//!
//! Optional policy keys: `epsilon`, `lambda`, `knapsack_budget`, `oracle`
//! (`auto | exact | monte_carlo`), `mc_epsilon`, `mc_floor`, `mc_cap`.
//! Unset seeds of the graph, weight and cost generators derive from the
//! master seed.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::env::{CostNoise, Environment};
use crate::error::{Error, Result};
use crate::evaluation::{
    average_curves, checkpoints, curve_value_at, regret_curve, round_rows, trace_gaps, write_round_csv, GroundTruth,
    LambdaStar, TRUTH_REPLICATES,
};
use crate::graph::{degree_proportional_costs, CostVector, DirectedGraph, WeightVector};
use crate::oracle::{replicate_rng, McSchedule};
use crate::policy::{run_episode, Condition, EpisodeTrace, OracleChoice, PolicyConfig, Variant};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "BOIM_WORKERS";

/// Number of aggregation checkpoints per curve.
pub const CHECKPOINTS: usize = 100;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    Complete { n: usize },
    Path { n: usize },
    Random { n: usize, density: f64, seed: Option<u64> },
    File { path: PathBuf },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightModel {
    Uniform { hi: f64, seed: Option<u64> },
    Explicit { values: Vec<f64> },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CostModel {
    /// `c_i = d_i / max_j d_j`.
    Degree {
        c0: f64,
        #[serde(default)]
        noise: f64,
    },
    /// `c_i ~ U(lo, hi)` drawn once per experiment.
    Uniform {
        c0: f64,
        lo: f64,
        hi: f64,
        seed: Option<u64>,
        #[serde(default)]
        noise: f64,
    },
    Explicit {
        c0: f64,
        values: Vec<f64>,
        #[serde(default)]
        noise: f64,
    },
}

impl CostModel {
    fn noise(&self) -> CostNoise {
        let h = match self {
            CostModel::Degree { noise, .. } | CostModel::Uniform { noise, .. } | CostModel::Explicit { noise, .. } => *noise,
        };
        if h > 0.0 {
            CostNoise::ClippedUniform { half_width: h }
        } else {
            CostNoise::Deterministic
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TruthSettings {
    #[serde(default = "default_truth_replicates")]
    pub replicates: usize,
}

fn default_truth_replicates() -> usize {
    TRUTH_REPLICATES
}

impl Default for TruthSettings {
    fn default() -> Self {
        Self {
            replicates: TRUTH_REPLICATES,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub variant: String,
    #[serde(default)]
    pub known_costs: bool,
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub knapsack_budget: Option<f64>,
    pub oracle: Option<String>,
    pub mc_epsilon: Option<f64>,
    pub mc_floor: Option<usize>,
    pub mc_cap: Option<usize>,
}

impl PolicySpec {
    pub fn new(variant: Variant, known_costs: bool) -> Self {
        Self {
            variant: variant.name().to_string(),
            known_costs,
            epsilon: None,
            lambda: None,
            knapsack_budget: None,
            oracle: None,
            mc_epsilon: None,
            mc_floor: None,
            mc_cap: None,
        }
    }

    /// Policy configuration without its seed.
    pub fn to_config(&self, max_rounds: u64) -> Result<PolicyConfig> {
        let mut c = PolicyConfig::new(Variant::parse(&self.variant)?);
        c.known_costs = self.known_costs;
        if let Some(e) = self.epsilon {
            c.epsilon = e;
        }
        if let Some(l) = self.lambda {
            c.lambda = l;
        }
        c.knapsack_budget = self.knapsack_budget;
        if let Some(o) = &self.oracle {
            c.oracle = match o.as_str() {
                "auto" => OracleChoice::Auto,
                "exact" => OracleChoice::Exact,
                "monte_carlo" => OracleChoice::MonteCarlo,
                other => return Err(Error::Config(format!("unknown oracle {other:?}"))),
            };
        }
        let mut schedule = McSchedule::default();
        if let Some(e) = self.mc_epsilon {
            schedule.epsilon = e;
        }
        if let Some(f) = self.mc_floor {
            schedule.floor = f;
        }
        schedule.cap = self.mc_cap;
        c.schedule = schedule;
        c.max_rounds = max_rounds;
        c.validate()?;
        Ok(c)
    }

    /// Label used in file names and reports.
    pub fn label(&self) -> String {
        match self.lambda {
            Some(l) if self.variant == Variant::Regularized.name() => format!("{}-lambda{}", self.variant, l),
            _ => self.variant.clone(),
        }
    }
}

fn default_max_rounds() -> u64 {
    100_000
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub runs: usize,
    pub budget: f64,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: u64,
    pub output: Option<PathBuf>,
    pub graph: GraphSource,
    pub weights: WeightModel,
    pub costs: CostModel,
    #[serde(default)]
    pub truth: TruthSettings,
    #[serde(rename = "policy")]
    pub policies: Vec<PolicySpec>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config; relative graph paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut config: Self = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let GraphSource::File { path: graph } = &mut config.graph {
            if graph.is_relative() {
                if let Some(dir) = path.parent() {
                    *graph = dir.join(&*graph);
                }
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if !(self.budget > 0.0) {
            return Err(Error::Config(format!("budget must be positive, got {}", self.budget)));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("at least one [[policy]] is required".into()));
        }
        if let GraphSource::File { path } = &self.graph {
            if !path.is_file() {
                return Err(Error::Config(format!("graph file {} does not exist", path.display())));
            }
        }
        for p in &self.policies {
            p.to_config(self.max_rounds)?;
        }
        Ok(())
    }

    /// Seed of an instance generator: the explicit one, else a stream of the master seed.
    fn generator_seed(&self, explicit: Option<u64>, stream: u64) -> u64 {
        explicit.unwrap_or_else(|| replicate_rng(self.seed, u64::MAX - stream).next_u64())
    }

    /// Seed of the ground-truth Monte Carlo sample.
    pub fn truth_seed(&self) -> u64 {
        self.generator_seed(None, 3)
    }

    /// Ground truth of the instance, as used for λ* and regret.
    pub fn build_truth(&self) -> Result<(Environment, GroundTruth)> {
        let env = self.build_environment()?;
        let truth = GroundTruth::new(env.graph(), env.weights(), env.costs(), self.truth.replicates, self.truth_seed())?;
        Ok((env, truth))
    }

    pub fn build_graph(&self) -> Result<DirectedGraph> {
        match &self.graph {
            GraphSource::Complete { n } => DirectedGraph::complete(*n),
            GraphSource::Path { n } => DirectedGraph::path(*n),
            GraphSource::Random { n, density, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.generator_seed(*seed, 0));
                DirectedGraph::random(*n, *density, &mut rng)
            }
            GraphSource::File { path } => {
                let file = fs::File::open(path)?;
                DirectedGraph::load_edge_list(BufReader::new(file))
            }
        }
    }

    pub fn build_environment(&self) -> Result<Environment> {
        let graph = self.build_graph()?;
        let weights = match &self.weights {
            WeightModel::Uniform { hi, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.generator_seed(*seed, 1));
                WeightVector::uniform(graph.edge_count(), *hi, &mut rng)?
            }
            WeightModel::Explicit { values } => WeightVector::for_graph(&graph, values.clone())?,
        };
        let costs = match &self.costs {
            CostModel::Degree { c0, .. } => degree_proportional_costs(&graph, *c0)?,
            CostModel::Uniform { c0, lo, hi, seed, .. } => {
                if !(0.0 <= *lo && lo < hi && *hi <= 1.0) {
                    return Err(Error::Config(format!("uniform costs need 0 <= lo < hi <= 1, got ({lo}, {hi})")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(self.generator_seed(*seed, 2));
                let values = (0..graph.node_count())
                    .map(|_| rand::Rng::gen_range(&mut rng, *lo..*hi))
                    .collect();
                CostVector::new(values, *c0)?
            }
            CostModel::Explicit { c0, values, .. } => CostVector::new(values.clone(), *c0)?,
        };
        Environment::new(graph, weights, costs, self.costs.noise())
    }
}

/// Known presets, by name.
pub const PRESETS: [&str; 2] = ["appendix-i", "facebook"];

/// Complete 10-node graph, `w* ~ U(0, 0.1)`, known costs drawn in `(0, 1)`
/// with `c0* = 1`, BOIM-CUCB against the regularized greedy for
/// `λ = 2, 3, 4`.
pub fn appendix_i_preset() -> ExperimentConfig {
    let mut policies = vec![mc_capped(PolicySpec::new(Variant::Cucb, true))];
    for lambda in [2.0, 3.0, 4.0] {
        let mut p = PolicySpec::new(Variant::Regularized, true);
        p.lambda = Some(lambda);
        policies.push(mc_capped(p));
    }
    ExperimentConfig {
        seed: 2020,
        runs: 10,
        budget: 15_000.0,
        max_rounds: default_max_rounds(),
        output: None,
        graph: GraphSource::Complete { n: 10 },
        weights: WeightModel::Uniform { hi: 0.1, seed: None },
        costs: CostModel::Uniform {
            c0: 1.0,
            lo: 0.0,
            hi: 1.0,
            seed: None,
            noise: 0.0,
        },
        truth: TruthSettings { replicates: 200_000 },
        policies,
    }
}

/// In-round replicate schedule for the small presets: grows with `ln t`
/// from 500 to about 1000 over ten thousand rounds.
pub fn mc_capped(mut p: PolicySpec) -> PolicySpec {
    p.mc_epsilon = Some(0.3);
    p.mc_floor = Some(500);
    p
}

/// Edge-list graph, `w* ~ U(0, 0.1)`, degree costs with `c0* = 1`,
/// BOIM-CUCB against its `cucb+` variant.
pub fn facebook_preset(graph: PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        seed: 2020,
        runs: 10,
        budget: 2_000.0,
        max_rounds: default_max_rounds(),
        output: None,
        graph: GraphSource::File { path: graph },
        weights: WeightModel::Uniform { hi: 0.1, seed: None },
        costs: CostModel::Degree { c0: 1.0, noise: 0.0 },
        truth: TruthSettings::default(),
        policies: vec![
            PolicySpec::new(Variant::Cucb, true),
            PolicySpec::new(Variant::CucbPlus, true),
        ],
    }
}

pub fn preset(name: &str, graph: Option<PathBuf>) -> Result<ExperimentConfig> {
    match name {
        "appendix-i" => Ok(appendix_i_preset()),
        "facebook" => {
            let path = graph.ok_or_else(|| Error::Config("the facebook preset needs an edge-list file".into()))?;
            Ok(facebook_preset(path))
        }
        other => Err(Error::Config(format!("unknown preset {other:?}; known: {}", PRESETS.join(", ")))),
    }
}

/// `(env seed, policy seed)` of one cell of the experiment matrix.
pub fn child_seeds(master: u64, policy: usize, run: usize) -> (u64, u64) {
    let mut rng = replicate_rng(master, ((policy as u64) << 32) | run as u64);
    (rng.next_u64(), rng.next_u64())
}

pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Clone, Debug)]
pub struct CellResult {
    pub policy: usize,
    pub run: usize,
    pub trace: EpisodeTrace,
    pub gaps: Vec<f64>,
    pub curve: Vec<(f64, f64)>,
}

impl CellResult {
    pub fn acceptance_rate(&self) -> Option<f64> {
        let checked: Vec<_> = self
            .trace
            .counted()
            .filter(|r| r.condition != Condition::NotApplicable)
            .collect();
        if checked.is_empty() {
            return None;
        }
        let ok = checked.iter().filter(|r| r.condition == Condition::Accepted).count();
        Some(ok as f64 / checked.len() as f64)
    }
}

#[derive(Clone, Debug)]
pub struct PolicySummary {
    pub label: String,
    pub lambda_star: LambdaStar,
    pub mean_rounds: f64,
    pub mean_reward: f64,
    /// Mean cumulative gap-regret at the checkpoints `B k / 100`.
    pub curve: Vec<(f64, f64)>,
    /// Mean acceptance rate of the candidate check, for bonus variants.
    pub acceptance_rate: Option<f64>,
}

impl PolicySummary {
    /// `R(x) / x` at checkpoint `k` (1-based, out of 100).
    pub fn regret_rate(&self, k: usize) -> f64 {
        let (x, y) = self.curve[k - 1];
        y / x
    }

    pub fn final_regret(&self) -> f64 {
        self.curve.last().map_or(0.0, |c| c.1)
    }
}

pub struct Experiment {
    pub config: ExperimentConfig,
    pub env: Environment,
    pub truth: GroundTruth,
    policies: Vec<PolicyConfig>,
    lambdas: Vec<LambdaStar>,
}

impl Experiment {
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let env = config.build_environment()?;
        let truth = GroundTruth::new(env.graph(), env.weights(), env.costs(), config.truth.replicates, config.truth_seed())?;
        let policies = config
            .policies
            .iter()
            .map(|p| p.to_config(config.max_rounds))
            .collect::<Result<Vec<_>>>()?;
        let plain = truth.lambda_star(None)?;
        let lambdas = policies
            .iter()
            .map(|p| match p.knapsack_budget {
                None => Ok(plain.clone()),
                Some(b) => truth.lambda_star(Some(b)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config,
            env,
            truth,
            policies,
            lambdas,
        })
    }

    pub fn lambda_star(&self, policy: usize) -> &LambdaStar {
        &self.lambdas[policy]
    }

    pub fn policy_config(&self, policy: usize, run: usize) -> (PolicyConfig, u64) {
        let (env_seed, policy_seed) = child_seeds(self.config.seed, policy, run);
        let mut c = self.policies[policy].clone();
        c.seed = policy_seed;
        (c, env_seed)
    }

    /// One cell of the matrix; a pure function of the config and the indices.
    pub fn run_cell(&self, policy: usize, run: usize) -> Result<CellResult> {
        let (config, env_seed) = self.policy_config(policy, run);
        let trace = run_episode(&self.env, &config, self.config.budget, env_seed)?;
        let gaps = trace_gaps(&self.truth, self.lambdas[policy].value, config.epsilon, &trace)?;
        let curve = regret_curve(&trace, &gaps)?;
        Ok(CellResult {
            policy,
            run,
            trace,
            gaps,
            curve,
        })
    }

    /// Every cell, scheduled over `workers` threads.
    pub fn run_all(&self, workers: usize) -> Result<Vec<CellResult>> {
        let cells: Vec<(usize, usize)> = (0..self.policies.len())
            .flat_map(|p| (0..self.config.runs).map(move |r| (p, r)))
            .collect();
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<Option<Result<CellResult>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
        std::thread::scope(|scope| {
            for _ in 0..workers.max(1).min(cells.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&(p, r)) = cells.get(i) else { break };
                    let out = self.run_cell(p, r);
                    results.lock().expect("no worker panics while holding the lock")[i] = Some(out);
                });
            }
        });
        results
            .into_inner()
            .expect("workers have finished")
            .into_iter()
            .map(|r| r.expect("every cell was scheduled"))
            .collect()
    }

    pub fn summarize(&self, cells: &[CellResult]) -> Vec<PolicySummary> {
        let at = checkpoints(self.config.budget, CHECKPOINTS);
        (0..self.policies.len())
            .map(|p| {
                let mine: Vec<&CellResult> = cells.iter().filter(|c| c.policy == p).collect();
                let n = mine.len().max(1) as f64;
                let curves: Vec<Vec<(f64, f64)>> = mine.iter().map(|c| c.curve.clone()).collect();
                let rates: Vec<f64> = mine.iter().filter_map(|c| c.acceptance_rate()).collect();
                PolicySummary {
                    label: self.config.policies[p].label(),
                    lambda_star: self.lambdas[p].clone(),
                    mean_rounds: mine.iter().map(|c| c.trace.counted().count() as f64).sum::<f64>() / n,
                    mean_reward: mine.iter().map(|c| c.trace.reward() as f64).sum::<f64>() / n,
                    curve: average_curves(&curves, &at),
                    acceptance_rate: (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64),
                }
            })
            .collect()
    }

    /// Writes one per-round CSV per cell and the aggregated curve CSV.
    pub fn write_outputs(&self, dir: &Path, cells: &[CellResult], summaries: &[PolicySummary]) -> Result<()> {
        fs::create_dir_all(dir)?;
        for c in cells {
            let label = &summaries[c.policy].label;
            let run_id = format!("{label}-{}", c.run);
            let rows = round_rows(&run_id, &c.trace, &c.gaps)?;
            let file = fs::File::create(dir.join(format!("rounds-p{}-{label}-r{}.csv", c.policy, c.run)))?;
            write_round_csv(file, &rows)?;
        }
        let mut w = csv::Writer::from_path(dir.join("curves.csv"))?;
        w.write_record(["policy", "checkpoint", "budget_consumed", "mean_cumulative_gap"])?;
        for s in summaries {
            for (k, (x, y)) in s.curve.iter().enumerate() {
                w.write_record([s.label.clone(), (k + 1).to_string(), x.to_string(), y.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Plain-text table of the per-policy summaries.
pub fn summary_table(experiment: &Experiment, summaries: &[PolicySummary]) -> String {
    let g = experiment.env.graph();
    let mut out = format!(
        "graph: {} nodes, {} edges; budget {}; {} runs\n",
        g.node_count(),
        g.edge_count(),
        experiment.config.budget,
        experiment.config.runs
    );
    out.push_str(&format!(
        "{:<24} {:>10} {:>12} {:>10} {:>12} {:>14} {:>10}\n",
        "policy", "lambda*", "provenance", "rounds", "reward", "R(B)", "accepted"
    ));
    for s in summaries {
        out.push_str(&format!(
            "{:<24} {:>10.4} {:>12} {:>10.1} {:>12.1} {:>14.3} {:>10}\n",
            s.label,
            s.lambda_star.value,
            s.lambda_star.provenance.name(),
            s.mean_rounds,
            s.mean_reward,
            s.final_regret(),
            s.acceptance_rate.map_or("-".to_string(), |r| format!("{:.3}", r)),
        ));
    }
    out
}

/// Mean cumulative regret at an arbitrary budget level, for ad-hoc checks.
pub fn mean_regret_at(cells: &[CellResult], policy: usize, x: f64) -> f64 {
    let mine: Vec<&CellResult> = cells.iter().filter(|c| c.policy == policy).collect();
    mine.iter().map(|c| curve_value_at(&c.curve, x)).sum::<f64>() / mine.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 3
runs = 1
budget = 0.5
[graph]
kind = "path"
n = 3
[weights]
kind = "explicit"
values = [0.5, 0.5]
[costs]
kind = "explicit"
c0 = 1.0
values = [0.2, 0.3, 0.4]
[[policy]]
variant = "cucb"
"#;

    #[test]
    fn minimal_config_single_round() {
        let config = ExperimentConfig::parse(MINIMAL).unwrap();
        let exp = Experiment::prepare(config).unwrap();
        let cells = exp.run_all(1).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].trace.rounds.len(), 1);
        assert!(cells[0].gaps.is_empty());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse(&MINIMAL.replace("runs = 1", "runs = 0")).is_err());
        assert!(ExperimentConfig::parse(&MINIMAL.replace("variant = \"cucb\"", "variant = \"ucb\"")).is_err());
        assert!(ExperimentConfig::parse(&MINIMAL.replace("n = 3", "n = 3\nsize = 4")).is_err());
        let missing = MINIMAL.replace("kind = \"path\"\nn = 3", "kind = \"file\"\npath = \"/nonexistent/graph.txt\"");
        assert!(ExperimentConfig::parse(&missing).is_err());
    }

    #[test]
    fn child_seeds_are_pure() {
        assert_eq!(child_seeds(5, 1, 2), child_seeds(5, 1, 2));
        assert_ne!(child_seeds(5, 1, 2), child_seeds(5, 2, 1));
        assert_ne!(child_seeds(5, 0, 0), child_seeds(6, 0, 0));
    }

    #[test]
    fn cells_reproduce_independently_of_scheduling() {
        let text = MINIMAL.replace("runs = 1", "runs = 3").replace("budget = 0.5", "budget = 12.0");
        let exp = Experiment::prepare(ExperimentConfig::parse(&text).unwrap()).unwrap();
        let all = exp.run_all(3).unwrap();
        let single = exp.run_cell(0, 2).unwrap();
        assert_eq!(all[2].trace, single.trace);
        assert_eq!(all[2].gaps, single.gaps);
    }

    #[test]
    fn presets_validate() {
        let p = appendix_i_preset();
        p.validate().unwrap();
        let env = p.build_environment().unwrap();
        assert_eq!(env.graph().edge_count(), 90);
        assert!(env.weights().as_slice().iter().all(|&w| (0.0..0.1).contains(&w)));
        assert!(env.costs().nodes().iter().all(|&c| (0.0..1.0).contains(&c)));
        assert!(preset("facebook", None).is_err());
        assert!(preset("nope", None).is_err());
    }
}
