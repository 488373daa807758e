use std::path::PathBuf;
use std::process::ExitCode;

use boim_core::experiment::{self, Experiment, ExperimentConfig};
use boim_core::verify::{self, LibraryBonuses, NegatedTermBonus, VerifyOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "boim", version, about = "Budgeted online influence maximization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every policy of an experiment and write per-round and aggregated CSVs.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (overrides the config).
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        budget: Option<f64>,
        /// Worker threads (overrides BOIM_WORKERS).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the best seed set and λ* of an experiment's instance.
    Oracle {
        #[command(flatten)]
        source: Source,
        /// Per-round expected-cost budget for the constrained λ*.
        #[arg(long)]
        knapsack_budget: Option<f64>,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 100)]
        rebuilds: usize,
        /// Replace the bonus formulas with a broken variant.
        #[arg(long, value_enum)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset: appendix-i or facebook.
    #[arg(long)]
    preset: Option<String>,
    /// Edge-list file for presets that read one.
    #[arg(long, requires = "preset")]
    graph: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    NegatedBonus2,
}

impl Source {
    fn load(&self) -> boim_core::Result<ExperimentConfig> {
        match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path),
            (None, Some(name)) => experiment::preset(name, self.graph.clone()),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

fn run(cli: Cli) -> boim_core::Result<ExitCode> {
    match cli.command {
        Command::Run {
            source,
            output,
            runs,
            budget,
            workers,
        } => {
            let mut config = source.load()?;
            if let Some(r) = runs {
                config.runs = r;
            }
            if let Some(b) = budget {
                config.budget = b;
            }
            if output.is_some() {
                config.output = output;
            }
            let dir = config.output.clone().unwrap_or_else(|| PathBuf::from("boim-out"));
            let exp = Experiment::prepare(config)?;
            let cells = exp.run_all(workers.unwrap_or_else(experiment::worker_count))?;
            let summaries = exp.summarize(&cells);
            exp.write_outputs(&dir, &cells, &summaries)?;
            print!("{}", experiment::summary_table(&exp, &summaries));
            println!("wrote {}", dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { source, knapsack_budget } => {
            let config = source.load()?;
            let (_, truth) = config.build_truth()?;
            let l = truth.lambda_star(knapsack_budget)?;
            println!("S* = {:?}", l.set);
            println!("lambda* = {}", l.value);
            println!("provenance = {}", l.provenance.name());
            if let Some(m) = &l.mixture {
                println!("mixture = {:?} with prob {}, {:?} with prob {}", m.cheap, 1.0 - m.q, m.expensive, m.q);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            seed,
            cases,
            rebuilds,
            inject_fault,
        } => {
            let opts = VerifyOptions { seed, cases, rebuilds };
            let reports = match inject_fault {
                None => verify::run_suites(&opts, &LibraryBonuses)?,
                Some(Fault::NegatedBonus2) => verify::run_suites(&opts, &NegatedTermBonus)?,
            };
            print!("{}", verify::render(&reports));
            Ok(if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
