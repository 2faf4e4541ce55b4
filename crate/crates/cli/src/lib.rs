//! Command-line driver: problem ingestion, subcommands and reports.

pub mod commands;
pub mod error;
pub mod expr;
pub mod output;
pub mod presets;
pub mod problem;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::CliError;
use problem::{NormChoice, Overrides};

#[derive(Debug, Parser)]
#[command(
    name = "randfix",
    version,
    about = "Random fixed points of contractive random operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve T(ω, x) = x at every sampled ω.
    Solve(RunArgs),
    /// Check one contractive condition with given coefficients at every ω.
    CheckContraction(RunArgs),
    /// Test every condition kind at every ω.
    Classify(RunArgs),
    /// Evaluate the Hammerstein feasibility inequality at every ω.
    Feasibility(RunArgs),
    /// Solve a stochastic Hammerstein equation.
    Hammerstein(RunArgs),
    /// Time repeated solves of a problem.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Problem document (JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Named problem; fields in --input override it.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of sampled outcomes ω.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Quadrature nodes for Hammerstein problems.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Solve even where the feasibility inequality fails.
    #[arg(long)]
    pub force: bool,
    #[arg(long, value_enum)]
    pub norm: Option<NormChoice>,
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Add one column per ω to solution.csv.
    #[arg(long)]
    pub per_omega: bool,
}

impl RunArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            n_samples: self.samples,
            tol: self.tol,
            max_iter: self.max_iter,
            grid_m: self.grid,
            norm: self.norm,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Timed repetitions.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let threads = match &cli.command {
        Command::Bench(b) => b.run.threads,
        Command::Solve(a)
        | Command::CheckContraction(a)
        | Command::Classify(a)
        | Command::Feasibility(a)
        | Command::Hammerstein(a) => a.threads,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return error::EXIT_VALIDATION;
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return error::EXIT_FAILURE;
        }
    };
    match pool.install(|| commands::dispatch(&cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
