//! `gw`: stationary states, scattering, comfortability sweeps and
//! verification for Grover walks on graphs with tails.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input file, graph, or argument.
    #[error("{0}")]
    Input(String),
    #[error("solver failure: {0}")]
    Solver(#[from] gwalk_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Solver(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Graph JSON file or builtin `complete:N:L`.
    #[arg(long)]
    pub graph: Option<String>,
    /// Inflow amplitudes (`re+imj` or `re,im`), one per boundary vertex,
    /// separated by `;` or repeated; defaults to e₁.
    #[arg(long, allow_hyphen_values = true)]
    pub inflow: Vec<String>,
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Iteration tolerance (sup-norm step size).
    #[arg(long, default_value_t = gwalk_core::walk::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = gwalk_core::walk::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct Single {
    #[command(flatten)]
    pub common: Common,
    /// Frequency angle: a number, `pi`, `-pi`, `pi/k`, `a*pi` or `±theta_star`.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-arc stationary state φ_z.
    Stationary {
        #[command(flatten)]
        single: Single,
        /// Use the time-iteration oracle instead of the direct solver.
        #[arg(long)]
        iterate: bool,
    },
    /// Scattering matrix S_z.
    Scatter(Single),
    /// Comfortability E(θ) with its quadratic-form cross-check.
    Comfort(Single),
    /// Comfortability and transmitting rates over a θ grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated angles or a linspace `start:end:count`.
        #[arg(long, allow_hyphen_values = true)]
        thetas: String,
    },
    /// Property suite; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// One of oracle, unitarity, pm1, singular, complete, all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Complete-graph sizes, e.g. `4..6` or `5`.
        #[arg(long = "N")]
        sizes: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random graphs per suite.
        #[arg(long)]
        graphs: Option<usize>,
    },
}

#[derive(Debug, Parser)]
#[command(name = "gw", version, about = "Grover walks on graphs with tails")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Stationary { single, iterate } => commands::stationary(&single, iterate),
        Command::Scatter(single) => commands::scatter(&single),
        Command::Comfort(single) => commands::comfort(&single),
        Command::Sweep { common, thetas } => commands::sweep(&common, &thetas),
        Command::Verify {
            common,
            suite,
            sizes,
            seed,
            graphs,
        } => commands::verify(&common, &suite, sizes.as_deref(), seed, graphs),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
