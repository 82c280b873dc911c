//! `cavity`: command-line front end for the cavity-core toolkit.
//!
//! Every subcommand writes its primary output to `-o PATH` and a JSON run
//! manifest to `PATH.manifest.json`. Exit status is 0 on success, 1 when the
//! computation itself fails (an uncolorable instance, a malformed input
//! file, an I/O error) and 2 on bad arguments.

mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// The run completed but reports failure; the message is already on disk.
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cavity", version, about = "Cavity-method experiments on sparse random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a random graph and write it as an edge list.
    GraphGen(GraphGenArgs),
    /// Sweep the Bethe cavity magnetization over a βJ grid (CSV).
    Bethe(BetheArgs),
    /// Ensemble average of the optimal assignment cost (CSV).
    MatchingEnsemble(MatchingArgs),
    /// Warning propagation on a graph (JSON).
    WpRun(WpArgs),
    /// Survey propagation on a graph (JSON).
    SpRun(SpArgs),
    /// Color a graph by survey-guided decimation (JSON).
    Color(ColorArgs),
    /// Complexity curve and thresholds by population dynamics (CSV).
    ComplexityScan(ScanArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    /// Exactly round(z n / 2) distinct edges.
    PoissonM,
    /// Each pair independently with probability z / (n - 1).
    Gnp,
    /// Every node of degree z.
    Regular,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct GraphGenArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Mean degree.
    #[arg(long)]
    pub z: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct BetheArgs {
    /// Coordination number.
    #[arg(long)]
    pub z: usize,
    /// `start:stop:step`.
    #[arg(long = "betaJ-grid", value_name = "START:STOP:STEP")]
    pub beta_j_grid: String,
    #[arg(long, default_value_t = cavity_core::bethe::DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistArg {
    Exponential,
    /// Density 1 - A x on [0, 1] plus uniform mass A/2 on [1, 2].
    UniformLinear,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct MatchingArgs {
    /// One or more sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_enum, default_value = "exponential")]
    pub dist: DistArg,
    /// Slope parameter of the uniform-linear law.
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    #[arg(long)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WpInitArg {
    Random,
    Coloring,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct WpArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub q: usize,
    #[arg(long, value_enum, default_value = "random")]
    pub init: WpInitArg,
    /// `node color` lines, required with `--init coloring`.
    #[arg(long)]
    pub coloring: Option<PathBuf>,
    #[arg(long, default_value_t = cavity_core::coloring::DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct SpArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub q: usize,
    #[arg(long, default_value_t = 0.2)]
    pub damping: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_sweeps: usize,
    /// Bins of the node bias histogram.
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct ColorArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the coloring as `node color` lines.
    #[arg(long)]
    pub coloring_out: Option<PathBuf>,
    /// Local-search steps per residual node.
    #[arg(long, default_value_t = 1000)]
    pub local_search_factor: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    #[arg(long)]
    pub z_min: f64,
    #[arg(long)]
    pub z_max: f64,
    #[arg(long)]
    pub step: f64,
    /// Population size.
    #[arg(short = 'S', long = "population", default_value_t = 100_000)]
    pub population: usize,
    /// Equilibration sweeps per grid point.
    #[arg(long, default_value_t = 300)]
    pub sweeps: usize,
    /// Monte Carlo samples for each of the two log terms.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 3)]
    pub bisections: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

/// A seed from the clock when none was given; it is recorded either way.
pub fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
