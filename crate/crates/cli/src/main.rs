//! Command-line front end: scenario presets, Monte Carlo experiment
//! runner, stream/partition/matrix file I/O, machine-readable reports.
//!
//! Exit codes: 0 success, 2 usage errors, 1 runtime failures (runtime
//! errors are emitted as single-line JSON on stderr).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;
mod report;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime { kind: &'static str, message: String },
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError::Runtime {
            kind: "runtime",
            message: message.into(),
        }
    }

    /// Core errors raised while validating flag-derived values are usage
    /// errors, not runtime failures.
    pub fn usage_from(e: rawcode_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<rawcode_core::Error> for CliError {
    fn from(e: rawcode_core::Error) -> Self {
        CliError::Runtime {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum System {
    Doubling,
    Bridge,
    Rotation,
}

impl System {
    pub fn name(&self) -> &'static str {
        match self {
            System::Doubling => "doubling",
            System::Bridge => "bridge",
            System::Rotation => "rotation",
        }
    }

    pub fn map(&self) -> Result<rawcode_core::dynamics::IntervalMap, CliError> {
        use rawcode_core::dynamics::IntervalMap;
        Ok(match self {
            System::Doubling => IntervalMap::doubling(),
            System::Bridge => IntervalMap::bridge(),
            System::Rotation => IntervalMap::rotation(64).map_err(CliError::usage_from)?,
        })
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "rawcode",
    version,
    about = "Exact simulation and raw coding of chaotic interval maps: \
             coincidence-window experiments, stochastic baselines, mixing diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for parallel experiments (reports do not depend on
    /// this).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Bernoulli,
    Markov,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Baseline model to realize.
    #[arg(long, value_enum)]
    model: Model,
    /// Symbol probabilities for the Bernoulli model, e.g. 1/2,1/2.
    #[arg(long)]
    probs: Option<String>,
    /// Transition matrix file for the Markov model.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Initial distribution for the Markov model, e.g. 1,0.
    #[arg(long)]
    initial: Option<String>,
    /// Stream length.
    #[arg(long)]
    length: u64,
    /// Number of independent streams.
    #[arg(long, default_value_t = 1)]
    streams: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CodeArgs {
    #[arg(long, value_enum)]
    system: System,
    /// Partition: binary, dyadic:K, bridge:k, or @file.
    #[arg(long, default_value = "binary")]
    partition: String,
    #[arg(long)]
    horizon: u64,
    /// Explicit initial points (repeatable, exact rational).
    #[arg(long = "x0")]
    x0: Vec<String>,
    /// Seeded sampling when no explicit points are given.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of seeded streams.
    #[arg(long, default_value_t = 1)]
    streams: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct RefineArgs {
    #[arg(long, value_enum)]
    system: System,
    #[arg(long, default_value = "binary")]
    partition: String,
    /// Refinement order n (words of length n+1).
    #[arg(long)]
    order: u32,
    /// Override the order cap.
    #[arg(long, default_value_t = rawcode_core::coding::DEFAULT_REFINE_CAP)]
    cap: u32,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CoincideArgs {
    #[arg(long, value_enum)]
    system: System,
    #[arg(long, default_value = "binary")]
    partition: String,
    /// Number of trajectories.
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(2..))]
    n_streams: u32,
    /// Window length.
    #[arg(long = "L", value_parser = clap::value_parser!(u32).range(1..))]
    window: u32,
    #[arg(long)]
    horizon: u64,
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pairwise initial offset ("a/b" or "none"). Rotation pairs default
    /// to the canonical audit offset 2/5; other systems default to
    /// independent sampling.
    #[arg(long)]
    offset: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct BridgeArgs {
    /// Straddling cell half-width exponent: the middle cell is
    /// [1/2 - 2^-k, 1/2 + 2^-k).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    #[arg(long = "L", value_parser = clap::value_parser!(u32).range(1..))]
    window: u32,
    /// Number of cross-component pairs.
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    horizon: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dyadic order of the 1/2-aligned comparison bins in the Ulam report.
    #[arg(long, default_value_t = 3)]
    aligned_bins: u32,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MixingMode {
    Exact,
    Mc,
    Auto,
}

#[derive(Args, Debug)]
pub struct MixingArgs {
    #[arg(long, value_enum)]
    system: System,
    /// First set, comma-separated lo:hi rational intervals.
    #[arg(long = "set-a", default_value = "0:1/2")]
    set_a: String,
    /// Second set.
    #[arg(long = "set-b", default_value = "0:1/2")]
    set_b: String,
    /// Number of correlation terms (k = 0..terms-1).
    #[arg(long)]
    terms: u64,
    #[arg(long, value_enum, default_value = "exact")]
    mode: MixingMode,
    /// Samples per term for Monte Carlo modes.
    #[arg(long, default_value_t = 100_000)]
    mc_samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct UlamArgs {
    #[arg(long, value_enum)]
    system: System,
    /// Bin partition: binary, dyadic:K, bridge:k, or @file.
    #[arg(long, default_value = "dyadic:3")]
    bins: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// Stream files to audit.
    #[arg(required = true)]
    streams: Vec<PathBuf>,
    /// Window length for the coincidence count.
    #[arg(long = "L", value_parser = clap::value_parser!(u32).range(1..))]
    window: u32,
    /// Alphabet size of the streams.
    #[arg(long)]
    alphabet: u32,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Per-step success probability for the run-waiting oracle.
    #[arg(long = "per-step", alias = "q")]
    per_step: Option<String>,
    /// Run length for the run-waiting oracle.
    #[arg(long = "L")]
    window: Option<u32>,
    /// Truncation horizon for the exact pmf.
    #[arg(long, default_value_t = 1_000)]
    horizon: u64,
    /// Symbol probabilities for the word-match oracle.
    #[arg(long)]
    probs: Option<String>,
    /// Word for the word-match oracle, e.g. 0,1,0,1,1.
    #[arg(long)]
    word: Option<String>,
    /// Report the per-step coincidence rate of this many copies.
    #[arg(long)]
    copies: Option<u32>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate baseline Bernoulli/Markov symbol streams.
    Simulate(SimulateArgs),
    /// Code trajectories of a system through a partition.
    Code(CodeArgs),
    /// Enumerate refinement cylinders with exact supports and measures.
    Refine(RefineArgs),
    /// Monte Carlo coincidence-window experiment.
    Coincide(CoincideArgs),
    /// Cross-component bridge scenario with quadrant audit and Ulam blocks.
    Bridge(BridgeArgs),
    /// Correlation-defect series and Cesaro averages.
    Mixing(MixingArgs),
    /// Exact Ulam matrix and its block structure.
    Ulam(UlamArgs),
    /// Agreement statistics of external symbol streams against an
    /// independence baseline.
    Audit(AuditArgs),
    /// Direct access to the run-waiting and word-match oracles.
    Oracle(OracleArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Code(args) => commands::code(args),
        Command::Refine(args) => commands::refine(args),
        Command::Coincide(args) => commands::coincide(args),
        Command::Bridge(args) => commands::bridge(args),
        Command::Mixing(args) => commands::mixing(args),
        Command::Ulam(args) => commands::ulam(args),
        Command::Audit(args) => commands::audit(args),
        Command::Oracle(args) => commands::oracle(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match &cli.command {
        Command::Simulate(a) => a.out.threads,
        Command::Code(a) => a.out.threads,
        Command::Refine(a) => a.out.threads,
        Command::Coincide(a) => a.out.threads,
        Command::Bridge(a) => a.out.threads,
        Command::Mixing(a) => a.out.threads,
        Command::Ulam(a) => a.out.threads,
        Command::Audit(a) => a.out.threads,
        Command::Oracle(a) => a.out.threads,
    };
    let result = match threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build();
            match pool {
                Ok(pool) => pool.install(|| run(cli)),
                Err(e) => Err(CliError::runtime(format!("cannot build thread pool: {e}"))),
            }
        }
        _ => run(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime { kind, message }) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": kind, "message": message })
            );
            ExitCode::FAILURE
        }
    }
}
