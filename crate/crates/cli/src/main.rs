//! `schursample`: sample spanning trees, estimate effective resistances,
//! validate samples and compute approximate Schur complements from the
//! command line.

mod commands;
mod input;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use schursample_core::{ApproxConfig, EpsMode, Error};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Io(String),
    UnknownLabel(u64),
    Core(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::UnknownLabel(l) => write!(f, "vertex {l} does not occur in the graph"),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::UnknownLabel(_) => 5,
            CliError::Core(e) => match e {
                Error::Disconnected => 3,
                Error::BadPair { .. } | Error::UnknownVertex(_) => 5,
                Error::EmptyInput
                | Error::NonPositiveWeight { .. }
                | Error::SelfLoopInput { .. }
                | Error::InvalidParameter(_)
                | Error::EmptyKeep
                | Error::TooFewVertices { .. }
                | Error::SameVertex(_) => 2,
                _ => 4,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "schursample", version, about = "Spanning tree sampling and effective resistances via Schur complements")]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "SCHURSAMPLE_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample spanning trees; one JSON line per tree.
    Sample(SampleArgs),
    /// Estimate effective resistances for a list of vertex pairs.
    Reff(ReffArgs),
    /// Test sampled trees against the exact distribution and marginals.
    Validate(ValidateArgs),
    /// Run the sampler on generated graphs and report recursion statistics.
    Bench(BenchArgs),
    /// Approximate Schur complement onto a vertex subset, as a graph file.
    Schur(SchurArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EpsModeArg {
    Auto,
    Sparse,
    Dense,
    Exact,
}

impl From<EpsModeArg> for EpsMode {
    fn from(m: EpsModeArg) -> Self {
        match m {
            EpsModeArg::Auto => EpsMode::Auto,
            EpsModeArg::Sparse => EpsMode::Sparse,
            EpsModeArg::Dense => EpsMode::Dense,
            EpsModeArg::Exact => EpsMode::Exact,
        }
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

#[derive(Args, Clone)]
struct SeedArg {
    /// RNG seed (decimal or 0x-prefixed hex).
    #[arg(long, env = "SCHURSAMPLE_SEED", default_value = "0xC0FFEE", value_parser = parse_seed)]
    seed: u64,
}

#[derive(Args, Clone)]
struct ConstantArgs {
    /// Sparsifier sample constant.
    #[arg(long, env = "SCHURSAMPLE_C_SP", default_value_t = 16.0)]
    c_sp: f64,
    /// Leverage sketch dimension constant.
    #[arg(long, env = "SCHURSAMPLE_C_JL", default_value_t = 48.0)]
    c_jl: f64,
    /// Largest graph whose leverage scores are computed exactly.
    #[arg(long, env = "SCHURSAMPLE_EXACT_LEVERAGE_MAX_N", default_value_t = 64)]
    exact_leverage_max_n: usize,
}

impl ConstantArgs {
    fn config(&self) -> ApproxConfig {
        ApproxConfig {
            c_jl: self.c_jl,
            c_sp: self.c_sp,
            exact_leverage_max_n: self.exact_leverage_max_n,
        }
    }
}

#[derive(Args, Clone)]
struct OutputArg {
    /// Write to this file instead of stdout.
    #[arg(short, long, env = "SCHURSAMPLE_OUTPUT")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Graph file.
    graph: PathBuf,
    /// Number of trees.
    #[arg(long, env = "SCHURSAMPLE_TREES", default_value_t = 1)]
    trees: u64,
    /// Failure probability budget.
    #[arg(long, env = "SCHURSAMPLE_DELTA", default_value_t = 1e-3)]
    delta: f64,
    #[arg(long, env = "SCHURSAMPLE_EPS_MODE", value_enum, default_value = "auto")]
    eps_mode: EpsModeArg,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    constants: ConstantArgs,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct ReffArgs {
    /// Graph file.
    graph: PathBuf,
    /// Pair file, one `u v` per line.
    pairs: PathBuf,
    /// Multiplicative accuracy.
    #[arg(long, env = "SCHURSAMPLE_EPS", default_value_t = 0.1)]
    eps: f64,
    /// Use exact Schur complements.
    #[arg(long)]
    exact: bool,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    constants: ConstantArgs,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct ValidateArgs {
    /// Graph file.
    graph: PathBuf,
    /// Trees as written by `sample` (`-` for stdin).
    #[arg(default_value = "-")]
    trees: PathBuf,
    /// Significance level of the distribution test.
    #[arg(long, env = "SCHURSAMPLE_ALPHA", default_value_t = 1e-3)]
    alpha: f64,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct BenchArgs {
    /// Vertex counts of the generated graphs.
    #[arg(long, value_delimiter = ',', default_value = "16,32")]
    sizes: Vec<usize>,
    /// Edges per vertex in generated graphs.
    #[arg(long, default_value_t = 3)]
    density: usize,
    /// Use this graph file instead of generated graphs.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Trees per graph and mode.
    #[arg(long, env = "SCHURSAMPLE_TREES", default_value_t = 4)]
    trees: u64,
    #[arg(long, env = "SCHURSAMPLE_DELTA", default_value_t = 1e-3)]
    delta: f64,
    /// Include wall-clock times (makes the report nondeterministic).
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    constants: ConstantArgs,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Args)]
struct SchurArgs {
    /// Graph file.
    graph: PathBuf,
    /// Vertices to keep, one label per line.
    keep: PathBuf,
    /// Spectral accuracy, at most 0.5.
    #[arg(long, env = "SCHURSAMPLE_EPS", default_value_t = 0.25)]
    eps: f64,
    #[arg(long, env = "SCHURSAMPLE_DELTA", default_value_t = 0.01)]
    delta: f64,
    /// Exact Schur complement.
    #[arg(long)]
    exact: bool,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    constants: ConstantArgs,
    #[command(flatten)]
    output: OutputArg,
}

fn emit(output: &OutputArg, text: &str) -> Result<(), CliError> {
    match &output.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Core(Error::Internal(e.to_string())))?;
    }
    let (output, text, ok) = match cli.command {
        Command::Sample(a) => {
            let text = commands::sample(&a.graph, a.trees, a.delta, a.eps_mode.into(), a.seed.seed, a.constants.config())?;
            (a.output, text, true)
        }
        Command::Reff(a) => {
            let text = commands::reff(&a.graph, &a.pairs, a.eps, a.exact, a.seed.seed, a.constants.config())?;
            (a.output, text, true)
        }
        Command::Validate(a) => {
            let (text, pass) = commands::validate(&a.graph, &a.trees, a.alpha)?;
            (a.output, text, pass)
        }
        Command::Bench(a) => {
            let opts = commands::BenchOptions {
                sizes: a.sizes,
                density: a.density,
                graph: a.graph,
                trees: a.trees,
                delta: a.delta,
                timings: a.timings,
                seed: a.seed.seed,
                approx: a.constants.config(),
            };
            (a.output, commands::bench(&opts)?, true)
        }
        Command::Schur(a) => {
            let text = commands::schur(&a.graph, &a.keep, a.eps, a.delta, a.exact, a.seed.seed, a.constants.config())?;
            (a.output, text, true)
        }
    };
    emit(&output, &text)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("schursample: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
