// `!(x > 0.0)` is used on purpose so NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod pointfile;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypercoreset::sampling::Generator;

use crate::report::RunReport;

/// Coresets for farthest-point queries in the Poincaré ball.
///
/// Exit status: 0 ok, 1 usage, 2 input parse error, 3 guarantee violation.
/// HYPERCORESET_THREADS bounds the number of worker threads.
#[derive(Parser, Debug)]
#[command(name = "hypercoreset", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a seeded random point file.
    Gen(GenArgs),
    /// Build a coreset and optionally store it next to the point file.
    Build(BuildArgs),
    /// Answer farthest-point queries read from a second point file.
    Query(QueryArgs),
    /// Approximate diameter.
    Diameter(SolveArgs),
    /// Approximate center and radius.
    Center(SolveArgs),
    /// Approximate maximum spanning tree.
    Mst(SolveArgs),
    /// Approximate farthest pair between two point files.
    Bichromatic(BichromaticArgs),
    /// Run seeded numeric checks.
    Validate(ValidateArgs),
    /// Time builds and queries over a matrix of sizes.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// uniform-ball, clusters, antipodal or geodesic-line
    generator: Generator,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Largest hyperbolic distance from the origin.
    #[arg(long, default_value_t = 5.0)]
    radius: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Point file to write; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Common {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compare against the exact oracle and fail on a violated guarantee.
    #[arg(long)]
    check: bool,
    /// Run quadratic oracles above the default size cap.
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct BuildArgs {
    points: PathBuf,
    #[arg(long, value_parser = parse_eps)]
    eps: f64,
    /// Store the coreset as JSON at this path.
    #[arg(long)]
    coreset: Option<PathBuf>,
    /// Seed for the extra random queries used by --check.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct QueryArgs {
    points: PathBuf,
    queries: PathBuf,
    /// Required unless --coreset is given.
    #[arg(long, value_parser = parse_eps)]
    eps: Option<f64>,
    /// Coreset stored by `build --coreset`.
    #[arg(long)]
    coreset: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SolveArgs {
    points: PathBuf,
    #[arg(long, value_parser = parse_eps)]
    eps: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct BichromaticArgs {
    red: PathBuf,
    blue: PathBuf,
    #[arg(long, value_parser = parse_eps)]
    eps: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Core,
    Lemmas,
    Coreset,
    All,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random trials per check; 0 runs nothing.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Largest hyperbolic radius of sampled points (at most 8 for the
    /// isometry check).
    #[arg(long, default_value_t = 28.0)]
    radius: f64,
    /// Points per coreset instance.
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    dim: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_eps, default_value = "0.5,0.25,0.1")]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "uniform-ball")]
    generator: Generator,
    #[arg(long, default_value_t = 15.0)]
    radius: f64,
    /// Random queries timed per configuration.
    #[arg(long, default_value_t = 1000)]
    queries: usize,
    /// Builds per configuration; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    /// CSV file for the per-configuration rows.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_eps(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1)"))
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    /// A checked guarantee failed; the report is still written.
    Violation(Box<RunReport>),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Violation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Violation(r) => write!(f, "guarantee violated: {} failing checks", r.violations()),
        }
    }
}

impl From<hypercoreset::Error> for CliError {
    fn from(e: hypercoreset::Error) -> Self {
        match e {
            hypercoreset::Error::DimensionMismatch { .. } => CliError::Parse(e.to_string()),
            hypercoreset::Error::TooLarge { .. } => CliError::Usage(format!("{e}; pass --force to run anyway")),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("HYPERCORESET_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("HYPERCORESET_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Build(a) => commands::build(a),
        Command::Query(a) => commands::query(a),
        Command::Diameter(a) => commands::diameter(a),
        Command::Center(a) => commands::center(a),
        Command::Mst(a) => commands::mst(a),
        Command::Bichromatic(a) => commands::bichromatic(a),
        Command::Validate(a) => commands::validate(a),
        Command::Bench(a) => commands::bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
