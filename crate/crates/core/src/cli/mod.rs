//! Command-line front end.
//!
//! [`run`] parses arguments, executes one subcommand and returns what would
//! be printed together with the exit code, so it can be driven from tests.
//! The primary output is written (to `--out` or stdout) only on exit code 0.

mod commands;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::curvature::{CurvatureError, Dimension};
use crate::graph::{GraphError, WeightMode};
use crate::semigroup::SemigroupError;
use crate::verify::VerifyError;

/// Exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const NUMERICAL: i32 = 1;
    pub const BAD_INPUT: i32 = 2;
    pub const CD_FAILS: i32 = 3;
    pub const INCONSISTENT: i32 = 4;
    pub const PRECONDITION: i32 = 5;
}

const DEFAULT_TIMES: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 5.0, 20.0];

const AFTER_HELP: &str = "\
Generator specs (--gen) use `family:param1:param2`:
  path:N  cycle:N  complete:N  star:LEAVES  hypercube:D
  torus:D:SIDE  tree:DEGREE:DEPTH
Generated graphs default to --mode physical.

Exit codes: 0 ok, 1 numerical failure, 2 bad input, 3 CD(K,n) fails,
4 internal inconsistency, 5 curvature precondition fails.";

#[derive(Parser, Debug)]
#[command(
    name = "gammacd",
    version,
    about = "Gamma-calculus, CD(K,n) curvature and heat semigroups on weighted graphs",
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated graph as JSON, TSV (by --out extension) or CSV.
    Gen(Common),
    /// Size, degree and measure statistics.
    Info(Common),
    /// Maximal CD(K,n) constant at every vertex.
    Curvature(Common),
    /// Check CD(K,n) at every vertex for a given --K.
    CdCheck(Common),
    /// Semigroup gradient inequalities against the curvature sign.
    SemigroupVerify(Common),
    /// Gradient decay 2t·Γ(P_t f) ≤ ‖f‖²_∞ on a CD(0,∞) graph.
    LiouvilleDemo(LiouvilleArgs),
    /// Intrinsic-metric cutoffs η_k and their gradient bounds.
    CutoffCheck(CutoffArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Graph file (.json, or .tsv/.txt/.edges edge list).
    #[arg(long, value_name = "FILE", conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Generator spec, e.g. `cycle:8` or `torus:2:16`.
    #[arg(long, value_name = "SPEC")]
    gen: Option<String>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<WeightMode>,
    /// Dimension parameter: a positive real or `inf`.
    #[arg(long, default_value = "inf", value_parser = parse_dim)]
    dim: Dimension,
    /// Curvature lower bound for cd-check.
    #[arg(long = "K", value_name = "K", allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Comma-separated positive times.
    #[arg(long, value_delimiter = ',', value_name = "T1,T2,...")]
    times: Option<Vec<f64>>,
    /// Number of random test functions.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: hardware parallelism).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct LiouvilleArgs {
    #[command(flatten)]
    common: Common,
    /// Use the constant function with this value instead of a random one.
    #[arg(long, allow_hyphen_values = true)]
    constant: Option<f64>,
    /// Write `<PREFIX>.gamma.dat` and `<PREFIX>.scaled.dat`.
    #[arg(long, value_name = "PREFIX")]
    plot_prefix: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CutoffArgs {
    #[command(flatten)]
    common: Common,
    /// Base vertex (label, or index when no label matches).
    #[arg(long)]
    base: Option<String>,
    #[arg(long, default_value_t = 20)]
    k_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_mode(s: &str) -> Result<WeightMode, String> {
    s.parse().map_err(|e: GraphError| e.to_string())
}

fn parse_dim(s: &str) -> Result<Dimension, String> {
    s.parse().map_err(|e: CurvatureError| e.to_string())
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Gen(c)
            | Command::Info(c)
            | Command::Curvature(c)
            | Command::CdCheck(c)
            | Command::SemigroupVerify(c) => c,
            Command::LiouvilleDemo(a) => &a.common,
            Command::CutoffCheck(a) => &a.common,
        }
    }
}

#[derive(Debug)]
enum CliError {
    BadInput(String),
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::BadInput(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::BadInput(_) => exit::BAD_INPUT,
            CliError::Numerical(_) => exit::NUMERICAL,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl From<CurvatureError> for CliError {
    fn from(e: CurvatureError) -> Self {
        match e {
            CurvatureError::IsolatedVertex(_) | CurvatureError::InvalidDimension(_) => {
                CliError::BadInput(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SemigroupError> for CliError {
    fn from(e: SemigroupError) -> Self {
        match e {
            SemigroupError::NegativeTime(_) => CliError::BadInput(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Semigroup(e) => e.into(),
            VerifyError::Curvature(e) => e.into(),
            VerifyError::SolverFailure(_) => CliError::Numerical(e.to_string()),
            _ => CliError::BadInput(e.to_string()),
        }
    }
}

/// What a command produced before anything is written.
struct Report {
    code: i32,
    body: String,
    diagnostics: String,
    files: Vec<(PathBuf, String)>,
}

impl Report {
    fn ok(body: String) -> Self {
        Report { code: exit::OK, body, diagnostics: String::new(), files: Vec::new() }
    }

    fn failed(code: i32, diagnostics: String) -> Self {
        Report { code, body: String::new(), diagnostics, files: Vec::new() }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command; `args` includes the program name.
pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if e.use_stderr() {
                Invocation { code, stdout: String::new(), stderr: text }
            } else {
                Invocation { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let common = cli.command.common().clone();
    let report = match common.threads {
        Some(0) => Err(CliError::BadInput("--threads must be at least 1".into())),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(CliError::Numerical(e.to_string())),
        },
        None => dispatch(&cli.command),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => Report::failed(e.code(), format!("error: {e}\n")),
    };
    finish(report, common.out.as_deref())
}

fn finish(report: Report, out: Option<&std::path::Path>) -> Invocation {
    let mut stderr = report.diagnostics;
    if report.code != exit::OK {
        return Invocation { code: report.code, stdout: String::new(), stderr };
    }
    let mut stdout = String::new();
    let mut writes: Vec<(PathBuf, String)> = report.files;
    match out {
        Some(path) => writes.insert(0, (path.to_path_buf(), report.body)),
        None => stdout = report.body,
    }
    for (path, text) in &writes {
        if let Err(e) = fs::write(path, text) {
            stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
            return Invocation { code: exit::BAD_INPUT, stdout: String::new(), stderr };
        }
    }
    Invocation { code: exit::OK, stdout, stderr }
}

fn dispatch(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Gen(c) => commands::gen(c),
        Command::Info(c) => commands::info(c),
        Command::Curvature(c) => commands::curvature(c),
        Command::CdCheck(c) => commands::cd_check(c),
        Command::SemigroupVerify(c) => commands::semigroup_verify(c),
        Command::LiouvilleDemo(a) => commands::liouville_demo(a),
        Command::CutoffCheck(a) => commands::cutoff_check(a),
    }
}

/// Process entry point: runs [`run`] on the real arguments and prints.
pub fn main() -> i32 {
    let result = run(std::env::args_os());
    print!("{}", result.stdout);
    eprint!("{}", result.stderr);
    result.code
}
