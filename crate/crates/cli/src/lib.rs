//! Command-line front end: reports, verification sweeps and the word
//! calculator. [`run`] does all the work and returns the exit code with the
//! captured output, so the binary is a thin wrapper.

use clap::{Args, Parser, Subcommand};

mod catalog;
mod report;
mod verify;
mod words;

pub use report::{Entry, SCHEMA_VERSION};

/// Exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    fn input(msg: impl std::fmt::Display) -> Self {
        CliError::Input(msg.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "serrekit", version, about = "Serre functors of residual categories, numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Serre dimensions, geometricity and lattice checks for complete intersections.
    Report(ReportArgs),
    /// Run an identity battery over a family.
    Verify(VerifyArgs),
    /// Normalize functor words and compare them in lattice models.
    Words(WordsArgs),
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Ambient P^N.
    #[arg(long, conflicts_with = "weights")]
    pn: Option<usize>,
    /// Weights of the ambient weighted projective space.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<i64>>,
    /// Position of the split degree in the descending degree list.
    #[arg(long)]
    split: Option<usize>,
    /// JSON lines file of entries, `-` for stdin.
    #[arg(long, conflicts_with_all = ["pn", "weights"])]
    batch: Option<String>,
    /// Largest ambient dimension for which lattice checks run.
    #[arg(long, default_value_t = 12)]
    max_n: usize,
    #[arg(long)]
    json: bool,
    /// Print the table of known simple residual categories (static data).
    #[arg(long)]
    catalog: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 9)]
    max_n: usize,
    #[arg(long, default_value_t = 3)]
    max_k: usize,
    /// Degree d hypersurfaces in P^n for 2 <= d <= n <= max-n.
    #[arg(long)]
    hypersurfaces: bool,
    /// Divisors of odd-dimensional quadrics with spinors.
    #[arg(long)]
    quadric_divisors: bool,
    /// Refined residual of (2, n-2) intersections.
    #[arg(long)]
    refined: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct WordsArgs {
    expr: String,
    /// Second word; prints an equality verdict.
    other: Option<String>,
    /// Model spec such as `ci:P5:2,3` or `quadric:5:3`; repeatable.
    #[arg(long)]
    model: Vec<String>,
    /// Source category (C, D, R_C, R_D).
    #[arg(long)]
    context: Option<String>,
    /// Print the evaluated matrix in each model.
    #[arg(long)]
    emit_matrix: bool,
    #[arg(long)]
    json: bool,
}

/// Exit code plus what would have gone to stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(e: CliError) -> Self {
        Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

/// Runs the CLI on `args` (program name first).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = match cli.command {
        Command::Report(a) => report::run(&a),
        Command::Verify(a) => verify::run(&a),
        Command::Words(a) => words::run(&a),
    };
    result.unwrap_or_else(Outcome::input_error)
}
