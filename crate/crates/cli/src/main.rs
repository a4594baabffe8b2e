//! `lowrank`: command-line front end for low-rank optimization with convex
//! constraints.
//!
//! Exit codes: 0 converged with a tight certificate, 2 converged but not
//! tight, 3 iteration limit reached, 4 invalid input, 1 any other failure.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lowrank_core::{DrConfig, DEFAULT_RANK_TOL};

pub const EXIT_INPUT: u8 = 4;
pub const EXIT_FAILURE: u8 = 1;

#[derive(Parser)]
#[command(name = "lowrank", version, about = "Low-rank optimization with convex constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Frobenius, truncated and low-rank inducing norms of a matrix.
    Norms(NormsArgs),
    /// Evaluate the matrix prox of the low-rank inducing norm or its square.
    Prox(ProxArgs),
    /// Complete a partially observed matrix.
    Complete(CompleteArgs),
    /// Approximate a matrix by a low-rank matrix with entry constraints.
    Approx(ApproxArgs),
    /// Low-rank Hankel approximation of an impulse response.
    Hankel(HankelArgs),
}

#[derive(Args)]
struct NormsArgs {
    /// Matrix file: one row per line, comma-separated entries.
    matrix: PathBuf,
    #[arg(short, long)]
    rank: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    /// `γ‖·‖_{r*}`
    Norm,
    /// `γ/2‖·‖²_{r*}`
    Squared,
}

#[derive(Args)]
struct ProxArgs {
    matrix: PathBuf,
    #[arg(short, long, value_enum, default_value = "norm")]
    kind: KindArg,
    #[arg(short, long)]
    rank: usize,
    #[arg(short, long, default_value_t = 1.0)]
    gamma: f64,
    /// Verify the Moreau decomposition of the result (reported on stderr).
    #[arg(long)]
    check: bool,
    /// Write the result here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Solver knobs shared by every solve command.
#[derive(Args)]
struct SolverArgs {
    /// Prox step size.
    #[arg(long, default_value_t = DrConfig::default().gamma)]
    gamma: f64,
    /// Relaxation parameter in (0, 2).
    #[arg(long, default_value_t = DrConfig::default().lambda)]
    lambda: f64,
    /// Stop when the fixed-point residual falls to this value.
    #[arg(long, default_value_t = DrConfig::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = DrConfig::default().max_iter)]
    max_iter: usize,
    /// Relative singular value threshold for the numerical rank.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    /// Write `iteration, residual, objective` rows (tab separated) here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Objective logging interval for the trace.
    #[arg(long, default_value_t = 1)]
    log_every: usize,
    /// Verify that the solution satisfies the constraints.
    #[arg(long)]
    check: bool,
    /// Write the solution matrix here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

impl SolverArgs {
    fn config(&self) -> DrConfig {
        DrConfig {
            gamma: self.gamma,
            lambda: self.lambda,
            tol: self.tol,
            max_iter: self.max_iter,
            log_every: if self.trace.is_some() { self.log_every } else { 0 },
        }
    }
}

#[derive(Args)]
struct CompleteArgs {
    /// Sample file: one `row,col,value` triple per line (zero-based).
    samples: PathBuf,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(short, long)]
    rank: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstraintArg {
    None,
    Nonneg,
    /// Entries in `[lo, hi]`; needs `--lo` and `--hi`.
    Box,
}

#[derive(Args)]
struct ApproxArgs {
    matrix: PathBuf,
    #[arg(short, long)]
    rank: usize,
    #[arg(long, value_enum, default_value = "none")]
    constraint: ConstraintArg,
    #[arg(long, allow_negative_numbers = true)]
    lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    hi: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct HankelArgs {
    /// Sequence file: one value per line.
    sequence: PathBuf,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(short, long)]
    rank: usize,
    /// Write the sequence defining the approximation here.
    #[arg(long)]
    sequence_output: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Norms(a) => commands::norms(&a),
        Command::Prox(a) => commands::prox(&a),
        Command::Complete(a) => commands::complete(&a),
        Command::Approx(a) => commands::approx(&a),
        Command::Hankel(a) => commands::hankel(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code_for(&e))
        }
    }
}
