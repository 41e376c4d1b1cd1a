use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use commands::{CliError, Outcome};

const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Tail bounds and quantiles for squared norms and quadratic forms of random
/// vectors with exponential moments.
#[derive(Debug, Parser)]
#[command(name = "qft", version, about)]
struct Cli {
    /// Output format (csv for tables, json lines for verify by default).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to this file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,

    /// RNG seed; QFT_SEED in the environment takes precedence.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quantile table for ||xi||^2, ||B xi||^2 or ||D0^-1 zeta||^2.
    Bound(commands::bound::BoundArgs),
    /// Large-deviation tail bounds in y, or norm-constrained tail bounds in z.
    Tail(commands::tail::TailArgs),
    /// Monte Carlo certification of the quantile bounds.
    Verify(commands::verify::VerifyArgs),
    /// Bernstein-condition bound against the Baraud bound.
    Compare(commands::compare::CompareArgs),
    /// Effective sample size and critical values for a regression design.
    Regression(commands::regression::RegressionArgs),
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    match std::env::var("QFT_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("QFT_SEED must be an unsigned 64-bit integer, got {v:?}"))),
        Err(_) => Ok(flag.unwrap_or(DEFAULT_SEED)),
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let seed = resolve_seed(cli.seed)?;
    let outcome = match &cli.command {
        Command::Bound(a) => commands::bound::run(a, cli.format, seed)?,
        Command::Tail(a) => commands::tail::run(a, cli.format, seed)?,
        Command::Verify(a) => commands::verify::run(a, cli.format, seed)?,
        Command::Compare(a) => commands::compare::run(a, cli.format, seed)?,
        Command::Regression(a) => commands::regression::run(a, cli.format, seed)?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(outcome.text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Config(format!("cannot write output: {e}")))?;
        }
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) if outcome.violated => {
            eprintln!("error: at least one certificate has verdict violated");
            ExitCode::from(4)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
