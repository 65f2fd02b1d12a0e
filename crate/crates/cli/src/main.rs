//! exclusion-lab: analyze and simulate compartmental models of competing
//! ideologies.
//!
//! Subcommands: `analyze` (closed-form equilibria, reproduction and
//! invasion numbers, regime classification), `simulate` (one trajectory
//! to CSV), `sweep` (record quantities along a parameter grid),
//! `bifurcate` (scan the conversion rate and track equilibria), and
//! `verify` (randomized checks of the stability theorems).
//!
//! Exit codes: 0 ok, 1 verification failure, 2 validation error,
//! 3 numerical failure, 4 I/O error.

mod commands;
mod quantities;
mod render;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    VerificationFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "exclusion-lab",
    about = "Equilibria, invasion numbers, bifurcation thresholds and simulations for competing-ideology models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form analysis: reproduction and invasion numbers,
    /// equilibria with stability, thresholds and regime label.
    Analyze {
        /// Scenario file (JSON).
        #[arg(long)]
        scenario: PathBuf,
        /// Also write the JSON report here.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Stdout format.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Integrate one trajectory and emit it as CSV.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// CSV destination (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Integration horizon.
        #[arg(long, default_value_t = 5000.0)]
        t_end: f64,
    },
    /// Record quantities along a grid of one parameter.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Dotted parameter path (e.g. delta, ideology2.beta).
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        /// Number of grid points (inclusive endpoints).
        #[arg(long)]
        steps: usize,
        /// Comma-separated quantities to record.
        #[arg(long)]
        record: String,
    },
    /// Scan the conversion rate delta and track every equilibrium.
    Bifurcate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Randomized verification of the stability theorems implied by the
    /// scenario's regime.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        /// Also write the JSON report here.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 5000.0)]
        t_end: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze {
            scenario,
            output,
            format,
        } => {
            let s = scenario::load(&scenario)?;
            commands::analyze(&s, output.as_deref(), format)
        }
        Command::Simulate {
            scenario,
            output,
            t_end,
        } => {
            let s = scenario::load(&scenario)?;
            commands::simulate(&s, t_end, output.as_deref())
        }
        Command::Sweep {
            scenario,
            output,
            param,
            from,
            to,
            steps,
            record,
        } => {
            let s = scenario::load(&scenario)?;
            commands::sweep(&s, &param, from, to, steps, &record, output.as_deref())
        }
        Command::Bifurcate {
            scenario,
            output,
            from,
            to,
            steps,
        } => {
            let s = scenario::load(&scenario)?;
            commands::bifurcate(&s, from, to, steps, output.as_deref())
        }
        Command::Verify {
            scenario,
            output,
            trials,
            seed,
            t_end,
        } => {
            let s = scenario::load(&scenario)?;
            commands::verify(&s, trials, seed, t_end, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
