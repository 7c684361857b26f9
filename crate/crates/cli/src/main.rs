//! `penaltyvqe`: spectra, constrained VQE/VQD runs, μ scans and convex
//! envelope data as CSV.

mod commands;
mod config;
mod error;
mod problem;
mod table;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{BetaPolicy, CommonArgs, ExtraArgs, Settings};
use error::Result;

#[derive(Debug, Parser)]
#[command(name = "penaltyvqe", version, about = "Penalty-constrained VQE experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact joint spectrum of the Hamiltonian and the constraint observables.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Constrained ground-state search from several random starts.
    Vqe {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Excited states by sequential deflation.
    Vqd {
        #[command(flatten)]
        common: CommonArgs,
        /// Highest level to solve (levels 0..=k).
        #[arg(long)]
        level: Option<usize>,
        /// auto-ce, auto-rough, or comma-separated values per level.
        #[arg(long)]
        beta: Option<BetaPolicy>,
    },
    /// F1 and F2 runs over a list of penalty coefficients.
    ScanMu {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated coefficients, applied to every constraint.
        #[arg(long, value_delimiter = ',')]
        mu_values: Option<Vec<f64>>,
    },
    /// Lower convex hull, target classification and relaxation minima.
    Envelope {
        #[command(flatten)]
        common: CommonArgs,
        /// Target is the k-th state of the sector (0 = sector ground).
        #[arg(long)]
        level: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        mu_values: Option<Vec<f64>>,
    },
}

type Action = fn(&Settings) -> Result<table::Table>;

fn run(command: Command) -> Result<()> {
    let (common, extra, action): (CommonArgs, ExtraArgs, Action) = match command {
        Command::Spectrum { common } => (common, ExtraArgs::default(), commands::spectrum),
        Command::Vqe { common } => (common, ExtraArgs::default(), commands::vqe),
        Command::Vqd { common, level, beta } => (
            common,
            ExtraArgs {
                level,
                beta,
                mu_values: None,
            },
            commands::vqd,
        ),
        Command::ScanMu { common, mu_values } => (
            common,
            ExtraArgs {
                mu_values,
                ..Default::default()
            },
            commands::scan_mu,
        ),
        Command::Envelope {
            common,
            level,
            mu_values,
        } => (
            common,
            ExtraArgs {
                level,
                mu_values,
                beta: None,
            },
            commands::envelope,
        ),
    };
    let settings = Settings::resolve(common, extra)?;
    let table = action(&settings)?;
    table.write(settings.out.as_deref())
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
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error());
            failure.exit_code()
        }
    }
}
