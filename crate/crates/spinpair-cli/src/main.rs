//! Command-line front end for the `spinpair` relaxation library.
//!
//! One subcommand per task, each driven by a flat `key = value`
//! configuration file (see [`config`]):
//!
//! * `rates` — the closed-form relaxation rate table (JSON);
//! * `superop` — the three relaxation generator blocks (JSON);
//! * `experiment` — longitudinal enhancement trajectories (CSV or JSON);
//! * `tmax` — the transient-enhancement peak time (JSON);
//! * `fit` — spectral-density parameters from an enhancement dataset (JSON);
//! * `generate-data` — synthetic enhancement datasets (CSV or JSON).
//!
//! Exit codes: 0 on success, 1 on validation errors (arguments, config,
//! data files), 2 on numeric failures. Results go to standard output unless
//! an output path is set (config `output` key or `--output` flag); output
//! files are written in one shot — a failing run never leaves a partial
//! file behind.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "spinpair",
    version,
    about = "Closed-form relaxation dynamics of a dipole-coupled unlike spin-1/2 pair"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the relaxation rate table (iota values, rates, time constants).
    Rates(CommonArgs),
    /// Dump the three relaxation generator blocks.
    Superop(CommonArgs),
    /// Compute the longitudinal enhancement trajectories of an experiment.
    Experiment {
        #[command(flatten)]
        common: CommonArgs,
        /// Override the experiment preparation from the config.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Print the transient-enhancement peak time.
    Tmax(CommonArgs),
    /// Fit a spectral-density model to an enhancement dataset.
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        /// CSV dataset file (header `t_s,upsilon`).
        #[arg(long)]
        data: PathBuf,
        /// Spectral-density family to fit.
        #[arg(long, value_enum)]
        family: FamilyArg,
    },
    /// Synthesize an enhancement dataset from the configured model, or from
    /// explicit time constants.
    GenerateData {
        #[command(flatten)]
        common: CommonArgs,
        /// Fast time constant, s (with --d1 and --amplitude, switches to the
        /// explicit bi-exponential generator).
        #[arg(long, requires = "d1", requires = "amplitude")]
        t1: Option<f64>,
        /// Slow time constant, s.
        #[arg(long, requires = "t1")]
        d1: Option<f64>,
        /// Curve amplitude (dimensionless).
        #[arg(long, requires = "t1")]
        amplitude: Option<f64>,
        /// Standard deviation of added Gaussian noise (default 0; stream
        /// seeded by SPINPAIR_SEED).
        #[arg(long)]
        sigma: Option<f64>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the `key = value` run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the result here (overrides the config `output` key; default
    /// standard output).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format (overrides the config `format` key where both formats
    /// apply).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Isotropic,
    ModelFree,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    SaturationS,
    InversionS,
    InversionBoth,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
