//! `fraclse`: simulate fractional SDE paths, estimate the drift parameter,
//! run Monte Carlo studies and print limit constants.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fraclse_core::VarianceConvention;

use crate::commands::Overrides;

#[derive(Debug, Parser)]
#[command(
    name = "fraclse",
    version,
    about = "Least-squares drift estimation for fBm-driven SDEs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Overrides the seed (master seed for studies) from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for studies.
    #[arg(long, global = true, env = "FRACLSE_THREADS")]
    threads: Option<usize>,

    /// Reading of the limit-variance constant.
    #[arg(long, global = true, value_enum)]
    variance_convention: Option<ConventionArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Variance,
    Literal,
}

impl From<ConventionArg> for VarianceConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Variance => VarianceConvention::Variance,
            ConventionArg::Literal => VarianceConvention::Literal,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one observed path.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        output: PathBuf,
    },
    /// Estimate the drift parameter from a path CSV.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        /// Path CSV with columns k,t,X[,dB].
        #[arg(long)]
        input: PathBuf,
        /// Output directory.
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the Monte Carlo study named in the config.
    Study {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        output: PathBuf,
    },
    /// Print v_H, the rate and the information estimate for a config.
    Constants {
        #[arg(long)]
        config: PathBuf,
        /// Optional output directory for constants.json.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == Some(0) {
        eprintln!("error: configuration error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    let ov = Overrides {
        seed: cli.seed,
        threads: cli.threads,
        convention: cli.variance_convention.map(Into::into),
    };
    let outcome = match &cli.command {
        Command::Simulate { config, output } => commands::cmd_simulate(config, output, ov).map(|_| ()),
        Command::Estimate { config, input, output } => commands::cmd_estimate(config, input, output, ov).map(|_| ()),
        Command::Study { config, output } => commands::cmd_study(config, output, ov).map(|_| ()),
        Command::Constants { config, output } => commands::cmd_constants(config, output.as_deref(), ov).map(|_| ()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
