//! `pam` — drivers for the renormalised 2D parabolic Anderson model
//! laboratory.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.

mod config;
mod experiments;
mod report;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pam", about = "Numerical laboratory for the renormalised 2D parabolic Anderson model", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration (flat `key = value` document).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for PAMF fields, CSV tables and manifests.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the first configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample white noise and store it as PAMF fields.
    SampleNoise(Common),
    /// Build the stochastic enhancement bundle along the eps ladder.
    BuildEnhancement(Common),
    /// Run a solver and store the trajectory.
    Solve {
        #[command(flatten)]
        common: Common,
        /// `direct` (split-step) or `transformed` (Picard fixed point).
        #[arg(long, default_value = "transformed")]
        method: String,
    },
    /// Compare the split-step solution with the Feynman-Kac estimate.
    FkCheck(Common),
    /// Wavelet norms and per-level coefficient sups of a stored field.
    Norm {
        #[command(flatten)]
        common: Common,
        /// Input field in PAMF format.
        #[arg(long)]
        field: PathBuf,
    },
    /// Convergence study along the eps ladder over all seeds.
    Converge(Common),
    /// Cross-module validation suite.
    Validate(Common),
}

fn load_config(path: &PathBuf) -> Result<config::ExperimentConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    config::parse_config(&text).map_err(|e| format!("config error: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<i32, MainError> {
        match &cli.command {
            Command::SampleNoise(c) => {
                let cfg = load_config(&c.config).map_err(MainError::Config)?;
                experiments::run_sample_noise(&cfg, &c.out, c.seed).map_err(MainError::Run)?;
                Ok(0)
            }
            Command::BuildEnhancement(c) => {
                let cfg = load_config(&c.config).map_err(MainError::Config)?;
                experiments::run_build_enhancement(&cfg, &c.out, c.seed).map_err(MainError::Run)?;
                Ok(0)
            }
            Command::Solve { common, method } => {
                let cfg = load_config(&common.config).map_err(MainError::Config)?;
                experiments::run_solve(&cfg, &common.out, common.seed, method)
                    .map_err(MainError::Run)?;
                Ok(0)
            }
            Command::FkCheck(c) => {
                let cfg = load_config(&c.config).map_err(MainError::Config)?;
                match experiments::run_fk_check(&cfg, &c.out, c.seed) {
                    Ok(()) => Ok(0),
                    Err(e) => {
                        eprintln!("fk-check: {e}");
                        Ok(1)
                    }
                }
            }
            Command::Norm { common, field } => {
                let cfg = load_config(&common.config).map_err(MainError::Config)?;
                experiments::run_norm(&cfg, &common.out, field).map_err(MainError::Run)?;
                Ok(0)
            }
            Command::Converge(c) => {
                let cfg = load_config(&c.config).map_err(MainError::Config)?;
                experiments::run_convergence_study(&cfg, &c.out).map_err(MainError::Run)
            }
            Command::Validate(c) => {
                let cfg = load_config(&c.config).map_err(MainError::Config)?;
                experiments::run_validation(&cfg, &c.out).map_err(MainError::Run)
            }
        }
    };
    match run() {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(MainError::Config(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(MainError::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

enum MainError {
    Config(String),
    Run(anyhow::Error),
}
