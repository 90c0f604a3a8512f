//! `cobro`: simulation, pricing, calibration and experiment tables for the
//! regime-switching correlation model.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical
//! failure (non-convergence, grid too coarse, unattainable price).

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Ctx, Experiment, PriceMethod, Scheme};
use config::Config;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl From<cobro_core::Error> for CliError {
    fn from(e: cobro_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "cobro", version, about = "Regime-switching correlation: simulation, rainbow pricing and calibration")]
struct Cli {
    /// TOML configuration; the built-in paper.cfg when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Adds machine-dependent wall-clock columns to outputs.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compare the common-decomposition and Euler schemes on E[B_t + W_t].
    Simulate {
        #[arg(long, value_enum, default_value = "both")]
        scheme: Scheme,
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Price one rainbow option.
    Price {
        #[arg(long)]
        style: String,
        #[arg(long)]
        strike: f64,
        #[arg(long)]
        maturity: f64,
        #[arg(long, value_enum, default_value = "fourier")]
        method: PriceMethod,
        /// Constant correlation for --method closed.
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<f64>,
        /// Monte Carlo paths; the configured count when omitted.
        #[arg(long)]
        reps: Option<usize>,
    },
    /// Fit a constant correlation to quotes by gradient descent.
    Calibrate {
        #[arg(long)]
        style: String,
        #[arg(long)]
        maturity: Option<f64>,
        /// CSV with columns strike,price; regime-model prices when omitted.
        #[arg(long)]
        quotes: Option<PathBuf>,
    },
    /// Constant correlation reproducing a price.
    ImpliedCorr {
        #[arg(long)]
        style: String,
        #[arg(long)]
        strike: f64,
        #[arg(long)]
        maturity: f64,
        /// Target price; the regime-model price when omitted.
        #[arg(long)]
        price: Option<f64>,
    },
    /// Reproduce a table or figure sweep as CSV (and SVG for figures).
    Experiment {
        #[arg(value_enum)]
        which: Experiment,
    },
}

#[cfg(feature = "parallel")]
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("COBRO_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("COBRO_THREADS={v} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> Result<(), CliError> {
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = Config::load(cli.config.as_deref())?;
    let ctx = Ctx {
        seed: cli.seed.unwrap_or(cfg.file.seed),
        out: cli.out.clone().unwrap_or_else(|| cfg.file.output_dir.clone()),
        timing: cli.timing,
        cfg,
    };
    match cli.cmd {
        Cmd::Simulate { scheme, reps } => commands::simulate(&ctx, scheme, reps),
        Cmd::Price {
            style,
            strike,
            maturity,
            method,
            rho,
            reps,
        } => commands::price(&ctx, &style, strike, maturity, method, rho, reps),
        Cmd::Calibrate { style, maturity, quotes } => commands::calibrate(&ctx, &style, maturity, quotes.as_deref()),
        Cmd::ImpliedCorr {
            style,
            strike,
            maturity,
            price,
        } => commands::implied_corr(&ctx, &style, strike, maturity, price),
        Cmd::Experiment { which } => commands::experiment(&ctx, which),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cobro: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
