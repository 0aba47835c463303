use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "distill",
    version,
    about = "Sweeps and simulations for heralded entanglement distillation"
)]
pub struct Cli {
    /// Directory for CSV files and manifests.
    #[arg(long, global = true, env = "DISTILL_OUTPUT_DIR", default_value = ".")]
    pub out: PathBuf,

    /// Apparatus config file (`key = value` lines); flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub apparatus: ApparatusArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct ApparatusArgs {
    /// Capture probability of both arms (symmetric link).
    #[arg(long, global = true)]
    pub t: Option<f64>,
    #[arg(long, global = true)]
    pub t1: Option<f64>,
    #[arg(long, global = true)]
    pub t2: Option<f64>,
    #[arg(long, global = true)]
    pub x1: Option<f64>,
    #[arg(long, global = true)]
    pub x2: Option<f64>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Dark-count probability per detector per attempt.
    #[arg(long, global = true)]
    pub p_dark: Option<f64>,
    /// Duration of one attempt; rates are per this unit.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal two-iterate Bell-pair rate against the two-photon reference.
    Rates(RatesArgs),
    /// Infidelity from apparatus drift between the two iterates.
    Drift(DriftArgs),
    /// Optimized growth rate of a linear cluster built with the loop strategy.
    Chain(ChainArgs),
    /// Seeded Monte Carlo trajectories.
    Simulate(SimulateArgs),
    /// Fidelity and rate under detector dark counts, with region classes.
    Darkcounts(DarkcountArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct RatesArgs {
    #[arg(long, default_value_t = 1e-5)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    /// Log-spaced points; a single point evaluates `--t-min`.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DriftArgs {
    #[arg(long, default_value_t = 0.0)]
    pub dx_min: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dx_max: f64,
    #[arg(long, default_value_t = 0.0)]
    pub dt_min: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dt_max: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 51)]
    pub points: usize,
    /// Leave the fidelity column empty below 1 − 1e-3.
    #[arg(long)]
    pub clip: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ChainArgs {
    /// Series truncation.
    #[arg(long, default_value_t = distill_core::analytics::DEFAULT_K_MAX)]
    pub k_max: usize,
    /// Print the result as CSV instead of a report.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    TwoIterOnly,
    Loop,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::TwoIterOnly)]
    pub strategy: StrategyArg,
    /// Horizon of the loop strategy.
    #[arg(long, default_value_t = 8)]
    pub max_iterates: usize,
    /// Excitation angle in radians; defaults to the rate-optimal angle.
    #[arg(long, conflicts_with = "sin2_theta")]
    pub theta: Option<f64>,
    #[arg(long)]
    pub sin2_theta: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DarkcountArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 25)]
    pub t_points: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub p_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub p_max: f64,
    #[arg(long, default_value_t = 25)]
    pub p_points: usize,
    /// Add a dark-count-free row before the log-spaced ones.
    #[arg(long)]
    pub with_zero: bool,
}
