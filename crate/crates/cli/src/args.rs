use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "outage", version, about = "Outage and success durations in Poisson networks")]
pub struct Cli {
    /// Worker threads for simulations (default: all cores). Results do not
    /// depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an analytic quantity.
    Eval {
        quantity: Quantity,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        optn: OptnArgs,
    },
    /// Write the dataset behind a figure as CSV.
    Figure {
        /// Figure name; `--list` shows all.
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Estimate a quantity by Monte Carlo simulation.
    Simulate {
        quantity: SimQuantity,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Compare analytic values with simulation and report z-scores.
    Validate {
        #[command(flatten)]
        params: ParamArgs,
        /// Perturb every analytic reference to check that mismatches are caught.
        #[arg(long)]
        force_mismatch: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Suc,
    Sucex,
    Out,
    Outex,
    Succount,
    Esdur,
    Esdur2,
    Var,
    Sirmoment,
    Exceedance,
    Skewness,
    Pdec,
    Throughput,
    Failure,
    Optn,
    Divpoly,
    DeltaContention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimQuantity {
    Suc,
    Sucex,
    Out,
    Outex,
    Succount,
    Esdur,
    Esdur2,
    Sir,
    Rlnc,
    Runs,
    Lag1,
    RadiusCheck,
}

/// Parameter flags shared by every subcommand. Unset flags fall back to the
/// config file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Source packets, success count, or standard deviations (exceedance).
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub slots: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Correlated interference (static field); the default.
    #[arg(long, overrides_with = "no_corr")]
    pub corr: bool,
    /// Independent interference in every slot.
    #[arg(long, overrides_with = "corr")]
    pub no_corr: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ObjectiveArg {
    #[default]
    Failure,
    Throughput,
}

/// Redundancy search (`eval optn`).
#[derive(Debug, Clone, Default, Args)]
pub struct OptnArgs {
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
    /// Transmit probability grows with n: p = n * p_per_n.
    #[arg(long)]
    pub p_per_n: Option<f64>,
    /// Constant n * lambda: lambda = n_lambda / n.
    #[arg(long)]
    pub n_lambda: Option<f64>,
}
