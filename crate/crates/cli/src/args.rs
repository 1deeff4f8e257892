use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use runup_core::inversion::Smoothing;
use runup_core::scaling::ScalingParameters;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "runup",
    version,
    about = "Nonlinear long-wave runup on a plane beach, direct and inverse"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Shoreline record from an initial displacement profile (x, eta0)
    Direct(DirectArgs),
    /// Initial displacement from a shoreline record (t, x0[, v0])
    Inverse(InverseArgs),
    /// Direct then inverse, with an error report against the input profile
    Roundtrip(RoundtripArgs),
    /// Run the built-in analytic anchors and oracle comparisons
    Selftest(SelftestArgs),
    /// Compare the shoreline trace with a finite-difference wave solution
    #[command(name = "waveeq-check")]
    WaveeqCheck(WaveeqArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IoArgs {
    /// Input CSV
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory, created if missing
    #[arg(long)]
    pub outdir: PathBuf,
}

/// Supplying `--h0` and `--alpha` makes input SI; outputs then come in both
/// unit systems.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ScalingArgs {
    /// Reference depth H0 [m]
    #[arg(long)]
    pub h0: Option<f64>,
    /// Beach slope tan(alpha)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Gravity [m/s^2]
    #[arg(long, default_value_t = 9.81)]
    pub g: f64,
}

impl ScalingArgs {
    pub fn resolve(&self) -> CliResult<Option<ScalingParameters>> {
        match (self.h0, self.alpha) {
            (None, None) => Ok(None),
            (Some(h0), Some(alpha)) => Ok(Some(ScalingParameters::new(h0, alpha, self.g)?)),
            _ => Err(CliError::Usage(
                "--h0 and --alpha must be given together".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// Nodes of the sigma grid
    #[arg(long, default_value_t = 1024)]
    pub n_sigma: usize,
    /// Nodes of the tau grid
    #[arg(long, default_value_t = 1024)]
    pub n_tau: usize,
    /// Truncation of the sigma grid (default: four support radii)
    #[arg(long)]
    pub sigma_max: Option<f64>,
    /// End of the tau grid (default: sigma-max)
    #[arg(long)]
    pub tau_max: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SmoothArgs {
    /// Local polynomial window (odd number of samples)
    #[arg(long, default_value_t = 11)]
    pub smooth_window: usize,
    /// Local polynomial degree
    #[arg(long, default_value_t = 2)]
    pub smooth_degree: usize,
    /// Differentiate the record without smoothing
    #[arg(long)]
    pub no_smoothing: bool,
}

impl SmoothArgs {
    pub fn resolve(&self) -> Option<Smoothing> {
        (!self.no_smoothing).then_some(Smoothing {
            window: self.smooth_window,
            degree: self.smooth_degree,
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DirectArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InverseArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    /// Nodes of the uniform tau grid carrying the trace
    #[arg(long, default_value_t = 1024)]
    pub n_tau: usize,
    #[command(flatten)]
    pub smooth: SmoothArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RoundtripArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub smooth: SmoothArgs,
    /// Largest acceptable relative L-infinity error
    #[arg(long, default_value_t = 0.01)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelftestArgs {
    /// Where to write selftest.json (optional)
    #[arg(long)]
    pub outdir: Option<PathBuf>,
    /// Relative perturbation of the Abel quadrature weights (negative control)
    #[arg(long, default_value_t = 0.0, hide = true)]
    pub perturb_abel_weights: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WaveeqArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Largest acceptable gap, relative to max|Psi|
    #[arg(long, default_value_t = 1e-2)]
    pub tolerance: f64,
    /// Also write the finite-difference field as field.csv
    #[arg(long)]
    pub dump_field: bool,
    /// Keep every n-th time level in the field dump
    #[arg(long, default_value_t = 8)]
    pub store_every: usize,
}
