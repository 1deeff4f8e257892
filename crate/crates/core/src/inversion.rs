//! The inverse problem: shoreline record to initial displacement.
//!
//! With no initial velocity the boundary trace fixes the initial data
//! through `ψ₀(σ) = (2/π)(AΨ)(σ)`. The record is mapped to `(τ, Ψ)`,
//! transformed, and mapped back to the physical plane with
//! `x = σ² − ψ₀(σ)`, `η₀(x) = ψ₀(σ)`.
//!
//! A measured record usually lacks the velocity, which is then taken from
//! a local least-squares polynomial fit of `x₀(t)`. The same fit doubles as
//! a smoother for noisy runup data.

use std::f64::consts::FRAC_2_PI;

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::abel::{abel_forward_with, AbelQuadrature};
use crate::error::{Result, RunupError};
use crate::hodograph::{
    breaking_check, hodograph_ic_to_physical, record_to_trace, BreakingReport,
    HodographInitialData, PhysicalInitialData, ShorelineRecord, ShorelineTrace,
};
use crate::sampled::{uniform_grid, validate_grid, SampledFunction};

/// Relative RMS mismatch between supplied and fitted velocity above which
/// a warning is raised.
pub const VELOCITY_MISMATCH_WARNING: f64 = 0.05;

/// Runup as observed: times, shoreline positions and optionally velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct ShorelineObservation {
    pub t: Vec<f64>,
    pub x0: Vec<f64>,
    pub v0: Option<Vec<f64>>,
}

impl ShorelineObservation {
    pub fn new(t: Vec<f64>, x0: Vec<f64>, v0: Option<Vec<f64>>) -> Result<Self> {
        if t.len() != x0.len() || v0.as_ref().is_some_and(|v| v.len() != t.len()) {
            return Err(RunupError::Data(
                "observation columns differ in length".into(),
            ));
        }
        if t.len() < 4 {
            return Err(RunupError::Data(
                "an observation needs at least 4 samples".into(),
            ));
        }
        validate_grid(&t)?;
        if x0.iter().chain(v0.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(RunupError::Data("observation values must be finite".into()));
        }
        let tol = 1e-9 * (1.0 + t[t.len() - 1].abs());
        if t[0].abs() > tol {
            return Err(RunupError::Data(format!(
                "the record must start at t = 0 (first sample at t = {}); partial records are not supported",
                t[0]
            )));
        }
        Ok(Self { t, x0, v0 })
    }
}

impl From<ShorelineRecord> for ShorelineObservation {
    fn from(r: ShorelineRecord) -> Self {
        Self {
            t: r.t,
            x0: r.x0,
            v0: Some(r.v0),
        }
    }
}

/// Local polynomial least squares over `window` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Smoothing {
    pub window: usize,
    pub degree: usize,
}

impl Default for Smoothing {
    fn default() -> Self {
        Self {
            window: 11,
            degree: 2,
        }
    }
}

impl Smoothing {
    fn validate(&self, n: usize) -> Result<()> {
        if self.window.is_multiple_of(2) || self.window < 3 {
            return Err(RunupError::Config(format!(
                "smoothing window must be odd and >= 3, got {}",
                self.window
            )));
        }
        if self.degree == 0 || self.degree > 3 || self.degree >= self.window {
            return Err(RunupError::Config(format!(
                "smoothing degree must lie in 1..=3 and below the window, got {}",
                self.degree
            )));
        }
        if self.window > n {
            return Err(RunupError::Data(format!(
                "smoothing window {} exceeds the {n} samples",
                self.window
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionConfig {
    /// `None` keeps `x₀` as given and differentiates the interpolant.
    pub smoothing: Option<Smoothing>,
    /// Uniform τ-nodes the trace is resampled to; ψ₀ lives on the same
    /// nodes in σ.
    pub n_tau: usize,
    /// Output abscissas; defaults to the parametric nodes `σ² − ψ₀(σ)`.
    pub x_grid: Option<Vec<f64>>,
    pub abel_panels: usize,
    pub abel_order: usize,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            smoothing: Some(Smoothing::default()),
            n_tau: 1024,
            x_grid: None,
            abel_panels: AbelQuadrature::DEFAULT_PANELS,
            abel_order: AbelQuadrature::DEFAULT_ORDER,
        }
    }
}

/// Values and first derivatives of a local polynomial fit at every sample.
/// The window is centred where possible and slides inward at the ends.
pub fn local_polynomial_fit(
    t: &[f64],
    y: &[f64],
    smoothing: Smoothing,
) -> Result<(Vec<f64>, Vec<f64>)> {
    validate_grid(t)?;
    if t.len() != y.len() {
        return Err(RunupError::Data("fit columns differ in length".into()));
    }
    smoothing.validate(t.len())?;
    let n = t.len();
    let half = smoothing.window / 2;
    let cols = smoothing.degree + 1;
    let mut values = Vec::with_capacity(n);
    let mut slopes = Vec::with_capacity(n);
    for i in 0..n {
        let start = i.saturating_sub(half).min(n - smoothing.window);
        let idx = start..start + smoothing.window;
        let scale = (t[idx.end - 1] - t[start]) / 2.0;
        let a = DMatrix::from_fn(smoothing.window, cols, |r, c| {
            ((t[start + r] - t[i]) / scale).powi(c as i32)
        });
        let b = DVector::from_iterator(smoothing.window, y[idx].iter().copied());
        let coef = a
            .svd(true, true)
            .solve(&b, 1e-12)
            .map_err(|e| RunupError::Stability(format!("polynomial fit failed: {e}")))?;
        values.push(coef[0]);
        slopes.push(coef[1] / scale);
    }
    Ok((values, slopes))
}

/// `dx₀/dt` at every sample, fitted or from the interpolant.
pub fn differentiate_record(
    t: &[f64],
    x0: &[f64],
    smoothing: Option<Smoothing>,
) -> Result<Vec<f64>> {
    match smoothing {
        Some(s) => Ok(local_polynomial_fit(t, x0, s)?.1),
        None => Ok(SampledFunction::new(t.to_vec(), x0.to_vec())?
            .slopes()
            .to_vec()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InversionDiagnostics {
    /// `|ψ₀(σ_end)| / max|ψ₀|`; large values mean the record ends before
    /// the disturbance has left the shoreline.
    pub tail_fraction: f64,
    /// Relative RMS gap between supplied and fitted `v₀`, when supplied.
    pub velocity_mismatch: Option<f64>,
    /// `v₀(0)`, which should vanish for a wave starting at rest.
    pub initial_velocity: f64,
    pub record_breaking: BreakingReport,
    pub initial_breaking: BreakingReport,
}

#[derive(Debug, Clone)]
pub struct Recovery {
    pub initial: PhysicalInitialData,
    pub psi0: SampledFunction,
    pub trace: ShorelineTrace,
    /// `x`-interval covered by the recovered profile.
    pub x_range: (f64, f64),
    pub diagnostics: InversionDiagnostics,
}

fn rms(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    (s / n.max(1) as f64).sqrt()
}

pub fn recover_initial(obs: &ShorelineObservation, cfg: &InversionConfig) -> Result<Recovery> {
    if cfg.n_tau < 64 {
        return Err(RunupError::Config(format!(
            "n_tau must be at least 64, got {}",
            cfg.n_tau
        )));
    }
    let quad = AbelQuadrature::new(cfg.abel_panels, cfg.abel_order)?;
    let t = &obs.t;
    let (mut x0, fitted_v) = match cfg.smoothing {
        Some(s) => local_polynomial_fit(t, &obs.x0, s)?,
        None => (obs.x0.clone(), differentiate_record(t, &obs.x0, None)?),
    };
    // the fit must not move the starting shoreline
    x0[0] = obs.x0[0];

    let (v0, velocity_mismatch) = match &obs.v0 {
        Some(v) => {
            let scale = rms(v.iter().copied()).max(f64::MIN_POSITIVE);
            let gap = rms(v.iter().zip(&fitted_v).map(|(a, b)| a - b)) / scale;
            if gap > VELOCITY_MISMATCH_WARNING {
                warn!(
                    "supplied v0 differs from the fitted dx0/dt by {:.1}% RMS",
                    100.0 * gap
                );
            }
            (v.clone(), Some(gap))
        }
        None => (fitted_v, None),
    };
    let initial_velocity = v0[0];

    let record = ShorelineRecord::new(t.clone(), x0, v0)?;
    let record_breaking = breaking_check(&record).into_result("shoreline record")?;
    let mut trace = record_to_trace(&record)?;
    // the record starts at rest at t = 0, which is τ = 0; Ψ(0) uses the
    // unsmoothed shoreline position
    trace.tau[0] = 0.0;
    trace.psi[0] = -obs.x0[0] + 0.5 * initial_velocity * initial_velocity;
    let trace = ShorelineTrace::new(trace.tau, trace.psi, trace.v)?;

    let tau_end = trace.tau[trace.tau.len() - 1];
    let tau = uniform_grid(0.0, tau_end, cfg.n_tau)?;
    // shape-preserving transfer off the measured nodes, then the smooth
    // interpolant on the uniform grid for the quadrature
    let uniform =
        SampledFunction::monotone(trace.tau.clone(), trace.psi.clone())?.resample(tau.clone())?;
    let psi_trace = SampledFunction::new(tau.clone(), uniform.into_parts().1)?;
    let psi0 = abel_forward_with(&psi_trace, &tau, &quad)?.scaled(FRAC_2_PI)?;
    let peak = psi0.max_abs();
    let tail_fraction = if peak > 0.0 {
        psi0.values()[psi0.len() - 1].abs() / peak
    } else {
        0.0
    };

    let hodo = HodographInitialData::at_rest(psi0.clone())?;
    let mut initial = hodograph_ic_to_physical(&hodo)?;
    let x_range = initial.eta0.domain();
    if let Some(grid) = &cfg.x_grid {
        validate_grid(grid)?;
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        if !initial.eta0.covers(lo, hi) {
            return Err(RunupError::OutOfRange {
                requested_lo: lo,
                requested_hi: hi,
                valid_lo: x_range.0,
                valid_hi: x_range.1,
            });
        }
        initial = PhysicalInitialData::new(initial.eta0.resample(grid.clone())?);
    }
    let initial_breaking = breaking_check(&initial);

    Ok(Recovery {
        initial,
        psi0,
        trace,
        x_range,
        diagnostics: InversionDiagnostics {
            tail_fraction,
            velocity_mismatch,
            initial_velocity,
            record_breaking,
            initial_breaking,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct::{solve_direct, DirectConfig};

    #[test]
    fn fit_reproduces_polynomials() {
        let t = uniform_grid(0.0, 2.0, 40).unwrap();
        let y: Vec<f64> = t.iter().map(|x| 1.0 - 0.5 * x + 0.25 * x * x).collect();
        let (v, d) = local_polynomial_fit(&t, &y, Smoothing::default()).unwrap();
        for i in 0..t.len() {
            assert!((v[i] - y[i]).abs() < 1e-12);
            assert!((d[i] - (-0.5 + 0.5 * t[i])).abs() < 1e-10);
        }
    }

    #[test]
    fn fit_configuration_errors() {
        let t = uniform_grid(0.0, 1.0, 8).unwrap();
        let y = vec![0.0; 8];
        assert!(local_polynomial_fit(
            &t,
            &y,
            Smoothing {
                window: 4,
                degree: 2
            }
        )
        .is_err());
        assert!(local_polynomial_fit(
            &t,
            &y,
            Smoothing {
                window: 5,
                degree: 5
            }
        )
        .is_err());
        assert!(local_polynomial_fit(
            &t,
            &y,
            Smoothing {
                window: 11,
                degree: 2
            }
        )
        .is_err());
    }

    #[test]
    fn observation_must_start_at_zero() {
        let t = vec![0.5, 1.0, 1.5, 2.0];
        assert!(ShorelineObservation::new(t, vec![0.0; 4], None).is_err());
        assert!(ShorelineObservation::new(vec![0.0, 1.0], vec![0.0; 2], None).is_err());
    }

    #[test]
    fn flat_record_gives_flat_sea() {
        let t = uniform_grid(0.0, 10.0, 200).unwrap();
        let obs = ShorelineObservation::new(t, vec![0.0; 200], None).unwrap();
        let rec = recover_initial(
            &obs,
            &InversionConfig {
                n_tau: 128,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(rec.initial.eta0.values().iter().all(|v| v.abs() < 1e-14));
        assert!((rec.x_range.1 - 25.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_round_trip() {
        let eta = |x: f64| 0.01 * (-4.0 * (x - 1.0) * (x - 1.0)).exp();
        let d = PhysicalInitialData::new(SampledFunction::uniform(-0.2, 40.0, 4000, eta).unwrap());
        let sol = solve_direct(&d, &DirectConfig::default()).unwrap();
        let r = sol.record;
        let obs = ShorelineObservation::new(r.t, r.x0, None).unwrap();
        let xs = uniform_grid(0.0, 3.0, 301).unwrap();
        let cfg = InversionConfig {
            x_grid: Some(xs.clone()),
            ..Default::default()
        };
        let rec = recover_initial(&obs, &cfg).unwrap();
        let err = xs
            .iter()
            .zip(rec.initial.eta0.values())
            .map(|(&x, &v)| (v - eta(x)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-2 * 0.01, "{err}");
    }

    #[test]
    fn uncovered_output_grid_reports_the_valid_range() {
        let t = uniform_grid(0.0, 2.0, 50).unwrap();
        let obs = ShorelineObservation::new(t, vec![0.0; 50], None).unwrap();
        let cfg = InversionConfig {
            x_grid: Some(vec![0.0, 5.0]),
            n_tau: 64,
            ..Default::default()
        };
        match recover_initial(&obs, &cfg) {
            Err(RunupError::OutOfRange { valid_hi, .. }) => assert!((valid_hi - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }
}
