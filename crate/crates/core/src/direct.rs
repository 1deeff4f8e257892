//! The direct problem: initial displacement to shoreline motion.
//!
//! For `τ >= 0` the boundary value of the hodograph wave field is
//!
//! ```text
//! Ψ(τ) = (π/2)[A⁻¹ψ₀ − τ A⁻¹φ₀](τ) − A(sφ₀)(τ)
//! ```
//!
//! and the shoreline velocity follows from the boundary relations alone:
//! differentiating `Ψ = −x₀ + v₀²/2` and `τ = (t − v₀)/2` in `t` gives
//! `dΨ/dt = v₀(v₀' − 1)` and `dτ/dt = (1 − v₀')/2`, so `Ψ'(τ) = −2 v₀`
//! and `V(τ) = −Ψ'(τ)/2`.

use std::f64::consts::FRAC_2_PI;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abel::AbelQuadrature;
use crate::error::{Result, RunupError};
use crate::hodograph::{
    breaking_check, initial_to_hodograph, trace_to_record, BreakingReport, HodographInitialData,
    PhysicalInitialData, ShorelineRecord, ShorelineTrace,
};
use crate::kernels::combined_kernel;
use crate::quadrature::GaussLegendre;
use crate::sampled::{uniform_grid, validate_grid, SampledFunction};

/// Relative size of `ψ₀(σ_max)` below which the σ-grid counts as covering
/// the disturbance.
pub const TRUNCATION_RATIO: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectConfig {
    /// Truncation of the σ-grid. Defaults to four times the support radius
    /// of ψ₀, limited by what the profile covers.
    pub sigma_max: Option<f64>,
    pub n_sigma: usize,
    pub n_tau: usize,
    /// End of the τ-grid, at most `sigma_max`. Defaults to `sigma_max`.
    pub tau_max: Option<f64>,
    pub abel_panels: usize,
    pub abel_order: usize,
    /// Gauss-Legendre nodes for the kernel integral of the shoreline equation.
    pub kernel_nodes: usize,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self {
            sigma_max: None,
            n_sigma: 1024,
            n_tau: 1024,
            tau_max: None,
            abel_panels: AbelQuadrature::DEFAULT_PANELS,
            abel_order: AbelQuadrature::DEFAULT_ORDER,
            kernel_nodes: 128,
        }
    }
}

impl DirectConfig {
    pub fn quadrature(&self) -> Result<AbelQuadrature> {
        AbelQuadrature::new(self.abel_panels, self.abel_order)
    }

    fn validate(&self) -> Result<()> {
        if self.n_sigma < 8 || self.n_tau < 8 {
            return Err(RunupError::Config(
                "n_sigma and n_tau must be at least 8".into(),
            ));
        }
        if self.kernel_nodes == 0 {
            return Err(RunupError::Config("kernel_nodes must be positive".into()));
        }
        for (name, v) in [("sigma_max", self.sigma_max), ("tau_max", self.tau_max)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(RunupError::Config(format!(
                        "{name} must be positive, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Largest σ the profile can supply: `√(x_end + η₀(x_end))`.
pub fn sigma_available(d: &PhysicalInitialData) -> Result<f64> {
    let grid = d.eta0.grid();
    let values = d.eta0.values();
    let n = grid.len();
    let depth_end = grid[n - 1] + values[n - 1];
    if depth_end <= 0.0 {
        return Err(RunupError::Domain(
            "profile does not reach the water (x + eta0 <= 0 everywhere)".into(),
        ));
    }
    Ok(depth_end.sqrt())
}

/// σ beyond which `|η₀| < 10⁻⁸ max|η₀|`; zero for a flat sea.
pub fn sigma_support(d: &PhysicalInitialData) -> f64 {
    let grid = d.eta0.grid();
    let values = d.eta0.values();
    let peak = d.eta0.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let last = (0..grid.len())
        .rev()
        .find(|&i| values[i].abs() >= TRUNCATION_RATIO * peak)
        .unwrap_or(0);
    (grid[last] + values[last]).max(0.0).sqrt()
}

/// The σ-grid truncation: as requested, or four times the support radius
/// limited by what the profile covers.
pub fn resolve_sigma_max(d: &PhysicalInitialData, requested: Option<f64>) -> Result<f64> {
    let available = sigma_available(d)?;
    if let Some(s) = requested {
        if s > available * (1.0 + 1e-12) {
            return Err(RunupError::Domain(format!(
                "sigma_max = {s} needs the profile up to depth {}, it reaches {}",
                s * s,
                available * available
            )));
        }
        return Ok(s.min(available));
    }
    let support = sigma_support(d);
    if support == 0.0 {
        return Ok(available);
    }
    Ok((4.0 * support).min(available))
}

/// `Ψ(τ)` on `tau_grid` from Cauchy data on `τ = 0`.
pub fn poisson_boundary(
    h: &HodographInitialData,
    tau_grid: &[f64],
    quad: &AbelQuadrature,
) -> Result<SampledFunction> {
    validate_grid(tau_grid)?;
    let hi = tau_grid[tau_grid.len() - 1];
    if tau_grid[0] < 0.0 {
        return Err(RunupError::Domain(
            "the shoreline trace is only defined for tau >= 0".into(),
        ));
    }
    if hi > h.sigma_max() * (1.0 + 1e-12) {
        return Err(RunupError::OutOfRange {
            requested_lo: tau_grid[0],
            requested_hi: hi,
            valid_lo: 0.0,
            valid_hi: h.sigma_max(),
        });
    }
    let psi0 = &h.psi0;
    let phi0 = &h.phi0;
    let moving = !h.has_zero_velocity();
    let psi00 = psi0.eval(0.0)?;
    let phi00 = phi0.eval(0.0)?;
    let values = tau_grid
        .par_iter()
        .map(|&tau| -> Result<f64> {
            // (π/2) A⁻¹ψ₀ = ψ₀(0) + τ A(ψ₀')
            let mut v = psi00 + tau * quad.angular(tau, psi0.grid(), |s| psi0.derivative(s))?;
            if moving {
                let inv_phi =
                    phi00 + tau * quad.angular(tau, phi0.grid(), |s| phi0.derivative(s))?;
                let a_sphi = quad.angular(tau, phi0.grid(), |s| Ok(s * phi0.eval(s)?))?;
                v -= tau * inv_phi + a_sphi;
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(tau_grid.to_vec(), values)
}

/// Adds `V = −Ψ'/2` to a Ψ-only trace.
pub fn trace_velocity(psi: &SampledFunction) -> Result<ShorelineTrace> {
    let v = psi.slopes().iter().map(|d| -0.5 * d).collect();
    ShorelineTrace::new(psi.grid().to_vec(), psi.values().to_vec(), v)
}

/// Everything computed on the way from `η₀` to the shoreline record.
#[derive(Debug, Clone)]
pub struct DirectSolution {
    pub sigma_max: f64,
    pub tau_max: f64,
    pub hodograph: HodographInitialData,
    pub trace: ShorelineTrace,
    pub record: ShorelineRecord,
    pub initial_breaking: BreakingReport,
    pub record_breaking: BreakingReport,
    /// `|ψ₀(σ_max)| / max|ψ₀|`
    pub truncation: f64,
    /// Shoreline-equation residual of `(ψ₀, Ψ)` on the σ-nodes.
    pub residual: SampledFunction,
    /// Its max norm.
    pub residual_max: f64,
}

pub fn solve_direct(d: &PhysicalInitialData, cfg: &DirectConfig) -> Result<DirectSolution> {
    cfg.validate()?;
    let quad = cfg.quadrature()?;
    let initial_breaking = breaking_check(d).into_result("initial displacement")?;
    let sigma_max = resolve_sigma_max(d, cfg.sigma_max)?;
    let tau_max = match cfg.tau_max {
        Some(t) if t > sigma_max * (1.0 + 1e-12) => {
            return Err(RunupError::Config(format!(
                "tau_max = {t} exceeds sigma_max = {sigma_max}; the trace would leave the domain of dependence"
            )))
        }
        Some(t) => t.min(sigma_max),
        None => sigma_max,
    };
    let sigma = uniform_grid(0.0, sigma_max, cfg.n_sigma)?;
    let hodograph = initial_to_hodograph(d, &sigma)?;
    let peak = hodograph.psi0.max_abs();
    let truncation = if peak > 0.0 {
        hodograph.psi0.values().last().map_or(0.0, |v| v.abs()) / peak
    } else {
        0.0
    };
    if truncation >= TRUNCATION_RATIO {
        warn!("psi0 has not decayed at sigma_max = {sigma_max} (ratio {truncation:.2e})");
    }
    let tau = uniform_grid(0.0, tau_max, cfg.n_tau)?;
    let psi = poisson_boundary(&hodograph, &tau, &quad)?;
    let trace = trace_velocity(&psi)?;
    let record = trace_to_record(&trace)?;
    let record_breaking = breaking_check(&record).into_result("shoreline motion")?;
    let residual = shoreline_equation_residual_with(&hodograph, &trace, &quad, cfg.kernel_nodes)?;
    Ok(DirectSolution {
        sigma_max,
        tau_max,
        hodograph,
        trace,
        record,
        initial_breaking,
        record_breaking,
        truncation,
        residual_max: residual.max_abs(),
        residual,
    })
}

pub fn direct_shoreline(d: &PhysicalInitialData, cfg: &DirectConfig) -> Result<ShorelineRecord> {
    Ok(solve_direct(d, cfg)?.record)
}

/// Residual of the general shoreline equation
///
/// ```text
/// ψ₀(σ) − σφ₀(σ) + (2/π)∫₀^σ [∂ₛK₂(σ,s) − s K₀(σ,s)] φ₀(s) ds − (2/π)(AΨ)(σ)
/// ```
///
/// on the σ-nodes of `h` covered by the trace. It vanishes when `Ψ` is the
/// boundary trace generated by `(ψ₀, φ₀)`.
pub fn shoreline_equation_residual(
    h: &HodographInitialData,
    tr: &ShorelineTrace,
) -> Result<SampledFunction> {
    shoreline_equation_residual_with(h, tr, &AbelQuadrature::default(), 128)
}

pub fn shoreline_equation_residual_with(
    h: &HodographInitialData,
    tr: &ShorelineTrace,
    quad: &AbelQuadrature,
    kernel_nodes: usize,
) -> Result<SampledFunction> {
    let psi_trace = tr.psi_function()?;
    let (t_lo, t_hi) = psi_trace.domain();
    if t_lo > 0.0 {
        return Err(RunupError::Domain("trace must start at tau = 0".into()));
    }
    let limit = t_hi.min(h.sigma_max()) * (1.0 + 1e-12);
    let sigma: Vec<f64> = h
        .psi0
        .grid()
        .iter()
        .copied()
        .filter(|&s| s <= limit)
        .collect();
    if sigma.len() < 2 {
        return Err(RunupError::Domain(
            "trace and initial data share fewer than 2 nodes".into(),
        ));
    }
    let moving = !h.has_zero_velocity();
    let gl = GaussLegendre::new(kernel_nodes)?;
    let values = sigma
        .par_iter()
        .map(|&s| -> Result<f64> {
            let mut lhs = h.psi0.eval(s)?;
            if moving && s > 0.0 {
                lhs -= s * h.phi0.eval(s)?;
                let (nodes, weights) = gl.composite(0.0, s, 1);
                for (&u, &w) in nodes.iter().zip(&weights) {
                    lhs += w * combined_kernel(s, u)? * h.phi0.eval(u)?;
                }
            }
            let rhs = FRAC_2_PI * quad.angular(s, psi_trace.grid(), |u| psi_trace.eval(u))?;
            Ok(lhs - rhs)
        })
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(sigma, values)
}

/// `Ψ` of the Bessel mode `ψ₀ = J₀(ωσ)`: `cos(ωτ)`. Handy for checks.
pub fn bessel_mode_trace(omega: f64, tau: f64) -> f64 {
    (omega * tau).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_j0;

    #[test]
    fn zero_data_gives_zero_trace() {
        let sigma = uniform_grid(0.0, 2.0, 64).unwrap();
        let h = HodographInitialData::at_rest(
            SampledFunction::from_fn(sigma.clone(), |_| 0.0).unwrap(),
        )
        .unwrap();
        let psi = poisson_boundary(&h, &sigma, &AbelQuadrature::default()).unwrap();
        assert!(psi.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_velocity_gives_linear_trace() {
        let c = 0.3;
        let sigma = uniform_grid(0.0, 2.0, 64).unwrap();
        let h = HodographInitialData::new(
            SampledFunction::from_fn(sigma.clone(), |_| 0.0).unwrap(),
            SampledFunction::from_fn(sigma.clone(), |_| c).unwrap(),
        )
        .unwrap();
        let psi = poisson_boundary(&h, &sigma, &AbelQuadrature::default()).unwrap();
        for (&t, &p) in sigma.iter().zip(psi.values()) {
            assert!((p + 2.0 * c * t).abs() < 1e-13);
        }
    }

    #[test]
    fn bessel_mode_boundary() {
        let sigma = uniform_grid(0.0, 3.0, 2048).unwrap();
        let h = HodographInitialData::at_rest(
            SampledFunction::from_fn(sigma.clone(), |s| bessel_j0(2.0 * s)).unwrap(),
        )
        .unwrap();
        let psi = poisson_boundary(&h, &sigma, &AbelQuadrature::default()).unwrap();
        let err = sigma
            .iter()
            .zip(psi.values())
            .map(|(&t, &p)| (p - bessel_mode_trace(2.0, t)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        let tr = trace_velocity(&psi).unwrap();
        let verr = sigma
            .iter()
            .zip(&tr.v)
            .map(|(&t, &v)| (v - (2.0 * t).sin()).abs())
            .fold(0.0, f64::max);
        assert!(verr < 1e-6, "{verr}");
    }

    #[test]
    fn trace_velocity_of_simple_traces() {
        let tau = uniform_grid(0.0, 3.0, 301).unwrap();
        let flat = SampledFunction::from_fn(tau.clone(), |_| 0.4).unwrap();
        assert!(trace_velocity(&flat).unwrap().v.iter().all(|&v| v == 0.0));
        let cos = SampledFunction::from_fn(tau.clone(), |t| (2.0 * t).cos()).unwrap();
        let tr = trace_velocity(&cos).unwrap();
        for (&t, &v) in tau.iter().zip(&tr.v).skip(2).take(297) {
            assert!((v - (2.0 * t).sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn flat_sea_stays_at_rest() {
        let d =
            PhysicalInitialData::new(SampledFunction::uniform(0.0, 16.0, 200, |_| 0.0).unwrap());
        let cfg = DirectConfig {
            n_sigma: 128,
            n_tau: 128,
            ..Default::default()
        };
        let r = direct_shoreline(&d, &cfg).unwrap();
        assert!(r.x0.iter().chain(&r.v0).all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn default_sigma_max_tracks_the_support() {
        let d = PhysicalInitialData::new(
            SampledFunction::uniform(-0.1, 60.0, 3000, |x| {
                0.01 * (-4.0 * (x - 1.0) * (x - 1.0)).exp()
            })
            .unwrap(),
        );
        let s = resolve_sigma_max(&d, None).unwrap();
        // |eta0| >= 1e-8 max up to x = 1 + sqrt(ln(1e8)/4)
        let x_s = 1.0 + (1e8_f64.ln() / 4.0).sqrt();
        assert!((s - 4.0 * x_s.sqrt()).abs() < 0.05, "{s}");
        assert!(resolve_sigma_max(&d, Some(100.0)).is_err());
    }

    #[test]
    fn steep_profile_is_rejected() {
        let d = PhysicalInitialData::new(
            SampledFunction::uniform(-0.5, 16.0, 4000, |x| (-10.0 * (x - 1.0) * (x - 1.0)).exp())
                .unwrap(),
        );
        let err = direct_shoreline(&d, &DirectConfig::default()).unwrap_err();
        assert!(err.is_breaking());
    }

    #[test]
    fn out_of_coverage_trace_is_rejected() {
        let sigma = uniform_grid(0.0, 1.0, 64).unwrap();
        let h = HodographInitialData::at_rest(SampledFunction::from_fn(sigma, |_| 0.0).unwrap())
            .unwrap();
        let tau = uniform_grid(0.0, 2.0, 64).unwrap();
        assert!(poisson_boundary(&h, &tau, &AbelQuadrature::default()).is_err());
    }
}
