//! Finite-difference solution of the hodograph wave equation
//!
//! ```text
//! ψ_ττ = ψ_σσ + ψ_σ/σ,        ψ_σ = −σ φ_τ,    ψ_τ = −σ φ_σ − 2φ
//! ```
//!
//! used as an independent check on the transform solution. ψ is advanced by
//! leapfrog on a uniform σ-grid. On the axis the Laplacian is replaced by
//! its limit `2ψ_σσ(0) ≈ 4(ψ₁ − ψ₀)/h²`. φ is integrated in τ from
//! `φ_τ = −ψ_σ/σ` with the trapezoid rule, whose axis limit is `−ψ_σσ(0)`.
//! The outer boundary holds ψ at its initial value, so results are only
//! trustworthy for `τ` below the distance to that boundary.

use ndarray::{Array1, Array2, Axis};

use crate::error::{Result, RunupError};
use crate::hodograph::{HodographInitialData, ShorelineTrace};
use crate::sampled::uniform_grid;

/// Largest accepted Courant number `Δτ/Δσ`.
pub const MAX_CFL: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveConfig {
    pub n_sigma: usize,
    /// End of the run. Defaults to half the σ-extent of the data, which keeps
    /// boundary reflections away from the axis for data supported on the
    /// inner half.
    pub tau_max: Option<f64>,
    pub cfl: f64,
    /// Keep a field snapshot every this many steps (the boundary is kept at
    /// every step).
    pub store_every: usize,
}

impl Default for WaveConfig {
    fn default() -> Self {
        Self {
            n_sigma: 1024,
            tau_max: None,
            cfl: 0.5,
            store_every: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HodographField {
    pub sigma: Array1<f64>,
    pub dtau: f64,
    /// Snapshot times, one per row of `psi` and `phi`.
    pub tau: Array1<f64>,
    pub psi: Array2<f64>,
    pub phi: Array2<f64>,
    boundary_tau: Vec<f64>,
    boundary_psi: Vec<f64>,
    boundary_phi: Vec<f64>,
}

impl HodographField {
    pub fn steps(&self) -> usize {
        self.boundary_tau.len() - 1
    }
}

/// Discrete `ψ_σσ + ψ_σ/σ` with the axis limit in slot 0. The last slot is
/// left at zero (Dirichlet).
fn laplacian(psi: &[f64], h: f64, out: &mut [f64]) {
    let n = psi.len();
    let h2 = h * h;
    out[0] = 4.0 * (psi[1] - psi[0]) / h2;
    for j in 1..n - 1 {
        let sigma = j as f64 * h;
        out[j] = (psi[j + 1] - 2.0 * psi[j] + psi[j - 1]) / h2
            + (psi[j + 1] - psi[j - 1]) / (2.0 * h * sigma);
    }
    out[n - 1] = 0.0;
}

/// `ψ_σ/σ`, with `ψ_σσ(0)` on the axis.
fn flux(psi: &[f64], h: f64, out: &mut [f64]) {
    let n = psi.len();
    out[0] = 2.0 * (psi[1] - psi[0]) / (h * h);
    for j in 1..n - 1 {
        out[j] = (psi[j + 1] - psi[j - 1]) / (2.0 * h * (j as f64 * h));
    }
    let last = (n - 1) as f64 * h;
    out[n - 1] = (3.0 * psi[n - 1] - 4.0 * psi[n - 2] + psi[n - 3]) / (2.0 * h * last);
}

pub fn evolve(h: &HodographInitialData, cfg: &WaveConfig) -> Result<HodographField> {
    let sigma_max = h.sigma_max();
    let tau_max = cfg.tau_max.unwrap_or(0.5 * sigma_max);
    if cfg.n_sigma < 4 {
        return Err(RunupError::Config(
            "wave solver needs at least 4 sigma nodes".into(),
        ));
    }
    if !(cfg.cfl > 0.0 && cfg.cfl <= MAX_CFL) {
        return Err(RunupError::Config(format!(
            "CFL number must lie in (0, {MAX_CFL}], got {}",
            cfg.cfl
        )));
    }
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(RunupError::Config(format!(
            "tau_max must be positive, got {tau_max}"
        )));
    }
    let store_every = cfg.store_every.max(1);
    let sigma = uniform_grid(0.0, sigma_max, cfg.n_sigma)?;
    let dsigma = sigma[1] - sigma[0];
    let steps = ((tau_max / (cfg.cfl * dsigma)) * (1.0 - 1e-12))
        .ceil()
        .max(1.0) as usize;
    let dt = tau_max / steps as f64;
    let n = sigma.len();

    let psi0 = h.psi0.eval_many(&sigma)?;
    let phi0 = h.phi0.eval_many(&sigma)?;
    let dphi0: Vec<f64> = sigma
        .iter()
        .map(|&s| h.phi0.derivative(s))
        .collect::<Result<_>>()?;
    let scale = 1.0 + h.psi0.max_abs() + h.phi0.max_abs();

    let mut lap = vec![0.0; n];
    let mut g_old = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    laplacian(&psi0, dsigma, &mut lap);
    flux(&psi0, dsigma, &mut g_old);

    // Taylor start: ψ¹ = ψ⁰ + Δτ ψ_τ + Δτ²/2 Lψ⁰
    let mut prev = psi0.clone();
    let mut cur: Vec<f64> = (0..n)
        .map(|j| {
            if j == n - 1 {
                psi0[j]
            } else {
                let psi_t = -sigma[j] * dphi0[j] - 2.0 * phi0[j];
                psi0[j] + dt * psi_t + 0.5 * dt * dt * lap[j]
            }
        })
        .collect();
    let mut phi = phi0.clone();

    let mut snap_tau = vec![0.0];
    let mut snap_psi = psi0.clone();
    let mut snap_phi = phi0.clone();
    let mut b_tau = Vec::with_capacity(steps + 1);
    let mut b_psi = Vec::with_capacity(steps + 1);
    let mut b_phi = Vec::with_capacity(steps + 1);
    b_tau.push(0.0);
    b_psi.push(psi0[0]);
    b_phi.push(phi0[0]);

    for step in 1..=steps {
        // `cur` holds ψ at this step; bring φ up to it.
        flux(&cur, dsigma, &mut g_new);
        for j in 0..n {
            phi[j] -= 0.5 * dt * (g_old[j] + g_new[j]);
        }
        std::mem::swap(&mut g_old, &mut g_new);

        let tau = step as f64 * dt;
        if !cur[0].is_finite() || cur.iter().any(|v| !v.is_finite() || v.abs() > 1e6 * scale) {
            return Err(RunupError::Stability(format!(
                "wave solution blew up at tau = {tau}"
            )));
        }
        b_tau.push(tau);
        b_psi.push(cur[0]);
        b_phi.push(phi[0]);
        if step % store_every == 0 || step == steps {
            snap_tau.push(tau);
            snap_psi.extend_from_slice(&cur);
            snap_phi.extend_from_slice(&phi);
        }
        if step == steps {
            break;
        }
        laplacian(&cur, dsigma, &mut lap);
        let next: Vec<f64> = (0..n)
            .map(|j| {
                if j == n - 1 {
                    cur[j]
                } else {
                    2.0 * cur[j] - prev[j] + dt * dt * lap[j]
                }
            })
            .collect();
        prev = std::mem::replace(&mut cur, next);
    }

    let rows = snap_tau.len();
    let to_array = |v: Vec<f64>| Array2::from_shape_vec((rows, n), v).expect("snapshot shape");
    Ok(HodographField {
        sigma: Array1::from(sigma),
        dtau: dt,
        tau: Array1::from(snap_tau),
        psi: to_array(snap_psi),
        phi: to_array(snap_phi),
        boundary_tau: b_tau,
        boundary_psi: b_psi,
        boundary_phi: b_phi,
    })
}

/// `Ψ(τ) = ψ(0, τ)` and `V(τ) = φ(0, τ)` at every time step.
pub fn extract_boundary(sol: &HodographField) -> Result<ShorelineTrace> {
    ShorelineTrace::new(
        sol.boundary_tau.clone(),
        sol.boundary_psi.clone(),
        sol.boundary_phi.clone(),
    )
}

/// Largest deviation of any stored ψ from its initial row.
pub fn max_drift(sol: &HodographField) -> f64 {
    let first = sol.psi.index_axis(Axis(0), 0).to_owned();
    sol.psi
        .axis_iter(Axis(0))
        .map(|row| (&row - &first).iter().fold(0.0_f64, |m, v| m.max(v.abs())))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampled::SampledFunction;
    use crate::special::bessel_j0;

    fn bessel_data(sigma_max: f64) -> HodographInitialData {
        HodographInitialData::at_rest(
            SampledFunction::uniform(0.0, sigma_max, 4096, |s| bessel_j0(2.0 * s)).unwrap(),
        )
        .unwrap()
    }

    fn bessel_error(n_sigma: usize) -> (f64, f64) {
        let sol = evolve(
            &bessel_data(6.0),
            &WaveConfig {
                n_sigma,
                tau_max: Some(3.0),
                ..Default::default()
            },
        )
        .unwrap();
        let tr = extract_boundary(&sol).unwrap();
        let ep = tr
            .tau
            .iter()
            .zip(&tr.psi)
            .map(|(&t, &p)| (p - (2.0 * t).cos()).abs())
            .fold(0.0, f64::max);
        let ev = tr
            .tau
            .iter()
            .zip(&tr.v)
            .map(|(&t, &v)| (v - (2.0 * t).sin()).abs())
            .fold(0.0, f64::max);
        (ep, ev)
    }

    #[test]
    fn bessel_mode_converges_at_second_order() {
        let (p1, v1) = bessel_error(256);
        let (p2, v2) = bessel_error(512);
        assert!(p2 < 1e-3 && v2 < 1e-3, "{p2} {v2}");
        assert!(p1 / p2 > 3.0 && v1 / v2 > 3.0, "{p1} {p2} {v1} {v2}");
    }

    #[test]
    fn bessel_mode_interior_field() {
        let cfg = WaveConfig {
            n_sigma: 512,
            tau_max: Some(2.0),
            store_every: 64,
            ..Default::default()
        };
        let sol = evolve(&bessel_data(6.0), &cfg).unwrap();
        let last = sol.tau.len() - 1;
        let tau = sol.tau[last];
        for (j, &s) in sol.sigma.iter().enumerate().filter(|(_, &s)| s <= 3.0) {
            let exact_psi = bessel_j0(2.0 * s) * (2.0 * tau).cos();
            let ratio = if s == 0.0 {
                1.0
            } else {
                crate::special::bessel_j1(2.0 * s) / s
            };
            let exact_phi = ratio * (2.0 * tau).sin();
            assert!((sol.psi[[last, j]] - exact_psi).abs() < 1e-3, "psi at {s}");
            assert!((sol.phi[[last, j]] - exact_phi).abs() < 1e-3, "phi at {s}");
        }
    }

    #[test]
    fn constant_state_is_preserved() {
        let h = HodographInitialData::at_rest(
            SampledFunction::uniform(0.0, 2.0, 64, |_| 0.37).unwrap(),
        )
        .unwrap();
        let dsigma = 2.0 / 199.0;
        let cfg = WaveConfig {
            n_sigma: 200,
            tau_max: Some(1000.0 * 0.5 * dsigma),
            cfl: 0.5,
            store_every: 1,
        };
        let sol = evolve(&h, &cfg).unwrap();
        assert_eq!(sol.steps(), 1000);
        assert!(max_drift(&sol) <= 1e-12, "{}", max_drift(&sol));
        assert!(sol.phi.iter().all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn uniform_velocity_is_an_exact_solution() {
        // φ = c, ψ = −2cτ
        let c = 0.2;
        let h = HodographInitialData::new(
            SampledFunction::uniform(0.0, 3.0, 64, |_| 0.0).unwrap(),
            SampledFunction::uniform(0.0, 3.0, 64, |_| c).unwrap(),
        )
        .unwrap();
        let sol = evolve(
            &h,
            &WaveConfig {
                n_sigma: 128,
                tau_max: Some(1.0),
                ..Default::default()
            },
        )
        .unwrap();
        let tr = extract_boundary(&sol).unwrap();
        for ((&t, &p), &v) in tr.tau.iter().zip(&tr.psi).zip(&tr.v) {
            assert!((p + 2.0 * c * t).abs() < 1e-12 && (v - c).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_configuration() {
        let h = bessel_data(2.0);
        assert!(evolve(
            &h,
            &WaveConfig {
                cfl: 0.9,
                ..Default::default()
            }
        )
        .is_err());
        assert!(evolve(
            &h,
            &WaveConfig {
                tau_max: Some(-1.0),
                ..Default::default()
            }
        )
        .is_err());
        assert!(evolve(
            &h,
            &WaveConfig {
                n_sigma: 2,
                ..Default::default()
            }
        )
        .is_err());
    }
}
