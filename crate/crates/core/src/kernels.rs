//! Elliptic kernels of the general shoreline equation
//!
//! ```text
//! K_n(x, s) = ∫ₛˣ tⁿ dt / √((t² − s²)(x² − t²)),   n = 0, 2
//! ```
//!
//! Substituting `t² = x²(1 − k² sin²φ)` with `k² = 1 − s²/x²` gives
//! `dt/√(…) = −dφ/t`, hence
//!
//! ```text
//! K₀(x, s) = K(k) / x,    K₂(x, s) = x E(k),
//! ∂ₛK₂(x, s) = (s/x) (K(k) − E(k)) / k²
//! ```
//!
//! using `dE/dk = (E − K)/k` and `dk/ds = −s/(x² k)`.

use std::f64::consts::FRAC_2_PI;

use crate::error::{Result, RunupError};
use crate::special::{complete_elliptic, CompleteElliptic};

fn parameters(x: f64, s: f64) -> CompleteElliptic {
    let ratio = s / x;
    let m = (x - s) * (x + s) / (x * x);
    complete_elliptic(m.clamp(0.0, 1.0), (ratio * ratio).clamp(0.0, 1.0))
}

fn check(x: f64, s: f64, allow_zero: bool) -> Result<()> {
    let lower_ok = if allow_zero { s >= 0.0 } else { s > 0.0 };
    if !(x > 0.0 && x.is_finite() && lower_ok && s < x) {
        let lower = if allow_zero { "0 <= s" } else { "0 < s" };
        return Err(RunupError::Domain(format!(
            "kernel needs {lower} < x, got x={x}, s={s}"
        )));
    }
    Ok(())
}

/// `K₀(x, s)`. Returns `+∞` at `s = 0`, where the kernel has an integrable
/// logarithmic singularity.
pub fn kernel_k0(x: f64, s: f64) -> Result<f64> {
    check(x, s, true)?;
    if s == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(parameters(x, s).k / x)
}

/// `K₂(x, s)`; finite on `0 <= s < x` with `K₂(x, 0) = x`.
pub fn kernel_k2(x: f64, s: f64) -> Result<f64> {
    check(x, s, true)?;
    if s == 0.0 {
        return Ok(x);
    }
    Ok(x * parameters(x, s).e)
}

pub fn kernel_k2_ds(x: f64, s: f64) -> Result<f64> {
    check(x, s, false)?;
    Ok(s / x * parameters(x, s).k_minus_e_over_m)
}

/// The kernel multiplying `φ₀(s)` in the shoreline equation,
/// `(2/π) [∂ₛK₂(x, s) − s K₀(x, s)]`.
pub fn combined_kernel(x: f64, s: f64) -> Result<f64> {
    check(x, s, false)?;
    let p = parameters(x, s);
    Ok(FRAC_2_PI * (s / x) * (p.k_minus_e_over_m - p.k))
}

/// K₀ and ∂ₛK₂ tabulated at inner nodes for one outer abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub sigma: f64,
    pub s_nodes: Vec<f64>,
    pub k0: Vec<f64>,
    pub k2_ds: Vec<f64>,
}

impl KernelTable {
    pub fn new(sigma: f64, s_nodes: Vec<f64>) -> Result<Self> {
        if s_nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RunupError::Data(
                "kernel nodes must be strictly increasing".into(),
            ));
        }
        let mut k0 = Vec::with_capacity(s_nodes.len());
        let mut k2_ds = Vec::with_capacity(s_nodes.len());
        for &s in &s_nodes {
            check(sigma, s, false)?;
            let p = parameters(sigma, s);
            k0.push(p.k / sigma);
            k2_ds.push(s / sigma * p.k_minus_e_over_m);
        }
        Ok(Self {
            sigma,
            s_nodes,
            k0,
            k2_ds,
        })
    }

    pub fn combined(&self) -> impl Iterator<Item = f64> + '_ {
        self.s_nodes
            .iter()
            .zip(self.k0.iter().zip(&self.k2_ds))
            .map(|(&s, (&k0, &d))| FRAC_2_PI * (d - s * k0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::kernel_by_quadrature;
    use std::f64::consts::PI;

    fn oracle(n: i32, x: f64, s: f64) -> f64 {
        kernel_by_quadrature(n, x, s).unwrap()
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for &(x, s) in &[(1.0, 0.5), (2.0, 0.1), (0.7, 0.69), (3.0, 1e-3)] {
            let k0 = kernel_k0(x, s).unwrap();
            let k2 = kernel_k2(x, s).unwrap();
            assert!(
                (k0 / oracle(0, x, s) - 1.0).abs() < 1e-10,
                "K0 at ({x},{s})"
            );
            assert!(
                (k2 / oracle(2, x, s) - 1.0).abs() < 1e-10,
                "K2 at ({x},{s})"
            );
        }
    }

    #[test]
    fn limits_near_the_diagonal() {
        assert!((kernel_k0(1.0, 0.9999).unwrap() - PI / 2.0).abs() < 1e-3);
        assert!((kernel_k2(1.0, 0.9999).unwrap() - PI / 2.0).abs() < 1e-3);
        assert!((oracle(0, 1.0, 0.9999) - PI / 2.0).abs() < 1e-3);
    }

    #[test]
    fn derivative_matches_richardson_difference() {
        let (x, s, h) = (1.0, 0.5, 1e-5);
        let cd = |h: f64| (oracle(2, x, s + h) - oracle(2, x, s - h)) / (2.0 * h);
        let rich = (4.0 * cd(h / 2.0) - cd(h)) / 3.0;
        assert!((kernel_k2_ds(x, s).unwrap() - rich).abs() < 1e-6);
    }

    #[test]
    fn scaling_laws() {
        let (x, s, lam) = (1.3, 0.4, 2.0);
        let k0 = kernel_k0(x, s).unwrap();
        let k2 = kernel_k2(x, s).unwrap();
        assert!((kernel_k0(lam * x, lam * s).unwrap() - k0 / lam).abs() < 1e-12 * k0);
        assert!((kernel_k2(lam * x, lam * s).unwrap() - k2 * lam).abs() < 1e-12 * k2);
        let d = kernel_k2_ds(x, s).unwrap();
        assert!((kernel_k2_ds(lam * x, lam * s).unwrap() - d).abs() < 1e-12 * d.abs());
    }

    #[test]
    fn combined_is_its_components() {
        let (x, s) = (1.0, 0.5);
        let c = combined_kernel(x, s).unwrap();
        let parts = 2.0 / PI * (kernel_k2_ds(x, s).unwrap() - s * kernel_k0(x, s).unwrap());
        assert!((c - parts).abs() < 1e-15);
        let table = KernelTable::new(x, vec![0.25, 0.5]).unwrap();
        let comb: Vec<f64> = table.combined().collect();
        assert!((comb[1] - c).abs() < 1e-15);
    }

    #[test]
    fn domain_handling() {
        assert_eq!(kernel_k0(1.0, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(kernel_k2(2.0, 0.0).unwrap(), 2.0);
        assert!(kernel_k0(1.0, 1.0).is_err());
        assert!(kernel_k0(1.0, -0.1).is_err());
        assert!(kernel_k2_ds(1.0, 0.0).is_err());
        assert!(combined_kernel(1.0, 1.2).is_err());
    }
}
