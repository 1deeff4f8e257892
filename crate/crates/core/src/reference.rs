//! Slow, independent reference evaluations used to check the production
//! paths. Nothing here shares code with the transforms it checks beyond the
//! adaptive integrator.

use crate::error::Result;
use crate::quadrature::adaptive_gauss_kronrod;

const ABS_TOL: f64 = 1e-15;
const REL_TOL: f64 = 1e-14;

/// `∫ₛˣ tⁿ dt / √((t² − s²)(x² − t²))` by adaptive quadrature.
///
/// The interval is split at its midpoint and each endpoint square root is
/// removed with `t = s + u²` (left) or `t = x − u²` (right). The gap `x − s`
/// is carried explicitly so nothing cancels near the diagonal.
pub fn kernel_by_quadrature(n: i32, x: f64, s: f64) -> Result<f64> {
    let gap = x - s;
    let left = |u: f64| {
        let t = s + u * u;
        2.0 * t.powi(n) / ((t + s) * (gap - u * u) * (x + t)).sqrt()
    };
    let right = |u: f64| {
        let t = x - u * u;
        2.0 * t.powi(n) / ((gap - u * u) * (t + s) * (x + t)).sqrt()
    };
    let r = (0.5 * gap).sqrt();
    Ok(adaptive_gauss_kronrod(left, 0.0, r, ABS_TOL, REL_TOL)?
        + adaptive_gauss_kronrod(right, 0.0, r, ABS_TOL, REL_TOL)?)
}

/// `∫₀ˣ f(s) ds / √(x² − s²)` with `s = x − u²`, which leaves the smooth
/// integrand `2 f(s) / √(x + s)` on `u ∈ [0, √x]`.
pub fn abel_by_quadrature(f: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(std::f64::consts::FRAC_PI_2 * f(0.0));
    }
    let g = |u: f64| {
        let s = x - u * u;
        2.0 * f(s) / (x + s).sqrt()
    };
    adaptive_gauss_kronrod(g, 0.0, x.sqrt(), ABS_TOL, REL_TOL)
}

/// `J₀(z)` from its power series; adequate for `|z| <= 12`.
pub fn bessel_j0_series(z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}
