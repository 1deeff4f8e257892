//! Complete elliptic integrals by the arithmetic-geometric mean, and Bessel
//! functions of the first kind.

use std::f64::consts::PI;

const AGM_MAX_ITER: usize = 64;

/// Complete elliptic integrals at parameter `m = k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompleteElliptic {
    /// First kind, K(m).
    pub k: f64,
    /// Second kind, E(m).
    pub e: f64,
    /// (K(m) − E(m)) / m, finite at m = 0 where it equals π/4.
    pub k_minus_e_over_m: f64,
}

/// K, E and (K−E)/m from the parameter `m` and its complement `mc = 1 − m`.
///
/// Both are passed so callers that know `mc` exactly (e.g. as `(s/x)²`) avoid
/// the cancellation in `1 − m`. The sum `Σ 2^(n−1) c_n²` of the AGM gives
/// `K − E = K·Σ` directly, so `(K−E)/m` has no cancellation as `m → 0`.
pub fn complete_elliptic(m: f64, mc: f64) -> CompleteElliptic {
    debug_assert!((0.0..=1.0).contains(&m) && (0.0..=1.0).contains(&mc));
    if mc == 0.0 {
        return CompleteElliptic {
            k: f64::INFINITY,
            e: 1.0,
            k_minus_e_over_m: f64::INFINITY,
        };
    }
    let mut a = 1.0_f64;
    let mut b = mc.sqrt();
    let mut c = m.sqrt();
    // q_n = c_n / c_0
    let mut q = 1.0_f64;
    let mut scaled_sum = 0.5; // Σ 2^(n−1) q_n², n = 0 term
    let mut pow2 = 0.5;
    for _ in 0..AGM_MAX_ITER {
        let a_next = 0.5 * (a + b);
        let b_next = (a * b).sqrt();
        let c_next = c * c / (4.0 * a_next);
        q *= c / (4.0 * a_next);
        pow2 *= 2.0;
        scaled_sum += pow2 * q * q;
        a = a_next;
        b = b_next;
        c = c_next;
        if c <= f64::EPSILON * 1e-2 * a && (a - b).abs() <= f64::EPSILON * a {
            break;
        }
    }
    let k = PI / (2.0 * a);
    let k_minus_e_over_m = k * scaled_sum;
    CompleteElliptic {
        k,
        e: k - m * k_minus_e_over_m,
        k_minus_e_over_m,
    }
}

/// Bessel function of the first kind `J_n(z)` for integer order.
///
/// Uses Bessel's integral `J_n(z) = (1/π)∫₀^π cos(nθ − z sinθ) dθ`. The
/// integrand extends to a smooth periodic function, so the trapezoidal rule
/// converges geometrically once the node count exceeds `|z| + n`.
pub fn bessel_j(n: u32, z: f64) -> f64 {
    let nodes = 2 * (z.abs() as usize + n as usize) + 64;
    let h = PI / nodes as f64;
    let nf = n as f64;
    let mut s = 0.5 * (1.0 + (nf * PI).cos());
    for i in 1..nodes {
        let th = i as f64 * h;
        s += (nf * th - z * th.sin()).cos();
    }
    s / nodes as f64
}

pub fn bessel_j0(z: f64) -> f64 {
    bessel_j(0, z)
}

pub fn bessel_j1(z: f64) -> f64 {
    bessel_j(1, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_reference_values() {
        // K(0.5), E(0.5)
        let r = complete_elliptic(0.5, 0.5);
        assert!((r.k - 1.854_074_677_301_372).abs() < 1e-14);
        assert!((r.e - 1.350_643_881_047_675_5).abs() < 1e-14);
        let z = complete_elliptic(0.0, 1.0);
        assert!((z.k - PI / 2.0).abs() < 1e-15);
        assert!((z.e - PI / 2.0).abs() < 1e-15);
        assert!((z.k_minus_e_over_m - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn k_minus_e_is_stable_for_tiny_modulus() {
        // (K−E)/m = π/4 (1 + 3m/8 + ...) as m → 0
        let m = 1e-10;
        let r = complete_elliptic(m, 1.0 - m);
        assert!((r.k_minus_e_over_m - PI / 4.0 * (1.0 + 3.0 * m / 8.0)).abs() < 1e-14);
    }

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j0(10.0) - (-0.245_935_764_451_348_3)).abs() < 1e-14);
        assert!((bessel_j0(2.404_825_557_695_773)).abs() < 1e-14);
        assert_eq!(bessel_j0(0.0), 1.0);
    }
}
