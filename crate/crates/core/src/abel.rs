//! Forward and inverse Abel transforms
//!
//! ```text
//! (A f)(x)    = ∫₀ˣ f(s) ds / √(x² − s²)
//! (A⁻¹ g)(x)  = (2/π) d/dx ∫₀ˣ s g(s) ds / √(x² − s²)
//!             = (2/π) [ g(0) + x ∫₀ˣ g'(s) ds / √(x² − s²) ]
//! ```
//!
//! The second form of the inverse follows by integrating the inner integral
//! by parts (`s/√(x²−s²) = −d/ds √(x²−s²)`) and differentiating under the
//! integral sign; the boundary term at `s = x` vanishes.
//!
//! Both transforms substitute `s = x sinθ`, which turns the endpoint
//! singularity into the smooth integral `∫₀^{π/2} f(x sinθ) dθ`, evaluated
//! with composite Gauss-Legendre in θ. At `x = 0` this gives `(π/2) f(0)`.
//!
//! A sampled integrand is only piecewise smooth, and for large `x` its
//! pieces crowd into small angles near `θ = 0`. The θ-panels are therefore
//! cut at `asin(sᵢ/x)` for every sample `sᵢ < x`, on top of a fixed number
//! of equal panels, so each panel sees a single polynomial piece.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use rayon::prelude::*;

use crate::error::{Result, RunupError};
use crate::quadrature::GaussLegendre;
use crate::sampled::{validate_grid, SampledFunction};

/// Angular quadrature for `∫₀^{π/2} (·) dθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelQuadrature {
    panels: usize,
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl AbelQuadrature {
    pub const DEFAULT_PANELS: usize = 8;
    pub const DEFAULT_ORDER: usize = 8;

    pub fn new(panels: usize, order: usize) -> Result<Self> {
        if panels == 0 || order == 0 {
            return Err(RunupError::InvalidParameters(
                "Abel quadrature needs at least one panel and one node".into(),
            ));
        }
        let gl = GaussLegendre::new(order)?;
        Ok(Self {
            panels,
            order,
            nodes: gl.nodes().to_vec(),
            weights: gl.weights().to_vec(),
        })
    }

    /// Multiplies every weight by `1 + eps`. Only useful as a negative control.
    pub fn with_weight_perturbation(mut self, eps: f64) -> Self {
        for w in &mut self.weights {
            *w *= 1.0 + eps;
        }
        self
    }

    /// Nodes per evaluation when no breakpoints fall inside `(0, x)`.
    pub fn node_count(&self) -> usize {
        self.panels * self.order
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn panel(&self, a: f64, b: f64, x: f64, f: &impl Fn(f64) -> Result<f64>) -> Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(x * (mid + half * t).sin())?;
        }
        Ok(acc * half)
    }

    /// `∫₀^{π/2} f(x sinθ) dθ`, i.e. `(A f)(x)` for any callable `f`.
    /// `breaks` lists abscissas where `f` is not smooth (sorted ascending).
    pub fn angular(&self, x: f64, breaks: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        if x == 0.0 {
            let w: f64 = self.weights.iter().sum::<f64>() * 0.5;
            return Ok(w * FRAC_PI_2 * f(0.0)?);
        }
        let lo = breaks.partition_point(|&b| b <= 0.0);
        let hi = breaks.partition_point(|&b| b < x);
        let inner = breaks[lo..hi].iter().map(|&b| (b / x).asin());
        let even = (1..self.panels).map(|k| FRAC_PI_2 * k as f64 / self.panels as f64);
        // merge two ascending sequences of cut angles
        let mut cuts = Vec::with_capacity(hi - lo + self.panels + 1);
        cuts.push(0.0);
        let (mut a, mut b) = (inner.peekable(), even.peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (Some(&p), Some(&q)) if p <= q => a.next(),
                (Some(_), Some(_)) => b.next(),
                (Some(_), None) => a.next(),
                (None, Some(_)) => b.next(),
                (None, None) => break,
            };
            let c = next.expect("peeked");
            if c > cuts[cuts.len() - 1] + 1e-15 {
                cuts.push(c);
            }
        }
        if FRAC_PI_2 > cuts[cuts.len() - 1] + 1e-15 {
            cuts.push(FRAC_PI_2);
        } else {
            let last = cuts.len() - 1;
            cuts[last] = FRAC_PI_2;
        }
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            acc += self.panel(w[0], w[1], x, &f)?;
        }
        Ok(acc)
    }
}

impl Default for AbelQuadrature {
    fn default() -> Self {
        Self::new(Self::DEFAULT_PANELS, Self::DEFAULT_ORDER).expect("valid default")
    }
}

fn check_support(f: &SampledFunction, out_grid: &[f64]) -> Result<()> {
    validate_grid(out_grid)?;
    if out_grid[0] < 0.0 {
        return Err(RunupError::Domain(format!(
            "Abel transforms need nonnegative abscissas, got {}",
            out_grid[0]
        )));
    }
    let hi = out_grid[out_grid.len() - 1];
    if !f.covers(0.0, hi) {
        let (a, b) = f.domain();
        return Err(RunupError::OutOfRange {
            requested_lo: 0.0,
            requested_hi: hi,
            valid_lo: a,
            valid_hi: b,
        });
    }
    Ok(())
}

/// `(A f)(x)` at one point.
pub fn abel_forward_at(f: &SampledFunction, x: f64, quad: &AbelQuadrature) -> Result<f64> {
    quad.angular(x, f.grid(), |s| f.eval(s))
}

/// `(A⁻¹ g)(x)` at one point, using the integrated-by-parts form.
pub fn abel_inverse_at(g: &SampledFunction, x: f64, quad: &AbelQuadrature) -> Result<f64> {
    let g0 = g.eval(0.0)?;
    Ok(FRAC_2_PI * (g0 + x * quad.angular(x, g.grid(), |s| g.derivative(s))?))
}

pub fn abel_forward(f: &SampledFunction, out_grid: &[f64]) -> Result<SampledFunction> {
    abel_forward_with(f, out_grid, &AbelQuadrature::default())
}

pub fn abel_forward_with(
    f: &SampledFunction,
    out_grid: &[f64],
    quad: &AbelQuadrature,
) -> Result<SampledFunction> {
    check_support(f, out_grid)?;
    let values = out_grid
        .par_iter()
        .map(|&x| abel_forward_at(f, x, quad))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(out_grid.to_vec(), values)
}

pub fn abel_inverse(g: &SampledFunction, out_grid: &[f64]) -> Result<SampledFunction> {
    abel_inverse_with(g, out_grid, &AbelQuadrature::default())
}

pub fn abel_inverse_with(
    g: &SampledFunction,
    out_grid: &[f64],
    quad: &AbelQuadrature,
) -> Result<SampledFunction> {
    check_support(g, out_grid)?;
    let values = out_grid
        .par_iter()
        .map(|&x| abel_inverse_at(g, x, quad))
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(out_grid.to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampled::uniform_grid;
    use std::f64::consts::PI;

    fn max_err(f: &SampledFunction, exact: impl Fn(f64) -> f64) -> f64 {
        f.grid()
            .iter()
            .zip(f.values())
            .map(|(&x, &v)| (v - exact(x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn analytic_pairs() {
        let grid = uniform_grid(0.0, 2.0, 2048).unwrap();
        let one = SampledFunction::from_fn(grid.clone(), |_| 1.0).unwrap();
        let lin = SampledFunction::from_fn(grid.clone(), |s| s).unwrap();
        let sq = SampledFunction::from_fn(grid.clone(), |s| s * s).unwrap();
        assert!(max_err(&abel_forward(&one, &grid).unwrap(), |_| PI / 2.0) < 1e-12);
        assert!(max_err(&abel_forward(&lin, &grid).unwrap(), |x| x) < 1e-12);
        assert!(max_err(&abel_forward(&sq, &grid).unwrap(), |x| PI * x * x / 4.0) < 1e-6);
        let c = SampledFunction::from_fn(grid.clone(), |_| 0.7).unwrap();
        assert!(max_err(&abel_inverse(&c, &grid).unwrap(), |_| 1.4 / PI) < 1e-12);
        assert!(max_err(&abel_inverse(&lin, &grid).unwrap(), |x| x) < 1e-12);
    }

    #[test]
    fn value_at_origin_is_the_limit() {
        let f = SampledFunction::uniform(0.0, 1.0, 64, |s| 3.0 + s).unwrap();
        let a = abel_forward(&f, &[0.0, 0.5]).unwrap();
        assert!((a.values()[0] - 1.5 * PI).abs() < 1e-14);
    }

    #[test]
    fn linearity() {
        let grid = uniform_grid(0.0, 1.5, 300).unwrap();
        let f = SampledFunction::from_fn(grid.clone(), |s| (-s * s).exp()).unwrap();
        let g = SampledFunction::from_fn(grid.clone(), |s| (2.0 * s).cos()).unwrap();
        let (a, b) = (1.7, -0.4);
        let combo =
            SampledFunction::from_fn(grid.clone(), |s| a * (-s * s).exp() + b * (2.0 * s).cos())
                .unwrap();
        let lhs = abel_forward(&combo, &grid).unwrap();
        let af = abel_forward(&f, &grid).unwrap();
        let ag = abel_forward(&g, &grid).unwrap();
        for i in 0..grid.len() {
            let rhs = a * af.values()[i] + b * ag.values()[i];
            assert!((lhs.values()[i] - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn domain_errors() {
        let f = SampledFunction::uniform(0.0, 1.0, 16, |s| s).unwrap();
        assert!(matches!(
            abel_forward(&f, &[0.0, 2.0]),
            Err(RunupError::OutOfRange { .. })
        ));
        let shifted = SampledFunction::uniform(0.1, 1.0, 16, |s| s).unwrap();
        assert!(abel_forward(&shifted, &[0.5]).is_err());
        assert!(abel_inverse(&f, &[-0.1, 0.5]).is_err());
    }

    #[test]
    fn perturbed_weights_break_the_round_trip() {
        let grid = uniform_grid(0.0, 2.0, 512).unwrap();
        let f = SampledFunction::from_fn(grid.clone(), |s| (-s * s).exp()).unwrap();
        let bad = AbelQuadrature::default().with_weight_perturbation(1e-2);
        let g = abel_forward_with(&f, &grid, &bad).unwrap();
        let back = abel_inverse_with(&g, &grid, &bad).unwrap();
        assert!(max_err(&back, |s| (-s * s).exp()) > 1e-3);
    }
}
