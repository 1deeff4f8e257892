//! Sampled functions on strictly increasing grids.
//!
//! Values between nodes come from a cubic Hermite interpolant whose node
//! slopes are fourth-order finite differences: five-point Lagrange stencils
//! on the actual, possibly nonuniform, grid, shifted inward at the ends.
//!
//! The [`Interpolation::Monotone`] variant trades derivative accuracy for
//! shape preservation. It uses three-point stencils next to and at the ends
//! and clips slopes on monotone stretches with the Fritsch-Carlson bound
//! `|d| <= 3 min(|delta|)`, so the interpolant never overshoots a front. The
//! clipping also flattens slopes beside every extremum, which makes it a poor
//! choice for anything that is differentiated afterwards.
//!
//! Evaluation outside the grid is an error.

use crate::error::{Result, RunupError};

/// Relative slack allowed when an evaluation point falls just outside the
/// grid because of rounding (e.g. `x * sin(pi/2)`).
const EDGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Unlimited fourth-order slopes.
    #[default]
    Smooth,
    /// Fritsch-Carlson limited slopes.
    Monotone,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    kind: Interpolation,
}

impl SampledFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_interpolation(grid, values, Interpolation::Smooth)
    }

    pub fn monotone(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_interpolation(grid, values, Interpolation::Monotone)
    }

    pub fn with_interpolation(
        grid: Vec<f64>,
        values: Vec<f64>,
        kind: Interpolation,
    ) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(RunupError::Data(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(RunupError::Data(
                "a sampled function needs at least 2 points".into(),
            ));
        }
        validate_grid(&grid)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(RunupError::Data(format!("non-finite value at index {i}")));
        }
        let slopes = match kind {
            Interpolation::Smooth => smooth_slopes(&grid, &values),
            Interpolation::Monotone => monotone_slopes(&grid, &values),
        };
        Ok(Self {
            grid,
            values,
            slopes,
            kind,
        })
    }

    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    /// Samples `f` on `n` uniformly spaced points spanning `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(uniform_grid(a, b, n)?, f)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.kind
    }

    /// Interpolant slopes at the nodes.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        let (a, b) = self.domain();
        let slack = EDGE_SLACK * (1.0 + a.abs().max(b.abs()));
        lo >= a - slack && hi <= b + slack
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        let (a, b) = self.domain();
        let slack = EDGE_SLACK * (1.0 + a.abs().max(b.abs()));
        if !(x >= a - slack && x <= b + slack) {
            return Err(RunupError::OutOfRange {
                requested_lo: x,
                requested_hi: x,
                valid_lo: a,
                valid_hi: b,
            });
        }
        let x = x.clamp(a, b);
        let n = self.grid.len();
        let i = self.grid.partition_point(|&g| g <= x).clamp(1, n - 1) - 1;
        let h = self.grid[i + 1] - self.grid[i];
        Ok((i, (x - self.grid[i]) / h))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (i, t) = self.locate(x)?;
        let h = self.grid[i + 1] - self.grid[i];
        let t2 = t * t;
        let t3 = t2 * t;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        // h00 = 1 − h01; written this way constants interpolate exactly
        Ok(self.values[i]
            + h01 * (self.values[i + 1] - self.values[i])
            + h10 * h * self.slopes[i]
            + h11 * h * self.slopes[i + 1])
    }

    /// Derivative of the interpolant.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let (i, t) = self.locate(x)?;
        let h = self.grid[i + 1] - self.grid[i];
        let t2 = t * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        Ok(d01 * (self.values[i + 1] - self.values[i]) / h
            + d10 * self.slopes[i]
            + d11 * self.slopes[i + 1])
    }

    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    /// Re-samples the interpolant on a new grid inside the current domain.
    pub fn resample(&self, grid: Vec<f64>) -> Result<Self> {
        validate_grid(&grid)?;
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        if !self.covers(lo, hi) {
            let (a, b) = self.domain();
            return Err(RunupError::OutOfRange {
                requested_lo: lo,
                requested_hi: hi,
                valid_lo: a,
                valid_hi: b,
            });
        }
        let values = self.eval_many(&grid)?;
        Self::with_interpolation(grid, values, self.kind)
    }

    /// Node slopes as a sampled function on the same grid.
    pub fn derivative_samples(&self) -> Result<Self> {
        Self::with_interpolation(self.grid.clone(), self.slopes.clone(), self.kind)
    }

    pub fn map_values(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        Self::with_interpolation(self.grid.clone(), values, self.kind)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.map_values(|_, v| factor * v)
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.grid, self.values)
    }
}

/// `n` uniformly spaced points spanning `[a, b]`, endpoints exact.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !a.is_finite() || !b.is_finite() || b <= a {
        return Err(RunupError::InvalidParameters(format!(
            "uniform grid needs n >= 2 and a < b, got n={n}, [{a}, {b}]"
        )));
    }
    let h = (b - a) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
    g[n - 1] = b;
    Ok(g)
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(RunupError::Data("empty grid".into()));
    }
    if let Some(i) = grid.iter().position(|v| !v.is_finite()) {
        return Err(RunupError::Data(format!(
            "non-finite abscissa at index {i}"
        )));
    }
    if let Some(i) = grid.windows(2).position(|w| w[1] <= w[0]) {
        return Err(RunupError::Data(format!(
            "abscissas must be strictly increasing (index {} -> {}: {} -> {})",
            i,
            i + 1,
            grid[i],
            grid[i + 1]
        )));
    }
    Ok(())
}

/// Derivative at `xs[k]` of the Lagrange polynomial through `(xs, ys)`.
/// The weights sum to zero, so the sum is taken over `ys[j] − ys[k]`, which
/// keeps constants exact.
fn lagrange_slope(xs: &[f64], ys: &[f64], k: usize) -> f64 {
    let xk = xs[k];
    let mut d = 0.0;
    for j in 0..xs.len() {
        if j == k {
            continue;
        }
        let mut num = 1.0;
        let mut den = 1.0;
        for (i, &xi) in xs.iter().enumerate() {
            if i != j {
                den *= xs[j] - xi;
                if i != k {
                    num *= xk - xi;
                }
            }
        }
        d += num / den * (ys[j] - ys[k]);
    }
    d
}

fn smooth_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 5 {
        return (0..n).map(|k| lagrange_slope(x, y, k)).collect();
    }
    (0..n)
        .map(|k| {
            let start = k.saturating_sub(2).min(n - 5);
            lagrange_slope(&x[start..start + 5], &y[start..start + 5], k - start)
        })
        .collect()
}

fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 0..n {
        let raw = if k == 0 {
            lagrange_slope(&x[0..3], &y[0..3], 0)
        } else if k == n - 1 {
            lagrange_slope(&x[n - 3..], &y[n - 3..], 2)
        } else if k < 2 || k + 2 >= n {
            lagrange_slope(&x[k - 1..k + 2], &y[k - 1..k + 2], 1)
        } else {
            lagrange_slope(&x[k - 2..k + 3], &y[k - 2..k + 3], 2)
        };
        d[k] = if k == 0 {
            limit_end(raw, delta[0])
        } else if k == n - 1 {
            limit_end(raw, delta[n - 2])
        } else {
            limit_interior(raw, delta[k - 1], delta[k])
        };
    }
    d
}

fn limit_interior(d: f64, left: f64, right: f64) -> f64 {
    if left == 0.0 || right == 0.0 {
        return 0.0;
    }
    if left.signum() != right.signum() {
        // local extremum of the data: keep the high-order estimate
        return d;
    }
    let s = left.signum();
    let bound = 3.0 * left.abs().min(right.abs());
    s * (s * d).clamp(0.0, bound)
}

fn limit_end(d: f64, delta: f64) -> f64 {
    if delta == 0.0 || d.signum() != delta.signum() {
        return 0.0;
    }
    if d.abs() > 3.0 * delta.abs() {
        3.0 * delta
    } else {
        d
    }
}
