//! Carrier-Greenspan hodograph maps.
//!
//! The change of variables `σ² = x + η`, `τ = (t − u)/2`, `φ = u`,
//! `ψ = η + u²/2` pins the moving shoreline at `σ = 0`. With no initial
//! velocity the initial line `t = 0` maps onto `τ = 0`, where
//! `ψ₀(σ) = η₀(γ(σ))` and `γ` solves `x + η₀(x) = σ²`. At the shoreline
//! `Ψ(τ) = −x₀(t) + v₀(t)²/2` and `τ = (t − v₀(t))/2`.
//!
//! Both maps stay invertible only while the wave does not break, i.e. while
//! `1 + η₀'(x) > 0` for the initial data and `1 − v₀'(t) > 0` along the
//! shoreline.

use serde::Serialize;

use crate::error::{Result, RunupError};
use crate::sampled::{validate_grid, SampledFunction};

/// Margins at or below this value are reported as near-breaking.
pub const NEAR_BREAKING_MARGIN: f64 = 0.05;

const ROOT_TOL: f64 = 1e-13;

/// Initial state in the physical plane. The initial velocity is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalInitialData {
    pub eta0: SampledFunction,
}

impl PhysicalInitialData {
    pub fn new(eta0: SampledFunction) -> Self {
        Self { eta0 }
    }
}

/// Cauchy data on `τ = 0` in the hodograph plane.
#[derive(Debug, Clone, PartialEq)]
pub struct HodographInitialData {
    pub psi0: SampledFunction,
    pub phi0: SampledFunction,
}

impl HodographInitialData {
    pub fn new(psi0: SampledFunction, phi0: SampledFunction) -> Result<Self> {
        if psi0.grid()[0] != 0.0 || phi0.grid()[0] != 0.0 {
            return Err(RunupError::Domain(
                "hodograph initial data must start at sigma = 0".into(),
            ));
        }
        Ok(Self { psi0, phi0 })
    }

    /// `ψ₀` with `φ₀ ≡ 0` on the same grid.
    pub fn at_rest(psi0: SampledFunction) -> Result<Self> {
        let phi0 = SampledFunction::new(psi0.grid().to_vec(), vec![0.0; psi0.len()])?;
        Self::new(psi0, phi0)
    }

    pub fn has_zero_velocity(&self) -> bool {
        self.phi0.values().iter().all(|&v| v == 0.0)
    }

    /// Largest σ on which both fields are defined.
    pub fn sigma_max(&self) -> f64 {
        self.psi0.domain().1.min(self.phi0.domain().1)
    }
}

/// Shoreline motion `(t, x₀(t), v₀(t))` in the physical plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ShorelineRecord {
    pub t: Vec<f64>,
    pub x0: Vec<f64>,
    pub v0: Vec<f64>,
}

impl ShorelineRecord {
    pub fn new(t: Vec<f64>, x0: Vec<f64>, v0: Vec<f64>) -> Result<Self> {
        if t.len() != x0.len() || t.len() != v0.len() {
            return Err(RunupError::Data("record columns differ in length".into()));
        }
        if t.len() < 2 {
            return Err(RunupError::Data("a record needs at least 2 samples".into()));
        }
        validate_grid(&t)?;
        if x0.iter().chain(&v0).any(|v| !v.is_finite()) {
            return Err(RunupError::Data("record values must be finite".into()));
        }
        Ok(Self { t, x0, v0 })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Boundary data at `σ = 0`: `Ψ(τ) = ψ(0, τ)` and `V(τ) = φ(0, τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShorelineTrace {
    pub tau: Vec<f64>,
    pub psi: Vec<f64>,
    pub v: Vec<f64>,
}

impl ShorelineTrace {
    pub fn new(tau: Vec<f64>, psi: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if tau.len() != psi.len() || tau.len() != v.len() {
            return Err(RunupError::Data("trace columns differ in length".into()));
        }
        if psi.iter().chain(&v).chain(&tau).any(|x| !x.is_finite()) {
            return Err(RunupError::Data("trace values must be finite".into()));
        }
        if let Some(i) = tau.windows(2).position(|w| w[1] <= w[0]) {
            return Err(RunupError::Breaking {
                detail: format!("hodograph time is not increasing at sample {}", i + 1),
                margin: 0.0,
            });
        }
        Ok(Self { tau, psi, v })
    }

    pub fn psi_function(&self) -> Result<SampledFunction> {
        SampledFunction::new(self.tau.clone(), self.psi.clone())
    }

    pub fn v_function(&self) -> Result<SampledFunction> {
        SampledFunction::new(self.tau.clone(), self.v.clone())
    }
}

/// Tabulated total depth `x + η₀(x)`, used to bracket `γ(σ)`.
struct DepthTable<'a> {
    eta0: &'a SampledFunction,
    depth: Vec<f64>,
}

impl<'a> DepthTable<'a> {
    fn new(eta0: &'a SampledFunction) -> Result<Self> {
        let depth: Vec<f64> = eta0
            .grid()
            .iter()
            .zip(eta0.values())
            .map(|(x, e)| x + e)
            .collect();
        if let Some(i) = depth.windows(2).position(|w| w[1] <= w[0]) {
            let g = eta0.grid();
            let margin = (depth[i + 1] - depth[i]) / (g[i + 1] - g[i]);
            return Err(RunupError::Breaking {
                detail: format!(
                    "total depth x + eta0 is not increasing on [{}, {}]",
                    g[i],
                    g[i + 1]
                ),
                margin,
            });
        }
        Ok(Self { eta0, depth })
    }

    fn solve(&self, sigma: f64) -> Result<f64> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(RunupError::Domain(format!(
                "sigma must be >= 0, got {sigma}"
            )));
        }
        let n = self.depth.len();
        let (lo_d, hi_d) = (self.depth[0], self.depth[n - 1]);
        let mut target = sigma * sigma;
        // σ_max = √(depth at the last node) squares back with rounding
        if target > hi_d && target <= hi_d * (1.0 + 1e-12) {
            target = hi_d;
        }
        if target < lo_d || target > hi_d {
            return Err(RunupError::Domain(format!(
                "sigma^2 = {target} outside the tabulated depth range [{lo_d}, {hi_d}]"
            )));
        }
        let grid = self.eta0.grid();
        let i = self.depth.partition_point(|&d| d <= target).clamp(1, n - 1) - 1;
        if self.depth[i] == target {
            return Ok(grid[i]);
        }
        let residual = |x: f64| -> Result<f64> { Ok(x + self.eta0.eval(x)? - target) };
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        let mut fa = residual(a)?;
        // linear guess inside the bracket
        let mut x = a + (b - a) * (target - self.depth[i]) / (self.depth[i + 1] - self.depth[i]);
        for _ in 0..200 {
            let f = residual(x)?;
            if f.abs() <= ROOT_TOL * (1.0 + target) {
                return Ok(x);
            }
            if (f < 0.0) == (fa < 0.0) {
                a = x;
                fa = f;
            } else {
                b = x;
            }
            let slope = 1.0 + self.eta0.derivative(x)?;
            let newton = x - f / slope;
            x = if slope > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if b - a <= f64::EPSILON * (1.0 + a.abs()) {
                return Ok(x);
            }
        }
        Ok(x)
    }
}

/// The unique `x` with `x + η₀(x) = σ²`.
pub fn gamma_solve(eta0: &SampledFunction, sigma: f64) -> Result<f64> {
    DepthTable::new(eta0)?.solve(sigma)
}

/// `ψ₀(σ) = η₀(γ(σ))`, `φ₀ ≡ 0`.
pub fn initial_to_hodograph(
    d: &PhysicalInitialData,
    sigma_grid: &[f64],
) -> Result<HodographInitialData> {
    let table = DepthTable::new(&d.eta0)?;
    let psi = sigma_grid
        .iter()
        .map(|&s| table.solve(s).and_then(|x| d.eta0.eval(x)))
        .collect::<Result<Vec<_>>>()?;
    HodographInitialData::at_rest(SampledFunction::new(sigma_grid.to_vec(), psi)?)
}

/// Parametric inverse of [`initial_to_hodograph`]: `x(σ) = σ² − ψ₀(σ)`,
/// `η₀(x(σ)) = ψ₀(σ)`. The result is sampled on the nodes `x(σᵢ)`.
pub fn hodograph_ic_to_physical(h: &HodographInitialData) -> Result<PhysicalInitialData> {
    if !h.has_zero_velocity() {
        return Err(RunupError::Domain(
            "initial data with nonzero velocity cannot be mapped back on tau = 0".into(),
        ));
    }
    let sigma = h.psi0.grid();
    let psi = h.psi0.values();
    let x: Vec<f64> = sigma.iter().zip(psi).map(|(s, p)| s * s - p).collect();
    if let Some(i) = x.windows(2).position(|w| w[1] <= w[0]) {
        let margin = (x[i + 1] - x[i]) / (sigma[i + 1] * sigma[i + 1] - sigma[i] * sigma[i]);
        return Err(RunupError::Breaking {
            detail: format!(
                "x(sigma) = sigma^2 - psi0 is not increasing near sigma = {}",
                sigma[i]
            ),
            margin,
        });
    }
    Ok(PhysicalInitialData::new(SampledFunction::new(
        x,
        psi.to_vec(),
    )?))
}

/// Physical record to boundary trace, pointwise.
pub fn record_to_trace(r: &ShorelineRecord) -> Result<ShorelineTrace> {
    let tau: Vec<f64> = r.t.iter().zip(&r.v0).map(|(t, v)| 0.5 * (t - v)).collect();
    let psi: Vec<f64> =
        r.x0.iter()
            .zip(&r.v0)
            .map(|(x, v)| -x + 0.5 * v * v)
            .collect();
    if let Some(i) = tau.windows(2).position(|w| w[1] <= w[0]) {
        let margin = 2.0 * (tau[i + 1] - tau[i]) / (r.t[i + 1] - r.t[i]);
        return Err(RunupError::Breaking {
            detail: format!("tau = (t - v0)/2 decreases at t = {}", r.t[i + 1]),
            margin,
        });
    }
    ShorelineTrace::new(tau, psi, r.v0.clone())
}

/// Boundary trace to physical record: `t = 2τ + V`, `x₀ = −Ψ + V²/2`.
pub fn trace_to_record(tr: &ShorelineTrace) -> Result<ShorelineRecord> {
    let t: Vec<f64> = tr
        .tau
        .iter()
        .zip(&tr.v)
        .map(|(tau, v)| 2.0 * tau + v)
        .collect();
    let x0: Vec<f64> = tr
        .psi
        .iter()
        .zip(&tr.v)
        .map(|(p, v)| -p + 0.5 * v * v)
        .collect();
    if let Some(i) = t.windows(2).position(|w| w[1] <= w[0]) {
        let margin = (t[i + 1] - t[i]) / (2.0 * (tr.tau[i + 1] - tr.tau[i]));
        return Err(RunupError::Breaking {
            detail: format!(
                "physical time t = 2 tau + V decreases at tau = {}",
                tr.tau[i + 1]
            ),
            margin,
        });
    }
    ShorelineRecord::new(t, x0, tr.v.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BreakingStatus {
    Ok,
    NearBreaking,
    Breaking,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreakingReport {
    /// Smallest Jacobian margin found.
    pub margin: f64,
    /// Abscissa (x or t) where it occurs.
    pub location: f64,
    pub status: BreakingStatus,
}

impl BreakingReport {
    fn from_margin(margin: f64, location: f64) -> Self {
        let status = if margin <= 0.0 {
            BreakingStatus::Breaking
        } else if margin <= NEAR_BREAKING_MARGIN {
            BreakingStatus::NearBreaking
        } else {
            BreakingStatus::Ok
        };
        Self {
            margin,
            location,
            status,
        }
    }

    pub fn is_breaking(&self) -> bool {
        self.status == BreakingStatus::Breaking
    }

    pub fn into_result(self, what: &str) -> Result<Self> {
        if self.is_breaking() {
            Err(RunupError::Breaking {
                detail: format!("{what} breaks near {}", self.location),
                margin: self.margin,
            })
        } else {
            Ok(self)
        }
    }
}

/// Something whose hodograph Jacobian margin can be measured.
pub trait JacobianMargin {
    /// `(min margin, location)`.
    fn jacobian_margin(&self) -> (f64, f64);
}

/// Minimum of `offset + sign·f'` over the nodes and interval midpoints.
fn min_slope_margin(f: &SampledFunction, offset: f64, sign: f64) -> (f64, f64) {
    let g = f.grid();
    let mut best = (f64::INFINITY, g[0]);
    let mut probe = |x: f64| {
        if let Ok(d) = f.derivative(x) {
            let m = offset + sign * d;
            if m < best.0 {
                best = (m, x);
            }
        }
    };
    for i in 0..g.len() {
        probe(g[i]);
        if i + 1 < g.len() {
            probe(0.5 * (g[i] + g[i + 1]));
        }
    }
    best
}

impl JacobianMargin for PhysicalInitialData {
    /// `min (1 + η₀'(x))`
    fn jacobian_margin(&self) -> (f64, f64) {
        min_slope_margin(&self.eta0, 1.0, 1.0)
    }
}

impl JacobianMargin for ShorelineRecord {
    /// `min (1 − v₀'(t))`
    fn jacobian_margin(&self) -> (f64, f64) {
        match SampledFunction::new(self.t.clone(), self.v0.clone()) {
            Ok(v) => min_slope_margin(&v, 1.0, -1.0),
            Err(_) => (f64::NAN, self.t[0]),
        }
    }
}

pub fn breaking_check(subject: &impl JacobianMargin) -> BreakingReport {
    let (margin, location) = subject.jacobian_margin();
    BreakingReport::from_margin(margin, location)
}
