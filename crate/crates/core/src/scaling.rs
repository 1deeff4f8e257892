//! Conversion between SI units and the dimensionless runup variables.
//!
//! With reference height `H0`, slope `alpha` and gravity `g`:
//! `x = (alpha/H0) x_si`, `t = alpha sqrt(g/H0) t_si`, `eta = eta_si/H0`,
//! `u = u_si/sqrt(H0 g)`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RunupError};
use crate::sampled::{validate_grid, SampledFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParameters {
    pub h0: f64,
    pub alpha: f64,
    pub g: f64,
}

impl ScalingParameters {
    pub fn new(h0: f64, alpha: f64, g: f64) -> Result<Self> {
        let s = Self { h0, alpha, g };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("H0", self.h0), ("alpha", self.alpha), ("g", self.g)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(RunupError::InvalidParameters(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Multiplier taking an SI horizontal distance to dimensionless `x`.
    pub fn length_factor(&self) -> f64 {
        self.alpha / self.h0
    }

    pub fn time_factor(&self) -> f64 {
        self.alpha * (self.g / self.h0).sqrt()
    }

    pub fn elevation_factor(&self) -> f64 {
        1.0 / self.h0
    }

    pub fn velocity_factor(&self) -> f64 {
        1.0 / (self.h0 * self.g).sqrt()
    }

    pub fn factor(&self, q: Quantity) -> f64 {
        match q {
            Quantity::Position => self.length_factor(),
            Quantity::Time => self.time_factor(),
            Quantity::Elevation => self.elevation_factor(),
            Quantity::Velocity => self.velocity_factor(),
        }
    }
}

/// A physical quantity with its own scaling rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Position,
    Time,
    Elevation,
    Velocity,
}

/// What a profile holds. Fixes the rule for its abscissa and its values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    /// Water elevation against horizontal position.
    Elevation,
    /// Shoreline velocity against time.
    Velocity,
    /// Shoreline position against time.
    PositionSeries,
}

impl ProfileKind {
    pub fn axis(self) -> Quantity {
        match self {
            ProfileKind::Elevation => Quantity::Position,
            ProfileKind::Velocity | ProfileKind::PositionSeries => Quantity::Time,
        }
    }

    pub fn value(self) -> Quantity {
        match self {
            ProfileKind::Elevation => Quantity::Elevation,
            ProfileKind::Velocity => Quantity::Velocity,
            ProfileKind::PositionSeries => Quantity::Position,
        }
    }
}

/// A profile in SI units, tagged with its kind.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionalProfile {
    abscissa: Vec<f64>,
    values: Vec<f64>,
    kind: ProfileKind,
}

impl DimensionalProfile {
    pub fn new(abscissa: Vec<f64>, values: Vec<f64>, kind: ProfileKind) -> Result<Self> {
        if abscissa.len() != values.len() {
            return Err(RunupError::Data(
                "abscissa and values differ in length".into(),
            ));
        }
        validate_grid(&abscissa)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RunupError::Data("profile values must be finite".into()));
        }
        Ok(Self {
            abscissa,
            values,
            kind,
        })
    }

    pub fn abscissa(&self) -> &[f64] {
        &self.abscissa
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }
}

pub fn to_dimensionless(p: &DimensionalProfile, s: &ScalingParameters) -> Result<SampledFunction> {
    s.validate()?;
    let fa = s.factor(p.kind.axis());
    let fv = s.factor(p.kind.value());
    SampledFunction::new(
        p.abscissa.iter().map(|x| x * fa).collect(),
        p.values.iter().map(|v| v * fv).collect(),
    )
}

pub fn to_dimensional(
    f: &SampledFunction,
    s: &ScalingParameters,
    kind: ProfileKind,
) -> Result<DimensionalProfile> {
    s.validate()?;
    let fa = s.factor(kind.axis());
    let fv = s.factor(kind.value());
    DimensionalProfile::new(
        f.grid().iter().map(|x| x / fa).collect(),
        f.values().iter().map(|v| v / fv).collect(),
        kind,
    )
}

/// Scales raw samples of one quantity to dimensionless form.
pub fn scale_to_dimensionless(values: &[f64], q: Quantity, s: &ScalingParameters) -> Vec<f64> {
    let f = s.factor(q);
    values.iter().map(|v| v * f).collect()
}

pub fn scale_to_dimensional(values: &[f64], q: Quantity, s: &ScalingParameters) -> Vec<f64> {
    let f = s.factor(q);
    values.iter().map(|v| v / f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> ScalingParameters {
        ScalingParameters::new(100.0, 0.01, 9.81).unwrap()
    }

    #[test]
    fn identity_scaling() {
        let s = ScalingParameters::new(1.0, 1.0, 1.0).unwrap();
        for kind in [
            ProfileKind::Elevation,
            ProfileKind::Velocity,
            ProfileKind::PositionSeries,
        ] {
            let p =
                DimensionalProfile::new(vec![0.0, 1.5, 3.0], vec![0.1, -0.2, 0.3], kind).unwrap();
            let f = to_dimensionless(&p, &s).unwrap();
            assert_eq!(f.grid(), p.abscissa());
            assert_eq!(f.values(), p.values());
        }
    }

    #[test]
    fn reference_conversions() {
        let s = params();
        let x = scale_to_dimensionless(&[10_000.0], Quantity::Position, &s)[0];
        assert!((x - 1.0).abs() < 1e-15);
        let t = scale_to_dimensionless(&[1000.0], Quantity::Time, &s)[0];
        assert!((t - 0.01 * (9.81_f64 / 100.0).sqrt() * 1000.0).abs() < 1e-12);
        assert!((t - 3.1321).abs() < 1e-4);
        let x_si = scale_to_dimensional(&[1.0], Quantity::Position, &s)[0];
        assert!((x_si - 10_000.0).abs() < 1e-9);
        let eta_si = scale_to_dimensional(&[0.02], Quantity::Elevation, &s)[0];
        assert!((eta_si - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        for (h, a, g) in [(0.0, 1.0, 1.0), (1.0, -0.1, 1.0), (1.0, 1.0, f64::NAN)] {
            assert!(matches!(
                ScalingParameters::new(h, a, g),
                Err(RunupError::InvalidParameters(_))
            ));
        }
        let bad = ScalingParameters {
            h0: -1.0,
            alpha: 1.0,
            g: 1.0,
        };
        let p = DimensionalProfile::new(vec![0.0, 1.0], vec![0.0, 0.0], ProfileKind::Elevation)
            .unwrap();
        assert!(to_dimensionless(&p, &bad).is_err());
    }

    fn kind_strategy() -> impl Strategy<Value = ProfileKind> {
        prop_oneof![
            Just(ProfileKind::Elevation),
            Just(ProfileKind::Velocity),
            Just(ProfileKind::PositionSeries)
        ]
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            h0 in 0.1f64..5000.0,
            alpha in 1e-4f64..0.5,
            g in 1.0f64..30.0,
            kind in kind_strategy(),
            vals in proptest::collection::vec(-1e3f64..1e3, 4),
        ) {
            let s = ScalingParameters::new(h0, alpha, g).unwrap();
            let x = vec![0.0, 10.0, 250.0, 4000.0];
            let p = DimensionalProfile::new(x, vals, kind).unwrap();
            let back = to_dimensional(&to_dimensionless(&p, &s).unwrap(), &s, kind).unwrap();
            for (a, b) in p.abscissa().iter().zip(back.abscissa()) {
                prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
            }
            for (a, b) in p.values().iter().zip(back.values()) {
                prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
            }
        }

        #[test]
        fn scaling_is_linear(
            a in -10.0f64..10.0,
            kind in kind_strategy(),
            vals in proptest::collection::vec(-1e2f64..1e2, 3),
        ) {
            let s = params();
            let x = vec![0.0, 1.0, 2.0];
            let p = DimensionalProfile::new(x.clone(), vals.clone(), kind).unwrap();
            let pa = DimensionalProfile::new(x, vals.iter().map(|v| a * v).collect(), kind).unwrap();
            let f = to_dimensionless(&p, &s).unwrap();
            let fa = to_dimensionless(&pa, &s).unwrap();
            for (u, v) in f.values().iter().zip(fa.values()) {
                prop_assert!((a * u - v).abs() <= 1e-12 * (1.0 + v.abs()));
            }
        }
    }
}
