//! Scalar primitives shared by every other module: probabilities, decibels
//! and the binary entropy function.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Values this close to 0 or 1 are snapped onto the boundary.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum NumericsError {
    #[error("probability {0} is outside [0, 1]")]
    NotAProbability(f64),
    #[error("decibel conversion needs a strictly positive linear value, got {0}")]
    NonPositiveLinear(f64),
}

/// A number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    /// Rejects values outside `[0, 1]`; values within `1e-12` of a boundary
    /// are snapped onto it.
    pub fn new(value: f64) -> Result<Self, NumericsError> {
        if value.is_nan() {
            return Err(NumericsError::NotAProbability(value));
        }
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else if (-BOUNDARY_SLACK..0.0).contains(&value) {
            Ok(Probability(0.0))
        } else if value > 1.0 && value <= 1.0 + BOUNDARY_SLACK {
            Ok(Probability(1.0))
        } else {
            Err(NumericsError::NotAProbability(value))
        }
    }

    /// Clamps into `[0, 1]`. Only for quantities that are probabilities by
    /// construction; NaN maps to 0.
    pub(crate) fn saturating(value: f64) -> Self {
        if value.is_nan() {
            Probability(0.0)
        } else {
            Probability(value.clamp(0.0, 1.0))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn complement(self) -> Self {
        Probability(1.0 - self.0)
    }
}

impl TryFrom<f64> for Probability {
    type Error = NumericsError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A ratio expressed as `10·log10(x)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Decibel(f64);

impl Decibel {
    pub const ZERO: Decibel = Decibel(0.0);

    #[inline]
    pub const fn new(value: f64) -> Self {
        Decibel(value)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn from_linear(x: f64) -> Result<Self, NumericsError> {
        db_from_linear(x)
    }

    #[inline]
    pub fn to_linear(self) -> f64 {
        linear_from_db(self)
    }

    pub fn abs(self) -> Self {
        Decibel(self.0.abs())
    }
}

impl Add for Decibel {
    type Output = Decibel;
    fn add(self, rhs: Decibel) -> Decibel {
        Decibel(self.0 + rhs.0)
    }
}

impl Sub for Decibel {
    type Output = Decibel;
    fn sub(self, rhs: Decibel) -> Decibel {
        Decibel(self.0 - rhs.0)
    }
}

impl Neg for Decibel {
    type Output = Decibel;
    fn neg(self) -> Decibel {
        Decibel(-self.0)
    }
}

impl Mul<Decibel> for f64 {
    type Output = Decibel;
    fn mul(self, rhs: Decibel) -> Decibel {
        Decibel(self * rhs.0)
    }
}

impl fmt::Display for Decibel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} dB", format_db_value(self.0))
    }
}

/// Formats a dB figure without float noise: `-170.00000000000003` prints as
/// `-170`, `-42.8699884` as `-42.87`.
pub fn format_db_value(value: f64) -> String {
    let rounded = (value * 100.0).round() / 100.0;
    if rounded == 0.0 {
        "0".to_string()
    } else {
        format!("{rounded}")
    }
}

/// `h(p) = -p·log2(p) - (1-p)·log2(1-p)` with `0·log2(0) = 0`.
///
/// Evaluated with natural logarithms and rescaled by `1/ln 2`.
pub fn binary_entropy(p: Probability) -> f64 {
    let p = p.value();
    let q = 1.0 - p;
    let mut nats = 0.0;
    if p > 0.0 {
        nats -= p * p.ln();
    }
    if q > 0.0 {
        nats -= q * q.ln();
    }
    (nats / std::f64::consts::LN_2).clamp(0.0, 1.0)
}

pub fn db_from_linear(x: f64) -> Result<Decibel, NumericsError> {
    if x > 0.0 && x.is_finite() {
        Ok(Decibel(10.0 * x.log10()))
    } else {
        Err(NumericsError::NonPositiveLinear(x))
    }
}

#[inline]
pub fn linear_from_db(d: Decibel) -> f64 {
    10f64.powf(d.0 / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn entropy_reference_points() {
        assert_eq!(binary_entropy(Probability::ZERO), 0.0);
        assert_eq!(binary_entropy(Probability::ONE), 0.0);
        assert_relative_eq!(binary_entropy(Probability::HALF), 1.0, epsilon = 1e-15);
        // -0.11·log2(0.11) - 0.89·log2(0.89) = 0.499915...
        assert!((binary_entropy(p(0.11)) - 0.49991).abs() < 1e-5);
    }

    #[test]
    fn entropy_is_symmetric_on_grid() {
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let a = binary_entropy(p(x));
            let b = binary_entropy(p(1.0 - x));
            assert!((a - b).abs() < 1e-14, "h({x}) = {a} but h(1-{x}) = {b}");
        }
    }

    #[test]
    fn probability_snaps_near_boundaries() {
        assert_eq!(p(1.0 + 2e-16).value(), 1.0);
        assert_eq!(p(-5e-13).value(), 0.0);
        assert!(Probability::new(1.0 + 1e-9).is_err());
        assert!(Probability::new(-1e-9).is_err());
        assert!(Probability::new(f64::NAN).is_err());
    }

    #[test]
    fn decibel_reference_points() {
        assert_eq!(db_from_linear(1.0).unwrap().value(), 0.0);
        assert_relative_eq!(
            db_from_linear(1e-17).unwrap().value(),
            -170.0,
            epsilon = 1e-12
        );
        assert!((db_from_linear(0.5).unwrap().value() + 3.0103).abs() < 1e-4);
        assert_eq!(linear_from_db(Decibel::ZERO), 1.0);
        assert_relative_eq!(
            linear_from_db(Decibel::new(-60.0)),
            1e-6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            linear_from_db(Decibel::new(110.0)),
            1e11,
            max_relative = 1e-12
        );
    }

    #[test]
    fn decibel_rejects_nonpositive() {
        assert_eq!(
            db_from_linear(0.0),
            Err(NumericsError::NonPositiveLinear(0.0))
        );
        assert!(db_from_linear(-1.0).is_err());
    }

    #[test]
    fn decibel_display_hides_float_noise() {
        assert_eq!(Decibel::new(-170.00000000000003).to_string(), "-170 dB");
        assert_eq!(Decibel::new(-42.869988).to_string(), "-42.87 dB");
        assert_eq!(Decibel::new(-0.0).to_string(), "0 dB");
    }

    proptest! {
        #[test]
        fn entropy_is_concave(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let mid = binary_entropy(p((a + b) / 2.0));
            let chord = (binary_entropy(p(a)) + binary_entropy(p(b))) / 2.0;
            prop_assert!(mid >= chord - 1e-15);
        }

        #[test]
        fn db_round_trip(exp in -300.0f64..9.0, mantissa in 1.0f64..10.0) {
            let x = mantissa * 10f64.powf(exp);
            prop_assume!(x > 0.0 && x <= 1e9);
            let back = linear_from_db(db_from_linear(x).unwrap());
            prop_assert!(((back - x) / x).abs() <= 1e-12);
        }
    }
}
