//! Extended real line arithmetic.
//!
//! Values live in `R ∪ {−∞, +∞}`. `0 · (±∞) = 0`, `x / (±∞) = 0` for finite
//! `x`, `x / 0 = ±∞` for `x ≠ 0`. The undefined operations (`∞ − ∞`,
//! `0 / 0`, `∞ / ∞`) return [`ExtendedRealError`] instead of producing NaN.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExtendedRealError {
    #[error("undefined sum of opposite infinities")]
    OppositeInfinities,
    #[error("undefined quotient 0/0")]
    ZeroOverZero,
    #[error("undefined quotient of infinities")]
    InfinityOverInfinity,
    #[error("NaN is not an extended real")]
    NotANumber,
}

/// A point of the two-point compactification of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ExtendedReal(f64);

impl ExtendedReal {
    pub const ZERO: Self = Self(0.0);
    pub const POS_INF: Self = Self(f64::INFINITY);
    pub const NEG_INF: Self = Self(f64::NEG_INFINITY);

    pub fn new(x: f64) -> Result<Self, ExtendedRealError> {
        if x.is_nan() {
            Err(ExtendedRealError::NotANumber)
        } else {
            Ok(Self(x))
        }
    }

    /// Wraps a value that is known not to be NaN.
    ///
    /// # Panics
    /// Panics on NaN.
    pub fn from_f64(x: f64) -> Self {
        Self::new(x).expect("NaN passed where an extended real was required")
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Finite value, or `None` at ±∞.
    pub fn finite(self) -> Option<f64> {
        self.0.is_finite().then_some(self.0)
    }

    pub fn positive_part(self) -> Self {
        Self(self.0.max(0.0))
    }

    pub fn negative_part(self) -> Self {
        Self((-self.0).max(0.0))
    }

    pub fn abs(self) -> Self {
        Self(self.0.abs())
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self, ExtendedRealError> {
        if self.0.is_infinite() && rhs.0.is_infinite() && self.0.signum() != rhs.0.signum() {
            return Err(ExtendedRealError::OppositeInfinities);
        }
        Ok(Self(self.0 + rhs.0))
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self, ExtendedRealError> {
        self.checked_add(-rhs)
    }

    /// Product with the convention `0 · (±∞) = 0`.
    pub fn mul(self, rhs: Self) -> Self {
        if self.0 == 0.0 || rhs.0 == 0.0 {
            return Self::ZERO;
        }
        Self(self.0 * rhs.0)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, ExtendedRealError> {
        match (self.0, rhs.0) {
            (a, b) if a == 0.0 && b == 0.0 => Err(ExtendedRealError::ZeroOverZero),
            (a, b) if a.is_infinite() && b.is_infinite() => {
                Err(ExtendedRealError::InfinityOverInfinity)
            }
            (a, b) if b == 0.0 => Ok(Self(if a > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            })),
            (_, b) if b.is_infinite() => Ok(Self::ZERO),
            (a, b) => Ok(Self(a / b)),
        }
    }

    pub fn max(self, rhs: Self) -> Self {
        Self(self.0.max(rhs.0))
    }

    pub fn min(self, rhs: Self) -> Self {
        Self(self.0.min(rhs.0))
    }
}

impl std::ops::Neg for ExtendedReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl TryFrom<f64> for ExtendedReal {
    type Error = ExtendedRealError;
    fn try_from(x: f64) -> Result<Self, Self::Error> {
        Self::new(x)
    }
}

impl From<ExtendedReal> for f64 {
    fn from(x: ExtendedReal) -> f64 {
        x.0
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pos_inf() {
            write!(f, "+inf")
        } else if self.is_neg_inf() {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(ExtendedReal::ZERO.mul(ExtendedReal::POS_INF), ExtendedReal::ZERO);
        assert_eq!(ExtendedReal::NEG_INF.mul(ExtendedReal::ZERO), ExtendedReal::ZERO);
        let two = ExtendedReal::from_f64(2.0);
        assert_eq!(two.mul(ExtendedReal::NEG_INF), ExtendedReal::NEG_INF);
        assert_eq!((-two).mul(ExtendedReal::NEG_INF), ExtendedReal::POS_INF);
    }

    #[test]
    fn undefined_operations_are_errors() {
        let inf = ExtendedReal::POS_INF;
        assert_eq!(
            inf.checked_sub(inf),
            Err(ExtendedRealError::OppositeInfinities)
        );
        assert_eq!(
            inf.checked_add(ExtendedReal::NEG_INF),
            Err(ExtendedRealError::OppositeInfinities)
        );
        assert_eq!(
            ExtendedReal::ZERO.checked_div(ExtendedReal::ZERO),
            Err(ExtendedRealError::ZeroOverZero)
        );
        assert_eq!(
            inf.checked_div(ExtendedReal::NEG_INF),
            Err(ExtendedRealError::InfinityOverInfinity)
        );
        assert!(ExtendedReal::new(f64::NAN).is_err());
    }

    #[test]
    fn defined_divisions() {
        let three = ExtendedReal::from_f64(3.0);
        assert_eq!(three.checked_div(ExtendedReal::ZERO), Ok(ExtendedReal::POS_INF));
        assert_eq!((-three).checked_div(ExtendedReal::ZERO), Ok(ExtendedReal::NEG_INF));
        assert_eq!(three.checked_div(ExtendedReal::POS_INF), Ok(ExtendedReal::ZERO));
        assert_eq!(
            ExtendedReal::from_f64(1.0).checked_add(ExtendedReal::POS_INF),
            Ok(ExtendedReal::POS_INF)
        );
    }

    #[test]
    fn parts() {
        assert_eq!(ExtendedReal::NEG_INF.positive_part(), ExtendedReal::ZERO);
        assert_eq!(ExtendedReal::NEG_INF.negative_part(), ExtendedReal::POS_INF);
        assert_eq!(ExtendedReal::from_f64(-2.5).negative_part().value(), 2.5);
    }
}
