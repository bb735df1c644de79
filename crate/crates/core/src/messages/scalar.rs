//! Number types used for message arithmetic.
//!
//! Everything in the message layer is generic over [`Scalar`], which is
//! implemented for `f64` (fast sweeps) and [`Rational`] (exact checks).
//! Comparisons against set bounds go through [`Scalar::le_tol`] and
//! [`Scalar::eq_tol`]; the tolerance is ignored by exact types.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational.
pub type Rational = BigRational;

/// Default tolerance for float-mode membership and normalization checks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Which arithmetic a computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticMode {
    Rational,
    #[default]
    Float,
}

impl FromStr for ArithmeticMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" | "exact" => Ok(Self::Rational),
            "float" => Ok(Self::Float),
            other => Err(Error::Parse(format!("unknown arithmetic mode `{other}`"))),
        }
    }
}

/// On-the-wire form of a scalar: `"num/den"` strings for exact values,
/// plain JSON numbers for floats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarWire {
    Exact(String),
    Float(f64),
}

pub trait Scalar: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    /// True when arithmetic never rounds.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// `self <= other`, widened by `tol` for inexact types.
    fn le_tol(&self, other: &Self, tol: f64) -> bool;

    /// `self == other`, within `tol` for inexact types.
    fn eq_tol(&self, other: &Self, tol: f64) -> bool;

    fn to_wire(&self) -> ScalarWire;

    fn from_wire(wire: &ScalarWire) -> Result<Self>;

    /// Convert an exact value into this type (rounding for floats).
    fn from_rational(r: &Rational) -> Self;

    /// Convert a float (exactly, for rational types).
    fn from_f64(x: f64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn powi(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn le_tol(&self, other: &Self, tol: f64) -> bool {
        *self <= *other + tol
    }

    fn eq_tol(&self, other: &Self, tol: f64) -> bool {
        (*self - *other).abs() <= tol
    }

    fn to_wire(&self) -> ScalarWire {
        ScalarWire::Float(*self)
    }

    fn from_wire(wire: &ScalarWire) -> Result<Self> {
        match wire {
            ScalarWire::Float(x) => Ok(*x),
            ScalarWire::Exact(s) => parse_rational(s).map(|r| Scalar::to_f64(&r)),
        }
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn powi(&self, exp: u32) -> Self {
        f64::powi(*self, exp as i32)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn le_tol(&self, other: &Self, _tol: f64) -> bool {
        self <= other
    }

    fn eq_tol(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn to_wire(&self) -> ScalarWire {
        ScalarWire::Exact(format!("{}/{}", self.numer(), self.denom()))
    }

    fn from_wire(wire: &ScalarWire) -> Result<Self> {
        match wire {
            ScalarWire::Exact(s) => parse_rational(s),
            ScalarWire::Float(x) => BigRational::from_float(*x)
                .ok_or_else(|| Error::Parse(format!("non-finite float {x}"))),
        }
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).unwrap_or_default()
    }

    fn powi(&self, exp: u32) -> Self {
        num_traits::Pow::pow(self, exp)
    }
}

/// Parse `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(num, den))
}

/// Shorthand for building small exact constants.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

pub(crate) fn sum<S: Scalar>(xs: impl IntoIterator<Item = S>) -> S {
    xs.into_iter().fold(S::zero(), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_wire_format() {
        let r = ratio(2, 6);
        assert_eq!(r.to_wire(), ScalarWire::Exact("1/3".into()));
        assert_eq!(ratio(0, 5).to_wire(), ScalarWire::Exact("0/1".into()));
        assert_eq!(Rational::from_wire(&ScalarWire::Exact("4/12".into())).unwrap(), r);
        assert_eq!(parse_rational("7").unwrap(), ratio(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn tolerance_only_applies_to_floats() {
        assert!(1.0f64.le_tol(&(1.0 - 1e-13), DEFAULT_TOL));
        assert!(!1.0f64.le_tol(&(1.0 - 1e-11), DEFAULT_TOL));
        assert!(!ratio(1, 3).le_tol(&ratio(1, 4), 1.0));
        assert!(ratio(1, 3).eq_tol(&ratio(2, 6), 0.0));
    }

    #[test]
    fn integer_powers_agree() {
        assert_eq!(ratio(2, 3).powi(3), ratio(8, 27));
        assert_eq!(Scalar::powi(&0.5f64, 3), 0.125);
        assert_eq!(ratio(5, 7).powi(0), ratio(1, 1));
    }
}
