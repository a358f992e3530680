//! Scalar fields used for divisor-class coordinates.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rationals over arbitrary-precision integers.
pub type Q = BigRational;

/// Threshold below which a binary64 coordinate counts as negative.
pub const FLOAT_NEGATIVE_TOLERANCE: f64 = 1e-12;

/// A field in which divisor classes can be reflected, compared against zero
/// and evaluated by the volume polynomial.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Q) -> Self;
    /// Strictly negative. Binary64 values use [`FLOAT_NEGATIVE_TOLERANCE`].
    fn is_negative(&self) -> bool;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Q::from_integer(BigInt::from(v)))
    }

    fn is_positive(&self) -> bool {
        !self.is_negative() && !self.is_zero()
    }
}

impl Scalar for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &Q) -> Self {
        q.clone()
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &Q) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn is_negative(&self) -> bool {
        *self < -FLOAT_NEGATIVE_TOLERANCE
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Parses `p/q`, an integer, or a finite decimal such as `-0.125` into an
/// exact rational.
pub fn parse_rational(text: &str) -> Result<Q> {
    let s = text.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        let mag: BigInt = digits.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = Q::new(mag, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Parses a comma-separated list of rationals.
pub fn parse_rational_list(text: &str) -> Result<Vec<Q>> {
    text.split(',').map(parse_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_rational("-7/2").unwrap(), q(-7, 2));
        assert_eq!(parse_rational("4/6").unwrap(), q(2, 3));
        assert_eq!(parse_rational("-1").unwrap(), qi(-1));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("-2.5").unwrap(), q(-5, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
        assert_eq!(
            parse_rational_list("-1,3, 4").unwrap(),
            vec![qi(-1), qi(3), qi(4)]
        );
    }

    #[test]
    fn float_negativity_uses_tolerance() {
        assert!(!Scalar::is_negative(&-1e-13_f64));
        assert!(Scalar::is_negative(&-1e-11_f64));
        assert!(Scalar::is_negative(&q(-1, 1_000_000_000_000_000)));
    }
}
