//! Scalar abstraction shared by every metric computation.
//!
//! Distances, scales and coordinates are generic over [`Scalar`]. Exact
//! rationals compare exactly; floating types compare with an absolute
//! tolerance so that threshold tests (`<= r`, `> r`) are stable under
//! rounding.

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use serde_json::Value;

/// Comparison tolerance for `f64` distances.
pub const F64_TOLERANCE: f64 = 1e-9;
/// Comparison tolerance for `f32` distances (1e-9 is below f32 resolution).
pub const F32_TOLERANCE: f32 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("expected a number, got {0}")]
    NotANumber(String),
    #[error("value {0} is not representable exactly")]
    Inexact(String),
    #[error("value {0} overflows the exact representation")]
    Overflow(String),
}

pub trait Scalar:
    Copy + Debug + Display + PartialOrd + Num + Signed + ToPrimitive + Send + Sync + 'static
{
    /// True when arithmetic and comparisons are exact.
    const EXACT: bool;

    fn tolerance() -> Self;

    fn from_int(v: i64) -> Self;

    /// Exact square root where one exists; floats always succeed on `>= 0`.
    fn sqrt_exact(self) -> Option<Self>;

    fn to_json(self) -> Value;

    fn from_json(v: &Value) -> Result<Self, ScalarError>;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `self <= other` up to tolerance.
    fn le_tol(self, other: Self) -> bool {
        self <= other + Self::tolerance()
    }

    /// `self < other` by more than the tolerance.
    fn lt_tol(self, other: Self) -> bool {
        self + Self::tolerance() < other
    }

    fn gt_tol(self, other: Self) -> bool {
        !self.le_tol(other)
    }

    fn ge_tol(self, other: Self) -> bool {
        !self.lt_tol(other)
    }

    fn eq_tol(self, other: Self) -> bool {
        self.le_tol(other) && other.le_tol(self)
    }

    fn max_s(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_s(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn powu(self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        F64_TOLERANCE
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn sqrt_exact(self) -> Option<Self> {
        (self >= 0.0).then(|| self.sqrt())
    }

    /// Integral values are written as integers, so a document reads back
    /// identically whichever scalar type parses it.
    fn to_json(self) -> Value {
        if self.fract() == 0.0 && self.abs() < 9.007_199_254_740_992e15 {
            return Value::from(self as i64);
        }
        serde_json::Number::from_f64(self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self, ScalarError> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| ScalarError::NotANumber(v.to_string())),
            Value::String(s) => parse_ratio_str(s)
                .map(|r| *r.numer() as f64 / *r.denom() as f64)
                .or_else(|_| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| ScalarError::NotANumber(s.clone()))
                }),
            other => Err(ScalarError::NotANumber(other.to_string())),
        }
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        F32_TOLERANCE
    }

    fn from_int(v: i64) -> Self {
        v as f32
    }

    fn sqrt_exact(self) -> Option<Self> {
        (self >= 0.0).then(|| self.sqrt())
    }

    fn to_json(self) -> Value {
        f64::from(self).to_json()
    }

    fn from_json(v: &Value) -> Result<Self, ScalarError> {
        f64::from_json(v).map(|x| x as f32)
    }
}

impl Scalar for Rational64 {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        Rational64::zero()
    }

    fn from_int(v: i64) -> Self {
        Rational64::from_integer(v)
    }

    fn sqrt_exact(self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = isqrt(*self.numer())?;
        let d = isqrt(*self.denom())?;
        Some(Rational64::new(n, d))
    }

    /// Integers serialize as JSON integers, everything else as `"p/q"`.
    fn to_json(self) -> Value {
        if self.is_integer() {
            Value::from(self.to_integer())
        } else {
            Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }

    fn from_json(v: &Value) -> Result<Self, ScalarError> {
        match v {
            Value::Number(n) => parse_decimal(&n.to_string()),
            Value::String(s) => parse_ratio_str(s).or_else(|_| parse_decimal(s)),
            other => Err(ScalarError::NotANumber(other.to_string())),
        }
    }
}

fn isqrt(v: i64) -> Option<i64> {
    if v < 0 {
        return None;
    }
    let guess = (v as f64).sqrt().round() as i64;
    (guess.saturating_sub(1)..=guess + 1).find(|g| *g >= 0 && g.checked_mul(*g) == Some(v))
}

fn parse_ratio_str(s: &str) -> Result<Rational64, ScalarError> {
    let (num, den) = s
        .split_once('/')
        .ok_or_else(|| ScalarError::NotANumber(s.to_string()))?;
    let num: i64 = num
        .trim()
        .parse()
        .map_err(|_| ScalarError::NotANumber(s.to_string()))?;
    let den: i64 = den
        .trim()
        .parse()
        .map_err(|_| ScalarError::NotANumber(s.to_string()))?;
    if den == 0 {
        return Err(ScalarError::NotANumber(s.to_string()));
    }
    Ok(Rational64::new(num, den))
}

/// Parses a decimal literal such as `-12.375` or `2.5e-3` exactly.
fn parse_decimal(s: &str) -> Result<Rational64, ScalarError> {
    let s = s.trim();
    let overflow = || ScalarError::Overflow(s.to_string());
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (
            &s[..pos],
            s[pos + 1..]
                .parse::<i32>()
                .map_err(|_| ScalarError::NotANumber(s.to_string()))?,
        ),
        None => (s, 0),
    };
    let negative = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(ScalarError::NotANumber(s.to_string()));
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(ScalarError::NotANumber(s.to_string()));
    }
    let mut numer: i64 = digits.parse().map_err(|_| overflow())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let pow = 10i64
        .checked_pow(scale.unsigned_abs())
        .ok_or_else(overflow)?;
    if scale >= 0 {
        Ok(Rational64::from_integer(
            numer.checked_mul(pow).ok_or_else(overflow)?,
        ))
    } else {
        Ok(Rational64::new(numer, pow))
    }
}

/// A value that may be infinite, such as the Lebesgue number of a cover
/// containing the whole space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent<S> {
    Finite(S),
    Unbounded,
}

impl<S: Scalar> Extent<S> {
    pub fn finite(self) -> Option<S> {
        match self {
            Extent::Finite(v) => Some(v),
            Extent::Unbounded => None,
        }
    }

    /// `self >= bound`, with `Unbounded` exceeding everything.
    pub fn at_least(self, bound: S) -> bool {
        match self {
            Extent::Finite(v) => v.ge_tol(bound),
            Extent::Unbounded => true,
        }
    }

    /// Strict `self > bound`.
    pub fn exceeds(self, bound: S) -> bool {
        match self {
            Extent::Finite(v) => v.gt_tol(bound),
            Extent::Unbounded => true,
        }
    }

    pub fn min(self, other: Self) -> Self {
        match (self, other) {
            (Extent::Unbounded, x) | (x, Extent::Unbounded) => x,
            (Extent::Finite(a), Extent::Finite(b)) => Extent::Finite(a.min_s(b)),
        }
    }

    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (Extent::Unbounded, _) | (_, Extent::Unbounded) => Extent::Unbounded,
            (Extent::Finite(a), Extent::Finite(b)) => Extent::Finite(a.max_s(b)),
        }
    }

    pub fn to_json(self) -> Value {
        match self {
            Extent::Finite(v) => v.to_json(),
            Extent::Unbounded => Value::String("unbounded".into()),
        }
    }
}

pub(crate) fn half<S: Scalar>() -> S {
    S::one() / (S::one() + S::one())
}

pub(crate) fn two<S: Scalar>() -> S {
    S::one() + S::one()
}

pub(crate) fn from_usize<S: Scalar>(v: usize) -> S {
    S::from_int(v as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn decimal_literals_parse_exactly() {
        assert_eq!(parse_decimal("2.5").unwrap(), q(5, 2));
        assert_eq!(parse_decimal("-0.125").unwrap(), q(-1, 8));
        assert_eq!(parse_decimal("3e2").unwrap(), q(300, 1));
        assert_eq!(parse_decimal("1.5E-2").unwrap(), q(3, 200));
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal("1e40").is_err());
    }

    #[test]
    fn rational_json_round_trip() {
        for v in [q(3, 1), q(-7, 2), q(1, 3), q(0, 1)] {
            assert_eq!(Rational64::from_json(&v.to_json()).unwrap(), v);
        }
        assert_eq!(
            Rational64::from_json(&serde_json::json!("4/6")).unwrap(),
            q(2, 3)
        );
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(q(9, 4).sqrt_exact(), Some(q(3, 2)));
        assert_eq!(q(2, 1).sqrt_exact(), None);
        assert_eq!(q(-1, 1).sqrt_exact(), None);
        assert_eq!(4.0f64.sqrt_exact(), Some(2.0));
    }

    #[test]
    fn tolerant_comparisons() {
        let r = 1.0f64;
        assert!((1.0 + 1e-12).le_tol(r));
        assert!(!(1.0 + 1e-12).gt_tol(r));
        assert!((1.0 + 1e-6).gt_tol(r));
        assert!(!(1.0 - 1e-12).lt_tol(r));
        assert!(q(1, 1).le_tol(q(1, 1)));
        assert!(q(3, 2).gt_tol(q(1, 1)));
    }

    #[test]
    fn extent_ordering() {
        let a: Extent<f64> = Extent::Finite(2.0);
        assert!(a.at_least(2.0));
        assert!(!a.exceeds(2.0));
        assert!(Extent::<f64>::Unbounded.exceeds(1e300));
        assert_eq!(a.min(Extent::Unbounded), a);
    }
}
