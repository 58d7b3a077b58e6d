//! Numeric kernel shared by every algorithm in the crate.
//!
//! All real-valued quantities (matrix entries, weights, prefix sums,
//! discrepancies, LP values) are generic over [`Scalar`]. Two backends are
//! provided:
//!
//!  * [`Rational`]: arbitrary precision rationals, used wherever a tight bound
//!    has to be checked with equality.
//!  * `f64`: fast path for large instances. Comparisons that decide
//!    membership (candidate sets, constraint violation, pruning) carry an
//!    absolute slack of `1e-9` relative to the largest weight.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary precision rational number.
pub type Rational = num_rational::BigRational;

/// Default absolute slack used in float mode (on inputs normalized to `d_max = 1`).
pub const FLOAT_SLACK: f64 = 1e-9;

/// Which [`Scalar`] backend a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    #[default]
    Exact,
    Float,
}

impl Display for NumericMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NumericMode::Exact => write!(f, "exact"),
            NumericMode::Float => write!(f, "float"),
        }
    }
}

/// A real number backend.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    /// Hashable image of a value, used for memoization keys.
    type Key: Hash + Eq + Clone + Debug + Send + Sync;

    const MODE: NumericMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// `num / den`; `den` must be non-zero.
    fn ratio(num: i64, den: i64) -> Self;
    /// Converts a float via its shortest decimal representation, so `0.48`
    /// becomes `48/100` in exact mode.
    fn from_f64(v: f64) -> Result<Self>;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Smallest integer `>= self`.
    fn ceil_i64(&self) -> i64;
    /// Absolute comparison slack on unit-scale quantities; zero in exact mode.
    fn slack() -> Self;
    fn key(&self) -> Self::Key;
    /// JSON image: numbers for float mode and for integral rationals,
    /// `"p/q"` strings otherwise.
    fn to_json(&self) -> serde_json::Value;

    fn is_exact() -> bool {
        Self::MODE == NumericMode::Exact
    }

    /// Parses `"3"`, `"0.25"`, `"1e-4"`, or `"1/3"`.
    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num = parse_decimal(num)?;
            let den = parse_decimal(den)?;
            if Zero::is_zero(&den) {
                return Err(Error::Parse(format!("zero denominator in {text:?}")));
            }
            return Self::from_rational(&(num / den));
        }
        Self::from_rational(&parse_decimal(text)?)
    }

    /// Converts an exact rational into this backend.
    fn from_rational(r: &Rational) -> Result<Self>;

    /// Exact rational image; `None` for non-finite floats.
    fn to_rational(&self) -> Option<Rational>;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

/// Parses a finite decimal literal (optionally with exponent) into an exact rational.
pub fn parse_decimal(text: &str) -> Result<Rational> {
    let text = text.trim();
    let err = || Error::Parse(format!("not a decimal number: {text:?}"));
    if text.is_empty() {
        return Err(err());
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (
            &text[..pos],
            text[pos + 1..].parse::<i32>().map_err(|_| err())?,
        ),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| err())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

impl Scalar for Rational {
    type Key = Rational;

    const MODE: NumericMode = NumericMode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite value {v}")));
        }
        // `{:?}` prints the shortest representation that round-trips.
        parse_decimal(&format!("{v:?}"))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn ceil_i64(&self) -> i64 {
        self.ceil().to_integer().to_i64().expect("ceil out of i64 range")
    }

    fn slack() -> Self {
        Zero::zero()
    }

    fn key(&self) -> Self::Key {
        self.clone()
    }

    fn to_json(&self) -> serde_json::Value {
        if self.is_integer() {
            if let Some(v) = self.to_integer().to_i64() {
                return serde_json::Value::from(v);
            }
        }
        serde_json::Value::String(format!("{}/{}", self.numer(), self.denom()))
    }

    fn from_rational(r: &Rational) -> Result<Self> {
        Ok(r.clone())
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl Scalar for f64 {
    /// Values quantized to `1e-9` granularity.
    type Key = i64;

    const MODE: NumericMode = NumericMode::Float;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse(format!("non-finite value {v}")))
        }
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn ceil_i64(&self) -> i64 {
        f64::ceil(*self) as i64
    }

    fn slack() -> Self {
        FLOAT_SLACK
    }

    fn key(&self) -> Self::Key {
        (*self / FLOAT_SLACK).round() as i64
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn from_rational(r: &Rational) -> Result<Self> {
        let v = ToPrimitive::to_f64(r).unwrap_or(f64::NAN);
        Self::from_f64(v)
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }
}

/// Reads a scalar from a JSON number or string.
pub fn scalar_from_json<S: Scalar>(value: &serde_json::Value) -> Result<S> {
    match value {
        serde_json::Value::Number(n) => {
            // Integers and decimals keep their literal text, so exact mode sees 0.48 as 48/100.
            S::parse(&n.to_string())
        }
        serde_json::Value::String(s) => S::parse(s),
        other => Err(Error::Parse(format!("expected a number, found {other}"))),
    }
}

/// Sum of `1/j` for `j = 1..=m`.
pub fn harmonic<S: Scalar>(m: usize) -> S {
    (1..=m as i64).fold(S::zero(), |acc, j| acc + S::ratio(1, j))
}
