//! Numeric abstraction shared by every algorithm in the crate.
//!
//! Battery levels, distances, prices and LP coefficients are all carried as a
//! [`Scalar`]. Two implementations are provided: [`Rational`] (exact, used by
//! default and by the test suites) and `f64` (fast, compared with a relative
//! tolerance).

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Relative tolerance used by the floating point scalar.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    fn from_ratio(value: &Rational) -> Self;

    /// Exact rational value, `None` for non-finite floats.
    fn to_ratio(&self) -> Option<Rational>;

    /// Absolute slack allowed around `self` when comparing.
    fn slack(&self) -> Self;

    fn from_int(value: i64) -> Self {
        Self::from_i64(value).expect("i64 is representable")
    }

    /// Parses a decimal (`-12.50`, `3e-2`) or fraction (`7/3`) literal.
    fn parse_decimal(text: &str) -> Option<Self> {
        parse_rational(text).map(|r| Self::from_ratio(&r))
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::zero().slack()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let diff = (self.clone() - other.clone()).abs();
        diff <= self.slack() || diff <= other.slack()
    }

    /// `self < other` beyond tolerance.
    fn definitely_lt(&self, other: &Self) -> bool {
        !self.approx_eq(other) && self < other
    }

    fn approx_le(&self, other: &Self) -> bool {
        self <= other || self.approx_eq(other)
    }

    /// Total order; floats never hold NaN here.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Text form accepted back by [`Scalar::parse_decimal`].
    fn render(&self) -> String;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(value: &Rational) -> Self {
        value.clone()
    }

    fn to_ratio(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn slack(&self) -> Self {
        Rational::zero()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn render(&self) -> String {
        render_rational(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(value: &Rational) -> Self {
        value.to_f64().unwrap_or(f64::NAN)
    }

    fn to_ratio(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }

    fn slack(&self) -> Self {
        FLOAT_TOLERANCE * self.abs().max(1.0)
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

/// Parses `[-+]digits[.digits][e[-+]digits]` or `p/q`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Finite decimal when the denominator divides a power of ten, `p/q` otherwise.
pub fn render_rational(value: &Rational) -> String {
    if value.is_integer() {
        return value.numer().to_string();
    }
    let mut den = value.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_multiple_of(&two) {
        den /= &two;
        twos += 1;
    }
    while den.is_multiple_of(&five) {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", value.numer(), value.denom());
    }
    let places = twos.max(fives);
    let scaled = value * Rational::from_integer(num_traits::pow(BigInt::from(10u32), places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let sign = if value.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}

/// Greatest common divisor of two non-negative rationals (`gcd(0, x) = x`).
pub fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let num = a.numer().abs().gcd(&b.numer().abs());
    let den = a.denom().lcm(b.denom());
    Rational::new(num, den)
}

/// Scalar wrapper with a total order, for use in heaps and sorted keys.
#[derive(Debug, Clone, PartialEq)]
pub struct Ordered<T>(pub T);

impl<T: Scalar> Eq for Ordered<T> {}

impl<T: Scalar> PartialOrd for Ordered<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Ordered<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Smaller of two scalars (first on ties).
pub fn min_of<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

/// Larger of two scalars (first on ties).
pub fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}
