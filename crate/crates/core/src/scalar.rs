//! Numeric scalars: binary floating point or exact rationals.
//!
//! Every algorithm in this crate is generic over [`Scalar`]. The two
//! implementations never mix: a computation started on [`Rational`] stays
//! exact end to end, and conversion to `f64` only happens where a caller
//! asks for it explicitly (for instance the square root of an `ℓ²` optimum).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Float,
    Rational,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Float => f.write_str("float"),
            Mode::Rational => f.write_str("rational"),
        }
    }
}

/// Relative tolerance used when validating floating point inputs.
pub const FLOAT_VALIDATION_RTOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    const MODE: Mode;

    fn from_int(v: i64) -> Self;

    /// Exact conversion from `f64`; `None` for NaN and infinities.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Parses a decimal literal (`12`, `-0.25`, `1.5e-3`) or a fraction `p/q`.
    fn parse_literal(s: &str) -> Option<Self>;

    /// Canonical text form. Floats use the shortest round-tripping decimal,
    /// rationals a terminating decimal when one exists and `p/q` otherwise.
    fn format(&self) -> String;

    fn is_integer(&self) -> bool;

    /// Absolute slack granted to a comparison between quantities of size
    /// `scale`. Zero in exact mode.
    fn slack(scale: &Self) -> Self;

    /// Magnitude below which a pivot element is treated as zero.
    fn pivot_tolerance() -> Self;

    /// `self * x` where `self` is usually a `±1` constraint coefficient.
    fn mul_coef(&self, x: &Self) -> Self {
        self.clone() * x
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

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

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }

    /// `a <= b` up to the mode's validation slack.
    fn approx_le(a: &Self, b: &Self) -> bool {
        let scale = Self::max_of(a.abs_val(), b.abs_val());
        *a <= b.clone() + Self::slack(&scale)
    }

    fn approx_eq(a: &Self, b: &Self) -> bool {
        Self::approx_le(a, b) && Self::approx_le(b, a)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            if q == 0.0 {
                return None;
            }
            return Some(p / q).filter(|v| v.is_finite());
        }
        s.parse::<f64>().ok().filter(|v| v.is_finite())
    }

    fn format(&self) -> String {
        format!("{self}")
    }

    fn is_integer(&self) -> bool {
        self.fract() == 0.0
    }

    fn slack(scale: &Self) -> Self {
        FLOAT_VALIDATION_RTOL * scale.abs().max(1.0)
    }

    fn pivot_tolerance() -> Self {
        1e-11
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Rational;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_literal(s: &str) -> Option<Self> {
        parse_rational(s.trim())
    }

    fn format(&self) -> String {
        format_rational(self)
    }

    fn is_integer(&self) -> bool {
        Rational::is_integer(self)
    }

    fn slack(_scale: &Self) -> Self {
        Rational::zero()
    }

    fn pivot_tolerance() -> Self {
        Rational::zero()
    }

    fn mul_coef(&self, x: &Self) -> Self {
        if self.denom().is_one() && self.numer().magnitude().is_one() {
            if self.numer().is_negative() {
                -x.clone()
            } else {
                x.clone()
            }
        } else {
            self * x
        }
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -value } else { value })
}

fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    // terminating decimal iff the reduced denominator is 2^a 5^b
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut a, mut b) = (0usize, 0usize);
    while (&d % &two).is_zero() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = a.max(b);
    let scaled = r * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    debug_assert!(scaled.is_integer());
    let n = scaled.to_integer();
    let digits = n.abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let sign = if n.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{frac_part}")
}
