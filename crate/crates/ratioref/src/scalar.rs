//! Numeric backends.
//!
//! Every solver in this crate is generic over a [`Scalar`]: either exact
//! arbitrary-precision rationals ([`Rat`]) or `f64`. The rational backend
//! reproduces fraction-valued results bit-exactly (the canonical penalty is a
//! rational function), and refuses with [`Error::ExactnessLost`] any
//! operation whose true value is irrational. The float backend supports the
//! full penalty family through `cosh`/`log` paths and detects ties with a
//! relative tolerance.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::traits::{Pow, Signed, ToPrimitive, Zero};
use num::BigRational;
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational scalar backed by arbitrary-precision integers.
pub type Rat = BigRational;

/// Relative tolerance used for tie detection on the float backend.
///
/// The rational backend ignores it and compares exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol(pub f64);

impl Default for Tol {
    fn default() -> Self {
        Tol(1e-12)
    }
}

/// A numeric backend for the ratio calculus.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Short backend name used in error messages and CLI output.
    const NAME: &'static str;
    /// True when arithmetic is exact (no rounding, no tolerances).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    /// `num/den` with `den != 0`.
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact embedding of a float, when the backend supports one.
    /// The rational backend returns `None`: silently converting binary
    /// floats to fractions would fake exactness.
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;

    fn recip(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    /// False for float infinities and NaN; exact rationals are always finite.
    fn is_finite_value(&self) -> bool;

    /// Exact square root, if representable in this backend.
    fn sqrt_exact(&self) -> Option<Self>;
    /// Exact `n`-th root, if representable in this backend.
    fn nth_root_exact(&self, n: u32) -> Option<Self>;

    /// Tie predicate: exact equality on the rational backend, relative
    /// tolerance on floats.
    fn tie_eq(&self, other: &Self, tol: Tol) -> bool;

    /// Compare `x` against the geometric mean of `y_lo * y_hi` without
    /// materializing an irrational square root on the exact backend.
    fn geo_cmp(x: &Self, y_lo: &Self, y_hi: &Self, tol: Tol) -> Ordering;

    /// Mismatch penalty `J_a(self) = (self^a + self^{-a})/2 - 1` for
    /// `self > 0`. The rational backend supports integer exponents only.
    fn penalty_value(&self, exponent: f64) -> Result<Self>;

    /// Upper endpoint `b_eps >= 1` of the penalty sublevel set
    /// `{x : J_a(x) <= level}`; the lower endpoint is its reciprocal.
    fn sublevel_hi(level: &Self, exponent: f64) -> Result<Self>;

    /// Parse `"p/q"`, a decimal string, or a plain integer.
    fn parse_str(s: &str) -> Result<Self>;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    /// Total order over the values this crate produces (finite, non-NaN).
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other)
            .expect("scalar values must be comparable")
    }
}

/// `(x - 1)^2 / (2x)`: the canonical penalty as a rational function.
/// Algebraically identical to `(x + 1/x)/2 - 1` and stable near `x = 1`.
fn canonical_penalty<S: Scalar>(x: &S) -> S {
    let d = x.clone() - S::one();
    d.clone() * d / (S::from_int(2) * x.clone())
}

fn exponent_as_integer(a: f64) -> Option<i32> {
    (a.fract() == 0.0 && a >= 1.0 && a <= i32::MAX as f64).then_some(a as i32)
}

impl Scalar for Rat {
    const NAME: &'static str = "rational";
    const EXACT: bool = true;

    fn zero() -> Self {
        num::zero()
    }

    fn one() -> Self {
        num::one()
    }

    fn from_int(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(_x: f64) -> Option<Self> {
        None
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn recip(&self) -> Self {
        Rat::recip(self)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let (n, d) = (self.numer(), self.denom());
        let sn = n.sqrt();
        let sd = d.sqrt();
        (&sn * &sn == *n && &sd * &sd == *d).then(|| Rat::new(sn, sd))
    }

    fn nth_root_exact(&self, n: u32) -> Option<Self> {
        if n == 0 || (Signed::is_negative(self) && n.is_multiple_of(2)) {
            return None;
        }
        let rn = self.numer().nth_root(n);
        let rd = self.denom().nth_root(n);
        (rn.clone().pow(n) == *self.numer() && rd.clone().pow(n) == *self.denom())
            .then(|| Rat::new(rn, rd))
    }

    fn tie_eq(&self, other: &Self, _tol: Tol) -> bool {
        self == other
    }

    fn geo_cmp(x: &Self, y_lo: &Self, y_hi: &Self, _tol: Tol) -> Ordering {
        (x * x).cmp(&(y_lo * y_hi))
    }

    fn penalty_value(&self, exponent: f64) -> Result<Self> {
        let a = exponent_as_integer(exponent).ok_or_else(|| {
            Error::ExactnessLost(format!("penalty exponent {exponent} is not an integer"))
        })?;
        let y = if a == 1 { self.clone() } else { self.clone().pow(a) };
        Ok(canonical_penalty(&y))
    }

    fn sublevel_hi(level: &Self, exponent: f64) -> Result<Self> {
        let a = exponent_as_integer(exponent).ok_or_else(|| {
            Error::ExactnessLost(format!("penalty exponent {exponent} is not an integer"))
        })?;
        // J_a(x) <= eps in z := x^a reads z^2 - 2(1+eps) z + 1 <= 0.
        let disc = level.clone() * (Self::from_int(2) + level.clone());
        let root = disc.sqrt_exact().ok_or_else(|| {
            Error::ExactnessLost(format!("sublevel endpoint at level {level} is irrational"))
        })?;
        let z = Self::one() + level.clone() + root;
        z.nth_root_exact(a as u32).ok_or_else(|| {
            Error::ExactnessLost(format!(
                "sublevel endpoint {z}^(1/{a}) is irrational at level {level}"
            ))
        })
    }

    fn parse_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let numer = BigInt::from_str(n.trim())
                .map_err(|e| Error::Parse(format!("bad numerator {n:?}: {e}")))?;
            let denom = BigInt::from_str(d.trim())
                .map_err(|e| Error::Parse(format!("bad denominator {d:?}: {e}")))?;
            if Zero::is_zero(&denom) {
                return Err(Error::Parse("zero denominator".into()));
            }
            return Ok(Rat::new(numer, denom));
        }
        parse_decimal_rational(s).ok_or_else(|| {
            Error::Parse(format!(
                "cannot parse {s:?} as an exact rational (use \"p/q\" or a decimal string)"
            ))
        })
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => Self::parse_str(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Self::from_int(i))
                } else {
                    Err(Error::Parse(format!(
                        "non-integer JSON number {n} is ambiguous on the rational backend; \
                         quote it as a decimal string or use the float backend"
                    )))
                }
            }
            other => Err(Error::Parse(format!("expected a scalar, got {other}"))),
        }
    }
}

/// Parse `[+-]digits[.digits][eE[+-]digits]` into an exact rational.
fn parse_decimal_rational(s: &str) -> Option<Rat> {
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if frac_part.contains(['+', '-']) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().any(|c| c.is_ascii_digit()) {
        return None;
    }
    let n = BigInt::from_str(&digits).ok()?;
    let shift = exp - frac_part.len() as i32;
    let pow10 = BigInt::from(10).pow(shift.unsigned_abs());
    Some(if shift >= 0 {
        Rat::from_integer(n * pow10)
    } else {
        Rat::new(n, pow10)
    })
}

impl Scalar for f64 {
    const NAME: &'static str = "float";
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn recip(&self) -> Self {
        1.0 / self
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn is_positive(&self) -> bool {
        *self > 0.0
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn nth_root_exact(&self, n: u32) -> Option<Self> {
        (n > 0 && *self >= 0.0).then(|| self.powf(1.0 / n as f64))
    }

    fn tie_eq(&self, other: &Self, tol: Tol) -> bool {
        // Exact equality first: keeps infinities (cost overflow) tied.
        self == other || (self - other).abs() <= tol.0 * self.abs().max(other.abs())
    }

    fn geo_cmp(x: &Self, y_lo: &Self, y_hi: &Self, tol: Tol) -> Ordering {
        let m = (y_lo * y_hi).sqrt();
        if x.tie_eq(&m, tol) {
            Ordering::Equal
        } else {
            x.cmp_total(&m)
        }
    }

    fn penalty_value(&self, exponent: f64) -> Result<Self> {
        // cosh(a ln x) - 1 = 2 sinh^2(a ln x / 2), accurate for x near 1.
        let h = (exponent * self.ln() / 2.0).sinh();
        Ok(2.0 * h * h)
    }

    fn sublevel_hi(level: &Self, exponent: f64) -> Result<Self> {
        // arcosh(1 + eps) = ln(1 + eps + sqrt(eps (2 + eps))).
        let t = (level + (level * (2.0 + level)).sqrt()).ln_1p();
        Ok((t / exponent).exp())
    }

    fn parse_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let numer: f64 = n
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad numerator {n:?}: {e}")))?;
            let denom: f64 = d
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad denominator {d:?}: {e}")))?;
            if denom == 0.0 {
                return Err(Error::Parse("zero denominator".into()));
            }
            return Ok(numer / denom);
        }
        s.parse()
            .map_err(|e| Error::Parse(format!("cannot parse {s:?} as a float: {e}")))
    }

    fn to_json(&self) -> Value {
        match serde_json::Number::from_f64(round_sig15(*self)) {
            Some(n) => Value::Number(n),
            None => Value::String(self.to_string()), // inf / nan
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("number {n} out of f64 range"))),
            Value::String(s) => Self::parse_str(s),
            other => Err(Error::Parse(format!("expected a scalar, got {other}"))),
        }
    }
}

/// Round to 15 significant digits for JSON emission.
fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}
