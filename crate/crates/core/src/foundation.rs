//! Exact rational scalars and closed rational intervals.
//!
//! Every coordinate, partition point and function value in this crate is a
//! [`Rational`]; certified values are returned as [`Enclosure`]s whose
//! endpoints bracket the true value. Nothing on a certified path touches
//! floating point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d` reduced. Panics if `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `2^e` for any integer exponent.
pub fn pow2(e: i64) -> Rational {
    let mag = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// `3^-e`.
pub fn inv_pow3(e: u32) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(3), e as usize))
}

/// Renders `p/q`, or `p` when the denominator is one.
pub fn render(q: &Rational) -> String {
    q.to_string()
}

/// Parses the `p/q` | `p` grammar: optional leading `-`, decimal digits,
/// strictly positive denominator.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(s.to_string());
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    if !digits(num) || den.is_some_and(|d| !digits(d)) {
        return Err(bad());
    }
    let numer: BigInt = num.parse().map_err(|_| bad())?;
    let denom: BigInt = match den {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(numer * sign, denom))
}

/// `floor(log2(q))` for `q > 0`.
pub fn floor_log2(q: &Rational) -> i64 {
    assert!(q.is_positive(), "floor_log2 of a non-positive rational");
    let e = q.numer().bits() as i64 - q.denom().bits() as i64;
    if *q >= pow2(e) {
        e
    } else {
        e - 1
    }
}

/// `ceil(log2(q))` for `q > 0`.
pub fn ceil_log2(q: &Rational) -> i64 {
    let f = floor_log2(q);
    if pow2(f) == *q {
        f
    } else {
        f + 1
    }
}

pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn ceil(q: &Rational) -> BigInt {
    -((-q.numer()).div_floor(q.denom()))
}

pub fn min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Decimal approximation for human-facing output only.
pub fn approx(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn is_unit(x: &Rational) -> bool {
    !x.is_negative() && *x <= Rational::one()
}

pub fn require_unit(x: &Rational) -> Result<()> {
    if is_unit(x) {
        Ok(())
    } else {
        Err(Error::OutOfUnitInterval(x.clone()))
    }
}

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

/// An interval certified to contain some real quantity.
pub type Enclosure = Interval;

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::Precondition(format!(
                "interval endpoints out of order: [{}, {}]",
                render(&lo),
                render(&hi)
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(v: Rational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// `other` lies in the open interior of `self`.
    pub fn strictly_contains(&self, other: &Interval) -> bool {
        self.lo < other.lo && other.hi < self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn into_bounds(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    /// Upper bound of `|v - c|` over all `v` in the interval.
    pub fn max_abs_deviation(&self, c: &Rational) -> Rational {
        max(&(&self.hi - c).abs(), &(&self.lo - c).abs())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `[Σ wᵢ·loᵢ, Σ wᵢ·hiᵢ]` for nonnegative weights.
pub fn enclose_sum<'a, I>(terms: I) -> Enclosure
where
    I: IntoIterator<Item = (&'a Rational, &'a Enclosure)>,
{
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for (w, e) in terms {
        debug_assert!(!w.is_negative(), "enclose_sum weight must be nonnegative");
        lo += w * &e.lo;
        hi += w * &e.hi;
    }
    Interval { lo, hi }
}

/// Widens `e` by a tail known to lie in `[tail_lo, tail_hi]`.
pub fn pad(e: &Enclosure, tail_lo: &Rational, tail_hi: &Rational) -> Enclosure {
    debug_assert!(tail_lo <= tail_hi);
    Interval {
        lo: &e.lo + tail_lo,
        hi: &e.hi + tail_hi,
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_str {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::{parse_rational, render, Rational};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}
