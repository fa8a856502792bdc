//! Scalar abstraction shared by polynomials, jets, determinants and hyperplanes.
//!
//! Everything that does arithmetic is written against [`Scalar`], which is
//! implemented for `f32`, `f64` and the exact [`Rational`] type. Exact scalars
//! get fraction-free elimination and exact comparisons; floating scalars get
//! partial pivoting and error estimates.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number in canonical reduced form.
pub type Rational = BigRational;

pub trait Scalar: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    /// True when arithmetic on this type is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact rational value, if the scalar is finite.
    fn to_rational(&self) -> Option<Rational>;

    /// Division that is known to be exact in the scalar's ring (Bareiss steps).
    fn exact_div(&self, rhs: &Self) -> Self {
        self.clone() / rhs.clone()
    }

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f32
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r) as f32
    }

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    /// Exact binary value of `v`; non-finite input maps to zero.
    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).unwrap_or_else(Rational::zero)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

/// Nearest-ish f64 of a rational, robust to numerators and denominators
/// beyond the f64 range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    // Scale both parts down to ~60 significant bits before dividing.
    let numer = r.numer();
    let denom = r.denom();
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    let ns = (nb - 60).max(0);
    let ds = (db - 60).max(0);
    let n = (numer >> ns as usize).to_f64().unwrap_or(0.0);
    let d = (denom >> ds as usize).to_f64().unwrap_or(1.0);
    (n / d) * 2f64.powi((ns - ds) as i32)
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"p/q"`, `"-p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational \"p/q\" string: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Formats as `"numerator/denominator"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// True when `r` lies in `(1/modulus) ℤ`.
pub fn lies_in_scaled_integers(r: &Rational, modulus: &BigInt) -> bool {
    (r * Rational::from_integer(modulus.clone())).is_integer()
}

/// Serde adapter storing a [`Rational`] as a `"p/q"` string.
pub mod rational_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational(" 7 / -14 ").unwrap(), rat(-1, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&int(3)), "3/1");
        assert_eq!(format_rational(&rat(-2, 6)), "-1/3");
    }

    #[test]
    fn huge_rationals_convert() {
        let big = Rational::new(BigInt::from(3) << 2000usize, BigInt::from(1) << 2001usize);
        assert!((rational_to_f64(&big) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn denominators() {
        let v = [rat(1, 4), rat(1, 6), int(2)];
        assert_eq!(common_denominator(v.iter()), BigInt::from(12));
        assert!(lies_in_scaled_integers(&rat(3, 8), &BigInt::from(16)));
        assert!(!lies_in_scaled_integers(&rat(3, 8), &BigInt::from(4)));
    }
}
