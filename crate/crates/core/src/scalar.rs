//! Numeric backends.
//!
//! Every matrix in the crate is generic over [`Scalar`]. Two backends exist:
//! [`Rational`] (arbitrary precision, exact) and `f64`. Exactness claims made
//! by the constructions hold for the rational backend; the float backend
//! checks marginals against [`Scalar::SUM_TOLERANCE`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational numbers backed by big integers.
pub type Rational = BigRational;

/// A field element usable as a matrix entry.
pub trait Scalar: Clone + fmt::Debug + PartialOrd + Signed + Send + Sync + 'static {
    /// `true` when arithmetic is exact.
    const EXACT: bool;
    /// Largest tolerated deviation of a marginal sum from its target.
    const SUM_TOLERANCE: f64;

    fn ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Lossless for rationals (binary expansion), identity for floats.
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact value of the stored number.
    fn to_rational(&self) -> Rational;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn from_usize(n: usize) -> Self {
        Self::ratio(n as i64, 1)
    }

    /// Whether `deviation` is small enough to count as zero for marginal checks.
    fn negligible(deviation: &Self) -> bool {
        if Self::EXACT {
            deviation.is_zero()
        } else {
            deviation.abs().to_f64() <= Self::SUM_TOLERANCE
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const SUM_TOLERANCE: f64 = 0.0;

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(x).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Self::ratio(i, 1))
                } else {
                    Err(Error::Parse(format!(
                        "non-integer number {n} in rational backend; write it as \"p/q\""
                    )))
                }
            }
            other => Err(Error::Parse(format!("expected rational, found {other}"))),
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const SUM_TOLERANCE: f64 = 1e-12;

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Rational {
        <BigRational as FromPrimitive>::from_f64(*self).unwrap_or_else(BigRational::zero)
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("bad number {n}"))),
            Value::String(s) => parse_rational(s).map(|r| Self::from_rational(&r)),
            other => Err(Error::Parse(format!("expected number, found {other}"))),
        }
    }
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let r = Rational::ratio(-6, 8);
        assert_eq!(format_rational(&r), "-3/4");
        assert_eq!(parse_rational("-3/4").unwrap(), r);
        assert_eq!(parse_rational(" 5 ").unwrap(), Rational::ratio(5, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn json_backends() {
        let r = Rational::ratio(1, 3);
        assert_eq!(Rational::from_json(&r.to_json()).unwrap(), r);
        let f = <f64 as Scalar>::from_json(&Value::String("1/4".into())).unwrap();
        assert_eq!(f, 0.25);
        assert!(Rational::from_json(&serde_json::json!(0.5)).is_err());
    }

    #[test]
    fn negligible_is_exact_for_rationals() {
        assert!(!Rational::negligible(&Rational::ratio(1, 1_000_000_000_000_000)));
        assert!(<f64 as Scalar>::negligible(&1e-13));
        assert!(!<f64 as Scalar>::negligible(&1e-11));
    }
}
