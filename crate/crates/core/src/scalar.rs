//! Coefficient scalars: exact rationals and floating point.
//!
//! Every algebraic structure in this crate (polynomials, metrics, tensors,
//! transformations) is generic over a [`Scalar`]. The exact instantiation
//! uses [`Rational`] and supports decisive zero tests; the floating
//! instantiations (`f64`, `f32`) mirror the same operations but all
//! predicates on them must go through tolerances.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number; always reduced, denominator positive.
pub type Rational = BigRational;

/// Shorthand rational constructor.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Parse `p/q` or a plain integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    Rational::from_str(text.trim()).map_err(|e| Error::Parse(format!("bad rational {text:?}: {e}")))
}

/// Format as `p/q`, or just `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Best rational approximation with bounded denominator (continued fractions).
pub fn rationalize(x: f64, max_denom: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (
        Rational::zero(),
        Rational::one(),
        Rational::one(),
        Rational::zero(),
    );
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        let a_rat = Rational::from_f64(a)?;
        let p2 = &a_rat * &p1 + &p0;
        let q2 = &a_rat * &q1 + &q0;
        if ToPrimitive::to_f64(&q2)? > max_denom as f64 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = rem - a;
        if frac.abs() < 1e-12 {
            break;
        }
        rem = 1.0 / frac;
    }
    if q1.is_zero() {
        return None;
    }
    Some(p1 / q1)
}

/// Coefficient ring used by polynomials and tensors.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    /// Whether arithmetic on this scalar is exact. Exact-only predicates
    /// refuse to run when this is false.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;
    fn from_int(n: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Zero test: exact equality for rationals, `|x| <= tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    /// JSON image of a coefficient: a `p/q` string when exact, a number
    /// otherwise.
    fn coef_json(&self) -> serde_json::Value;
    fn coef_from_json(value: &serde_json::Value) -> Result<Self>;

    fn format_coef(&self) -> String;
    fn parse_coef(text: &str) -> Result<Self>;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_int(n: i64) -> Self {
        rat_int(n)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn coef_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn coef_from_json(value: &serde_json::Value) -> Result<Self> {
        match value {
            serde_json::Value::String(s) => parse_rational(s),
            // Integer JSON numbers are exact; refuse floating point ones.
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(rat_int(i)),
                None => Err(Error::ExactnessRequired),
            },
            other => Err(Error::Parse(format!("bad rational coefficient: {other}"))),
        }
    }

    fn format_coef(&self) -> String {
        format_rational(self)
    }

    fn parse_coef(text: &str) -> Result<Self> {
        parse_rational(text)
    }
}

macro_rules! impl_scalar_float {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_rational(r: &Rational) -> Self {
                ToPrimitive::to_f64(r).unwrap_or(f64::NAN) as $t
            }

            fn from_int(n: i64) -> Self {
                n as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_negligible(&self, tol: f64) -> bool {
                (*self as f64).abs() <= tol
            }

            fn coef_json(&self) -> serde_json::Value {
                serde_json::json!(*self as f64)
            }

            fn coef_from_json(value: &serde_json::Value) -> Result<Self> {
                match value {
                    serde_json::Value::Number(n) => n
                        .as_f64()
                        .map(|x| x as $t)
                        .ok_or_else(|| Error::Parse(format!("bad numeric coefficient: {n}"))),
                    serde_json::Value::String(s) => {
                        // Accept `p/q` strings in numeric context as well.
                        let r = parse_rational(s)?;
                        Ok(<$t as Scalar>::from_rational(&r))
                    }
                    other => Err(Error::Parse(format!("bad numeric coefficient: {other}"))),
                }
            }

            fn format_coef(&self) -> String {
                format!("{}", self)
            }

            fn parse_coef(text: &str) -> Result<Self> {
                if let Ok(v) = text.parse::<$t>() {
                    return Ok(v);
                }
                let r = parse_rational(text)?;
                Ok(<$t as Scalar>::from_rational(&r))
            }
        }
    };
}

impl_scalar_float!(f64);
impl_scalar_float!(f32);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roundtrip() {
        let r = rat(-3, 6);
        assert_eq!(format_rational(&r), "-1/2");
        assert_eq!(parse_rational("-1/2").unwrap(), r);
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
    }

    #[test]
    fn rationalize_simple() {
        assert_eq!(rationalize(0.5, 100).unwrap(), rat(1, 2));
        assert_eq!(rationalize(-2.0, 100).unwrap(), rat_int(-2));
        let third = rationalize(1.0 / 3.0, 1000).unwrap();
        assert_eq!(third, rat(1, 3));
    }

    #[test]
    fn float_negligible_uses_tolerance() {
        assert!(1e-13f64.is_negligible(1e-12));
        assert!(!1e-10f64.is_negligible(1e-12));
        assert!(Rational::zero().is_negligible(0.0));
    }
}
