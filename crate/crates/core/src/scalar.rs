//! Scalar abstraction shared by every computation in the crate.
//!
//! All math is written once against [`Scalar`] and instantiated for
//! [`BigRational`] (exact, the default) and `f64` (float mode). Mixing the two
//! inside one computation is a type error.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Comparison tolerance used by float mode. Exact mode ignores it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

pub trait Scalar:
    num_traits::Num + Signed + Clone + Debug + PartialOrd + Send + Sync + 'static
{
    const MODE: Mode;

    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// Equality in exact mode, tolerance-based closeness in float mode.
    fn near(&self, other: &Self, tol: &Tolerance) -> bool;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;

    /// Lossless text form: `p/q` for rationals, 17 significant digits for floats.
    fn to_text(&self) -> String;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Parses `p/q`, integers and decimal strings exactly before converting.
    fn parse(s: &str) -> Result<Self> {
        parse_rational(s).map(|r| Self::from_rational(&r))
    }

    /// Integer power; negative exponents take the reciprocal.
    fn powi(&self, e: i64) -> Self {
        let p = num_traits::pow(self.clone(), e.unsigned_abs() as usize);
        if e < 0 {
            Self::one() / p
        } else {
            p
        }
    }
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::Exact;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn near(&self, other: &Self, _tol: &Tolerance) -> bool {
        self == other
    }

    fn to_json(&self) -> Value {
        json!({ "num": self.numer().to_string(), "den": self.denom().to_string() })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let text = v.to_string();
        match v {
            Value::Object(map) => {
                let field = |name: &str| -> Result<BigInt> {
                    let s = map.get(name).and_then(Value::as_str).ok_or_else(|| {
                        Error::parse(&text, format!("missing string field {name:?}"))
                    })?;
                    BigInt::from_str(s).map_err(|e| Error::parse(&text, e.to_string()))
                };
                let den = field("den")?;
                if den.is_zero() {
                    return Err(Error::parse(&text, "zero denominator"));
                }
                Ok(BigRational::new(field("num")?, den))
            }
            Value::String(s) => parse_rational(s),
            Value::Number(n) if n.is_i64() => {
                Ok(BigRational::from_integer(n.as_i64().unwrap().into()))
            }
            _ => Err(Error::parse(&text, "expected {\"num\", \"den\"} object")),
        }
    }

    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn near(&self, other: &Self, tol: &Tolerance) -> bool {
        tol.close(*self, *other)
    }

    fn to_json(&self) -> Value {
        json!(self)
    }

    fn from_json(v: &Value) -> Result<Self> {
        v.as_f64()
            .ok_or_else(|| Error::parse(&v.to_string(), "expected a number"))
    }

    fn to_text(&self) -> String {
        format!("{:.16e}", self)
    }

    fn powi(&self, e: i64) -> Self {
        match i32::try_from(e) {
            Ok(e) => f64::powi(*self, e),
            Err(_) => f64::powf(*self, e as f64),
        }
    }
}

/// Parses `p/q`, integers, and decimals (with optional exponent) into an
/// exact rational. `0.4` becomes `2/5`.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::parse(input, "empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if den.is_zero() {
            return Err(Error::parse(input, "zero denominator"));
        }
        return Ok(num / den);
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::parse(input, "bad exponent"))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::parse(input, "no digits"));
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(Error::parse(input, "not a number"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(
        BigInt::from_str(if all_digits.is_empty() {
            "0"
        } else {
            &all_digits
        })
        .unwrap(),
    );
    let scale = exponent - frac_part.len() as i32;
    let power = num_traits::pow(
        BigRational::from_integer(BigInt::from(10)),
        scale.unsigned_abs() as usize,
    );
    if scale < 0 {
        value /= power;
    } else {
        value *= power;
    }
    Ok(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::ratio(n, d)
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_rational("0.4").unwrap(), r(2, 5));
        assert_eq!(parse_rational("-1.25").unwrap(), r(-5, 4));
        assert_eq!(parse_rational("3/7").unwrap(), r(3, 7));
        assert_eq!(parse_rational("-6/4").unwrap(), r(-3, 2));
        assert_eq!(parse_rational("2.5e2").unwrap(), r(250, 1));
        assert_eq!(parse_rational("1e-3").unwrap(), r(1, 1000));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert_eq!(parse_rational("7").unwrap(), r(7, 1));
    }

    #[test]
    fn bad_input_is_rejected() {
        for s in ["", "abc", "1/0", "1.2.3", "--1", "e5", "0x10"] {
            assert!(parse_rational(s).is_err(), "{s:?} should fail");
        }
    }

    #[test]
    fn float_parse_goes_through_rational() {
        assert_eq!(<f64 as Scalar>::parse("0.4").unwrap(), 0.4);
        assert_eq!(<f64 as Scalar>::parse("1/3").unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn json_encodings() {
        let x = r(-3, 7);
        assert_eq!(x.to_json(), json!({"num": "-3", "den": "7"}));
        assert_eq!(BigRational::from_json(&x.to_json()).unwrap(), x);
        assert_eq!(0.25f64.to_json(), json!(0.25));
        assert!(BigRational::from_json(&json!({"num": "1", "den": "0"})).is_err());
    }

    #[test]
    fn text_forms() {
        assert_eq!(r(1, 3).to_text(), "1/3");
        assert_eq!(r(4, 2).to_text(), "2");
        let t = (0.1f64).to_text();
        assert_eq!(t.parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn negative_powers() {
        assert_eq!(r(2, 3).powi(-2), r(9, 4));
        assert_eq!(r(2, 3).powi(0), r(1, 1));
        assert_eq!(2f64.powi(-3), 0.125);
    }

    #[test]
    fn tolerance_closeness() {
        let tol = Tolerance::default();
        assert!(1.0f64.near(&(1.0 + 1e-11), &tol));
        assert!(!1.0f64.near(&1.001, &tol));
        assert!(0.0f64.near(&1e-13, &tol));
    }
}
