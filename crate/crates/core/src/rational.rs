//! Helpers around [`BigRational`]: canonical text form, parsing, rounding.
//!
//! Rationals are always written reduced with the sign on the numerator, as
//! `"p/q"` or `"p"` when the denominator is one. Parsing additionally accepts
//! decimal and scientific notation (`"0.25"`, `"1e-6"`), converted exactly.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn from_u128(n: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `n!` as `u128`, or `None` once it overflows (n > 34).
pub fn factorial_u128(n: u32) -> Option<u128> {
    (2..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

pub fn format(q: &BigRational) -> String {
    // `Ratio` is kept reduced with a positive denominator by construction.
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..].parse().map_err(|_| bad())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{whole}{frac}").parse().unwrap_or_else(|_| BigInt::zero());
    let scale = exponent - frac.len() as i64;
    let ten = BigInt::from(10u32);
    let mut q = if scale >= 0 {
        BigRational::from_integer(all * Pow::pow(&ten, scale as u64))
    } else {
        BigRational::new(all, Pow::pow(&ten, (-scale) as u64))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

pub fn floor(q: &BigRational) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn ceil(q: &BigRational) -> BigInt {
    -((-q.numer()).div_floor(q.denom()))
}

/// Converts a non-negative integer-valued `BigInt` into `u128` if it fits.
pub fn to_u128(n: &BigInt) -> Option<u128> {
    if n.sign() == Sign::Minus {
        return None;
    }
    n.to_u128()
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Nearest rational with denominator `den` (ties rounded up). Used only for
/// human-facing summaries and CSV columns of irrational quantities.
pub fn round_to(q: &BigRational, den: u64) -> BigRational {
    let d = BigInt::from(den);
    let scaled = q * BigRational::from_integer(d.clone()) + rat(1, 2);
    BigRational::new(floor(&scaled), d)
}

/// `⌊√n⌋` for non-negative integers.
pub fn isqrt(n: u128) -> u128 {
    let r = num_integer::Roots::sqrt(&BigUint::from(n));
    r.to_u128().expect("sqrt of u128 fits in u128")
}

pub fn abs_diff(a: &BigRational, b: &BigRational) -> BigRational {
    (a - b).abs()
}

/// Serde adapter writing rationals as canonical strings.
pub mod serde_rat {
    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        super::from_json(&v).map_err(de::Error::custom)
    }
}

/// Serde adapter for `Vec<BigRational>`.
pub mod serde_rat_vec {
    use num_rational::BigRational;
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&super::format(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(super::from_json)
            .collect::<Result<_, _>>()
            .map_err(de::Error::custom)
    }
}

/// Accepts a JSON string (`"3/4"`) or an integer literal.
pub fn from_json(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::String(s) => parse(s),
        serde_json::Value::Number(n) => parse(&n.to_string()),
        other => Err(Error::ParseRational(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_format() {
        assert_eq!(format(&rat(6, 4)), "3/2");
        assert_eq!(format(&rat(3, -6)), "-1/2");
        assert_eq!(format(&rat(8, 4)), "2");
        assert_eq!(format(&rat(0, 7)), "0");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse(" -4 ").unwrap(), int(-4));
        assert_eq!(parse("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse("1e-6").unwrap(), rat(1, 1_000_000));
        assert_eq!(parse("2.5E2").unwrap(), int(250));
        assert_eq!(parse("-.5").unwrap(), rat(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse(".").is_err());
    }

    #[test]
    fn floor_ceil_signs() {
        assert_eq!(floor(&rat(7, 2)), BigInt::from(3));
        assert_eq!(ceil(&rat(7, 2)), BigInt::from(4));
        assert_eq!(floor(&rat(-7, 2)), BigInt::from(-4));
        assert_eq!(ceil(&rat(-7, 2)), BigInt::from(-3));
        assert_eq!(ceil(&int(5)), BigInt::from(5));
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(10), BigInt::from(3_628_800));
        assert_eq!(factorial_u128(20), Some(2_432_902_008_176_640_000));
        assert_eq!(factorial_u128(34).map(|_| ()), Some(()));
        assert_eq!(factorial_u128(35), None);
    }

    #[test]
    fn integer_sqrt() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u64::MAX as u128), u32::MAX as u128);
    }
}
