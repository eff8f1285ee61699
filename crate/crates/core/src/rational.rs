//! Exact rationals and their textual form (`"p/q"` or `"p"`).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parses `"p/q"` or `"p"`; surrounding whitespace is ignored.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let malformed = || RationalParseError::Malformed(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let numer = parse_int(num).ok_or_else(malformed)?;
    let denom = match den {
        Some(d) if !d.starts_with('-') => parse_int(d).ok_or_else(malformed)?,
        Some(_) => return Err(malformed()),
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(RationalParseError::ZeroDenominator(text.to_string()));
    }
    Ok(Rational::new(numer, denom))
}

fn parse_int(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix('-').unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Canonical text: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn in_unit_interval(q: &Rational) -> bool {
    !q.is_negative() && *q <= Rational::one()
}

/// `max(x - q, 0)`.
pub fn truncated_sub(x: &Rational, q: &Rational) -> Rational {
    let d = x - q;
    if d.is_negative() {
        Rational::zero()
    } else {
        d
    }
}

pub fn abs_diff(x: &Rational, y: &Rational) -> Rational {
    (x - y).abs()
}

pub mod serde_str {
    //! Serde adapter storing a [`Rational`] as its canonical string.
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/10").unwrap(), ratio(3, 10));
        assert_eq!(parse_rational(" 2/4 ").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("1").unwrap(), one());
        assert_eq!(parse_rational("-1/3").unwrap(), ratio(-1, 3));
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_rational(""), Err(RationalParseError::Empty));
        assert!(matches!(parse_rational("1/0"), Err(RationalParseError::ZeroDenominator(_))));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("+1").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("/2").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&ratio(6, 20)), "3/10");
        assert_eq!(format_rational(&ratio(4, 4)), "1");
        assert_eq!(format_rational(&zero()), "0");
    }

    #[test]
    fn truncated_subtraction_clamps_at_zero() {
        assert_eq!(truncated_sub(&ratio(3, 10), &ratio(1, 2)), zero());
        assert_eq!(truncated_sub(&one(), &ratio(1, 2)), ratio(1, 2));
    }
}
