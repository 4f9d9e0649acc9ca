//! Exact rational scalars.
//!
//! Every payoff, probability and LP coefficient in this crate is a
//! [`Rational`]: an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Nothing is ever rounded, except when rendering a
//! value as a decimal string for humans.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number (lowest terms, positive denominator).
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("invalid number `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// `numer / denom` as a rational. Panics if `denom == 0`.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `p/q`, an integer, or a decimal literal (optionally with an
/// exponent such as `5.9e-3`) into an exact rational.
///
/// Decimals are converted digit by digit, so `0.005913759` becomes
/// `5913759/1000000000` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(|| ParseRationalError::Invalid(s.into()))?;
        let den = parse_decimal(den.trim()).ok_or_else(|| ParseRationalError::Invalid(s.into()))?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.into()));
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(|| ParseRationalError::Invalid(s.into()))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], i32::from_str(&s[pos + 1..]).ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&all_digits).ok()?;
    let scale = exponent - i32::try_from(frac_part.len()).ok()?;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, scale.unsigned_abs() as usize));
    }
    Some(if negative { -value } else { value })
}

/// Canonical `p/q` rendering (`p` alone when the denominator is 1).
pub fn to_exact_string(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Shortest decimal rendering.
///
/// Terminating fractions are printed exactly with no trailing zeros.
/// Anything else is rounded half away from zero to `max_places` digits and
/// prefixed with `~`; the rational form is the authoritative value.
pub fn to_decimal_string(value: &Rational, max_places: usize) -> String {
    if let Some(places) = terminating_places(value.denom()) {
        if places <= max_places {
            return fixed_point(value, places);
        }
    }
    format!("~{}", fixed_point(value, max_places))
}

/// Rounds to exactly `places` fractional digits, half away from zero.
pub fn fixed_point(value: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = value.abs() * Rational::from_integer(scale.clone());
    let rounded = (scaled + rat(1, 2)).floor().to_integer();
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let mut out = String::new();
    if value.is_negative() && !rounded.is_zero() {
        out.push('-');
    }
    write!(out, "{int_part}").unwrap();
    if places > 0 {
        let frac = frac_part.to_string();
        out.push('.');
        out.push_str(&"0".repeat(places - frac.len()));
        out.push_str(&frac);
    }
    out
}

fn terminating_places(denom: &BigInt) -> Option<usize> {
    let mut d = denom.clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    d.is_one().then_some(twos.max(fives))
}

/// Lossy conversion for diagnostics only.
pub fn to_f64(value: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
}

pub fn is_in_unit_interval(value: &Rational) -> bool {
    !value.is_negative() && *value <= Rational::one()
}
