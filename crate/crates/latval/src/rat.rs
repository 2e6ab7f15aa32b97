//! Exact rational scalars used by all hull, lattice and fitting code.
//!
//! Rationals are kept in lowest terms with a positive denominator
//! (`num_rational` maintains that invariant) and serialize as `"p/q"`
//! strings so JSON output never goes through floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // BigRational::to_f64 handles magnitudes beyond f64 by saturating.
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Formats in lowest terms, omitting the denominator when it is 1.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer part in rational literal: {0}")]
    BadInt(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
    #[error("too many '/' separators in rational literal")]
    TooManyParts,
}

/// Parses `"p"` or `"p/q"` (optionally signed) into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatError::Empty);
    }
    let mut parts = s.split('/');
    let numer = parts.next().ok_or(ParseRatError::Empty)?;
    let numer: BigInt = numer
        .trim()
        .parse()
        .map_err(|_| ParseRatError::BadInt(numer.to_string()))?;
    let denom = match parts.next() {
        None => BigInt::one(),
        Some(d) => d
            .trim()
            .parse()
            .map_err(|_| ParseRatError::BadInt(d.to_string()))?,
    };
    if parts.next().is_some() {
        return Err(ParseRatError::TooManyParts);
    }
    if denom.is_zero() {
        return Err(ParseRatError::ZeroDenominator);
    }
    Ok(Rat::new(numer, denom))
}
