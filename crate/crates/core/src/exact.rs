//! Exact rational helpers: parsing decimal or fractional literals, lossy display,
//! and string serde for reports.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::Serializer;

use crate::error::{Error, Result};

/// Parses "3", "-1/4" or "0.125" into an exact rational.
pub fn parse_ratio(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = num::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(digits, den);
    Ok(if neg { -v } else { v })
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator and denominator both overflow f64; scale them down together
        let shift = x.denom().bits().max(x.numer().bits()).saturating_sub(1000);
        let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Smallest integer not below `x`.
pub fn ceil_u64(x: &BigRational) -> u64 {
    if x.is_negative() {
        return 0;
    }
    x.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

pub fn rpow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

pub fn ser_ratio<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn ser_ratios<S: Serializer>(xs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}
