//! Exact rationals and their textual forms.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn frac(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `2^-k`.
pub fn inverse_power_of_two(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k as usize)
}

/// Always `p/q`, including integers (`0/1`, `1/1`).
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering with `digits` significant digits, truncated toward zero.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let num = r.numer().abs().to_biguint().expect("nonnegative");
    let den = r.denom().to_biguint().expect("positive");
    let (int_part, mut rem) = num.div_rem(&den);
    let ten = BigUint::from(10u32);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    let int_str = int_part.to_string();
    let mut significant = if int_part.is_zero() { 0 } else { int_str.len() };
    out.push_str(&int_str);
    if significant >= digits || rem.is_zero() {
        return out;
    }
    out.push('.');
    while significant < digits && !rem.is_zero() {
        rem *= &ten;
        let (d, r2) = rem.div_rem(&den);
        rem = r2;
        let d = d.to_u32().expect("single digit");
        out.push(char::from_digit(d, 10).expect("digit"));
        if significant > 0 || d != 0 {
            significant += 1;
        }
    }
    out
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {0:?} as a rational (expected p/q, an integer, or 2^-k)")]
pub struct ParseRationalError(pub String);

/// Parses `p/q`, a plain integer, or `2^-k`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some(exp) = t.strip_prefix("2^-") {
        let k: u32 = exp.parse().map_err(|_| err())?;
        return Ok(inverse_power_of_two(k));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    let p: BigInt = t.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(p))
}

/// `⌈r⌉` for a positive rational.
pub fn ceil_to_biguint(r: &Rational) -> BigUint {
    r.ceil().to_integer().to_biguint().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_strings() {
        assert_eq!(to_fraction_string(&frac(2, 18)), "1/9");
        assert_eq!(to_fraction_string(&frac(0, 5)), "0/1");
        assert_eq!(to_fraction_string(&frac(3, 3)), "1/1");
    }

    #[test]
    fn decimals() {
        assert_eq!(to_decimal(&frac(1, 9), 5), "0.11111");
        assert_eq!(to_decimal(&frac(1, 4), 20), "0.25");
        assert_eq!(to_decimal(&frac(3, 1), 20), "3");
        assert_eq!(to_decimal(&frac(1, 3000), 3), "0.000333");
        assert_eq!(to_decimal(&frac(0, 1), 3), "0");
        assert_eq!(to_decimal(&frac(19, 27), 20), "0.70370370370370370370");
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("1/8").unwrap(), frac(1, 8));
        assert_eq!(parse_rational("2^-16").unwrap(), frac(1, 65536));
        assert_eq!(parse_rational("3").unwrap(), from_int(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn ceilings() {
        assert_eq!(ceil_to_biguint(&frac(1, 1)), BigUint::from(1u32));
        assert_eq!(ceil_to_biguint(&frac(7, 2)), BigUint::from(4u32));
    }
}
