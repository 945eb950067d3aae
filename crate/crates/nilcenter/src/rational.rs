//! Exact rational scalars.
//!
//! `Rational` is `num::BigRational`: arbitrary-precision, always reduced,
//! denominator kept positive by the backing crate. Helpers here cover the
//! constructors the rest of the crate needs, in particular exact parsing of
//! decimal strings ("0.0188", "3.2e-21") so no binary float ever enters the
//! exact pipeline.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// n/d as a Rational. Panics on d = 0.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Parse an exact number: integer, "n/d", decimal ("-0.25"), or scientific
/// ("3.2e-21"). Decimal and scientific forms are converted exactly.
pub fn parse_exact(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Config("empty number".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad rational `{s}`")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad rational `{s}`")))?;
        if d.is_zero() {
            return Err(Error::Config(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(n, d));
    }
    // [mantissa][e exponent]
    let (mant, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let e: i64 = e
                .parse()
                .map_err(|_| Error::Config(format!("bad exponent in `{s}`")))?;
            (m, e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(Error::Config(format!("bad number `{s}`")));
    }
    let n: BigInt = digits
        .parse()
        .map_err(|_| Error::Config(format!("bad number `{s}`")))?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Rational::from(n * ten.pow(shift as u32))
    } else {
        Rational::new(n, ten.pow((-shift) as u32))
    })
}

/// Canonical text: "0", "5", "-3/4".
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// gcd of |a|, |b| treating zero as absorbing; used for content extraction.
pub fn rational_content_gcd(a: &Rational, b: &Rational) -> Rational {
    // gcd(n1/d1, n2/d2) = gcd(n1, n2) / lcm(d1, d2)
    use num_integer::Integer;
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let n = a.numer().gcd(b.numer());
    let d = a.denom().lcm(b.denom());
    Rational::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_forms() {
        assert_eq!(parse_exact("3").unwrap(), rat_int(3));
        assert_eq!(parse_exact("-4/6").unwrap(), rat(-2, 3));
        assert_eq!(parse_exact("0.0188").unwrap(), rat(47, 2500));
        assert_eq!(
            parse_exact("3.2e-21").unwrap(),
            Rational::new(BigInt::from(32), BigInt::from(10).pow(22))
        );
        assert_eq!(parse_exact("-1.5e2").unwrap(), rat_int(-150));
        assert!(parse_exact("1/0").is_err());
        assert!(parse_exact("abc").is_err());
    }

    #[test]
    fn content_gcd() {
        assert_eq!(rational_content_gcd(&rat(4, 3), &rat(2, 9)), rat(2, 9));
        assert_eq!(rational_content_gcd(&rat(0, 1), &rat(-5, 7)), rat(5, 7));
    }
}
