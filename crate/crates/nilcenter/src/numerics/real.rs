//! Scalar abstraction for the numeric backend: hardware f64 for quick work,
//! astro-float arbitrary precision for the certified runs. Exact rationals
//! and pi cross into floats only here.

use crate::pipoly::PiPoly;
use crate::rational::Rational;
use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::cell::RefCell;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Minimal scalar interface the integrators and root isolators need.
/// Implementations carry their own precision; `*_like` constructors inherit
/// the receiver's precision.
pub trait Real: Clone + PartialEq + std::fmt::Debug {
    fn from_i64_like(&self, n: i64) -> Self;
    fn from_rational_like(&self, q: &Rational) -> Self;
    fn from_f64_like(&self, x: f64) -> Self;
    fn pi_like(&self) -> Self;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn powi(&self, n: u32) -> Self;

    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    /// Total order for finite values.
    fn cmp_real(&self, o: &Self) -> std::cmp::Ordering;
    fn to_f64(&self) -> f64;
    /// Decimal rendering with the given number of significant digits.
    fn to_decimal(&self, digits: usize) -> String;

    fn zero_like(&self) -> Self {
        self.from_i64_like(0)
    }
    fn one_like(&self) -> Self {
        self.from_i64_like(1)
    }
    fn lt(&self, o: &Self) -> bool {
        self.cmp_real(o) == std::cmp::Ordering::Less
    }
    fn le(&self, o: &Self) -> bool {
        self.cmp_real(o) != std::cmp::Ordering::Greater
    }
    fn sign_i(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.is_negative() {
            -1
        } else {
            1
        }
    }
    /// Evaluate a Q[pi] scalar.
    fn from_pipoly_like(&self, p: &PiPoly) -> Self {
        let pi = self.pi_like();
        let mut acc = self.zero_like();
        for (k, c) in p.terms() {
            acc = acc.add(&self.from_rational_like(c).mul(&pi.powi(k)));
        }
        acc
    }
}

impl Real for f64 {
    fn from_i64_like(&self, n: i64) -> Self {
        n as f64
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        // good enough at f64 scale: ratio of f64-converted parts with
        // magnitude rebalancing through exponents
        let n = bigint_to_f64(q.numer());
        let d = bigint_to_f64(q.denom());
        n / d
    }
    fn from_f64_like(&self, x: f64) -> Self {
        x
    }
    fn pi_like(&self) -> Self {
        std::f64::consts::PI
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn cmp_real(&self, o: &Self) -> std::cmp::Ordering {
        self.partial_cmp(o).expect("finite comparison")
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_decimal(&self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self)
    }
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 52 {
        return i64::try_from(n.clone()).map(|v| v as f64).unwrap_or(0.0);
    }
    let shift = bits - 52;
    let top: BigInt = n >> shift;
    let top = i64::try_from(top).unwrap_or(0) as f64;
    top * 2f64.powi(shift as i32)
}

/// Arbitrary-precision float: astro-float value plus its working precision
/// in bits.
#[derive(Clone, Debug)]
pub struct Mpf {
    v: BigFloat,
    prec: usize,
}

impl Mpf {
    /// Zero at the given binary precision (>= 64 enforced).
    pub fn with_prec(bits: usize) -> Self {
        let prec = bits.max(64);
        Mpf {
            v: BigFloat::from_word(0, prec),
            prec,
        }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn raw(&self) -> &BigFloat {
        &self.v
    }

    fn wrap(&self, v: BigFloat) -> Self {
        assert!(!v.is_nan() && !v.is_inf(), "non-finite Mpf result");
        Mpf { v, prec: self.prec }
    }

    fn bigint(&self, n: &BigInt) -> BigFloat {
        let work = self.prec.max(n.bits() as usize + 2);
        let mut acc = BigFloat::from_word(0, work);
        let base = BigFloat::from_word(2, 64).powi(64, work, RM);
        for d in n.magnitude().to_u64_digits().iter().rev() {
            acc = acc.mul(&base, work, RM).add(&BigFloat::from_word(*d, work), work, RM);
        }
        if n.is_negative() {
            acc = acc.neg();
        }
        acc
    }
}

impl PartialEq for Mpf {
    fn eq(&self, o: &Self) -> bool {
        self.v.cmp(&o.v) == Some(0)
    }
}

impl Real for Mpf {
    fn from_i64_like(&self, n: i64) -> Self {
        self.wrap(self.bigint(&BigInt::from(n)))
    }
    fn from_rational_like(&self, q: &Rational) -> Self {
        let n = self.bigint(q.numer());
        let d = self.bigint(q.denom());
        self.wrap(n.div(&d, self.prec, RM))
    }
    fn from_f64_like(&self, x: f64) -> Self {
        self.wrap(BigFloat::from_f64(x, self.prec))
    }
    fn pi_like(&self) -> Self {
        self.wrap(CONSTS.with(|c| c.borrow_mut().pi(self.prec, RM)))
    }
    fn add(&self, o: &Self) -> Self {
        self.wrap(self.v.add(&o.v, self.prec.max(o.prec), RM))
    }
    fn sub(&self, o: &Self) -> Self {
        self.wrap(self.v.sub(&o.v, self.prec.max(o.prec), RM))
    }
    fn mul(&self, o: &Self) -> Self {
        self.wrap(self.v.mul(&o.v, self.prec.max(o.prec), RM))
    }
    fn div(&self, o: &Self) -> Self {
        self.wrap(self.v.div(&o.v, self.prec.max(o.prec), RM))
    }
    fn neg(&self) -> Self {
        self.wrap(self.v.neg())
    }
    fn abs(&self) -> Self {
        self.wrap(self.v.abs())
    }
    fn sqrt(&self) -> Self {
        self.wrap(self.v.sqrt(self.prec, RM))
    }
    fn sin(&self) -> Self {
        self.wrap(CONSTS.with(|c| self.v.sin(self.prec, RM, &mut c.borrow_mut())))
    }
    fn cos(&self) -> Self {
        self.wrap(CONSTS.with(|c| self.v.cos(self.prec, RM, &mut c.borrow_mut())))
    }
    fn powi(&self, n: u32) -> Self {
        if n == 0 {
            return self.one_like();
        }
        self.wrap(self.v.powi(n as usize, self.prec, RM))
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
    fn is_negative(&self) -> bool {
        self.v.is_negative()
    }
    fn cmp_real(&self, o: &Self) -> std::cmp::Ordering {
        match self.v.cmp(&o.v).expect("finite comparison") {
            x if x < 0 => std::cmp::Ordering::Less,
            0 => std::cmp::Ordering::Equal,
            _ => std::cmp::Ordering::Greater,
        }
    }
    fn to_f64(&self) -> f64 {
        // round-trip through a 64-bit-precision copy
        let mut c = self.v.clone();
        if c.set_precision(64, RM).is_err() {
            return f64::NAN;
        }
        parse_f64(&c)
    }
    fn to_decimal(&self, digits: usize) -> String {
        decimal_string(&self.v, self.prec, digits)
    }
}

fn parse_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let (words, _len, sign, exp, _) = v.as_raw_parts().expect("finite");
    let top = *words.last().unwrap();
    let mant = top as f64 / 2f64.powi(64);
    let m = if sign == Sign::Neg { -mant } else { mant };
    m * 2f64.powi(exp)
}

/// Fixed-significant-digit decimal rendering: d.dddd...e+xx, deterministic.
pub(crate) fn decimal_string(v: &BigFloat, prec: usize, digits: usize) -> String {
    if v.is_zero() {
        return format!("{:.*e}", digits.saturating_sub(1), 0.0);
    }
    let digits = digits.max(1);
    let neg = v.is_negative();
    let a = v.abs();
    // decimal exponent estimate from the binary exponent
    let e2 = a.exponent().unwrap_or(0) as f64;
    let mut e10 = (e2 * std::f64::consts::LOG10_2).floor() as i64;
    let work = prec + 64;
    let ten = BigFloat::from_word(10, work);
    let pow10 = |k: i64| -> BigFloat {
        let p = ten.powi(k.unsigned_abs() as usize, work, RM);
        if k >= 0 {
            p
        } else {
            BigFloat::from_word(1, work).div(&p, work, RM)
        }
    };
    // scale a into [10^(digits-1), 10^digits)
    let mut scaled = a.mul(&pow10(digits as i64 - 1 - e10), work, RM);
    let lo = pow10(digits as i64 - 1);
    let hi = pow10(digits as i64);
    loop {
        if scaled.cmp(&lo) == Some(-1) {
            scaled = scaled.mul(&ten, work, RM);
            e10 -= 1;
        } else if scaled.cmp(&hi) >= Some(0) {
            scaled = scaled.div(&ten, work, RM);
            e10 += 1;
        } else {
            break;
        }
    }
    // round to nearest integer
    let half = BigFloat::from_word(1, work).div(&BigFloat::from_word(2, work), work, RM);
    let int = scaled.add(&half, work, RM).floor();
    let mut s = bigfloat_int_digits(&int, digits);
    if s.len() > digits {
        // carry overflowed into one more digit (e.g. 999.. -> 1000..)
        s.truncate(digits);
        e10 += 1;
    }
    let (first, rest) = s.split_at(1);
    let sign = if neg { "-" } else { "" };
    if rest.is_empty() {
        format!("{sign}{first}e{e10}")
    } else {
        format!("{sign}{first}.{rest}e{e10}")
    }
}

fn bigfloat_int_digits(v: &BigFloat, digits: usize) -> String {
    // v is a nonnegative integer with ~digits decimal digits
    let work = 64 + 4 * digits;
    let mut x = v.clone();
    let ten = BigFloat::from_word(10, work);
    let mut out = Vec::new();
    for _ in 0..digits + 2 {
        if x.is_zero() {
            break;
        }
        let q = x.div(&ten, work, RM).floor();
        let r = x.sub(&q.mul(&ten, work, RM), work, RM);
        let d = r.to_f64_digit();
        out.push(std::char::from_digit(d, 10).unwrap());
        x = q;
    }
    if out.is_empty() {
        out.push('0');
    }
    out.iter().rev().collect()
}

trait DigitHack {
    fn to_f64_digit(&self) -> u32;
}

impl DigitHack for BigFloat {
    fn to_f64_digit(&self) -> u32 {
        let f = parse_f64(self);
        f.round().clamp(0.0, 9.0) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{parse_exact, rat};

    #[test]
    fn exact_rational_roundtrip() {
        let z = Mpf::with_prec(256);
        let q = rat(1, 3);
        let x = z.from_rational_like(&q);
        let three = z.from_i64_like(3);
        let back = x.mul(&three);
        let err = back.sub(&z.one_like()).abs();
        assert!(err.to_f64() < 1e-70);
    }

    #[test]
    fn pi_matches_f64() {
        let z = Mpf::with_prec(128);
        assert!((z.pi_like().to_f64() - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn decimal_rendering() {
        let z = Mpf::with_prec(256);
        let x = z.from_rational_like(&parse_exact("-2.0006218904e-13").unwrap());
        let s = x.to_decimal(11);
        assert_eq!(s, "-2.0006218904e-13");
        let one = z.one_like();
        assert_eq!(one.to_decimal(3), "1.00e0");
    }

    #[test]
    fn big_rational_conversion() {
        let z = Mpf::with_prec(256);
        let q = parse_exact("9.9669521943e-11").unwrap();
        let x = z.from_rational_like(&q);
        assert!((x.to_f64() - 9.9669521943e-11).abs() < 1e-21);
    }
}
