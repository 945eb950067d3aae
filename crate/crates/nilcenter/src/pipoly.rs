//! The coefficient ring Q[pi].
//!
//! pi is a free transcendental symbol; nothing here ever evaluates it
//! numerically. Invariants: no stored zero coefficients.

use crate::rational::{format_rational, rational_content_gcd, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PiPoly {
    terms: BTreeMap<u32, Rational>,
}

impl PiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(0, q);
        }
        Self { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(crate::rational::rat_int(n))
    }

    /// q * pi^k
    pub fn pi_term(q: Rational, k: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(k, q);
        }
        Self { terms }
    }

    pub fn pi() -> Self {
        Self::pi_term(Rational::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// The pi^0 part, if that is all there is.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self.terms.len() {
            0 => Some(RATIONAL_ZERO.get_or_init(Rational::zero)),
            1 => self.terms.get(&0),
            _ => None,
        }
    }

    pub fn coeff(&self, k: u32) -> Rational {
        self.terms.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn max_pi_power(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    /// Multiply by pi^k.
    pub fn shift_pi(&self, k: u32) -> Self {
        Self {
            terms: self.terms.iter().map(|(p, c)| (p + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Positive rational content (gcd of all coefficients); zero for the zero poly.
    pub fn content(&self) -> Rational {
        let mut g = Rational::zero();
        for c in self.terms.values() {
            g = rational_content_gcd(&g, c);
        }
        g
    }

    /// Sign of the coefficient of the lowest pi power (0 for the zero poly).
    pub fn leading_sign(&self) -> i32 {
        match self.terms.values().next() {
            None => 0,
            Some(c) if c.is_positive() => 1,
            _ => -1,
        }
    }

    fn insert(terms: &mut BTreeMap<u32, Rational>, k: u32, v: Rational) {
        if v.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(k) {
            Entry::Vacant(e) => {
                e.insert(v);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + v;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
}

static RATIONAL_ZERO: once_cell::sync::OnceCell<Rational> = once_cell::sync::OnceCell::new();

impl Add for &PiPoly {
    type Output = PiPoly;
    fn add(self, rhs: &PiPoly) -> PiPoly {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            PiPoly::insert(&mut terms, *k, v.clone());
        }
        PiPoly { terms }
    }
}

impl Sub for &PiPoly {
    type Output = PiPoly;
    fn sub(self, rhs: &PiPoly) -> PiPoly {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            PiPoly::insert(&mut terms, *k, -v.clone());
        }
        PiPoly { terms }
    }
}

impl Mul for &PiPoly {
    type Output = PiPoly;
    fn mul(self, rhs: &PiPoly) -> PiPoly {
        let mut terms = BTreeMap::new();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &rhs.terms {
                PiPoly::insert(&mut terms, k1 + k2, v1 * v2);
            }
        }
        PiPoly { terms }
    }
}

impl Neg for &PiPoly {
    type Output = PiPoly;
    fn neg(self) -> PiPoly {
        PiPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl std::fmt::Display for PiPoly {
    /// Canonical text: "0", "4/3", "pi", "-5/48*pi", "3 + 1/2*pi^2".
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let cs = format_rational(c);
            if first {
                first = false;
            } else if cs.starts_with('-') {
                write!(f, " - ")?;
                return_rest(f, &cs[1..], *k)?;
                continue;
            } else {
                write!(f, " + ")?;
            }
            return_rest(f, &cs, *k)?;
        }
        Ok(())
    }
}

fn return_rest(f: &mut std::fmt::Formatter<'_>, cs: &str, k: u32) -> std::fmt::Result {
    match k {
        0 => write!(f, "{cs}"),
        1 if cs == "1" => write!(f, "pi"),
        1 => write!(f, "{cs}*pi"),
        _ if cs == "1" => write!(f, "pi^{k}"),
        _ => write!(f, "{cs}*pi^{k}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn pi_is_never_collapsed() {
        let p = PiPoly::pi();
        let p2 = &p * &p;
        let p3 = &p2 * &p;
        assert_eq!(p3, PiPoly::pi_term(Rational::one(), 3));
        assert!(p3.as_rational().is_none());
    }

    #[test]
    fn arithmetic_and_display() {
        let a = &PiPoly::from_rational(rat(4, 3)) + &PiPoly::pi_term(rat(-5, 48), 1);
        assert_eq!(a.to_string(), "4/3 - 5/48*pi");
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(PiPoly::pi_term(rat(1, 2), 2).to_string(), "1/2*pi^2");
    }

    #[test]
    fn content() {
        let a = &PiPoly::from_rational(rat(4, 3)) + &PiPoly::pi_term(rat(-2, 9), 1);
        assert_eq!(a.content(), rat(2, 9));
        assert_eq!(a.leading_sign(), 1);
    }
}
