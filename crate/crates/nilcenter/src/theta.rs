//! Closed-form calculus on trigonometric polynomials in theta with theta
//! powers: sums of theta^m cos^i(theta) sin^j(theta) terms with `BiSeries`
//! coefficients.
//!
//! Antiderivatives linearize cos^i sin^j into the {cos(a theta), sin(a theta)}
//! basis (product-to-sum, cached globally), integrate theta^m cos/sin(a theta)
//! by parts, and convert back to the power basis through Chebyshev
//! recurrences. Endpoint evaluation at multiples of pi feeds theta^m as pi^m
//! into the coefficients' Q[pi] scalars. No Pythagorean reduction is applied:
//! (m,i,j) keys are kept as produced, which keeps products a simple exponent
//! convolution.

use crate::biseries::BiSeries;
use crate::params::{ParamRational, VarSet};
use crate::rational::{rat, Rational};
use num_traits::Zero;
use once_cell::sync::Lazy;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

/// theta^m cos^i sin^j exponent triple.
pub type TrigKey = (u32, u32, u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSeries {
    vars: VarSet,
    trunc_xi: u32,
    trunc_eps: u32,
    terms: BTreeMap<TrigKey, BiSeries>,
}

/// Left end of an integration segment; the two half-orbits live on
/// [0, pi] and [pi, 2 pi].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    Upper, // [0, pi]
    Lower, // [pi, 2 pi]
}

impl Segment {
    pub fn start_halfturns(self) -> u32 {
        match self {
            Segment::Upper => 0,
            Segment::Lower => 1,
        }
    }

    pub fn end_halfturns(self) -> u32 {
        match self {
            Segment::Upper => 1,
            Segment::Lower => 2,
        }
    }
}

impl ThetaSeries {
    pub fn zero(vars: &VarSet, trunc_xi: u32, trunc_eps: u32) -> Self {
        ThetaSeries {
            vars: vars.clone(),
            trunc_xi,
            trunc_eps,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &VarSet, trunc_xi: u32, trunc_eps: u32) -> Self {
        let mut t = Self::zero(vars, trunc_xi, trunc_eps);
        t.accum(
            (0, 0, 0),
            &BiSeries::constant(vars, ParamRational::one(vars), trunc_xi, trunc_eps),
        );
        t
    }

    pub fn from_term(vars: &VarSet, key: TrigKey, coeff: BiSeries) -> Self {
        let (tx, te) = coeff.truncation();
        let mut t = Self::zero(vars, tx, te);
        t.accum(key, &coeff);
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TrigKey, &BiSeries)> {
        self.terms.iter()
    }

    pub fn truncation(&self) -> (u32, u32) {
        (self.trunc_xi, self.trunc_eps)
    }

    pub fn accum(&mut self, key: TrigKey, c: &BiSeries) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(c).expect("matching truncation");
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.accum(*k, c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        ThetaSeries {
            vars: self.vars.clone(),
            trunc_xi: self.trunc_xi,
            trunc_eps: self.trunc_eps,
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        for ((m1, i1, j1), c1) in &self.terms {
            for ((m2, i2, j2), c2) in &rhs.terms {
                let p = c1.mul(c2).expect("matching truncation");
                out.accum((m1 + m2, i1 + i2, j1 + j2), &p);
            }
        }
        out
    }

    pub fn scale(&self, c: &BiSeries) -> Self {
        let mut out = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        for (k, v) in &self.terms {
            out.accum(*k, &v.mul(c).expect("matching truncation"));
        }
        out
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        }
        ThetaSeries {
            vars: self.vars.clone(),
            trunc_xi: self.trunc_xi,
            trunc_eps: self.trunc_eps,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, c.scale_rational(q)))
                .collect(),
        }
    }

    /// Evaluate at theta = halfturns * pi: cos -> (-1)^halfturns, sin -> 0,
    /// theta^m -> (halfturns * pi)^m.
    pub fn eval_at_halfturns(&self, halfturns: u32) -> BiSeries {
        let mut out = BiSeries::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        for (&(m, i, j), c) in &self.terms {
            if j > 0 {
                continue;
            }
            let sign_neg = halfturns % 2 == 1 && i % 2 == 1;
            // (halfturns)^m, with 0^0 = 1
            let mag = if m == 0 {
                Rational::from_integer(1.into())
            } else {
                Rational::from_integer(halfturns.into()).pow(m as i32)
            };
            if mag.is_zero() {
                continue;
            }
            let q = if sign_neg { -mag } else { mag };
            let contrib = c.scale_rational(&q).scale_pi_power(m);
            out = out.add(&contrib).expect("matching truncation");
        }
        out
    }

    /// Termwise derivative d/dtheta.
    pub fn differentiate(&self) -> Self {
        let mut out = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        for (&(m, i, j), c) in &self.terms {
            // d/dθ [θ^m c^i s^j] = m θ^(m-1) c^i s^j - i θ^m c^(i-1) s^(j+1)
            //                      + j θ^m c^(i+1) s^(j-1)
            if m > 0 {
                out.accum(
                    (m - 1, i, j),
                    &c.scale_rational(&Rational::from_integer(m.into())),
                );
            }
            if i > 0 {
                out.accum(
                    (m, i - 1, j + 1),
                    &c.scale_rational(&Rational::from_integer(-(i as i64).into())),
                );
            }
            if j > 0 {
                out.accum(
                    (m, i + 1, j - 1),
                    &c.scale_rational(&Rational::from_integer(j.into())),
                );
            }
        }
        out
    }

    /// Antiderivative G with dG/dtheta = self, anchored so G vanishes at the
    /// segment's left endpoint.
    pub fn antiderivative(&self, seg: Segment) -> Self {
        let raw = self.antiderivative_raw();
        let at_start = raw.eval_at_halfturns(seg.start_halfturns());
        let mut out = raw;
        if !at_start.is_zero() {
            out.accum((0, 0, 0), &at_start.neg());
        }
        out
    }

    fn antiderivative_raw(&self) -> Self {
        let mut out = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        for (&(m, i, j), c) in &self.terms {
            for part in integral_table(m, i, j).iter() {
                let scaled = c.scale_rational(&part.coeff);
                out.accum(part.key, &scaled);
            }
        }
        out
    }

    /// Exact definite integral over a half-turn segment.
    pub fn definite_integral(&self, seg: Segment) -> BiSeries {
        let g = self.antiderivative_raw();
        let hi = g.eval_at_halfturns(seg.end_halfturns());
        let lo = g.eval_at_halfturns(seg.start_halfturns());
        hi.sub(&lo).expect("matching truncation")
    }
}

/// One term of an integrated basis element, in the power basis.
#[derive(Clone, Debug)]
struct IntTerm {
    key: TrigKey,
    coeff: Rational,
}

/// Linear form: frequency -> (cos coeff, sin coeff).
type LinForm = BTreeMap<u32, (Rational, Rational)>;

fn linearize(i: u32, j: u32) -> Arc<LinForm> {
    static CACHE: Lazy<RwLock<HashMap<(u32, u32), Arc<LinForm>>>> =
        Lazy::new(|| RwLock::new(HashMap::new()));
    if let Some(v) = CACHE.read().unwrap().get(&(i, j)) {
        return v.clone();
    }
    let mut cur: LinForm = BTreeMap::new();
    cur.insert(0, (rat(1, 1), rat(0, 1)));
    let half = rat(1, 2);
    let acc = |m: &mut LinForm, a: u32, dc: Rational, ds: Rational| {
        let e = m.entry(a).or_insert_with(|| (rat(0, 1), rat(0, 1)));
        e.0 += dc;
        e.1 += ds;
    };
    for _ in 0..i {
        // multiply by cos(theta)
        let mut nxt: LinForm = BTreeMap::new();
        for (&a, (c, s)) in &cur {
            acc(&mut nxt, a + 1, c * &half, s * &half);
            if a >= 1 {
                acc(&mut nxt, a - 1, c * &half, s * &half);
            } else {
                acc(&mut nxt, 1, c * &half, -(s * &half));
            }
        }
        cur = nxt;
    }
    for _ in 0..j {
        // multiply by sin(theta)
        let mut nxt: LinForm = BTreeMap::new();
        for (&a, (c, s)) in &cur {
            acc(&mut nxt, a + 1, -(s * &half), c * &half);
            if a >= 1 {
                acc(&mut nxt, a - 1, s * &half, -(c * &half));
            } else {
                acc(&mut nxt, 1, -(s * &half), c * &half);
            }
        }
        cur = nxt;
    }
    cur.retain(|_, (c, s)| !c.is_zero() || !s.is_zero());
    let arc = Arc::new(cur);
    CACHE.write().unwrap().insert((i, j), arc.clone());
    arc
}

/// Power-basis form of cos(a theta) / sin(a theta): (i, j) -> coeff.
fn chebyshev(a: u32, sin: bool) -> Arc<Vec<((u32, u32), Rational)>> {
    static CACHE: Lazy<RwLock<HashMap<(u32, bool), Arc<Vec<((u32, u32), Rational)>>>>> =
        Lazy::new(|| RwLock::new(HashMap::new()));
    if let Some(v) = CACHE.read().unwrap().get(&(a, sin)) {
        return v.clone();
    }
    let result: Vec<((u32, u32), Rational)> = if !sin {
        match a {
            0 => vec![((0, 0), rat(1, 1))],
            1 => vec![((1, 0), rat(1, 1))],
            _ => {
                let mut map: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
                for ((i, j), c) in chebyshev(a - 1, false).iter() {
                    *map.entry((i + 1, *j)).or_insert_with(|| rat(0, 1)) += c * rat(2, 1);
                }
                for ((i, j), c) in chebyshev(a - 2, false).iter() {
                    *map.entry((*i, *j)).or_insert_with(|| rat(0, 1)) -= c;
                }
                map.retain(|_, c| !c.is_zero());
                map.into_iter().collect()
            }
        }
    } else {
        match a {
            0 => vec![],
            1 => vec![((0, 1), rat(1, 1))],
            _ => {
                let mut map: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
                for ((i, j), c) in chebyshev(a - 1, true).iter() {
                    *map.entry((i + 1, *j)).or_insert_with(|| rat(0, 1)) += c * rat(2, 1);
                }
                for ((i, j), c) in chebyshev(a - 2, true).iter() {
                    *map.entry((*i, *j)).or_insert_with(|| rat(0, 1)) -= c;
                }
                map.retain(|_, c| !c.is_zero());
                map.into_iter().collect()
            }
        }
    };
    let arc = Arc::new(result);
    CACHE.write().unwrap().insert((a, sin), arc.clone());
    arc
}

/// Indefinite integral of theta^m cos(a theta) or sin(a theta), recursively
/// by parts, expressed over {theta^m', cos(a theta), sin(a theta)} triples.
/// kind: false = cos, true = sin, freq 0 means the pure power theta^m.
fn int_tm_trig(m: u32, a: u32, sin: bool) -> Vec<(u32, u32, Option<bool>, Rational)> {
    if a == 0 {
        if !sin {
            return vec![(m + 1, 0, None, rat(1, (m + 1) as i64))];
        }
        return vec![];
    }
    if m == 0 {
        return if !sin {
            vec![(0, a, Some(true), rat(1, a as i64))]
        } else {
            vec![(0, a, Some(false), rat(-1, a as i64))]
        };
    }
    let fa = rat(1, a as i64);
    let fm = rat(m as i64, a as i64);
    if !sin {
        let mut out = vec![(m, a, Some(true), fa)];
        for (mm, aa, kk, cc) in int_tm_trig(m - 1, a, true) {
            out.push((mm, aa, kk, -(&fm * cc)));
        }
        out
    } else {
        let mut out = vec![(m, a, Some(false), -fa)];
        for (mm, aa, kk, cc) in int_tm_trig(m - 1, a, false) {
            out.push((mm, aa, kk, &fm * cc));
        }
        out
    }
}

/// Full antiderivative of theta^m cos^i sin^j in the power basis, cached.
fn integral_table(m: u32, i: u32, j: u32) -> Arc<Vec<IntTerm>> {
    static CACHE: Lazy<RwLock<HashMap<TrigKey, Arc<Vec<IntTerm>>>>> =
        Lazy::new(|| RwLock::new(HashMap::new()));
    if let Some(v) = CACHE.read().unwrap().get(&(m, i, j)) {
        return v.clone();
    }
    let mut acc: BTreeMap<TrigKey, Rational> = BTreeMap::new();
    for (&a, (cc, cs)) in linearize(i, j).iter() {
        let mut parts: Vec<(u32, u32, Option<bool>, Rational)> = Vec::new();
        if !cc.is_zero() {
            for (mm, aa, kk, c2) in int_tm_trig(m, a, false) {
                parts.push((mm, aa, kk, c2 * cc));
            }
        }
        if !cs.is_zero() {
            for (mm, aa, kk, c2) in int_tm_trig(m, a, true) {
                parts.push((mm, aa, kk, c2 * cs));
            }
        }
        for (mm, aa, kind, c2) in parts {
            match kind {
                None => {
                    *acc.entry((mm, 0, 0)).or_insert_with(|| rat(0, 1)) += c2;
                }
                Some(sin) => {
                    for ((pi_, pj), c3) in chebyshev(aa, sin).iter() {
                        *acc.entry((mm, *pi_, *pj)).or_insert_with(|| rat(0, 1)) += &c2 * c3;
                    }
                }
            }
        }
    }
    acc.retain(|_, c| !c.is_zero());
    let v: Vec<IntTerm> = acc
        .into_iter()
        .map(|(key, coeff)| IntTerm { key, coeff })
        .collect();
    let arc = Arc::new(v);
    CACHE.write().unwrap().insert((m, i, j), arc.clone());
    arc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipoly::PiPoly;

    fn vars() -> VarSet {
        VarSet::empty()
    }

    fn unit(vars: &VarSet, key: TrigKey) -> ThetaSeries {
        ThetaSeries::from_term(
            vars,
            key,
            BiSeries::constant(vars, ParamRational::one(vars), 2, 2),
        )
    }

    fn pip(b: &BiSeries) -> PiPoly {
        b.coeff(0, 0)
            .as_poly()
            .unwrap()
            .as_constant()
            .unwrap()
    }

    #[test]
    fn integral_of_sin() {
        // f = sin θ -> anchored antiderivative -cos θ + 1; ∫_0^π = 2
        let v = vars();
        let f = unit(&v, (0, 0, 1));
        let g = f.antiderivative(Segment::Upper);
        assert_eq!(g.differentiate(), f);
        let val = f.definite_integral(Segment::Upper);
        assert_eq!(pip(&val), PiPoly::from_int(2));
    }

    #[test]
    fn integral_of_cos_squared() {
        // ∫_0^π cos² = π/2; anchored antiderivative is θ/2 + sinθcosθ/2
        let v = vars();
        let f = unit(&v, (0, 2, 0));
        let g = f.antiderivative(Segment::Upper);
        assert_eq!(g.differentiate(), f);
        let val = f.definite_integral(Segment::Upper);
        assert_eq!(pip(&val), PiPoly::pi_term(rat(1, 2), 1));
    }

    #[test]
    fn integral_odd_symmetry() {
        // ∫_0^π cos³ sin² = 0
        let v = vars();
        let f = unit(&v, (0, 3, 2));
        assert!(f.definite_integral(Segment::Upper).is_zero());
    }

    #[test]
    fn integral_theta_cos() {
        // f = θ cos θ -> θ sin θ + cos θ - 1 anchored at 0
        let v = vars();
        let f = unit(&v, (1, 1, 0));
        let g = f.antiderivative(Segment::Upper);
        assert_eq!(g.differentiate(), f);
        // value at π: π·0 + (−1) − (1 − 1)... evaluate both ends
        let int = f.definite_integral(Segment::Upper);
        assert_eq!(pip(&int), PiPoly::from_int(-2));
    }

    #[test]
    fn lower_segment_anchoring() {
        // anchored at π: G(π) = 0
        let v = vars();
        let f = unit(&v, (0, 1, 1)); // cos sin
        let g = f.antiderivative(Segment::Lower);
        assert!(g.eval_at_halfturns(1).is_zero());
        assert_eq!(g.differentiate(), f);
    }

    #[test]
    fn segment_additivity() {
        // ∫_0^π + ∫_π^2π = full-turn integral of the raw antiderivative
        let v = vars();
        for key in [(0, 2, 1), (1, 1, 0), (2, 0, 2), (0, 3, 3)] {
            let f = unit(&v, key);
            let a = f.definite_integral(Segment::Upper);
            let b = f.definite_integral(Segment::Lower);
            let raw = f.antiderivative_raw();
            let full = raw
                .eval_at_halfturns(2)
                .sub(&raw.eval_at_halfturns(0))
                .unwrap();
            assert_eq!(a.add(&b).unwrap(), full);
        }
    }

    fn binom(m: u32, l: u32) -> i64 {
        let mut num = 1i64;
        let mut den = 1i64;
        for t in 0..l {
            num *= (m - t) as i64;
            den *= (t + 1) as i64;
        }
        num / den
    }

    #[test]
    fn parity_table() {
        // substitution θ -> 2π - u gives
        // ∫_π^{2π} θ^m c^i s^j = (-1)^j Σ_l C(m,l) (2π)^{m-l} (-1)^l ∫_0^π u^l c^i s^j
        let v = vars();
        for m in 0..=3u32 {
            for i in 0..=8u32 {
                for j in 0..=8u32 {
                    let f = unit(&v, (m, i, j));
                    let lower = f.definite_integral(Segment::Lower);
                    let mut expect = BiSeries::zero(&v, 2, 2);
                    for l in 0..=m {
                        let sign = if (j + l) % 2 == 1 { -1 } else { 1 };
                        let factor = rat(binom(m, l) * 2i64.pow(m - l) * sign, 1);
                        let inner = unit(&v, (l, i, j)).definite_integral(Segment::Upper);
                        let term = inner.scale_rational(&factor).scale_pi_power(m - l);
                        expect = expect.add(&term).unwrap();
                    }
                    assert_eq!(lower, expect, "parity failed at ({m},{i},{j})");
                }
            }
        }
    }
}
