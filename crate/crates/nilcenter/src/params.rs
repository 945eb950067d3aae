//! Multivariate parameter polynomials over Q[pi] and their quotients.
//!
//! A `ParamPoly` is a sparse sum of monomials in a fixed, lexicographically
//! sorted variable list (`VarSet`), with `PiPoly` coefficients. Two polys are
//! compatible only if they share the same variable list; `align` extends both
//! to the union when needed. Invariants: exponent vectors have the VarSet's
//! length, no zero coefficients are stored.
//!
//! `ParamRational` is a quotient of two `ParamPoly`s normalized on demand by
//! content removal (rational content + common monomial factor + exact
//! division when it happens to succeed); equality is decided by
//! cross-multiplication. There is deliberately no general factorization or
//! gcd here.

use crate::error::{Error, Result};
use crate::pipoly::PiPoly;
use crate::rational::{rational_content_gcd, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet(Arc<Vec<String>>);

impl VarSet {
    /// Build from names; sorted and deduplicated.
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(names: I) -> Self {
        let mut v: Vec<String> = names.into_iter().map(Into::into).collect();
        v.sort();
        v.dedup();
        VarSet(Arc::new(v))
    }

    pub fn empty() -> Self {
        VarSet(Arc::new(Vec::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        if self == other {
            return self.clone();
        }
        let mut v = self.0.as_ref().clone();
        v.extend(other.0.iter().cloned());
        VarSet::new(v)
    }

    fn same(&self, other: &VarSet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::VariableMismatch(
                self.0.join(","),
                other.0.join(","),
            ))
        }
    }
}

pub type Monomial = Box<[u16]>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamPoly {
    vars: VarSet,
    terms: BTreeMap<Monomial, PiPoly>,
}

impl ParamPoly {
    pub fn zero(vars: &VarSet) -> Self {
        ParamPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &VarSet, c: PiPoly) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; vars.len()].into(), c);
        }
        p
    }

    pub fn from_rational(vars: &VarSet, q: Rational) -> Self {
        Self::constant(vars, PiPoly::from_rational(q))
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, PiPoly::from_int(1))
    }

    /// The variable `name` as a polynomial. Panics if absent from the set.
    pub fn var(vars: &VarSet, name: &str) -> Self {
        let idx = vars
            .index(name)
            .unwrap_or_else(|| panic!("variable `{name}` not in varset"));
        let mut exp = vec![0u16; vars.len()];
        exp[idx] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(exp.into(), PiPoly::from_int(1));
        p
    }

    pub fn monomial(vars: &VarSet, coeff: PiPoly, exps: &[(usize, u16)]) -> Self {
        if coeff.is_zero() {
            return Self::zero(vars);
        }
        let mut exp = vec![0u16; vars.len()];
        for &(i, e) in exps {
            exp[i] += e;
        }
        let mut p = Self::zero(vars);
        p.terms.insert(exp.into(), coeff);
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &PiPoly)> {
        self.terms.iter()
    }

    /// Constant (all-exponent-zero) coefficient.
    pub fn constant_coeff(&self) -> PiPoly {
        let key: Monomial = vec![0; self.vars.len()].into();
        self.terms.get(&key).cloned().unwrap_or_default()
    }

    /// Is this a constant polynomial? Returns the constant if so.
    pub fn as_constant(&self) -> Option<PiPoly> {
        match self.terms.len() {
            0 => Some(PiPoly::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Constant rational, if the poly is a pi-free constant.
    pub fn as_rational(&self) -> Option<Rational> {
        self.as_constant().and_then(|c| c.as_rational().cloned())
    }

    fn insert(terms: &mut BTreeMap<Monomial, PiPoly>, m: Monomial, c: PiPoly) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn from_terms(vars: &VarSet, it: impl IntoIterator<Item = (Monomial, PiPoly)>) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in it {
            debug_assert_eq!(m.len(), vars.len());
            Self::insert(&mut terms, m, c);
        }
        ParamPoly {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.vars.same(&rhs.vars)?;
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            Self::insert(&mut terms, m.clone(), c.clone());
        }
        Ok(ParamPoly {
            vars: self.vars.clone(),
            terms,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        ParamPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.vars.same(&rhs.vars)?;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let m: Monomial = m1
                    .iter()
                    .zip(m2.iter())
                    .map(|(a, b)| a + b)
                    .collect::<Vec<_>>()
                    .into();
                Self::insert(&mut terms, m, c1 * c2);
            }
        }
        Ok(ParamPoly {
            vars: self.vars.clone(),
            terms,
        })
    }

    pub fn scale(&self, c: &PiPoly) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        let mut terms = BTreeMap::new();
        for (m, v) in &self.terms {
            Self::insert(&mut terms, m.clone(), v * c);
        }
        ParamPoly {
            vars: self.vars.clone(),
            terms,
        }
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.scale(&PiPoly::from_rational(c.clone()))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        for _ in 0..n {
            acc = acc.mul(self).expect("same vars");
        }
        acc
    }

    /// Rebuild over a (super)set of variables.
    pub fn embed(&self, vars: &VarSet) -> Self {
        if &self.vars == vars {
            return self.clone();
        }
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|n| vars.index(n).expect("embed target must contain all vars"))
            .collect();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut exp = vec![0u16; vars.len()];
            for (i, &e) in m.iter().enumerate() {
                exp[map[i]] = e;
            }
            terms.insert(exp.into(), c.clone());
        }
        ParamPoly {
            vars: vars.clone(),
            terms,
        }
    }

    /// Extend both to the union variable set.
    pub fn align(a: &Self, b: &Self) -> (Self, Self) {
        if a.vars == b.vars {
            (a.clone(), b.clone())
        } else {
            let u = a.vars.union(&b.vars);
            (a.embed(&u), b.embed(&u))
        }
    }

    pub fn derivative(&self, var: &str) -> Result<Self> {
        let idx = self
            .vars
            .index(var)
            .ok_or_else(|| Error::Other(format!("unknown variable `{var}`")))?;
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m[idx];
            if e == 0 {
                continue;
            }
            let mut exp = m.to_vec();
            exp[idx] = e - 1;
            Self::insert(
                &mut terms,
                exp.into(),
                c.scale(&Rational::from_integer(e.into())),
            );
        }
        Ok(ParamPoly {
            vars: self.vars.clone(),
            terms,
        })
    }

    /// Total degree in the given variables (0 for the zero poly).
    pub fn degree_in(&self, idxs: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| idxs.iter().map(|&i| m[i] as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Group terms by their exponents in `split_vars`, returning coefficient
    /// polynomials (with those exponents zeroed out).
    pub fn split_on(&self, split_vars: &[&str]) -> BTreeMap<Vec<u16>, ParamPoly> {
        let idxs: Vec<usize> = split_vars
            .iter()
            .map(|v| self.vars.index(v).expect("split var present"))
            .collect();
        let mut out: BTreeMap<Vec<u16>, ParamPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u16> = idxs.iter().map(|&i| m[i]).collect();
            let mut exp = m.to_vec();
            for &i in &idxs {
                exp[i] = 0;
            }
            let entry = out
                .entry(key)
                .or_insert_with(|| ParamPoly::zero(&self.vars));
            Self::insert(&mut entry.terms, exp.into(), c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Positive rational content over all coefficients (zero poly -> 0).
    pub fn rational_content(&self) -> Rational {
        let mut g = Rational::zero();
        for c in self.terms.values() {
            g = rational_content_gcd(&g, &c.content());
        }
        g
    }

    /// Componentwise-minimal exponent vector (the common monomial factor).
    pub fn monomial_content(&self) -> Monomial {
        let n = self.vars.len();
        let mut min = vec![u16::MAX; n];
        for m in self.terms.keys() {
            for i in 0..n {
                min[i] = min[i].min(m[i]);
            }
        }
        if self.terms.is_empty() {
            min = vec![0; n];
        }
        min.into()
    }

    pub fn shift_down(&self, by: &Monomial) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let exp: Monomial = m
                    .iter()
                    .zip(by.iter())
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>()
                    .into();
                (exp, c.clone())
            })
            .collect();
        ParamPoly {
            vars: self.vars.clone(),
            terms,
        }
    }

    /// Exact multivariate division; None if not divisible. Graded-lex leading
    /// term elimination. Only used as a normalization heuristic.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            // dividing by a constant only works when it is a pure rational
            let q = c.as_rational()?;
            return Some(self.scale_rational(&(Rational::one() / q)));
        }
        let lead = |p: &Self| -> (Monomial, PiPoly) {
            let (m, c) = p
                .terms
                .iter()
                .max_by_key(|(m, _)| (m.iter().map(|&e| e as u32).sum::<u32>(), m.to_vec()))
                .unwrap();
            (m.clone(), c.clone())
        };
        let (dm, dc) = lead(d);
        let dcq = dc.as_rational()?; // only divide by pi-free leading coeffs
        if dcq.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut quo = Self::zero(&self.vars);
        let mut guard = self.terms.len() * (d.terms.len() + 2) + 16;
        while !rem.is_zero() {
            if guard == 0 {
                return None;
            }
            guard -= 1;
            let (rm, rc) = lead(&rem);
            if rm.iter().zip(dm.iter()).any(|(a, b)| a < b) {
                return None;
            }
            let qm: Monomial = rm
                .iter()
                .zip(dm.iter())
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>()
                .into();
            let qc = rc.scale(&(Rational::one() / dcq.clone()));
            let t = ParamPoly::from_terms(&self.vars, [(qm, qc)]);
            quo = quo.add(&t).unwrap();
            rem = rem.sub(&t.mul(d).unwrap()).unwrap();
        }
        Some(quo)
    }

    /// Substitute bindings (name -> ParamRational over the same vars),
    /// resolving chained references first. Errors if cyclic or if a binding
    /// denominator is the zero polynomial.
    pub fn substitute(&self, bindings: &BTreeMap<String, ParamRational>) -> Result<ParamRational> {
        let resolved = resolve_bindings(&self.vars, bindings)?;
        self.substitute_resolved(&resolved)
    }

    /// Substitute already-resolved bindings (no bound variable appears in any RHS).
    pub fn substitute_resolved(
        &self,
        bindings: &BTreeMap<usize, ParamRational>,
    ) -> Result<ParamRational> {
        if bindings.is_empty() {
            return Ok(ParamRational::from_poly(self.clone()));
        }
        // cache powers of each binding
        let mut powers: BTreeMap<(usize, u16), ParamRational> = BTreeMap::new();
        let mut pow = |i: usize, e: u16, base: &ParamRational| -> ParamRational {
            if e == 1 {
                return base.clone();
            }
            if let Some(p) = powers.get(&(i, e)) {
                return p.clone();
            }
            let mut acc = ParamRational::one(&self.vars);
            for _ in 0..e {
                acc = acc.mul(base);
            }
            powers.insert((i, e), acc.clone());
            acc
        };
        let mut acc = ParamRational::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut residual = m.to_vec();
            let mut factor = ParamRational::from_poly(ParamPoly::constant(&self.vars, c.clone()));
            for (&i, rhs) in bindings {
                let e = m[i];
                if e > 0 {
                    residual[i] = 0;
                    factor = factor.mul(&pow(i, e, rhs));
                }
            }
            let mono = ParamPoly::from_terms(
                &self.vars,
                [(Monomial::from(residual), PiPoly::from_int(1))],
            );
            acc = acc.add(&factor.mul(&ParamRational::from_poly(mono)));
        }
        Ok(acc.normalized())
    }

    /// Substitute, requiring the result to be polynomial.
    pub fn substitute_poly(&self, bindings: &BTreeMap<String, ParamRational>) -> Result<ParamPoly> {
        let r = self.substitute(bindings)?;
        r.as_poly()
            .ok_or_else(|| Error::Other("substitution result is not polynomial".into()))
    }
}

/// Resolve a binding map so no bound variable appears in any RHS.
pub fn resolve_bindings(
    vars: &VarSet,
    bindings: &BTreeMap<String, ParamRational>,
) -> Result<BTreeMap<usize, ParamRational>> {
    let mut out: BTreeMap<usize, ParamRational> = BTreeMap::new();
    for (name, rhs) in bindings {
        let idx = vars
            .index(name)
            .ok_or_else(|| Error::Other(format!("unknown parameter `{name}`")))?;
        if rhs.den_ref().is_zero() {
            return Err(Error::SingularSubstitution(name.clone()));
        }
        out.insert(idx, rhs.clone());
    }
    let mentions = |r: &ParamRational, bound: &BTreeMap<usize, ParamRational>| -> Option<usize> {
        for p in [r.num_ref(), r.den_ref()] {
            for (m, _) in p.terms() {
                for (&i, _) in bound.iter() {
                    if m[i] > 0 {
                        return Some(i);
                    }
                }
            }
        }
        None
    };
    for _ in 0..=out.len() {
        let mut changed = false;
        let snapshot = out.clone();
        for (&i, rhs) in out.iter_mut() {
            if let Some(_j) = mentions(rhs, &snapshot) {
                let inner: BTreeMap<usize, ParamRational> = snapshot
                    .iter()
                    .filter(|(&k, _)| k != i)
                    .map(|(&k, v)| (k, v.clone()))
                    .collect();
                let num = rhs.num_ref().substitute_resolved(&inner)?;
                let den = rhs.den_ref().substitute_resolved(&inner)?;
                let new = num.div(&den)?;
                if &new != rhs {
                    *rhs = new;
                    changed = true;
                }
            }
        }
        if !changed {
            // verify no self-references remain
            for (&i, rhs) in &out {
                for p in [rhs.num_ref(), rhs.den_ref()] {
                    for (m, _) in p.terms() {
                        if m[i] > 0 {
                            return Err(Error::CyclicSubstitution(vars.names()[i].clone()));
                        }
                    }
                }
            }
            return Ok(out);
        }
    }
    Err(Error::CyclicSubstitution("no fixpoint".into()))
}

impl std::fmt::Display for ParamPoly {
    /// Canonical text: sorted monomials, explicit exponents, pi as `pi`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let mono: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let n = &self.vars.names()[i];
                    if e == 1 {
                        n.clone()
                    } else {
                        format!("{n}^{e}")
                    }
                })
                .collect();
            let cs = c.to_string();
            let simple = c.terms().count() <= 1;
            let (sign, body) = if simple && cs.starts_with('-') {
                ("-", cs[1..].to_string())
            } else {
                ("+", if simple { cs } else { format!("({cs})") })
            };
            if first {
                first = false;
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mono.is_empty() {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", body, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Quotient of parameter polynomials. Denominator nonzero.
#[derive(Clone, Debug)]
pub struct ParamRational {
    num: ParamPoly,
    den: ParamPoly,
}

impl ParamRational {
    pub fn from_poly(num: ParamPoly) -> Self {
        let den = ParamPoly::one(num.vars());
        ParamRational { num, den }
    }

    pub fn new(num: ParamPoly, den: ParamPoly) -> Result<Self> {
        num.vars().same(den.vars())?;
        if den.is_zero() {
            return Err(Error::SingularSubstitution("<literal zero>".into()));
        }
        Ok(ParamRational { num, den }.normalized())
    }

    pub fn zero(vars: &VarSet) -> Self {
        Self::from_poly(ParamPoly::zero(vars))
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::from_poly(ParamPoly::one(vars))
    }

    pub fn from_rational(vars: &VarSet, q: Rational) -> Self {
        Self::from_poly(ParamPoly::from_rational(vars, q))
    }

    pub fn var(vars: &VarSet, name: &str) -> Self {
        Self::from_poly(ParamPoly::var(vars, name))
    }

    pub fn num_ref(&self) -> &ParamPoly {
        &self.num
    }

    pub fn den_ref(&self) -> &ParamPoly {
        &self.den
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial if the denominator is trivial (a rational constant).
    pub fn as_poly(&self) -> Option<ParamPoly> {
        let c = self.den.as_rational()?;
        Some(self.num.scale_rational(&(Rational::one() / c)))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        let n = self.num.as_rational()?;
        let d = self.den.as_rational()?;
        Some(n / d)
    }

    /// Content normalization: strip common rational content and common
    /// monomial factors; orient the denominator's leading sign positive; try
    /// exact division as a cheap simplification.
    pub fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den = ParamPoly::one(self.num.vars());
            return self;
        }
        if let Some(q) = self.num.div_exact(&self.den) {
            self.num = q;
            self.den = ParamPoly::one(self.num.vars());
        }
        let cn = self.num.rational_content();
        let cd = self.den.rational_content();
        let g = {
            // scale so denominator content becomes 1
            if cd.is_zero() {
                Rational::one()
            } else {
                cd
            }
        };
        if !g.is_one() {
            let inv = Rational::one() / g;
            self.num = self.num.scale_rational(&inv);
            self.den = self.den.scale_rational(&inv);
        }
        let _ = cn;
        let mn = self.num.monomial_content();
        let md = self.den.monomial_content();
        let common: Monomial = mn
            .iter()
            .zip(md.iter())
            .map(|(a, b)| (*a).min(*b))
            .collect::<Vec<_>>()
            .into();
        if common.iter().any(|&e| e > 0) {
            self.num = self.num.shift_down(&common);
            self.den = self.den.shift_down(&common);
        }
        if self.den.terms.values().next().map(|c| c.leading_sign()) == Some(-1) {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
        self
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return ParamRational {
                num: self.num.add(&rhs.num).expect("same vars"),
                den: self.den.clone(),
            }
            .normalized();
        }
        let num = self
            .num
            .mul(&rhs.den)
            .and_then(|a| rhs.num.mul(&self.den).and_then(|b| a.add(&b)))
            .expect("same vars");
        let den = self.den.mul(&rhs.den).expect("same vars");
        ParamRational { num, den }.normalized()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        ParamRational {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        ParamRational {
            num: self.num.mul(&rhs.num).expect("same vars"),
            den: self.den.mul(&rhs.den).expect("same vars"),
        }
        .normalized()
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.num.is_zero() {
            return Err(Error::SingularSeries("division by zero".into()));
        }
        Ok(ParamRational {
            num: self.num.mul(&rhs.den).expect("same vars"),
            den: self.den.mul(&rhs.num).expect("same vars"),
        }
        .normalized())
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one(self.vars()).div(self)
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        ParamRational {
            num: self.num.scale_rational(c),
            den: self.den.clone(),
        }
        .normalized()
    }

    pub fn scale_pi(&self, c: &PiPoly) -> Self {
        ParamRational {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
        .normalized()
    }

    pub fn embed(&self, vars: &VarSet) -> Self {
        ParamRational {
            num: self.num.embed(vars),
            den: self.den.embed(vars),
        }
    }

    pub fn substitute(&self, bindings: &BTreeMap<String, ParamRational>) -> Result<Self> {
        let resolved = resolve_bindings(self.vars(), bindings)?;
        self.substitute_resolved(&resolved)
    }

    pub fn substitute_resolved(&self, resolved: &BTreeMap<usize, ParamRational>) -> Result<Self> {
        let num = self.num.substitute_resolved(resolved)?;
        let den = self.den.substitute_resolved(resolved)?;
        if den.is_zero() {
            return Err(Error::SingularSubstitution(format!("1/({})", self.den)));
        }
        num.div(&den)
    }
}

impl PartialEq for ParamRational {
    /// Cross-multiplication equality.
    fn eq(&self, other: &Self) -> bool {
        let l = self.num.mul(&other.den).expect("same vars");
        let r = other.num.mul(&self.den).expect("same vars");
        l == r
    }
}

impl Eq for ParamRational {}

impl std::fmt::Display for ParamRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.as_rational().is_some_and(|c| c.is_one()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn vs() -> VarSet {
        VarSet::new(["x", "y", "a2p", "a2m"])
    }

    #[test]
    fn difference_of_squares() {
        let v = vs();
        let x = ParamPoly::var(&v, "x");
        let y = ParamPoly::var(&v, "y");
        let lhs = x.add(&y).unwrap().mul(&x.sub(&y).unwrap()).unwrap();
        let rhs = x.mul(&x).unwrap().sub(&y.mul(&y).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn absorbing_zero() {
        let v = vs();
        let p = ParamPoly::var(&v, "a2p").add(&ParamPoly::one(&v)).unwrap();
        assert!(p.mul(&ParamPoly::zero(&v)).unwrap().is_zero());
    }

    #[test]
    fn substitute_examples() {
        let v = vs();
        // a2m := a2p into (a2p - a2m) -> 0
        let p = ParamPoly::var(&v, "a2p")
            .sub(&ParamPoly::var(&v, "a2m"))
            .unwrap();
        let mut b = BTreeMap::new();
        b.insert("a2m".to_string(), ParamRational::var(&v, "a2p"));
        assert!(p.substitute(&b).unwrap().is_zero());
        // x := 0 into x*y + 2 -> 2
        let q = ParamPoly::var(&v, "x")
            .mul(&ParamPoly::var(&v, "y"))
            .unwrap()
            .add(&ParamPoly::from_rational(&v, rat(2, 1)))
            .unwrap();
        let mut b2 = BTreeMap::new();
        b2.insert("x".to_string(), ParamRational::zero(&v));
        let r = q.substitute(&b2).unwrap();
        assert_eq!(r.as_rational(), Some(rat(2, 1)));
    }

    #[test]
    fn chained_bindings_resolve() {
        // x := y, y := 2 ---> x evaluates to 2
        let v = vs();
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), ParamRational::var(&v, "y"));
        b.insert("y".to_string(), ParamRational::from_rational(&v, rat(2, 1)));
        let p = ParamPoly::var(&v, "x");
        assert_eq!(p.substitute(&b).unwrap().as_rational(), Some(rat(2, 1)));
    }

    #[test]
    fn cyclic_bindings_rejected() {
        let v = vs();
        let mut b = BTreeMap::new();
        b.insert(
            "x".to_string(),
            ParamRational::var(&v, "y").add(&ParamRational::one(&v)),
        );
        b.insert("y".to_string(), ParamRational::var(&v, "x"));
        assert!(matches!(
            ParamPoly::var(&v, "x").substitute(&b),
            Err(Error::CyclicSubstitution(_))
        ));
    }

    #[test]
    fn rational_equality_cross_multiplies() {
        let v = vs();
        let x = ParamPoly::var(&v, "x");
        let two_x = x.scale_rational(&rat(2, 1));
        let a = ParamRational::new(x.clone(), ParamPoly::one(&v)).unwrap();
        let b = ParamRational::new(two_x, ParamPoly::from_rational(&v, rat(2, 1))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn display_canonical() {
        let v = VarSet::new(["a2p", "b3m"]);
        let p = ParamPoly::var(&v, "a2p")
            .scale(&PiPoly::pi_term(rat(-5, 48), 1))
            .add(
                &ParamPoly::var(&v, "b3m")
                    .pow(2)
                    .scale_rational(&rat(4, 3)),
            )
            .unwrap();
        assert_eq!(p.to_string(), "-5/48*pi*a2p + 4/3*b3m^2");
    }

    #[test]
    fn div_exact_works() {
        let v = vs();
        let x = ParamPoly::var(&v, "x");
        let y = ParamPoly::var(&v, "y");
        let xy = x.add(&y).unwrap();
        let prod = xy.pow(3);
        let q = prod.div_exact(&xy.pow(2)).unwrap();
        assert_eq!(q, xy);
        assert!(x.div_exact(&y).is_none());
    }
}
