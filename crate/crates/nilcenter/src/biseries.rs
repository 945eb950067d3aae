//! Truncated bivariate series in the grading symbols xi and eps.
//!
//! Exponents are stored strictly below the truncation orders; arithmetic
//! never manufactures terms at or beyond truncation. The same type doubles as
//! an (r, eps) series inside the polar pipeline, with the xi slot holding the
//! radial power.

use crate::error::{Error, Result};
use crate::params::{ParamRational, VarSet};
use crate::pipoly::PiPoly;
use crate::rational::Rational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    trunc_xi: u32,
    trunc_eps: u32,
    terms: BTreeMap<(u32, u32), ParamRational>,
    vars: VarSet,
}

impl BiSeries {
    pub fn zero(vars: &VarSet, trunc_xi: u32, trunc_eps: u32) -> Self {
        BiSeries {
            trunc_xi,
            trunc_eps,
            terms: BTreeMap::new(),
            vars: vars.clone(),
        }
    }

    pub fn constant(vars: &VarSet, c: ParamRational, trunc_xi: u32, trunc_eps: u32) -> Self {
        let mut s = Self::zero(vars, trunc_xi, trunc_eps);
        s.set(0, 0, c);
        s
    }

    pub fn term(vars: &VarSet, c: ParamRational, xi: u32, eps: u32, tx: u32, te: u32) -> Self {
        let mut s = Self::zero(vars, tx, te);
        s.set(xi, eps, c);
        s
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn truncation(&self) -> (u32, u32) {
        (self.trunc_xi, self.trunc_eps)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn set(&mut self, xi: u32, eps: u32, c: ParamRational) {
        if xi >= self.trunc_xi || eps >= self.trunc_eps || c.is_zero() {
            return;
        }
        self.terms.insert((xi, eps), c);
    }

    pub fn coeff(&self, xi: u32, eps: u32) -> ParamRational {
        self.terms
            .get(&(xi, eps))
            .cloned()
            .unwrap_or_else(|| ParamRational::zero(&self.vars))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &ParamRational)> {
        self.terms.iter()
    }

    fn check(&self, rhs: &Self) -> Result<()> {
        if self.trunc_xi != rhs.trunc_xi || self.trunc_eps != rhs.trunc_eps {
            return Err(Error::TruncationMismatch(
                self.trunc_xi,
                self.trunc_eps,
                rhs.trunc_xi,
                rhs.trunc_eps,
            ));
        }
        if self.vars != rhs.vars {
            return Err(Error::VariableMismatch(
                self.vars.names().join(","),
                rhs.vars.names().join(","),
            ));
        }
        Ok(())
    }

    fn accum(&mut self, xi: u32, eps: u32, c: &ParamRational) {
        if xi >= self.trunc_xi || eps >= self.trunc_eps || c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((xi, eps)) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        let mut out = self.clone();
        for (&(x, e), c) in &rhs.terms {
            out.accum(x, e, c);
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check(rhs)?;
        let mut out = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        for (&(x1, e1), c1) in &self.terms {
            for (&(x2, e2), c2) in &rhs.terms {
                let (x, e) = (x1 + x2, e1 + e2);
                if x >= self.trunc_xi || e >= self.trunc_eps {
                    continue;
                }
                out.accum(x, e, &c1.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ParamRational) -> Self {
        let mut out = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        if c.is_zero() {
            return out;
        }
        for (&(x, e), v) in &self.terms {
            out.accum(x, e, &v.mul(c));
        }
        out
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.scale_rational(c);
        }
        out
    }

    /// Multiply every term by pi^k (used when theta^m hits an endpoint).
    pub fn scale_pi_power(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let pik = PiPoly::pi_term(Rational::one(), k);
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.scale_pi(&pik);
        }
        out
    }

    /// Shift xi exponents up by `k` (multiplication by xi^k).
    pub fn shift_xi(&self, k: u32) -> Self {
        let mut out = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        for (&(x, e), c) in &self.terms {
            if x + k < self.trunc_xi {
                out.terms.insert((x + k, e), c.clone());
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(
            &self.vars,
            ParamRational::one(&self.vars),
            self.trunc_xi,
            self.trunc_eps,
        );
        for _ in 0..n {
            acc = acc.mul(self).expect("same truncation");
        }
        acc
    }

    /// Substitute parameter bindings into every coefficient.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<String, ParamRational>,
    ) -> Result<Self> {
        let resolved = crate::params::resolve_bindings(&self.vars, bindings)?;
        let mut out = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        for (&(x, e), c) in &self.terms {
            out.accum(x, e, &c.substitute_resolved(&resolved)?);
        }
        Ok(out)
    }

    /// Reciprocal of a series with invertible (pi-free, nonzero rational at
    /// xi^0 eps^0) constant term: geometric expansion of the nilpotent rest.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeff(0, 0);
        if c0.is_zero() {
            return Err(Error::SingularSeries(
                "zero constant term in reciprocal".into(),
            ));
        }
        let c0_inv = c0.inv()?;
        // w = 1 - self/c0 has zero constant term
        let one = Self::constant(
            &self.vars,
            ParamRational::one(&self.vars),
            self.trunc_xi,
            self.trunc_eps,
        );
        let w = one.sub(&self.scale(&c0_inv))?;
        let mut term = one.clone();
        let mut acc = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        for _ in 0..(self.trunc_xi + self.trunc_eps + 1) {
            acc = acc.add(&term)?;
            term = term.mul(&w)?;
            if term.is_zero() {
                break;
            }
        }
        if !term.is_zero() {
            return Err(Error::SingularSeries(
                "reciprocal expansion did not terminate".into(),
            ));
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Composition in xi: self(g(xi), eps). `g` must have no xi^0 terms.
    pub fn compose_xi(&self, g: &Self) -> Result<Self> {
        self.check(g)?;
        if g.terms.keys().any(|&(x, _)| x == 0) {
            return Err(Error::SingularSeries(
                "composition target has xi^0 terms".into(),
            ));
        }
        let mut out = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        // group self by xi power: sum_k c_k(eps) xi^k -> sum_k c_k(eps) g^k
        let mut gk = Self::constant(
            &self.vars,
            ParamRational::one(&self.vars),
            self.trunc_xi,
            self.trunc_eps,
        );
        for k in 0..self.trunc_xi {
            if k > 0 {
                gk = gk.mul(g)?;
                if gk.is_zero() {
                    break;
                }
            }
            // coefficient slice of xi^k in self (an eps-series)
            for (&(x, e), c) in &self.terms {
                if x != k {
                    continue;
                }
                for (&(gx, ge), gc) in &gk.terms {
                    let (nx, ne) = (gx, ge + e);
                    if nx >= self.trunc_xi || ne >= self.trunc_eps {
                        continue;
                    }
                    out.accum(nx, ne, &c.mul(gc));
                }
            }
        }
        Ok(out)
    }

    /// Compositional inverse in xi of f = v1 xi + v2 xi^2 + ...; requires no
    /// xi^0 term and v1 invertible at eps^0. Returns g with f(g(xi)) = xi up
    /// to truncation.
    pub fn invert_xi(&self) -> Result<Self> {
        if self.terms.keys().any(|&(x, _)| x == 0) {
            return Err(Error::SingularSeries("series has xi^0 terms".into()));
        }
        // v1 as an eps-series embedded at xi^1... we need 1/v1 as eps-series
        let mut v1 = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
        for (&(x, e), c) in &self.terms {
            if x == 1 {
                v1.set(0, e, c.clone());
            }
        }
        if v1.coeff(0, 0).is_zero() {
            return Err(Error::SingularSeries(
                "linear coefficient not invertible at eps^0".into(),
            ));
        }
        let v1_inv = v1.reciprocal()?;
        let mut g = v1_inv.shift_xi(1);
        for k in 2..self.trunc_xi {
            // error at order k: coefficient of xi^k in f(g) - xi
            let comp = self.compose_xi(&g)?;
            let mut err = Self::zero(&self.vars, self.trunc_xi, self.trunc_eps);
            for (&(x, e), c) in &comp.terms {
                if x == k {
                    err.set(0, e, c.clone());
                }
            }
            if err.is_zero() {
                continue;
            }
            // g_k -= err / v1
            let corr = err.mul(&v1_inv)?.neg().shift_xi(k);
            g = g.add(&corr)?;
        }
        Ok(g)
    }

    /// Extract the eps-series at a fixed xi power as a map eps -> coeff.
    pub fn xi_slice(&self, xi: u32) -> BTreeMap<u32, ParamRational> {
        self.terms
            .iter()
            .filter(|(&(x, _), _)| x == xi)
            .map(|(&(_, e), c)| (e, c.clone()))
            .collect()
    }
}

impl std::fmt::Display for BiSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(x, e), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if x > 0 {
                write!(f, "*xi^{x}")?;
            }
            if e > 0 {
                write!(f, "*eps^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamPoly;
    use crate::rational::rat;

    fn vars() -> VarSet {
        VarSet::new(["c"])
    }

    fn c_rat(v: &VarSet, q: Rational) -> ParamRational {
        ParamRational::from_rational(v, q)
    }

    #[test]
    fn invert_identity() {
        let v = vars();
        let f = BiSeries::term(&v, ParamRational::one(&v), 1, 0, 6, 3);
        let g = f.invert_xi().unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn invert_catalan_pattern() {
        // f = xi + c xi^2  =>  g = xi - c xi^2 + 2c^2 xi^3 - 5c^3 xi^4 + 14c^4 xi^5
        let v = vars();
        let c = ParamRational::var(&v, "c");
        let mut f = BiSeries::zero(&v, 6, 2);
        f.set(1, 0, ParamRational::one(&v));
        f.set(2, 0, c.clone());
        let g = f.invert_xi().unwrap();
        let cp = ParamPoly::var(&v, "c");
        assert_eq!(g.coeff(1, 0).as_poly().unwrap(), ParamPoly::one(&v));
        assert_eq!(g.coeff(2, 0).as_poly().unwrap(), cp.neg());
        assert_eq!(
            g.coeff(3, 0).as_poly().unwrap(),
            cp.pow(2).scale_rational(&rat(2, 1))
        );
        assert_eq!(
            g.coeff(4, 0).as_poly().unwrap(),
            cp.pow(3).scale_rational(&rat(-5, 1))
        );
        assert_eq!(
            g.coeff(5, 0).as_poly().unwrap(),
            cp.pow(4).scale_rational(&rat(14, 1))
        );
        // composition check: f(g(xi)) = xi
        let comp = f.compose_xi(&g).unwrap();
        let mut ident = BiSeries::zero(&v, 6, 2);
        ident.set(1, 0, ParamRational::one(&v));
        assert_eq!(comp, ident);
    }

    #[test]
    fn double_inversion_roundtrip() {
        let v = vars();
        let mut f = BiSeries::zero(&v, 6, 4);
        f.set(1, 0, ParamRational::one(&v));
        f.set(1, 1, c_rat(&v, rat(1, 3)));
        f.set(2, 0, c_rat(&v, rat(-2, 1)));
        f.set(3, 1, ParamRational::var(&v, "c"));
        f.set(4, 2, c_rat(&v, rat(5, 7)));
        let g = f.invert_xi().unwrap();
        let f2 = g.invert_xi().unwrap();
        assert_eq!(f, f2);
    }

    #[test]
    fn truncation_is_enforced() {
        let v = vars();
        let mut a = BiSeries::zero(&v, 3, 2);
        a.set(2, 1, ParamRational::one(&v));
        a.set(3, 0, ParamRational::one(&v)); // beyond trunc: dropped
        assert!(a.coeff(3, 0).is_zero());
        let sq = a.mul(&a).unwrap(); // xi^4 term would exceed truncation
        assert!(sq.is_zero());
    }

    #[test]
    fn truncation_mismatch_rejected() {
        let v = vars();
        let a = BiSeries::zero(&v, 3, 2);
        let b = BiSeries::zero(&v, 4, 2);
        assert!(matches!(a.add(&b), Err(Error::TruncationMismatch(..))));
    }
}
