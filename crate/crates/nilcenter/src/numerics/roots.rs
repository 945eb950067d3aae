//! Real root isolation for the displacement polynomial on (0, xi_max).
//!
//! The coefficient spread in the bifurcation polynomial is ~30 orders of
//! magnitude and the roots span ~8, so isolation scans sign changes on a
//! dyadic-octave grid and certifies uniqueness per bracket through the
//! derivative chain (Rolle): the derivative's roots are isolated recursively,
//! making each final bracket provably monotone.

use crate::error::{Error, Result};
use crate::numerics::real::Real;

#[derive(Clone, Debug)]
pub struct DisplacementPoly<T> {
    /// Ascending coefficients: V_0 + V_1 xi + ... + V_n xi^n.
    pub coeffs: Vec<T>,
}

impl<T: Real> DisplacementPoly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut c = coeffs;
        while c.len() > 1 && c.last().map(Real::is_zero) == Some(true) {
            c.pop();
        }
        DisplacementPoly { coeffs: c }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&c.from_i64_like(i as i64)))
            .collect();
        DisplacementPoly::new(coeffs)
    }

    /// Conservative rounding-error bound for eval at x (precision from f64
    /// magnitudes; used to refuse untrustworthy signs).
    fn eval_error_bound(&self, x: &T, prec_bits: u32) -> f64 {
        let xa = x.to_f64().abs();
        let mut max_term: f64 = 0.0;
        let mut xp = 1.0f64;
        for c in &self.coeffs {
            max_term = max_term.max(c.to_f64().abs() * xp);
            xp *= xa;
        }
        (self.coeffs.len() as f64 + 2.0) * max_term * 2.0f64.powi(2 - prec_bits as i32)
    }

    fn checked_sign(&self, x: &T, prec_bits: u32) -> Result<i32> {
        let v = self.eval(x);
        if v.is_zero() {
            return Ok(0);
        }
        if v.to_f64().abs() < self.eval_error_bound(x, prec_bits) {
            return Err(Error::PrecisionEscalation(format!(
                "sign of p({:e}) is below the rounding guard",
                x.to_f64()
            )));
        }
        Ok(v.sign_i())
    }
}

#[derive(Clone, Debug)]
pub struct RootReport<T> {
    pub value: T,
    pub bracket: (T, T),
    pub residual: T,
    pub certified_simple: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct RootOpts {
    /// Relative refinement target.
    pub rel_tol: f64,
    /// Precision in bits (for rounding guards).
    pub prec_bits: u32,
    /// Dyadic scan floor: scan brackets [hi 2^-(i+1), hi 2^-i] down to this depth.
    pub octave_depth: u32,
}

impl Default for RootOpts {
    fn default() -> Self {
        RootOpts {
            rel_tol: 1e-12,
            prec_bits: 256,
            octave_depth: 140,
        }
    }
}

/// All positive roots in (lo, hi), certified simple via the derivative chain.
pub fn displacement_roots<T: Real>(
    poly: &DisplacementPoly<T>,
    lo: &T,
    hi: &T,
    opts: &RootOpts,
) -> Result<Vec<RootReport<T>>> {
    if poly.degree() == 0 {
        return Ok(Vec::new());
    }
    let deriv = poly.derivative();
    // partition (lo, hi) by the derivative's roots (recursively isolated)
    let crit = if deriv.degree() >= 1 {
        displacement_roots(&deriv, lo, hi, opts)?
    } else {
        Vec::new()
    };
    let mut cuts: Vec<T> = Vec::with_capacity(crit.len() + 2);
    cuts.push(lo.clone());
    for c in &crit {
        cuts.push(c.value.clone());
    }
    cuts.push(hi.clone());
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.cmp_real(b) != std::cmp::Ordering::Less {
            continue;
        }
        // octave scan inside the monotone piece catches the sign change even
        // when values at the piece boundary are astronomically separated
        let brackets = octave_brackets(poly, a, b, opts)?;
        for (ba, bb) in brackets {
            out.push(refine(poly, &deriv, ba, bb, opts)?);
        }
    }
    out.sort_by(|p, q| p.value.cmp_real(&q.value));
    out.dedup_by(|p, q| {
        p.value
            .sub(&q.value)
            .abs()
            .to_f64()
            .abs()
            < opts.rel_tol * q.value.to_f64().abs().max(1e-300)
    });
    Ok(out)
}

fn octave_brackets<T: Real>(
    poly: &DisplacementPoly<T>,
    a: &T,
    b: &T,
    opts: &RootOpts,
) -> Result<Vec<(T, T)>> {
    let two = a.from_i64_like(2);
    let mut pts: Vec<T> = vec![b.clone()];
    let mut x = b.clone();
    for _ in 0..opts.octave_depth {
        x = x.div(&two);
        if x.cmp_real(a) != std::cmp::Ordering::Greater {
            break;
        }
        pts.push(x.clone());
    }
    pts.push(a.clone());
    let mut out = Vec::new();
    let mut prev: Option<(T, i32)> = None;
    for p in pts.into_iter().rev() {
        let s = poly.checked_sign(&p, opts.prec_bits)?;
        if let Some((pp, ps)) = &prev {
            if *ps != 0 && s != 0 && *ps != s {
                out.push((pp.clone(), p.clone()));
            }
        }
        if s != 0 {
            prev = Some((p, s));
        }
    }
    Ok(out)
}

fn refine<T: Real>(
    poly: &DisplacementPoly<T>,
    deriv: &DisplacementPoly<T>,
    mut a: T,
    mut b: T,
    opts: &RootOpts,
) -> Result<RootReport<T>> {
    let sa = poly.checked_sign(&a, opts.prec_bits)?;
    let two = a.from_i64_like(2);
    let max_iter = 64 + (opts.prec_bits as usize);
    for _ in 0..max_iter {
        let mid = a.add(&b).div(&two);
        let width = b.sub(&a).to_f64().abs();
        if width <= opts.rel_tol * mid.to_f64().abs() {
            break;
        }
        let sm = match poly.checked_sign(&mid, opts.prec_bits) {
            Ok(s) => s,
            // a sign too small to certify deep in refinement: the midpoint is
            // an excellent root estimate already
            Err(_) => break,
        };
        if sm == 0 {
            a = mid.clone();
            b = mid;
            break;
        }
        if sm == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    let value = a.add(&b).div(&two);
    let residual = poly.eval(&value);
    // monotone certificate: derivative keeps one sign on the bracket
    let da = deriv.eval(&a).sign_i();
    let db = deriv.eval(&b).sign_i();
    let certified_simple = da != 0 && da == db;
    Ok(RootReport {
        value,
        bracket: (a, b),
        residual,
        certified_simple,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly64(c: &[f64]) -> DisplacementPoly<f64> {
        DisplacementPoly::new(c.to_vec())
    }

    #[test]
    fn finds_simple_root() {
        // xi (xi - 1/2) on (0, 1): root 1/2 (0 excluded, domain open)
        let p = poly64(&[0.0, -0.5, 1.0]);
        let roots = displacement_roots(&p, &1e-12, &1.0, &RootOpts {
            prec_bits: 52,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].value - 0.5).abs() < 1e-12);
        assert!(roots[0].certified_simple);
    }

    #[test]
    fn recovers_constructed_quintic_roots() {
        // prod (xi - r_i) with spread-out roots
        let rs = [1e-3, 3e-5, 7e-7, 2e-8, 4e-10];
        let mut c = vec![1.0f64];
        for r in rs {
            let mut nc = vec![0.0; c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                nc[i + 1] += ci;
                nc[i] -= ci * r;
            }
            c = nc;
        }
        let p = poly64(&c);
        let roots = displacement_roots(&p, &1e-14, &0.01, &RootOpts {
            prec_bits: 52,
            rel_tol: 1e-9,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(roots.len(), 5);
        let mut sorted = rs;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in roots.iter().zip(sorted.iter()) {
            assert!(
                ((got.value - want) / want).abs() < 1e-6,
                "{} vs {want}",
                got.value
            );
            assert!(got.certified_simple);
        }
    }
}
