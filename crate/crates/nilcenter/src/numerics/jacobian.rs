//! Symbolic Jacobians of Lyapunov constants with respect to perturbation
//! parameters, their determinants, and numeric evaluation.

use crate::engine::{apply_chain, LyapunovTable};
use crate::error::{Error, Result};
use crate::numerics::real::Real;
use crate::params::{ParamPoly, ParamRational};
use std::collections::BTreeMap;

/// Exact determinant of the matrix d(V_{rows}) / d(params), with the binding
/// chain (the critical point) substituted after differentiation.
pub fn jacobian_det(
    table: &LyapunovTable,
    rows: &[(u32, u32)],
    params: &[&str],
    chain: &[(String, ParamRational)],
) -> Result<ParamRational> {
    if rows.len() != params.len() {
        return Err(Error::ShapeError(rows.len(), params.len()));
    }
    let n = rows.len();
    let mut m: Vec<Vec<ParamRational>> = Vec::with_capacity(n);
    for &(j, k) in rows {
        let entry = table.entry(j, k)?;
        let mut row = Vec::with_capacity(n);
        for p in params {
            let d = entry.derivative(p)?;
            row.push(apply_chain(&ParamRational::from_poly(d), chain)?);
        }
        m.push(row);
    }
    Ok(det(&m))
}

fn det(m: &[Vec<ParamRational>]) -> ParamRational {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let vars = m[0][0].vars().clone();
    let mut acc = ParamRational::zero(&vars);
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<ParamRational>> = (1..n)
            .map(|r| {
                (0..n)
                    .filter(|&cc| cc != c)
                    .map(|cc| m[r][cc].clone())
                    .collect()
            })
            .collect();
        let term = m[0][c].mul(&det(&minor));
        acc = if c % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

/// Evaluate a ParamRational numerically; every variable must have a value.
pub fn eval_param_rational<T: Real>(
    v: &ParamRational,
    values: &BTreeMap<String, T>,
    proto: &T,
) -> Result<T> {
    let num = eval_param_poly(v.num_ref(), values, proto)?;
    let den = eval_param_poly(v.den_ref(), values, proto)?;
    if den.is_zero() {
        return Err(Error::SingularSubstitution(format!("{}", v.den_ref())));
    }
    Ok(num.div(&den))
}

pub fn eval_param_poly<T: Real>(
    p: &ParamPoly,
    values: &BTreeMap<String, T>,
    proto: &T,
) -> Result<T> {
    let vars = p.vars();
    let mut acc = proto.zero_like();
    for (m, c) in p.terms() {
        let mut term = proto.from_pipoly_like(c);
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = &vars.names()[i];
            let val = values
                .get(name)
                .ok_or_else(|| Error::Config(format!("no value for `{name}`")))?;
            term = term.mul(&val.powi(e as u32));
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}
