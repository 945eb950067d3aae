//! Numeric half-return maps for the scaled system: the brute-force oracle the
//! symbolic displacement is checked against, plus the ring-return evidence
//! used for global-center verification.

use crate::error::{Error, Result};
use crate::numerics::ode::{integrate_adaptive, IntegrateOpts, State, SwitchingField};
use crate::numerics::real::Real;
use crate::system::{Manifold, SwitchingSystem};
use std::collections::BTreeMap;

/// Numeric half-return maps of a scaled system (manifold y = 0) at concrete
/// parameter values: returns (Pi+, Pi_-^+), both as radial coordinates.
pub fn numeric_return_map<T: Real>(
    sys: &SwitchingSystem,
    values: &BTreeMap<String, T>,
    xi: &T,
    opts: &IntegrateOpts<T>,
) -> Result<(T, T)> {
    if sys.manifold != Manifold::Y {
        return Err(Error::NotInNormalForm(
            "numeric return map expects the scaled system".into(),
        ));
    }
    let proto = xi.clone();
    let field = SwitchingField::compile(sys, values, &proto)?;
    let reflected = sys.reflect()?;
    let field_r = SwitchingField::compile(&reflected, values, &proto)?;
    let pi_plus = upper_half_transit(&field.upper, xi, opts)?;
    let pi_minus_plus = upper_half_transit(&field_r.upper, xi, opts)?;
    Ok((pi_plus, pi_minus_plus))
}

/// Transit the upper half plane from (xi, 0) to the negative x-axis; returns
/// the radial coordinate -x at the section hit.
pub fn upper_half_transit<T: Real>(
    field: &crate::numerics::ode::CompiledField<T>,
    xi: &T,
    opts: &IntegrateOpts<T>,
) -> Result<T> {
    let f = |s: &State<T>| field.eval(s);
    let start = [xi.clone(), xi.zero_like()];
    let t_max = xi.from_i64_like(64);
    let ev = |s: &State<T>| s[1].clone();
    let (_t, end, hit) = integrate_adaptive(&f, &start, &t_max, opts, Some(&ev), |_, _| {})?;
    if !hit {
        return Err(Error::Event("no section crossing found".into()));
    }
    if !end[0].is_negative() {
        return Err(Error::Event(format!(
            "section hit on the wrong side: x = {:?}",
            end[0].to_f64()
        )));
    }
    Ok(end[0].neg())
}

/// One full revolution of the original (manifold x = 0) switching system from
/// (r0, 0), r0 > 0, back to the positive x-axis. The flow is clockwise:
/// plus half until x = 0 (lower crossing), minus half until x = 0 (upper
/// crossing), plus half until y = 0 again. Returns the landing x.
pub fn ring_return<T: Real>(
    sys: &SwitchingSystem,
    values: &BTreeMap<String, T>,
    r0: &T,
    opts: &IntegrateOpts<T>,
) -> Result<T> {
    if sys.manifold != Manifold::X {
        return Err(Error::NotInNormalForm("ring return expects manifold x = 0".into()));
    }
    let proto = r0.clone();
    let field = SwitchingField::compile(sys, values, &proto)?;
    let t_max = r0.from_i64_like(1000);
    let ev_x = |s: &State<T>| s[0].clone();
    let ev_y = |s: &State<T>| s[1].clone();
    // leg 1: plus half from (r0, 0) down to x = 0
    let f_up = |s: &State<T>| field.upper.eval(s);
    let f_lo = |s: &State<T>| field.lower.eval(s);
    let start = [r0.clone(), r0.zero_like()];
    let (_, s1, hit) = integrate_adaptive(&f_up, &start, &t_max, opts, Some(&ev_x), |_, _| {})?;
    if !hit {
        return Err(Error::Event("leg 1: no manifold crossing".into()));
    }
    // leg 2: minus half through x < 0 back to x = 0
    let (_, s2, hit) = integrate_adaptive(&f_lo, &s1, &t_max, opts, Some(&ev_x), |_, _| {})?;
    if !hit {
        return Err(Error::Event("leg 2: no manifold crossing".into()));
    }
    // leg 3: plus half until y = 0 with x > 0
    let (_, s3, hit) = integrate_adaptive(&f_up, &s2, &t_max, opts, Some(&ev_y), |_, _| {})?;
    if !hit {
        return Err(Error::Event("leg 3: no section crossing".into()));
    }
    Ok(s3[0].clone())
}
