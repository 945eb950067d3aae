//! Adaptive Runge-Kutta-Fehlberg 7(8) integration for planar switching
//! systems, generic over the scalar. Events on the switching manifold are
//! localized by shrinking the step (each probe is one full RK step from the
//! last accepted state, so localization accuracy matches the integration
//! tolerance). Sliding segments use the Filippov convex combination; the
//! sliding motion itself is minimal and considered experimental - the
//! analysis only needs the segment endpoints.

use crate::error::{Error, Result};
use crate::numerics::real::Real;
use crate::params::ParamPoly;
use crate::system::{Manifold, SwitchingSystem, VAR_X, VAR_Y};
use std::collections::BTreeMap;

/// Fehlberg 7(8) coefficients (exact rationals).
const STAGES: usize = 13;
const A: [&[(i64, i64)]; 13] = [
    &[],
    &[(2, 27)],
    &[(1, 36), (1, 12)],
    &[(1, 24), (0, 1), (1, 8)],
    &[(5, 12), (0, 1), (-25, 16), (25, 16)],
    &[(1, 20), (0, 1), (0, 1), (1, 4), (1, 5)],
    &[(-25, 108), (0, 1), (0, 1), (125, 108), (-65, 27), (125, 54)],
    &[(31, 300), (0, 1), (0, 1), (0, 1), (61, 225), (-2, 9), (13, 900)],
    &[(2, 1), (0, 1), (0, 1), (-53, 6), (704, 45), (-107, 9), (67, 90), (3, 1)],
    &[
        (-91, 108),
        (0, 1),
        (0, 1),
        (23, 108),
        (-976, 135),
        (311, 54),
        (-19, 60),
        (17, 6),
        (-1, 12),
    ],
    &[
        (2383, 4100),
        (0, 1),
        (0, 1),
        (-341, 164),
        (4496, 1025),
        (-301, 82),
        (2133, 4100),
        (45, 82),
        (45, 164),
        (18, 41),
    ],
    &[
        (3, 205),
        (0, 1),
        (0, 1),
        (0, 1),
        (0, 1),
        (-6, 41),
        (-3, 205),
        (-3, 41),
        (3, 41),
        (6, 41),
        (0, 1),
    ],
    &[
        (-1777, 4100),
        (0, 1),
        (0, 1),
        (-341, 164),
        (4496, 1025),
        (-289, 82),
        (2193, 4100),
        (51, 82),
        (33, 164),
        (12, 41),
        (0, 1),
        (1, 1),
    ],
];
/// 8th-order weights (propagated solution, local extrapolation).
const B8: [(i64, i64); 13] = [
    (0, 1),
    (0, 1),
    (0, 1),
    (0, 1),
    (0, 1),
    (34, 105),
    (9, 35),
    (9, 35),
    (9, 280),
    (9, 280),
    (0, 1),
    (41, 840),
    (41, 840),
];
/// Error estimate: 41/840 (k0 + k10 - k11 - k12).
const ERR_W: (i64, i64) = (41, 840);

pub type State<T> = [T; 2];

fn frac<T: Real>(proto: &T, (n, d): (i64, i64)) -> T {
    proto.from_i64_like(n).div(&proto.from_i64_like(d))
}

/// One RKF78 step of size h for an autonomous planar field. Returns the
/// 8th-order solution and the embedded error estimate (per component).
pub fn rkf78_step<T: Real>(
    f: &dyn Fn(&State<T>) -> State<T>,
    y: &State<T>,
    h: &T,
) -> (State<T>, State<T>) {
    let mut k: Vec<State<T>> = Vec::with_capacity(STAGES);
    for s in 0..STAGES {
        let mut ys = y.clone();
        for (j, aij) in A[s].iter().enumerate() {
            if aij.0 == 0 {
                continue;
            }
            let c = frac(&y[0], *aij).mul(h);
            ys[0] = ys[0].add(&c.mul(&k[j][0]));
            ys[1] = ys[1].add(&c.mul(&k[j][1]));
        }
        k.push(f(&ys));
    }
    let mut out = y.clone();
    for (j, b) in B8.iter().enumerate() {
        if b.0 == 0 {
            continue;
        }
        let c = frac(&y[0], *b).mul(h);
        out[0] = out[0].add(&c.mul(&k[j][0]));
        out[1] = out[1].add(&c.mul(&k[j][1]));
    }
    let w = frac(&y[0], ERR_W).mul(h);
    let err = [
        w.mul(&k[0][0].add(&k[10][0]).sub(&k[11][0]).sub(&k[12][0])),
        w.mul(&k[0][1].add(&k[10][1]).sub(&k[11][1]).sub(&k[12][1])),
    ];
    (out, err)
}

/// A polynomial planar field with all parameters bound to scalar values;
/// only x and y remain.
#[derive(Clone, Debug)]
pub struct CompiledField<T> {
    fx: Vec<(u16, u16, T)>,
    fy: Vec<(u16, u16, T)>,
    max_deg: u16,
}

impl<T: Real> CompiledField<T> {
    pub fn compile(
        fx: &ParamPoly,
        fy: &ParamPoly,
        values: &BTreeMap<String, T>,
        proto: &T,
    ) -> Result<Self> {
        let compile_one = |p: &ParamPoly| -> Result<Vec<(u16, u16, T)>> {
            let vars = p.vars();
            let xi = vars.index(VAR_X);
            let yi = vars.index(VAR_Y);
            let mut out = Vec::new();
            for (m, c) in p.terms() {
                let mut coeff = proto.from_pipoly_like(c);
                let (mut ex, mut ey) = (0u16, 0u16);
                for (i, &e) in m.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if Some(i) == xi {
                        ex = e;
                    } else if Some(i) == yi {
                        ey = e;
                    } else {
                        let name = &vars.names()[i];
                        let val = values.get(name).ok_or_else(|| {
                            Error::Config(format!("parameter `{name}` has no numeric value"))
                        })?;
                        coeff = coeff.mul(&val.powi(e as u32));
                    }
                }
                out.push((ex, ey, coeff));
            }
            Ok(out)
        };
        let fx = compile_one(fx)?;
        let fy = compile_one(fy)?;
        let max_deg = fx
            .iter()
            .chain(fy.iter())
            .map(|t| t.0.max(t.1))
            .max()
            .unwrap_or(0);
        Ok(CompiledField { fx, fy, max_deg })
    }

    pub fn eval(&self, s: &State<T>) -> State<T> {
        let n = self.max_deg as usize;
        let mut xp = Vec::with_capacity(n + 1);
        let mut yp = Vec::with_capacity(n + 1);
        xp.push(s[0].one_like());
        yp.push(s[0].one_like());
        for i in 1..=n {
            xp.push(xp[i - 1].mul(&s[0]));
            yp.push(yp[i - 1].mul(&s[1]));
        }
        let sum = |terms: &[(u16, u16, T)]| -> T {
            let mut acc = s[0].zero_like();
            for (ex, ey, c) in terms {
                acc = acc.add(&c.mul(&xp[*ex as usize]).mul(&yp[*ey as usize]));
            }
            acc
        };
        [sum(&self.fx), sum(&self.fy)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Upper,
    Lower,
    Sliding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    CrossUp,
    CrossDown,
    SlidingEntry,
    SlidingExit,
}

#[derive(Clone, Debug)]
pub struct TrajEvent<T> {
    pub t: T,
    pub state: State<T>,
    pub kind: EventKind,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub samples: Vec<(T, State<T>, Regime)>,
    pub events: Vec<TrajEvent<T>>,
}

#[derive(Clone, Debug)]
pub struct IntegrateOpts<T> {
    pub tol: T,
    pub h0: T,
    pub max_steps: usize,
    pub record: bool,
    /// bail out when |x| or |y| exceeds this
    pub escape: f64,
}

impl<T: Real> IntegrateOpts<T> {
    pub fn new(proto: &T, tol_exp10: i64) -> Self {
        let ten = proto.from_i64_like(10);
        let tol = ten.powi(tol_exp10.unsigned_abs() as u32);
        let tol = if tol_exp10 < 0 {
            proto.one_like().div(&tol)
        } else {
            tol
        };
        IntegrateOpts {
            tol,
            h0: proto.from_rational_like(&crate::rational::rat(1, 64)),
            max_steps: 2_000_000,
            record: false,
            escape: 1e6,
        }
    }
}

/// A planar switching field: two compiled halves separated by a coordinate
/// axis. `mi` is the manifold coordinate index (0 = x, 1 = y).
pub struct SwitchingField<T> {
    pub upper: CompiledField<T>,
    pub lower: CompiledField<T>,
    pub mi: usize,
}

impl<T: Real> SwitchingField<T> {
    pub fn compile(
        sys: &SwitchingSystem,
        values: &BTreeMap<String, T>,
        proto: &T,
    ) -> Result<Self> {
        Ok(SwitchingField {
            upper: CompiledField::compile(&sys.upper.0, &sys.upper.1, values, proto)?,
            lower: CompiledField::compile(&sys.lower.0, &sys.lower.1, values, proto)?,
            mi: match sys.manifold {
                Manifold::X => 0,
                Manifold::Y => 1,
            },
        })
    }

    fn half(&self, r: Regime) -> &CompiledField<T> {
        match r {
            Regime::Upper => &self.upper,
            _ => &self.lower,
        }
    }
}

fn err_norm<T: Real>(err: &State<T>, y: &State<T>, tol: &T) -> f64 {
    let scale0 = tol.mul(&y[0].abs().add(&y[0].one_like()));
    let scale1 = tol.mul(&y[1].abs().add(&y[1].one_like()));
    let r0 = err[0].abs().div(&scale0).to_f64();
    let r1 = err[1].abs().div(&scale1).to_f64();
    r0.max(r1)
}

/// Integrate one half field with adaptive steps until `t_end`, an event
/// (sign change of `event_fn`), or escape. Returns (t, state, hit_event).
#[allow(clippy::too_many_arguments)]
pub fn integrate_adaptive<T: Real>(
    f: &dyn Fn(&State<T>) -> State<T>,
    start: &State<T>,
    t_end: &T,
    opts: &IntegrateOpts<T>,
    event_fn: Option<&dyn Fn(&State<T>) -> T>,
    mut on_sample: impl FnMut(&T, &State<T>),
) -> Result<(T, State<T>, bool)> {
    let mut t = start[0].zero_like();
    let mut y = start.clone();
    let mut h = opts.h0.clone();
    let mut g_prev = event_fn.map(|g| g(&y));
    for _ in 0..opts.max_steps {
        if t.cmp_real(t_end) != std::cmp::Ordering::Less {
            return Ok((t, y, false));
        }
        let remaining = t_end.sub(&t);
        if h.cmp_real(&remaining) == std::cmp::Ordering::Greater {
            h = remaining.clone();
        }
        let (y1, err) = rkf78_step(f, &y, &h);
        let en = err_norm(&err, &y, &opts.tol);
        if en > 1.0 {
            let fac = (0.9 * en.powf(-1.0 / 8.0)).max(0.2);
            h = h.mul(&y[0].from_f64_like(fac));
            if h.to_f64().abs() < 1e-300 {
                return Err(Error::Stiffness(t.to_f64()));
            }
            continue;
        }
        // event check across [y, y1]
        if let (Some(gf), Some(g0)) = (event_fn, g_prev.as_ref()) {
            let g1 = gf(&y1);
            if g0.sign_i() != 0 && g1.sign_i() != 0 && g0.sign_i() != g1.sign_i() {
                // localize: bisection on the step fraction
                let (mut lo, mut hi) = (y[0].zero_like(), h.clone());
                let mut y_hit = y1.clone();
                for _ in 0..(8 + 8 * opts.tol.to_f64().abs().log10().abs() as usize) {
                    let mid = lo.add(&hi).div(&y[0].from_i64_like(2));
                    let (ym, _) = rkf78_step(f, &y, &mid);
                    let gm = gf(&ym);
                    if gm.sign_i() == 0 {
                        y_hit = ym;
                        hi = mid;
                        break;
                    }
                    if gm.sign_i() == g0.sign_i() {
                        lo = mid;
                    } else {
                        hi = mid.clone();
                        y_hit = ym;
                    }
                }
                let t_hit = t.add(&hi);
                on_sample(&t_hit, &y_hit);
                return Ok((t_hit, y_hit, true));
            }
            g_prev = Some(g1);
        }
        t = t.add(&h);
        y = y1;
        on_sample(&t, &y);
        if y[0].to_f64().abs() > opts.escape || y[1].to_f64().abs() > opts.escape {
            return Err(Error::Escape(opts.escape));
        }
        let fac = if en > 1e-30 {
            (0.9 * en.powf(-1.0 / 8.0)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = h.mul(&y[0].from_f64_like(fac));
    }
    Err(Error::Event("step budget exhausted".into()))
}

/// Fixed-step integration (for order-convergence measurements).
pub fn integrate_fixed<T: Real>(
    f: &dyn Fn(&State<T>) -> State<T>,
    start: &State<T>,
    t_end: &T,
    steps: usize,
) -> State<T> {
    let h = t_end.div(&start[0].from_i64_like(steps as i64));
    let mut y = start.clone();
    for _ in 0..steps {
        y = rkf78_step(f, &y, &h).0;
    }
    y
}

/// Integrate the switching system from `start` to `t_end` with event
/// detection and Filippov sliding.
pub fn integrate_switching<T: Real>(
    field: &SwitchingField<T>,
    start: &State<T>,
    t_end: &T,
    opts: &IntegrateOpts<T>,
) -> Result<Trajectory<T>> {
    let mi = field.mi;
    let zero = start[0].zero_like();
    let mut traj = Trajectory {
        samples: Vec::new(),
        events: Vec::new(),
    };
    let mut t = zero.clone();
    let mut y = start.clone();
    let mut regime = if y[mi].is_negative() {
        Regime::Lower
    } else {
        Regime::Upper
    };
    traj.samples.push((t.clone(), y.clone(), regime));
    let mut guard = 0usize;
    while t.cmp_real(t_end) == std::cmp::Ordering::Less {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::Event("too many switching events".into()));
        }
        match regime {
            Regime::Upper | Regime::Lower => {
                let half = field.half(regime);
                let f = |s: &State<T>| half.eval(s);
                let remaining = t_end.sub(&t);
                let event = |s: &State<T>| s[mi].clone();
                let mut local: Vec<(T, State<T>)> = Vec::new();
                let (dt, y1, hit) = integrate_adaptive(
                    &f,
                    &y,
                    &remaining,
                    opts,
                    Some(&event),
                    |tt, ss| {
                        if opts.record {
                            local.push((tt.clone(), ss.clone()));
                        }
                    },
                )?;
                for (tt, ss) in local {
                    traj.samples.push((t.add(&tt), ss, regime));
                }
                t = t.add(&dt);
                y = y1;
                if !hit {
                    break;
                }
                // at the manifold: decide crossing vs sliding from the two
                // normal components
                let fu = field.upper.eval(&y)[mi].clone();
                let fl = field.lower.eval(&y)[mi].clone();
                let attracting = fu.is_negative() && !fl.is_negative();
                if attracting {
                    traj.events.push(TrajEvent {
                        t: t.clone(),
                        state: y.clone(),
                        kind: EventKind::SlidingEntry,
                    });
                    regime = Regime::Sliding;
                } else {
                    let kind = if regime == Regime::Upper {
                        EventKind::CrossDown
                    } else {
                        EventKind::CrossUp
                    };
                    traj.events.push(TrajEvent {
                        t: t.clone(),
                        state: y.clone(),
                        kind,
                    });
                    regime = if regime == Regime::Upper {
                        Regime::Lower
                    } else {
                        Regime::Upper
                    };
                    // nudge off the manifold in the crossing direction by the
                    // field itself; the next integration leg restarts cleanly
                    y[mi] = zero.clone();
                }
            }
            Regime::Sliding => {
                // Filippov field along the manifold; 1D motion in the other
                // coordinate. Exit when the convex coefficient leaves [0,1].
                let oi = 1 - mi;
                let mut h = opts.h0.clone();
                loop {
                    if t.cmp_real(t_end) != std::cmp::Ordering::Less {
                        break;
                    }
                    let fu = field.upper.eval(&y);
                    let fl = field.lower.eval(&y);
                    let denom = fl[mi].sub(&fu[mi]);
                    if denom.is_zero() {
                        break;
                    }
                    let alpha = fl[mi].div(&denom);
                    if alpha.is_negative()
                        || alpha.cmp_real(&y[0].one_like()) == std::cmp::Ordering::Greater
                    {
                        break;
                    }
                    let one = y[0].one_like();
                    let slide = alpha
                        .mul(&fu[oi])
                        .add(&one.sub(&alpha).mul(&fl[oi]));
                    // forward Euler along the manifold (experimental; only the
                    // segment endpoints matter for the analysis)
                    y[oi] = y[oi].add(&h.mul(&slide));
                    y[mi] = zero.clone();
                    t = t.add(&h);
                    if opts.record {
                        traj.samples.push((t.clone(), y.clone(), Regime::Sliding));
                    }
                    h = h.mul(&y[0].from_f64_like(1.1));
                }
                let fu = field.upper.eval(&y);
                let fl = field.lower.eval(&y);
                traj.events.push(TrajEvent {
                    t: t.clone(),
                    state: y.clone(),
                    kind: EventKind::SlidingExit,
                });
                regime = if !fu[mi].is_negative() {
                    Regime::Upper
                } else if fl[mi].is_negative() {
                    Regime::Lower
                } else {
                    break;
                };
            }
        }
        traj.samples.push((t.clone(), y.clone(), regime));
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_field(s: &State<f64>) -> State<f64> {
        [-s[1], s[0]]
    }

    #[test]
    fn rkf78_converges_at_high_order() {
        // fixed-step halving on a quarter circle: error factor >= 2^7
        let start = [1.0f64, 0.0];
        let t = std::f64::consts::FRAC_PI_2;
        let coarse = integrate_fixed(&circle_field, &start, &t, 8);
        let fine = integrate_fixed(&circle_field, &start, &t, 16);
        let err = |y: &State<f64>| ((y[0] - 0.0).powi(2) + (y[1] - 1.0).powi(2)).sqrt();
        let (e1, e2) = (err(&coarse), err(&fine));
        assert!(e2 > 0.0 && e1 / e2 > 128.0, "e1={e1:.3e} e2={e2:.3e}");
    }

    #[test]
    fn adaptive_event_detection() {
        // linear center from (1, 0): first y=0 crossing going down is at
        // (-1, 0), t = pi
        let start = [1.0f64, 0.0];
        let opts = IntegrateOpts::new(&0.0f64, -13);
        // nudge off the section first
        let (t0, y0, _) = integrate_adaptive(
            &circle_field,
            &start,
            &0.1,
            &opts,
            None,
            |_, _| {},
        )
        .unwrap();
        let ev = |s: &State<f64>| s[1];
        let (t1, y1, hit) = integrate_adaptive(
            &circle_field,
            &y0,
            &10.0,
            &opts,
            Some(&ev),
            |_, _| {},
        )
        .unwrap();
        assert!(hit);
        assert!((t0 + t1 - std::f64::consts::PI).abs() < 1e-9);
        assert!((y1[0] + 1.0).abs() < 1e-9);
    }
}
