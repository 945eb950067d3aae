//! The higher-order Poincare-Lyapunov pipeline: polar conversion of the
//! scaled system, layer-by-layer half-return maps via Picard iteration on the
//! radial series, the displacement series d(xi) = Pi+ - Pi_-^+, and the
//! generalized Lyapunov constants V_jk.
//!
//! Orientation: the scaled normal form has linear part (-y, x), so
//! dtheta/dt = 1 + O(r, eps) > 0 near the origin; the upper half runs
//! theta in [0, pi]. This fixes the sign convention the constants
//! V_12 = delta_2 pi and V_56 = 25 pi/12 (at the section-6 point) validate.

use crate::biseries::BiSeries;
use crate::error::{Error, Result};
use crate::params::{ParamPoly, ParamRational, VarSet};
use crate::rational::Rational;
use crate::system::{Manifold, SwitchingSystem, VAR_EPS, VAR_X, VAR_Y};
use crate::theta::{Segment, ThetaSeries};
use num_traits::One;
use std::collections::BTreeMap;

/// Truncation orders: exponents are kept strictly below these.
/// Defaults give V_jk through j = 6, k = 7 (V_56 plus one guard order).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Orders {
    pub trunc_xi: u32,
    pub trunc_eps: u32,
}

impl Default for Orders {
    fn default() -> Self {
        Orders {
            trunc_xi: 7,
            trunc_eps: 8,
        }
    }
}

impl Orders {
    pub fn new(trunc_xi: u32, trunc_eps: u32) -> Self {
        Orders { trunc_xi, trunc_eps }
    }
}

/// One half of dr/dtheta as the quotient num / (1 + den). The radial power
/// of each term lives in the xi slot of the ThetaSeries coefficients.
#[derive(Clone, Debug)]
pub struct HalfPolar {
    pub num: ThetaSeries,
    pub den: ThetaSeries,
}

#[derive(Clone, Debug)]
pub struct PolarSystem {
    pub upper: HalfPolar,
    pub lower: HalfPolar,
    vars: VarSet,
    orders: Orders,
}

impl PolarSystem {
    /// Direct constructor for tests and hand-built fields.
    pub fn from_halves(upper: HalfPolar, lower: HalfPolar, vars: VarSet, orders: Orders) -> Self {
        PolarSystem {
            upper,
            lower,
            vars,
            orders,
        }
    }

    pub fn half(&self, seg: Segment) -> &HalfPolar {
        match seg {
            Segment::Upper => &self.upper,
            Segment::Lower => &self.lower,
        }
    }
}

/// Half-return map as a series in (xi, eps).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnMapSeries(pub BiSeries);

impl ReturnMapSeries {
    /// v_1 at eps^0 must be 1 (near-identity map).
    pub fn is_near_identity(&self) -> bool {
        self.0
            .coeff(1, 0)
            .as_rational()
            .is_some_and(|c| c.is_one())
    }
}

/// Convert one half (f, g) with f = -y + X, g = x + Y into polar data.
fn polar_half(
    f: &ParamPoly,
    g: &ParamPoly,
    vars: &VarSet,
    orders: Orders,
) -> Result<HalfPolar> {
    let (tx, te) = (orders.trunc_xi, orders.trunc_eps);
    let x = ParamPoly::var(vars, VAR_X);
    let y = ParamPoly::var(vars, VAR_Y);
    let big_x = f.add(&y)?; // X = f + y
    let big_y = g.sub(&x)?; // Y = g - x
    let mut num = ThetaSeries::zero(vars, tx, te);
    let mut den = ThetaSeries::zero(vars, tx, te);
    for (p, from_x) in [(&big_x, true), (&big_y, false)] {
        // group by (x-exp, y-exp); coefficients carry eps inside
        for (xy, coeff) in p.split_on(&[VAR_X, VAR_Y]) {
            let (i, j) = (xy[0] as u32, xy[1] as u32);
            let deg = i + j;
            if deg == 0 {
                return Err(Error::NotInNormalForm(
                    "constant term in a half field (set the d coefficient to zero for the series pipeline)".into(),
                ));
            }
            // eps lives inside coeff; split it out per eps power
            for (e_exp, c) in coeff.split_on(&[VAR_EPS]) {
                let e = e_exp[0] as u32;
                if deg == 1 && e == 0 {
                    return Err(Error::NotInNormalForm(
                        "linear part is not (-y, x) at eps^0".into(),
                    ));
                }
                let cr = ParamRational::from_poly(c);
                if from_x {
                    // x*X/r^2 -> r^deg cos^{i+1} sin^j ; -y*X/r^2 -> r^{deg-1} cos^i sin^{j+1}
                    num.accum(
                        (0, i + 1, j),
                        &BiSeries::term(vars, cr.clone(), deg, e, tx, te),
                    );
                    den.accum(
                        (0, i, j + 1),
                        &BiSeries::term(vars, cr.neg(), deg - 1, e, tx, te),
                    );
                } else {
                    // y*Y/r^2 -> r^deg cos^i sin^{j+1} ; x*Y/r^2 -> r^{deg-1} cos^{i+1} sin^j
                    num.accum(
                        (0, i, j + 1),
                        &BiSeries::term(vars, cr.clone(), deg, e, tx, te),
                    );
                    den.accum(
                        (0, i + 1, j),
                        &BiSeries::term(vars, cr, deg - 1, e, tx, te),
                    );
                }
            }
        }
    }
    Ok(HalfPolar { num, den })
}

/// Check the eps^0 linear part is exactly (-y, x) and convert to polar form.
pub fn polar_form(sys: &SwitchingSystem, orders: Orders) -> Result<PolarSystem> {
    if sys.manifold != Manifold::Y {
        return Err(Error::NotInNormalForm(
            "polar form expects the scaled system (manifold y = 0)".into(),
        ));
    }
    let vars = sys.vars().clone();
    let linear_check = |f: &ParamPoly, g: &ParamPoly| -> Result<()> {
        let at_eps0 = |p: &ParamPoly, want_x: i64, want_y: i64| -> bool {
            let mut cx = ParamPoly::zero(&vars);
            let mut cy = ParamPoly::zero(&vars);
            for (xy, c) in p.split_on(&[VAR_X, VAR_Y, VAR_EPS]) {
                if xy[2] != 0 {
                    continue;
                }
                if xy == vec![1, 0, 0] {
                    cx = c;
                } else if xy == vec![0, 1, 0] {
                    cy = c;
                }
            }
            cx.as_rational() == Some(Rational::from_integer(want_x.into()))
                && cy.as_rational() == Some(Rational::from_integer(want_y.into()))
        };
        if !at_eps0(f, 0, -1) || !at_eps0(g, 1, 0) {
            return Err(Error::NotInNormalForm(
                "linear part at eps^0 is not (-y, x)".into(),
            ));
        }
        Ok(())
    };
    linear_check(&sys.upper.0, &sys.upper.1)?;
    linear_check(&sys.lower.0, &sys.lower.1)?;
    Ok(PolarSystem {
        upper: polar_half(&sys.upper.0, &sys.upper.1, &vars, orders)?,
        lower: polar_half(&sys.lower.0, &sys.lower.1, &vars, orders)?,
        vars: vars.clone(),
        orders,
    })
}

/// Slice a polar ThetaSeries at radial power d: coefficients keep only their
/// eps grading.
fn slice_radial(t: &ThetaSeries, d: u32, vars: &VarSet, orders: Orders) -> ThetaSeries {
    let (tx, te) = (orders.trunc_xi, orders.trunc_eps);
    let mut out = ThetaSeries::zero(vars, tx, te);
    for (key, c) in t.terms() {
        let mut slice = BiSeries::zero(vars, tx, te);
        for (&(rp, e), v) in c.terms() {
            if rp == d {
                slice.set(0, e, v.clone());
            }
        }
        if !slice.is_zero() {
            out.accum(*key, &slice);
        }
    }
    out
}

fn max_radial_power(t: &ThetaSeries) -> u32 {
    let mut max = 0;
    for (_, c) in t.terms() {
        for (&(rp, _), _) in c.terms() {
            max = max.max(rp);
        }
    }
    max
}

/// Solve the layer ODEs of one polar half over a segment by successive
/// substitution: the full radial series v(theta) = xi + ... is Picard-iterated
/// (each pass gains one combined (xi, eps) order), integrating anchored at the
/// segment start. Returns v at the segment endpoint.
pub fn half_return(polar: &PolarSystem, seg: Segment) -> Result<ReturnMapSeries> {
    let orders = polar.orders;
    let vars = &polar.vars;
    let (tx, te) = (orders.trunc_xi, orders.trunc_eps);
    let half = polar.half(seg);
    // pre-slice radial layers
    let dmax_num = max_radial_power(&half.num);
    let dmax_den = max_radial_power(&half.den);
    let num_layers: Vec<ThetaSeries> = (0..=dmax_num)
        .map(|d| slice_radial(&half.num, d, vars, orders))
        .collect();
    let den_layers: Vec<ThetaSeries> = (0..=dmax_den)
        .map(|d| slice_radial(&half.den, d, vars, orders))
        .collect();
    if !num_layers[0].is_zero() {
        return Err(Error::NotInNormalForm(
            "dr/dtheta has a radial-power-zero numerator term".into(),
        ));
    }
    // den layer 0 must be O(eps)
    for (_, c) in den_layers[0].terms() {
        if !c.coeff(0, 0).is_zero() {
            return Err(Error::NotInNormalForm(
                "series division pivot is not 1 at eps^0".into(),
            ));
        }
    }
    // v = xi (coefficient 1 at trig (0,0,0), xi slot 1)
    let xi_term = ThetaSeries::from_term(
        vars,
        (0, 0, 0),
        BiSeries::term(vars, ParamRational::one(vars), 1, 0, tx, te),
    );
    let mut v = xi_term.clone();
    let max_iter = tx + te + 2;
    for _ in 0..max_iter {
        // powers of v
        let mut pows: Vec<ThetaSeries> = Vec::with_capacity(4);
        pows.push(ThetaSeries::one(vars, tx, te));
        let dmax = dmax_num.max(dmax_den) as usize;
        for d in 1..=dmax {
            let next = pows[d - 1].mul(&v);
            pows.push(next);
        }
        let mut numv = ThetaSeries::zero(vars, tx, te);
        for (d, layer) in num_layers.iter().enumerate() {
            if !layer.is_zero() {
                numv = numv.add(&layer.mul(&pows[d]));
            }
        }
        let mut denv = ThetaSeries::zero(vars, tx, te);
        for (d, layer) in den_layers.iter().enumerate() {
            if !layer.is_zero() {
                denv = denv.add(&layer.mul(&pows[d]));
            }
        }
        // Q = numv * sum_i (-denv)^i  (denv has combined grade >= 1)
        let mut q = ThetaSeries::zero(vars, tx, te);
        let neg_denv = denv.neg();
        let mut term = ThetaSeries::one(vars, tx, te);
        let mut guard = tx + te + 2;
        loop {
            q = q.add(&numv.mul(&term));
            term = term.mul(&neg_denv);
            if term.is_zero() {
                break;
            }
            guard -= 1;
            if guard == 0 {
                return Err(Error::NotInNormalForm(
                    "series division did not terminate (nonzero grade-0 divisor)".into(),
                ));
            }
        }
        let vnew = xi_term.add(&q.antiderivative(seg));
        if vnew == v {
            let end = v.eval_at_halfturns(seg.end_halfturns());
            return Ok(ReturnMapSeries(end));
        }
        v = vnew;
    }
    Err(Error::InsufficientOrder(tx, te))
}

/// Table of generalized Lyapunov constants: entry (j, k) is the coefficient
/// of xi^j eps^k in the displacement d(xi). The raw pipeline keeps entries
/// polynomial. Entries with k = 0 are stored and flagged (they arise only for
/// eps-free fields, e.g. the smooth normal-form sanity case).
#[derive(Clone, Debug)]
pub struct LyapunovTable {
    pub entries: BTreeMap<(u32, u32), ParamPoly>,
    pub max_j: u32,
    pub max_k: u32,
    pub has_eps0_terms: bool,
    vars: VarSet,
}

impl LyapunovTable {
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn entry(&self, j: u32, k: u32) -> Result<ParamPoly> {
        if j > self.max_j || k > self.max_k {
            return Err(Error::InsufficientOrder(j, k));
        }
        Ok(self
            .entries
            .get(&(j, k))
            .cloned()
            .unwrap_or_else(|| ParamPoly::zero(&self.vars)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry after sequentially substituting a binding chain.
    pub fn entry_under(&self, j: u32, k: u32, chain: &[(String, ParamRational)]) -> Result<ParamRational> {
        let e = self.entry(j, k)?;
        apply_chain(&ParamRational::from_poly(e), chain)
    }
}

/// Sequential substitution: later bindings flow through earlier RHS.
pub fn apply_chain(
    value: &ParamRational,
    chain: &[(String, ParamRational)],
) -> Result<ParamRational> {
    let mut acc = value.clone();
    for (name, rhs) in chain {
        let mut b = BTreeMap::new();
        b.insert(name.clone(), rhs.clone());
        acc = acc.substitute(&b)?;
    }
    Ok(acc)
}

fn table_from_biseries(d: &BiSeries, vars: &VarSet, orders: Orders) -> Result<LyapunovTable> {
    let mut entries = BTreeMap::new();
    let mut has_eps0 = false;
    for (&(j, k), c) in d.terms() {
        let poly = c.as_poly().ok_or_else(|| {
            Error::Other("displacement coefficient unexpectedly non-polynomial".into())
        })?;
        if poly.is_zero() {
            continue;
        }
        if k == 0 {
            has_eps0 = true;
        }
        entries.insert((j, k), poly);
    }
    Ok(LyapunovTable {
        entries,
        max_j: orders.trunc_xi - 1,
        max_k: orders.trunc_eps - 1,
        has_eps0_terms: has_eps0,
        vars: vars.clone(),
    })
}

/// Displacement via the reflected system: d(xi) = Pi+(xi) - Pi_-^+(xi), where
/// Pi_-^+ is the first half-return of the (x, -y, -t)-reflected system.
pub fn displacement(sys: &SwitchingSystem, orders: Orders) -> Result<LyapunovTable> {
    let polar = polar_form(sys, orders)?;
    let pi_plus = half_return(&polar, Segment::Upper)?;
    let reflected = sys.reflect()?;
    let polar_r = polar_form(&reflected, orders)?;
    let pi_minus_plus = half_return(&polar_r, Segment::Upper)?;
    let d = pi_plus.0.sub(&pi_minus_plus.0)?;
    table_from_biseries(&d, sys.vars(), orders)
}

/// Displacement via compositional inversion: d(xi) = Pi+(xi) - (Pi-)^{-1}(xi).
/// Independent oracle for `displacement`; must agree coefficient-for-coefficient.
pub fn displacement_via_inversion(sys: &SwitchingSystem, orders: Orders) -> Result<LyapunovTable> {
    let polar = polar_form(sys, orders)?;
    let pi_plus = half_return(&polar, Segment::Upper)?;
    let pi_minus = half_return(&polar, Segment::Lower)?;
    let inv = pi_minus.0.invert_xi()?;
    let d = pi_plus.0.sub(&inv)?;
    table_from_biseries(&d, sys.vars(), orders)
}

/// One step of the case-analysis ladder.
#[derive(Clone, Debug)]
pub enum LadderStep {
    /// Case hypothesis: bind a parameter to a value outright.
    Assume { param: String, value: ParamRational },
    /// Set entry (j,k) to zero by solving linearly for `param`.
    Solve { j: u32, k: u32, param: String },
    /// Assert entry (j,k) vanishes under the accumulated bindings.
    ExpectZero { j: u32, k: u32 },
    /// Report entry (j,k) as the terminal (first non-annihilable) constant.
    Terminal { j: u32, k: u32 },
}

#[derive(Clone, Debug)]
pub struct TerminalEntry {
    pub j: u32,
    pub k: u32,
    pub value: ParamRational,
    /// Rational content and content-free part of the numerator (the only
    /// factorization performed: content extraction).
    pub content: Rational,
    pub primitive: ParamPoly,
}

#[derive(Clone, Debug, Default)]
pub struct LadderOutcome {
    pub bindings: Vec<(String, ParamRational)>,
    pub transcript: Vec<String>,
    pub terminal: Option<TerminalEntry>,
}

/// Run a binding chain against a Lyapunov table, reproducing the printed case
/// trees mechanically. Branches are explicit (`Assume`); the ladder never
/// auto-selects one.
pub fn constant_ladder(table: &LyapunovTable, steps: &[LadderStep]) -> Result<LadderOutcome> {
    let mut out = LadderOutcome::default();
    for step in steps {
        match step {
            LadderStep::Assume { param, value } => {
                out.transcript.push(format!("assume {param} = {value}"));
                out.bindings.push((param.clone(), value.clone()));
            }
            LadderStep::Solve { j, k, param } => {
                let entry = table.entry_under(*j, *k, &out.bindings)?;
                if entry.is_zero() {
                    out.transcript
                        .push(format!("V_{j}{k} already vanishes; skip solve for {param}"));
                    continue;
                }
                let num = entry.num_ref();
                let idx = num
                    .vars()
                    .index(param)
                    .ok_or_else(|| Error::Other(format!("unknown parameter `{param}`")))?;
                // split numerator as polynomial in `param`
                let by_p = num.split_on(&[param]);
                let deg = by_p.keys().map(|k| k[0]).max().unwrap_or(0);
                if deg != 1 {
                    let content = num.rational_content();
                    let primitive = if content.is_zero() {
                        num.clone()
                    } else {
                        num.scale_rational(&(Rational::one() / content.clone()))
                    };
                    return Err(Error::ManualBranchRequired {
                        j: *j,
                        k: *k,
                        param: param.clone(),
                        factored: format!("({content}) * ({primitive})"),
                    });
                }
                let c1 = by_p.get(&vec![1u16]).cloned().unwrap();
                let c0 = by_p
                    .get(&vec![0u16])
                    .cloned()
                    .unwrap_or_else(|| ParamPoly::zero(num.vars()));
                // check param does not appear in its own denominator path
                if entry.den_ref().split_on(&[param]).keys().any(|k| k[0] > 0) {
                    return Err(Error::ManualBranchRequired {
                        j: *j,
                        k: *k,
                        param: param.clone(),
                        factored: format!("{entry}"),
                    });
                }
                let rhs = ParamRational::new(c0.neg(), c1)?;
                out.transcript.push(format!("V_{j}{k} = 0  =>  {param} = {rhs}"));
                out.bindings.push((param.clone(), rhs));
                // defensive: entry must now vanish
                let check = table.entry_under(*j, *k, &out.bindings)?;
                if !check.is_zero() {
                    return Err(Error::LadderEntryNonzero(*j, *k, format!("{check}")));
                }
            }
            LadderStep::ExpectZero { j, k } => {
                let entry = table.entry_under(*j, *k, &out.bindings)?;
                if !entry.is_zero() {
                    return Err(Error::LadderEntryNonzero(*j, *k, format!("{entry}")));
                }
                out.transcript.push(format!("V_{j}{k} = 0 (checked)"));
            }
            LadderStep::Terminal { j, k } => {
                let value = table.entry_under(*j, *k, &out.bindings)?;
                let num = value.num_ref().clone();
                let content = num.rational_content();
                let primitive = if content.is_zero() {
                    num
                } else {
                    num.scale_rational(&(Rational::one() / content.clone()))
                };
                out.transcript
                    .push(format!("terminal V_{j}{k} = {value}"));
                out.terminal = Some(TerminalEntry {
                    j: *j,
                    k: *k,
                    value,
                    content,
                    primitive,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ParamPoly;
    use crate::rational::rat;
    use crate::system::{
        apply_perturbation, build_lienard, standard_vars, LienardCoeffs, PerturbationScheme,
    };

    fn orders() -> Orders {
        Orders::default()
    }

    /// Scaled section-3 family at concrete rational values.
    pub(crate) fn sample_34(vals: &[(&str, Rational)]) -> SwitchingSystem {
        let vars = standard_vars(&[
            "p22p", "p23p", "q22p", "q23p", "p22m", "p23m", "q22m", "q23m",
        ]);
        let lienard = build_lienard(&vars, &LienardCoeffs::symbolic(&vars)).unwrap();
        let pert =
            apply_perturbation(&lienard, &PerturbationScheme::order2_symbolic(&vars)).unwrap();
        let scaled = pert.scale().unwrap();
        let bindings: BTreeMap<String, ParamRational> = vals
            .iter()
            .map(|(n, q)| (n.to_string(), ParamRational::from_rational(&vars, q.clone())))
            .collect();
        scaled.substitute(&bindings).unwrap()
    }

    fn sample_a() -> SwitchingSystem {
        sample_34(&[
            ("a2p", rat(2, 3)),
            ("a3p", rat(1, 2)),
            ("b2p", rat(3, 1)),
            ("b3p", rat(-1, 2)),
            ("a2m", rat(1, 5)),
            ("a3m", rat(-2, 7)),
            ("b2m", rat(-1, 1)),
            ("b3m", rat(4, 3)),
            ("p22p", rat(1, 2)),
            ("p23p", rat(2, 1)),
            ("q22p", rat(-1, 3)),
            ("q23p", rat(1, 1)),
            ("p22m", rat(3, 4)),
            ("p23m", rat(-1, 1)),
            ("q22m", rat(2, 5)),
            ("q23m", rat(-2, 1)),
        ])
    }

    /// Frozen cross-implementation golden: complete table for sample A,
    /// computed independently with exact Fraction arithmetic.
    /// Rows: (j, k, pi_power, numerator, denominator).
    const SAMPLE_A_TABLE: &[(u32, u32, u32, i64, i64)] = &[
        (2, 1, 0, -28, 45),
        (2, 3, 0, 1, 3),
        (3, 1, 1, 9, 20),
        (3, 2, 0, 1456, 2025),
        (3, 3, 1, 451, 6300),
        (3, 4, 0, 88, 135),
        (3, 5, 1, -41, 120),
        (3, 6, 0, -5, 9),
        (4, 1, 0, -928, 225),
        (4, 2, 1, -97, 90),
        (4, 3, 0, -5130952, 3189375),
        (4, 4, 1, -27253, 28350),
        (4, 5, 0, 4178722, 1063125),
        (4, 6, 1, 42041, 30240),
        (4, 7, 0, 4094, 10125),
        (5, 1, 1, 623, 144),
        (5, 2, 0, 1408, 125),
        (5, 2, 2, 297, 800),
        (5, 3, 1, 792911, 324000),
        (5, 4, 0, 1599689792, 143521875),
        (5, 4, 2, 31729, 168000),
        (5, 5, 1, -3279544463, 816480000),
        (5, 6, 0, -647206552, 47840625),
        (5, 6, 2, -58177627, 52920000),
        (5, 7, 1, -18843739, 11664000),
        (6, 1, 0, -137728, 2835),
        (6, 2, 1, -567203, 27000),
        (6, 3, 0, -944545664, 37209375),
        (6, 3, 2, -22931, 18000),
        (6, 4, 1, -163792231, 9112500),
        (6, 5, 0, 254312635112, 5023265625),
        (6, 5, 2, -36494077, 22680000),
        (6, 6, 1, 3518011442917, 91854000000),
        (6, 7, 0, 596870869414, 75348984375),
        (6, 7, 2, 97813227529, 28576800000),
    ];

    #[test]
    fn sample_a_matches_frozen_table() {
        let sys = sample_a();
        let table = displacement(&sys, orders()).unwrap();
        let vars = table.vars().clone();
        let mut expected: BTreeMap<(u32, u32), crate::pipoly::PiPoly> = BTreeMap::new();
        for &(j, k, p, n, d) in SAMPLE_A_TABLE {
            let cur = expected
                .entry((j, k))
                .or_insert_with(crate::pipoly::PiPoly::zero);
            *cur = &*cur + &crate::pipoly::PiPoly::pi_term(rat(n, d), p);
        }
        let got: BTreeMap<(u32, u32), crate::pipoly::PiPoly> = table
            .entries
            .iter()
            .map(|(&jk, p)| (jk, p.as_constant().unwrap()))
            .collect();
        let expected_polys: BTreeMap<(u32, u32), crate::pipoly::PiPoly> = expected;
        assert_eq!(got, expected_polys);
        let _ = vars;
    }

    #[test]
    fn inversion_and_reflection_paths_agree_on_sample_a() {
        let sys = sample_a();
        let t1 = displacement(&sys, orders()).unwrap();
        let t2 = displacement_via_inversion(&sys, orders()).unwrap();
        assert_eq!(t1.entries, t2.entries);
    }

    #[test]
    fn trivial_polar_cases() {
        // linear rotation: dr/dtheta = 0, Pi = identity
        let vars = VarSet::new([VAR_EPS, VAR_X, VAR_Y]);
        let x = ParamPoly::var(&vars, VAR_X);
        let y = ParamPoly::var(&vars, VAR_Y);
        let sys = SwitchingSystem::new(
            (y.neg(), x.clone()),
            (y.neg(), x.clone()),
            Manifold::Y,
        )
        .unwrap();
        let polar = polar_form(&sys, orders()).unwrap();
        assert!(polar.upper.num.is_zero());
        assert!(polar.upper.den.is_zero());
        let pi = half_return(&polar, Segment::Upper).unwrap();
        assert!(pi.is_near_identity());
        let d = displacement(&sys, orders()).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn hand_built_polar_separable_oracle() {
        // dr/dtheta = r^2 cos(theta): exact solution r = xi/(1 - xi sin theta),
        // so the half-return at pi is the identity.
        let vars = VarSet::empty();
        let (tx, te) = (orders().trunc_xi, orders().trunc_eps);
        let num = ThetaSeries::from_term(
            &vars,
            (0, 1, 0),
            BiSeries::term(&vars, ParamRational::one(&vars), 2, 0, tx, te),
        );
        let den = ThetaSeries::zero(&vars, tx, te);
        let polar = PolarSystem::from_halves(
            HalfPolar {
                num: num.clone(),
                den: den.clone(),
            },
            HalfPolar { num, den },
            vars.clone(),
            orders(),
        );
        let pi = half_return(&polar, Segment::Upper).unwrap();
        // v_1 = 1, v_k = 0 for k >= 2 at theta = pi
        assert!(pi.is_near_identity());
        for k in 2..orders().trunc_xi {
            assert!(pi.0.coeff(k, 0).is_zero(), "v_{k}(pi) should vanish");
        }
    }

    #[test]
    fn polar_form_rejects_wrong_linear_part() {
        let vars = VarSet::new([VAR_EPS, VAR_X, VAR_Y]);
        let x = ParamPoly::var(&vars, VAR_X);
        let y = ParamPoly::var(&vars, VAR_Y);
        // linear part (y, x): wrong orientation
        let sys =
            SwitchingSystem::new((y.clone(), x.clone()), (y, x), Manifold::Y).unwrap();
        assert!(matches!(
            polar_form(&sys, orders()),
            Err(Error::NotInNormalForm(_))
        ));
    }

    #[test]
    fn polar_form_against_brute_force_substitution() {
        // independent oracle: check num = (x X + y Y)/r and
        // 1 + den = (r^2 + x Y - y X)/r^2 after substituting x = r c, y = r s
        // as polynomials in (r, c, s).
        let sys = sample_a();
        let polar = polar_form(&sys, orders()).unwrap();
        let vars = sys.vars().clone();
        let aug = vars.union(&VarSet::new(["r_", "c_", "s_"]));
        let to_poly = |t: &ThetaSeries, rshift: u32| -> ParamPoly {
            // terms theta^m cos^i sin^j * r^rp eps^e -> c^i s^j r^{rp+rshift} eps^e
            let mut acc = ParamPoly::zero(&aug);
            for (&(m, i, j), c) in t.terms() {
                assert_eq!(m, 0);
                for (&(rp, e), v) in c.terms() {
                    let vp = v.as_poly().unwrap().embed(&aug);
                    let mono = ParamPoly::monomial(
                        &aug,
                        crate::pipoly::PiPoly::from_int(1),
                        &[
                            (aug.index("c_").unwrap(), i as u16),
                            (aug.index("s_").unwrap(), j as u16),
                            (aug.index("r_").unwrap(), (rp + rshift) as u16),
                            (aug.index(VAR_EPS).unwrap(), e as u16),
                        ],
                    );
                    acc = acc.add(&vp.mul(&mono).unwrap()).unwrap();
                }
            }
            acc
        };
        let subst_rc = |p: &ParamPoly| -> ParamPoly {
            let pe = p.embed(&aug);
            let r_ = ParamPoly::var(&aug, "r_");
            let c_ = ParamPoly::var(&aug, "c_");
            let s_ = ParamPoly::var(&aug, "s_");
            let mut b = BTreeMap::new();
            b.insert(
                VAR_X.to_string(),
                ParamRational::from_poly(r_.mul(&c_).unwrap()),
            );
            b.insert(
                VAR_Y.to_string(),
                ParamRational::from_poly(r_.mul(&s_).unwrap()),
            );
            pe.substitute_poly(&b).unwrap()
        };
        let y = ParamPoly::var(&vars, VAR_Y);
        let x = ParamPoly::var(&vars, VAR_X);
        let big_x = sys.upper.0.add(&y).unwrap();
        let big_y = sys.upper.1.sub(&x).unwrap();
        let r_ = ParamPoly::var(&aug, "r_");
        // r * num = x X + y Y substituted
        let lhs_num = to_poly(&polar.upper.num, 1);
        let rhs_num = subst_rc(&x)
            .mul(&subst_rc(&big_x))
            .unwrap()
            .add(&subst_rc(&y).mul(&subst_rc(&big_y)).unwrap())
            .unwrap();
        assert_eq!(lhs_num, rhs_num);
        // r^2 * den = x Y - y X substituted
        let lhs_den = to_poly(&polar.upper.den, 2);
        let rhs_den = subst_rc(&x)
            .mul(&subst_rc(&big_y))
            .unwrap()
            .sub(&subst_rc(&y).mul(&subst_rc(&big_x)).unwrap())
            .unwrap();
        assert_eq!(lhs_den, rhs_den);
        let _ = r_;
    }
}
