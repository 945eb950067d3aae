//! Certificate-based verification of the nilpotent-center conditions I-VIII
//! and the global-center conditions G1/G2: exact membership tests, polynomial
//! Hamiltonian and integrating-factor log first integrals (verified by
//! symbolic differentiation along the flow), axis-symmetry relations, and the
//! compactification analysis at infinity.

use crate::error::{Error, Result};
use crate::params::{ParamPoly, ParamRational};
use crate::rational::{rat, Rational};
use crate::system::{
    classify_origin, switching_origin_monodromic, LienardCoeffs, Manifold, SwitchingSystem,
    VAR_EPS, VAR_X, VAR_Y,
};
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CenterCondition {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl std::fmt::Display for CenterCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CenterCondition::I => "I",
            CenterCondition::II => "II",
            CenterCondition::III => "III",
            CenterCondition::IV => "IV",
            CenterCondition::V => "V",
            CenterCondition::VI => "VI",
            CenterCondition::VII => "VII",
            CenterCondition::VIII => "VIII",
        };
        write!(f, "{s}")
    }
}

pub const ALL_CONDITIONS: [CenterCondition; 8] = [
    CenterCondition::I,
    CenterCondition::II,
    CenterCondition::III,
    CenterCondition::IV,
    CenterCondition::V,
    CenterCondition::VI,
    CenterCondition::VII,
    CenterCondition::VIII,
];

/// Exact membership test of the eight semialgebraic center conditions.
/// Requires concrete rational coefficients (inequalities must be decided).
pub fn match_center_condition(coeffs: &LienardCoeffs) -> Result<BTreeSet<CenterCondition>> {
    let [a2p, a3p, b2p, b3p, a2m, a3m, b2m, b3m] = coeffs
        .concrete_values()
        .ok_or_else(|| Error::UndecidableAtSymbol("cubic coefficients".into()))?;
    let mut out = BTreeSet::new();
    let z = Rational::zero;
    // I: a2+- = a3+- = b2- = 0, b2+ > 0, b3- > 0
    if a2p == z() && a2m == z() && a3p == z() && a3m == z() && b2m == z()
        && b2p.is_positive()
        && b3m.is_positive()
    {
        out.insert(CenterCondition::I);
    }
    // II: a2+- = a3+- = 0, b2+ > 0, b2- < 0
    if a2p == z() && a2m == z() && a3p == z() && a3m == z()
        && b2p.is_positive()
        && b2m.is_negative()
    {
        out.insert(CenterCondition::II);
    }
    // III: a2+- = b3+- = 0, a3+ b2- - a3- b2+ = 0, a3+(b2+ + b2-) != 0,
    //      b2+ > 0, b2- < 0
    if a2p == z()
        && a2m == z()
        && b3p == z()
        && b3m == z()
        && (&a3p * &b2m - &a3m * &b2p) == z()
        && !(&a3p * (&b2p + &b2m)).is_zero()
        && b2p.is_positive()
        && b2m.is_negative()
    {
        out.insert(CenterCondition::III);
    }
    // IV: a2- = a2+, a3- = -a3+, b2- = -b2+ < 0, b3- = b3+
    if a2m == a2p && a3m == -a3p.clone() && b2m == -b2p.clone() && b2m.is_negative() && b3m == b3p
    {
        out.insert(CenterCondition::IV);
    }
    // V: a2+- = a3+- = b2+ = 0, b2- < 0, b3+ > 0
    if a2p == z() && a2m == z() && a3p == z() && a3m == z() && b2p == z()
        && b2m.is_negative()
        && b3p.is_positive()
    {
        out.insert(CenterCondition::V);
    }
    // VI: a2+- = b2+- = 0, a3- = -a3+, b3- = b3+ > 3/4 (a3+)^2
    if a2p == z() && a2m == z() && b2p == z() && b2m == z() && a3m == -a3p.clone() && b3m == b3p {
        if b3p > &a3p * &a3p * rat(3, 4) {
            out.insert(CenterCondition::VI);
        }
    }
    // VII: a2+- = a3+- = b2+- = 0, b3+ > 0, b3- > 0
    if a2p == z() && a2m == z() && a3p == z() && a3m == z() && b2p == z() && b2m == z()
        && b3p.is_positive()
        && b3m.is_positive()
    {
        out.insert(CenterCondition::VII);
    }
    // VIII: a2- = a2+ != 0, a3- = -a3+, b2+- = 0, b3- = b3+ > 1/3 (a2+)^2
    if a2m == a2p && !a2p.is_zero() && a3m == -a3p.clone() && b2p == z() && b2m == z() && b3m == b3p
    {
        if b3p > &a2p * &a2p * rat(1, 3) {
            out.insert(CenterCondition::VIII);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    HamiltonianMatching,
    LogFirstIntegral,
    YAxisSymmetry,
    XAxisSymmetry,
}

#[derive(Clone, Debug)]
pub struct CenterCertificate {
    pub kind: CertificateKind,
    pub checked: bool,
    /// Monodromy of the switching origin, when decidable.
    pub monodromic: Option<bool>,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Check the exact coefficient relations for x-axis / y-axis symmetry of a
/// switching system with manifold x = 0 written as
/// xdot = y + sum A_ij x^i y^j, ydot = sum B_ij x^i y^j.
pub fn verify_symmetry(sys: &SwitchingSystem, axis: Axis) -> Result<CenterCertificate> {
    if sys.manifold != Manifold::X {
        return Err(Error::NotInNormalForm(
            "symmetry certificates apply to the original family (manifold x = 0)".into(),
        ));
    }
    let vars = sys.vars().clone();
    let y = ParamPoly::var(&vars, VAR_Y);
    let a_up = sys.upper.0.sub(&y)?;
    let b_up = sys.upper.1.clone();
    let a_lo = sys.lower.0.sub(&y)?;
    let b_lo = sys.lower.1.clone();
    let coeffs = |p: &ParamPoly| p.split_on(&[VAR_X, VAR_Y]);
    let (au, bu, al, bl) = (coeffs(&a_up), coeffs(&b_up), coeffs(&a_lo), coeffs(&b_lo));
    let zero = ParamPoly::zero(&vars);
    let get = |m: &std::collections::BTreeMap<Vec<u16>, ParamPoly>, i: u16, j: u16| {
        m.get(&vec![i, j]).cloned().unwrap_or_else(|| zero.clone())
    };
    let mut ok = true;
    let mut detail = String::new();
    let max_deg = 4u16;
    match axis {
        Axis::X => {
            // (2-2): A_{i,even} = 0 and B_{i,odd} = 0 on both halves
            for i in 0..=max_deg {
                for j in 0..=max_deg {
                    for (name, a, b) in [("+", &au, &bu), ("-", &al, &bl)] {
                        if j % 2 == 0 && !get(a, i, j).is_zero() {
                            ok = false;
                            detail = format!("A_{i}{j}^{name} nonzero");
                        }
                        if j % 2 == 1 && !get(b, i, j).is_zero() {
                            ok = false;
                            detail = format!("B_{i}{j}^{name} nonzero");
                        }
                    }
                }
            }
        }
        Axis::Y => {
            // (2-3): A^+_{odd,j} = -A^-_{odd,j}, A^+_{even,j} = A^-_{even,j},
            //        B^+_{odd,j} = B^-_{odd,j}, B^+_{even,j} = -B^-_{even,j}
            for i in 0..=max_deg {
                for j in 0..=max_deg {
                    let (aup, alo) = (get(&au, i, j), get(&al, i, j));
                    let (bup, blo) = (get(&bu, i, j), get(&bl, i, j));
                    let a_ok = if i % 2 == 1 {
                        aup == alo.neg()
                    } else {
                        aup == alo
                    };
                    let b_ok = if i % 2 == 1 {
                        bup == blo
                    } else {
                        bup == blo.neg()
                    };
                    if !a_ok {
                        ok = false;
                        detail = format!("A_{i}{j} relation fails");
                    }
                    if !b_ok {
                        ok = false;
                        detail = format!("B_{i}{j} relation fails");
                    }
                }
            }
        }
    }
    let monodromic = extract_lienard(sys)
        .and_then(|c| switching_origin_monodromic(&c).ok());
    if ok {
        detail = "all coefficient relations hold".into();
    }
    Ok(CenterCertificate {
        kind: match axis {
            Axis::X => CertificateKind::XAxisSymmetry,
            Axis::Y => CertificateKind::YAxisSymmetry,
        },
        checked: ok && monodromic != Some(false),
        monodromic,
        detail,
    })
}

/// Recover cubic Lienard data from a manifold-x system if it has the shape
/// xdot = y - a2 x^2 - a3 x^3, ydot = -b2 x^2 - b3 x^3 (eps-free).
pub fn extract_lienard(sys: &SwitchingSystem) -> Option<LienardCoeffs> {
    if sys.manifold != Manifold::X {
        return None;
    }
    let vars = sys.vars().clone();
    let y = ParamPoly::var(&vars, VAR_Y);
    let mut sides = Vec::new();
    for (f, g) in [&sys.upper, &sys.lower] {
        let fa = f.sub(&y).ok()?;
        let mut a = [
            ParamRational::zero(&vars),
            ParamRational::zero(&vars),
            ParamRational::zero(&vars),
            ParamRational::zero(&vars),
        ];
        let mut b = a.clone();
        for (xy, c) in fa.split_on(&[VAR_X, VAR_Y, VAR_EPS]) {
            if xy[1] != 0 || xy[2] != 0 || xy[0] > 3 || xy[0] < 2 {
                return None;
            }
            a[xy[0] as usize] = ParamRational::from_poly(c.neg());
        }
        for (xy, c) in g.split_on(&[VAR_X, VAR_Y, VAR_EPS]) {
            if xy[1] != 0 || xy[2] != 0 || xy[0] > 3 || xy[0] < 2 {
                return None;
            }
            b[xy[0] as usize] = ParamRational::from_poly(c.neg());
        }
        sides.push((a, b));
    }
    let (a_minus, b_minus) = sides.pop().unwrap();
    let (a_plus, b_plus) = sides.pop().unwrap();
    Some(LienardCoeffs {
        a_plus,
        b_plus,
        a_minus,
        b_minus,
    })
}

/// First-integral certificates: polynomial Hamiltonians for the F = 0 cases
/// (I/II/V/VII) and the integrating-factor log integrals for the condition-III
/// shape. All checks are exact polynomial identities.
pub fn verify_first_integral(sys: &SwitchingSystem) -> Result<CenterCertificate> {
    let coeffs = extract_lienard(sys).ok_or_else(|| {
        Error::UnsupportedCertificate("system is not in cubic Lienard shape".into())
    })?;
    let vars = sys.vars().clone();
    let monodromic = switching_origin_monodromic(&coeffs).ok();
    let f_zero = coeffs.a_plus[2].is_zero()
        && coeffs.a_plus[3].is_zero()
        && coeffs.a_minus[2].is_zero()
        && coeffs.a_minus[3].is_zero();
    if f_zero {
        // H_side = y^2/2 + b2 x^3/3 + b3 x^4/4; dH/dt = 0 along the half and
        // the restrictions to x = 0 agree (both are y^2/2, even in y).
        let x = ParamPoly::var(&vars, VAR_X);
        let y = ParamPoly::var(&vars, VAR_Y);
        let mut ok = true;
        let mut detail = String::new();
        for (side, b, half) in [
            ("+", &coeffs.b_plus, &sys.upper),
            ("-", &coeffs.b_minus, &sys.lower),
        ] {
            let b2 = b[2].as_poly().unwrap();
            let b3 = b[3].as_poly().unwrap();
            let h = y
                .pow(2)
                .scale_rational(&rat(1, 2))
                .add(&b2.mul(&x.pow(3))?.scale_rational(&rat(1, 3)))?
                .add(&b3.mul(&x.pow(4))?.scale_rational(&rat(1, 4)))?;
            let dh = h
                .derivative(VAR_X)?
                .mul(&half.0)?
                .add(&h.derivative(VAR_Y)?.mul(&half.1)?)?;
            if !dh.is_zero() {
                ok = false;
                detail = format!("dH{side}/dt != 0: {dh}");
            }
        }
        if ok {
            detail = "H = y^2/2 + b2 x^3/3 + b3 x^4/4 conserved on both halves; restrictions to x = 0 coincide".into();
        }
        return Ok(CenterCertificate {
            kind: CertificateKind::HamiltonianMatching,
            checked: ok && monodromic != Some(false),
            monodromic,
            detail,
        });
    }
    // condition-III shape: F = a3 x^3, g = b2 x^2 with the cross relation
    let iii_shape = coeffs.a_plus[2].is_zero()
        && coeffs.a_minus[2].is_zero()
        && coeffs.b_plus[3].is_zero()
        && coeffs.b_minus[3].is_zero()
        && !coeffs.a_plus[3].is_zero()
        && !coeffs.b_plus[2].is_zero();
    if iii_shape {
        let a3p = &coeffs.a_plus[3];
        let b2p = &coeffs.b_plus[2];
        let a3m = &coeffs.a_minus[3];
        let b2m = &coeffs.b_minus[2];
        // cross relation a3+ b2- = a3- b2+
        if a3p.mul(b2m) != a3m.mul(b2p) {
            return Err(Error::UnsupportedCertificate(
                "condition-III cross relation a3+ b2- = a3- b2+ fails".into(),
            ));
        }
        let x = ParamRational::var(&vars, VAR_X);
        let y = ParamRational::var(&vars, VAR_Y);
        let three = ParamRational::from_rational(&vars, rat(3, 1));
        let nine = ParamRational::from_rational(&vars, rat(9, 1));
        // h = -a3-/a3+ = -b2-/b2+
        let h = b2m.neg().div(b2p)?;
        // W+ = -3 (a3+)^2 x^3 + 3 a3+ y + b2+ ; W- = 3 h (a3+)^2 x^3 + 3 a3+ y + b2+
        let a3p2 = a3p.mul(a3p);
        let w_common = three.mul(a3p).mul(&y).add(b2p);
        let w_plus = w_common.sub(&three.mul(&a3p2).mul(&x.mul(&x).mul(&x)));
        let w_minus = w_common.add(&three.mul(&h).mul(&a3p2).mul(&x.mul(&x).mul(&x)));
        // alpha = -3 a3+, beta = b2+: I = alpha y + beta ln|W|
        let alpha = three.neg().mul(a3p);
        let beta = b2p.clone();
        let mut ok = true;
        let mut detail = String::new();
        for (side, w, half) in [("+", &w_plus, &sys.upper), ("-", &w_minus, &sys.lower)] {
            let fx = ParamRational::from_poly(half.0.clone());
            let fy = ParamRational::from_poly(half.1.clone());
            // dW/dt
            let wx = ParamRational::from_poly(w.num_ref().derivative(VAR_X)?)
                .div(&ParamRational::from_poly(w.den_ref().clone()))?;
            let wy = ParamRational::from_poly(w.num_ref().derivative(VAR_Y)?)
                .div(&ParamRational::from_poly(w.den_ref().clone()))?;
            let wdot = wx.mul(&fx).add(&wy.mul(&fy));
            // dI/dt * W = alpha ydot W + beta Wdot must vanish identically
            let didt_w = alpha.mul(&fy).mul(w).add(&beta.mul(&wdot));
            if !didt_w.is_zero() {
                ok = false;
                detail = format!("dI{side}/dt != 0");
            }
            // mu = 9 (a3+)^2 / W is an integrating factor:
            // (P_x + Q_y) W - P W_x - Q W_y = 0
            let px = ParamRational::from_poly(half.0.derivative(VAR_X)?);
            let qy = ParamRational::from_poly(half.1.derivative(VAR_Y)?);
            let div_num = px.add(&qy).mul(w).sub(&fx.mul(&wx)).sub(&fy.mul(&wy));
            if !div_num.is_zero() {
                ok = false;
                detail = format!("mu{side} is not an integrating factor");
            }
            let _ = nine.clone();
        }
        // restrictions to x = 0 agree: W+(0,y) = W-(0,y) and alpha shared
        let mut bind = std::collections::BTreeMap::new();
        bind.insert(VAR_X.to_string(), ParamRational::zero(&vars));
        let wp0 = w_plus.substitute(&bind)?;
        let wm0 = w_minus.substitute(&bind)?;
        if wp0 != wm0 {
            ok = false;
            detail = "restrictions to x = 0 differ".into();
        }
        if ok {
            detail =
                "log first integrals I = -3 a3+ y + b2+ ln|W| verified; I+(0,y) = I-(0,y)".into();
        }
        return Ok(CenterCertificate {
            kind: CertificateKind::LogFirstIntegral,
            checked: ok && monodromic != Some(false),
            monodromic,
            detail,
        });
    }
    Err(Error::UnsupportedCertificate(
        "neither the Hamiltonian (F = 0) nor the condition-III shape".into(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointKind {
    Saddle,
    NodeStable,
    NodeUnstable,
    SaddleNode,
    Degenerate,
}

impl std::fmt::Display for PointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PointKind::Saddle => "saddle",
            PointKind::NodeStable => "stable node",
            PointKind::NodeUnstable => "unstable node",
            PointKind::SaddleNode => "saddle-node",
            PointKind::Degenerate => "degenerate",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug)]
pub struct InfinitePoint {
    pub chart: &'static str,
    pub location: String,
    pub kind: PointKind,
    /// true when the point obstructs a global center
    pub obstructs_global: bool,
}

/// Infinite singular points of one cubic Lienard half in its horizontal
/// chart (U1 for the plus half, W1 for the minus half), plus the blow-up
/// inventory of the vertical direction (U2/W2 origin).
fn classify_infinity_side(
    a2: &Rational,
    a3: &Rational,
    b2: &Rational,
    b3: &Rational,
    chart_h: &'static str,
    chart_v: &'static str,
) -> (Vec<InfinitePoint>, bool) {
    let mut pts = Vec::new();
    // horizontal chart: udot = -b3 + a3 u - b2 w + a2 u w - u^2 w^2,
    // wdot = w (a3 + a2 w - u w^2); equator w = 0
    if !a3.is_zero() {
        let u0 = b3 / a3;
        // triangular linearization, double eigenvalue a3: a node
        let kind = if a3.is_positive() {
            PointKind::NodeUnstable
        } else {
            PointKind::NodeStable
        };
        pts.push(InfinitePoint {
            chart: chart_h,
            location: format!("u = {u0}"),
            kind,
            obstructs_global: true,
        });
    } else if b3.is_zero() && !a2.is_zero() {
        // quadratic-type half: after removing the common w factor the
        // equator point u = b2/a2 is a node (eigenvalues a2, a2)
        let u0 = b2 / a2;
        let kind = if a2.is_positive() {
            PointKind::NodeUnstable
        } else {
            PointKind::NodeStable
        };
        pts.push(InfinitePoint {
            chart: chart_h,
            location: format!("u = {u0}"),
            kind,
            obstructs_global: true,
        });
    }
    // vertical direction: double blow-up inventory on u = 0 of the cubic
    // chart system. disc = (a2)^2 - 2 b3.
    let disc = a2 * a2 - rat(2, 1) * b3;
    let mut two_hyperbolic = false;
    if a3.is_zero() && b3.is_zero() {
        // quadratic half: the U2 origin is a node (unstable for b2 > 0,
        // stable for b2 < 0)
        if !b2.is_zero() {
            pts.push(InfinitePoint {
                chart: chart_v,
                location: "origin (quadratic half)".into(),
                kind: if b2.is_positive() {
                    PointKind::NodeUnstable
                } else {
                    PointKind::NodeStable
                },
                obstructs_global: true,
            });
        }
    } else if disc.is_negative() {
        // E1 = (0,0) saddle only: two hyperbolic sectors
        pts.push(InfinitePoint {
            chart: chart_v,
            location: "E1 = (0,0)".into(),
            kind: PointKind::Saddle,
            obstructs_global: false,
        });
        two_hyperbolic = true;
    } else if disc.is_zero() {
        pts.push(InfinitePoint {
            chart: chart_v,
            location: "E1 = (0,0)".into(),
            kind: PointKind::Saddle,
            obstructs_global: false,
        });
        pts.push(InfinitePoint {
            chart: chart_v,
            location: format!("E2 = ({}, 0)", a2 / rat(2, 1)),
            kind: PointKind::SaddleNode,
            obstructs_global: true,
        });
    } else {
        // disc > 0: E1 saddle (if b3 != 0), E2/E3 a saddle and a node with
        // exact eigenvalue signs: lambda1 = b3/2, lambda2(E2) = -s(a2+s),
        // lambda2(E3) = s(a2-s), s = sqrt(disc) > 0.
        if b3.is_zero() {
            pts.push(InfinitePoint {
                chart: chart_v,
                location: "E1 = E3 = (0,0)".into(),
                kind: PointKind::Degenerate,
                obstructs_global: true,
            });
        } else {
            pts.push(InfinitePoint {
                chart: chart_v,
                location: "E1 = (0,0)".into(),
                kind: PointKind::Saddle,
                obstructs_global: false,
            });
            // sign of a2 + s: positive if a2 >= 0, else sign of s^2 - a2^2 = -2 b3
            let sgn = |q: &Rational| -> i32 {
                if q.is_zero() {
                    0
                } else if q.is_positive() {
                    1
                } else {
                    -1
                }
            };
            let a2_plus_s = if !a2.is_negative() {
                1
            } else {
                sgn(&(rat(-2, 1) * b3))
            };
            let a2_minus_s = if !a2.is_positive() {
                -1
            } else {
                sgn(&(rat(2, 1) * b3))
            };
            let l1 = sgn(b3);
            for (name, l2) in [("E2", -a2_plus_s), ("E3", a2_minus_s)] {
                let kind = match (l1, l2) {
                    (1, 1) => PointKind::NodeUnstable,
                    (-1, -1) => PointKind::NodeStable,
                    (0, _) | (_, 0) => PointKind::SaddleNode,
                    _ => PointKind::Saddle,
                };
                pts.push(InfinitePoint {
                    chart: chart_v,
                    location: format!("{name} = ((a2 +- sqrt({disc}))/2, 0)"),
                    kind,
                    obstructs_global: !matches!(kind, PointKind::Saddle),
                });
            }
        }
    }
    (pts, two_hyperbolic)
}

/// Infinite singular points of the switching Lienard system, per chart.
pub fn classify_infinity(coeffs: &LienardCoeffs) -> Result<Vec<InfinitePoint>> {
    let [a2p, a3p, b2p, b3p, a2m, a3m, b2m, b3m] = coeffs
        .concrete_values()
        .ok_or_else(|| Error::UndecidableAtSymbol("cubic coefficients".into()))?;
    let (mut plus, _) = classify_infinity_side(&a2p, &a3p, &b2p, &b3p, "U1", "U2+");
    let (minus, _) = classify_infinity_side(&a2m, &a3m, &b2m, &b3m, "W1", "U2-");
    plus.extend(minus);
    Ok(plus)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlobalVerdict {
    Global,
    NotGlobal,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct GlobalReport {
    pub conditions: BTreeSet<CenterCondition>,
    pub g1: bool,
    pub g2: bool,
    /// finite nonzero singular point of each half and whether it is virtual
    pub e_plus: Option<((Rational, Rational), bool)>,
    pub e_minus: Option<((Rational, Rational), bool)>,
    /// (a2)^2 - 2 b3 < 0 per side
    pub sector_plus: bool,
    pub sector_minus: bool,
    pub infinity: Vec<InfinitePoint>,
    pub verdict: GlobalVerdict,
    pub reasons: Vec<String>,
}

/// Evaluate the global-center conditions G1/G2 and assemble the supporting
/// evidence (virtual points, infinity analysis, sector conditions).
pub fn check_global_center(coeffs: &LienardCoeffs) -> Result<GlobalReport> {
    let [a2p, a3p, b2p, b3p, a2m, a3m, b2m, b3m] = coeffs
        .concrete_values()
        .ok_or_else(|| Error::UndecidableAtSymbol("cubic coefficients".into()))?;
    let conditions = match_center_condition(coeffs)?;
    let z = Rational::zero;
    let g1 = a2p == z() && a2m == z() && a3p == z() && a3m == z()
        && b3p.is_positive()
        && b3m.is_positive();
    let g2 = a2m == a2p
        && a3p == z()
        && a3m == z()
        && b2m == -b2p.clone()
        && b3m == b3p
        && b3p > &a2p * &a2p * rat(1, 2);
    let e_point = |b2: &Rational, b3: &Rational, a2: &Rational, a3: &Rational| {
        if b2.is_zero() || b3.is_zero() {
            None
        } else {
            let x = -(b2 / b3);
            let y = -(b2 * b2 * (a3 * b2 - a2 * b3)) / (b3 * b3 * b3);
            Some((x, y))
        }
    };
    let e_plus = e_point(&b2p, &b3p, &a2p, &a3p).map(|p| {
        let virt = p.0.is_negative();
        (p, virt)
    });
    let e_minus = e_point(&b2m, &b3m, &a2m, &a3m).map(|p| {
        let virt = p.0.is_positive();
        (p, virt)
    });
    let sector_plus = (&a2p * &a2p - rat(2, 1) * &b3p).is_negative();
    let sector_minus = (&a2m * &a2m - rat(2, 1) * &b3m).is_negative();
    let infinity = classify_infinity(coeffs)?;
    let mut reasons = Vec::new();
    if conditions.is_empty() {
        reasons.push("no Theorem-1 center condition holds".into());
    }
    if let Some((p, false)) = &e_plus {
        reasons.push(format!("e+ = ({}, {}) is real (x+ >= 0)", p.0, p.1));
    }
    if let Some((p, false)) = &e_minus {
        reasons.push(format!("e- = ({}, {}) is real (x- <= 0)", p.0, p.1));
    }
    for pt in &infinity {
        if pt.obstructs_global {
            reasons.push(format!(
                "infinite singular point in {} ({}) is {}",
                pt.chart, pt.location, pt.kind
            ));
        }
    }
    if !sector_plus {
        reasons.push("(a2+)^2 - 2 b3+ >= 0: vertical direction is not two hyperbolic sectors".into());
    }
    if !sector_minus {
        reasons.push("(a2-)^2 - 2 b3- >= 0".into());
    }
    let verdict = if g1 || g2 {
        GlobalVerdict::Global
    } else {
        GlobalVerdict::NotGlobal
    };
    Ok(GlobalReport {
        conditions,
        g1,
        g2,
        e_plus,
        e_minus,
        sector_plus,
        sector_minus,
        infinity,
        verdict,
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{build_lienard, standard_vars};
    use crate::params::VarSet;

    fn coeffs(vals: [i64; 8]) -> LienardCoeffs {
        let v = VarSet::empty();
        LienardCoeffs::concrete(&v, vals.map(|n| rat(n, 1)))
    }

    #[test]
    fn condition_membership_examples() {
        // (a2+-, a3+-, b2-) = 0, b2+ = 1, b3- = 1 -> I (and nothing else)
        let c = coeffs([0, 0, 1, 0, 0, 0, 0, 1]);
        let m = match_center_condition(&c).unwrap();
        assert!(m.contains(&CenterCondition::I));
        assert!(!m.contains(&CenterCondition::II));
        // VI: a2+- = 0, a3- = -a3+ = -1, b2+- = 0, b3+- = 1 > 3/4
        let c = coeffs([0, 1, 0, 1, 0, -1, 0, 1]);
        let m = match_center_condition(&c).unwrap();
        assert_eq!(m.into_iter().collect::<Vec<_>>(), vec![CenterCondition::VI]);
        // IV at the Figure 2(c) values: a2+ = 1, a3+ = 2, b2+ = 1, b3+ = -2
        let c = coeffs([1, 2, 1, -2, 1, -2, -1, -2]);
        let m = match_center_condition(&c).unwrap();
        assert!(m.contains(&CenterCondition::IV));
    }

    #[test]
    fn scaling_invariance_of_conditions() {
        // time scaling induces (a, b) -> (c a, c^2 b), c > 0
        let samples = [
            [0i64, 0, 1, 0, 0, 0, 0, 1],
            [1, 2, 1, -2, 1, -2, -1, -2],
            [0, 1, 0, 1, 0, -1, 0, 1],
        ];
        for s in samples {
            let base = match_center_condition(&coeffs(s)).unwrap();
            for c in [rat(2, 1), rat(1, 3), rat(7, 5)] {
                let v = VarSet::empty();
                let scaled = LienardCoeffs::concrete(
                    &v,
                    [
                        &c * rat(s[0], 1),
                        &c * rat(s[1], 1),
                        &c * &c * rat(s[2], 1),
                        &c * &c * rat(s[3], 1),
                        &c * rat(s[4], 1),
                        &c * rat(s[5], 1),
                        &c * &c * rat(s[6], 1),
                        &c * &c * rat(s[7], 1),
                    ],
                );
                assert_eq!(match_center_condition(&scaled).unwrap(), base);
            }
        }
    }

    #[test]
    fn hamiltonian_certificate_condition_i() {
        let vars = standard_vars(&[]);
        let mut bind = std::collections::BTreeMap::new();
        for (n, q) in [
            ("a2p", 0i64),
            ("a3p", 0),
            ("a2m", 0),
            ("a3m", 0),
            ("b2m", 0),
        ] {
            bind.insert(
                n.to_string(),
                ParamRational::from_rational(&vars, rat(q, 1)),
            );
        }
        bind.insert("b2p".into(), ParamRational::from_rational(&vars, rat(1, 1)));
        bind.insert("b3p".into(), ParamRational::from_rational(&vars, rat(-2, 1)));
        bind.insert("b3m".into(), ParamRational::from_rational(&vars, rat(1, 1)));
        let sys = build_lienard(&vars, &LienardCoeffs::symbolic(&vars))
            .unwrap()
            .substitute(&bind)
            .unwrap();
        let cert = verify_first_integral(&sys).unwrap();
        assert_eq!(cert.kind, CertificateKind::HamiltonianMatching);
        assert!(cert.checked, "{}", cert.detail);
    }

    #[test]
    fn log_certificate_condition_iii() {
        // Figure 2(b): a3+ = 1, b2+ = 2, a3- = -2, b2- = -4 (h = 2)
        let vars = standard_vars(&[]);
        let c = LienardCoeffs::concrete(
            &vars,
            [
                rat(0, 1),
                rat(1, 1),
                rat(2, 1),
                rat(0, 1),
                rat(0, 1),
                rat(-2, 1),
                rat(-4, 1),
                rat(0, 1),
            ],
        );
        let sys = build_lienard(&vars, &c).unwrap();
        let cert = verify_first_integral(&sys).unwrap();
        assert_eq!(cert.kind, CertificateKind::LogFirstIntegral);
        assert!(cert.checked, "{}", cert.detail);
    }

    #[test]
    fn symmetry_certificate_condition_iv() {
        let vars = standard_vars(&[]);
        let c = LienardCoeffs::concrete(
            &vars,
            [
                rat(1, 1),
                rat(2, 1),
                rat(1, 1),
                rat(-2, 1),
                rat(1, 1),
                rat(-2, 1),
                rat(-1, 1),
                rat(-2, 1),
            ],
        );
        let sys = build_lienard(&vars, &c).unwrap();
        let cert = verify_symmetry(&sys, Axis::Y).unwrap();
        assert!(cert.checked, "{}", cert.detail);
        // a generic asymmetric system fails
        let c2 = LienardCoeffs::concrete(
            &vars,
            [
                rat(1, 1),
                rat(2, 1),
                rat(1, 1),
                rat(-2, 1),
                rat(1, 1),
                rat(3, 1),
                rat(-1, 1),
                rat(-2, 1),
            ],
        );
        let sys2 = build_lienard(&vars, &c2).unwrap();
        let cert2 = verify_symmetry(&sys2, Axis::Y).unwrap();
        assert!(!cert2.checked);
    }

    #[test]
    fn global_center_cases() {
        // G1 sample
        let c = coeffs([0, 0, 1, 1, 0, 0, 0, 1]);
        let r = check_global_center(&c).unwrap();
        assert_eq!(r.verdict, GlobalVerdict::Global);
        assert!(r.g1);
        // quadratic counterexample: G1+ cap G1- (b3 = 0) -> U2 node pair
        let c = coeffs([0, 0, 1, 0, 0, 0, -1, 0]);
        let r = check_global_center(&c).unwrap();
        assert_eq!(r.verdict, GlobalVerdict::NotGlobal);
        assert!(r
            .infinity
            .iter()
            .any(|p| p.obstructs_global && matches!(p.kind, PointKind::NodeStable | PointKind::NodeUnstable)));
        // sector violation: condition IV values with b3+ <= (a2+)^2 / 2
        let c = coeffs([2, 0, 1, 1, 2, 0, -1, 1]);
        let r = check_global_center(&c).unwrap();
        assert_eq!(r.verdict, GlobalVerdict::NotGlobal);
        assert!(!r.sector_plus);
    }

    #[test]
    fn infinity_classification_cases() {
        // (a2+)^2 - 2 b3+ < 0: only E1, a saddle
        let c = coeffs([1, 0, 0, 1, 1, 0, 0, 1]);
        let pts = classify_infinity(&c).unwrap();
        assert!(pts
            .iter()
            .any(|p| p.chart == "U2+" && p.kind == PointKind::Saddle));
        assert!(!pts.iter().any(|p| p.chart == "U1"));
        // a3+ != 0: node at u = b3/a3 in U1
        let c = coeffs([0, 2, 0, 4, 0, 0, 0, 1]);
        let pts = classify_infinity(&c).unwrap();
        assert!(pts
            .iter()
            .any(|p| p.chart == "U1" && p.location == "u = 2" && p.kind == PointKind::NodeUnstable));
        // (a2+)^2 = 2 b3+ != 0: saddle-node at E2
        let c = coeffs([2, 0, 0, 2, 0, 0, 0, 1]);
        let pts = classify_infinity(&c).unwrap();
        assert!(pts
            .iter()
            .any(|p| p.chart == "U2+" && p.kind == PointKind::SaddleNode));
    }
}
