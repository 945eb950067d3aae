//! Switching planar polynomial systems (degree <= 3): Lienard and
//! perturbation constructors, the eps-scaling and reflection transforms, and
//! the nilpotent-origin classifier.

use crate::error::{Error, Result};
use crate::params::{ParamPoly, ParamRational, VarSet};
use crate::pipoly::PiPoly;
use crate::rational::Rational;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

pub const VAR_EPS: &str = "eps";
pub const VAR_X: &str = "x";
pub const VAR_Y: &str = "y";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Manifold {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Plus,
    Minus,
}

/// Two polynomial half vector fields separated by a coordinate axis. The
/// `upper` half governs the region where the manifold coordinate is >= 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchingSystem {
    pub upper: (ParamPoly, ParamPoly),
    pub lower: (ParamPoly, ParamPoly),
    pub manifold: Manifold,
}

impl SwitchingSystem {
    pub fn new(
        upper: (ParamPoly, ParamPoly),
        lower: (ParamPoly, ParamPoly),
        manifold: Manifold,
    ) -> Result<Self> {
        let vars = upper.0.vars().clone();
        for p in [&upper.1, &lower.0, &lower.1] {
            if p.vars() != &vars {
                return Err(Error::VariableMismatch(
                    vars.names().join(","),
                    p.vars().names().join(","),
                ));
            }
        }
        let sys = SwitchingSystem {
            upper,
            lower,
            manifold,
        };
        if sys.degree() > 3 {
            return Err(Error::UnsupportedMonomial(sys.degree()));
        }
        Ok(sys)
    }

    pub fn vars(&self) -> &VarSet {
        self.upper.0.vars()
    }

    pub fn degree(&self) -> u32 {
        let v = self.vars();
        let idxs = [v.index(VAR_X).unwrap(), v.index(VAR_Y).unwrap()];
        [&self.upper.0, &self.upper.1, &self.lower.0, &self.lower.1]
            .iter()
            .map(|p| p.degree_in(&idxs))
            .max()
            .unwrap()
    }

    /// The transformation (x, y, t) -> (x, -y, -t), swapping the halves.
    /// Defined on scaled systems (manifold y = 0); an involution.
    pub fn reflect(&self) -> Result<Self> {
        if self.manifold != Manifold::Y {
            return Err(Error::NotInNormalForm(
                "reflect expects the scaled system (manifold y = 0)".into(),
            ));
        }
        let flip = |p: &ParamPoly, negate: bool| -> ParamPoly {
            let v = p.vars().clone();
            let yi = v.index(VAR_Y).unwrap();
            ParamPoly::from_terms(
                &v,
                p.terms().map(|(m, c)| {
                    let mut sign_flip = m[yi] % 2 == 1;
                    if negate {
                        sign_flip = !sign_flip;
                    }
                    (m.clone(), if sign_flip { -c } else { c.clone() })
                }),
            )
        };
        // new upper half = (-f_lower(x,-y), g_lower(x,-y)); lower likewise from upper
        SwitchingSystem::new(
            (flip(&self.lower.0, true), flip(&self.lower.1, false)),
            (flip(&self.upper.0, true), flip(&self.upper.1, false)),
            Manifold::Y,
        )
    }

    /// (x, y, t) -> (eps^2 y, eps^3 x, t / eps): sends the perturbed Lienard
    /// family (manifold x = 0) to the rotated normal form (manifold y = 0).
    /// Errors if any monomial would carry a negative eps power.
    pub fn scale(&self) -> Result<Self> {
        if self.manifold != Manifold::X {
            return Err(Error::NotInNormalForm(
                "scale expects manifold x = 0".into(),
            ));
        }
        let v = self.vars().clone();
        let (xi, yi, ei) = (
            v.index(VAR_X).unwrap(),
            v.index(VAR_Y).unwrap(),
            v.index(VAR_EPS).unwrap(),
        );
        // old xdot feeds new ydot with eps shift -3; old ydot feeds new xdot
        // with shift -4; monomial x^i y^j goes to y^i x^j with weight 2i+3j.
        let transform = |p: &ParamPoly, shift: i64| -> Result<ParamPoly> {
            let mut terms: Vec<(crate::params::Monomial, PiPoly)> = Vec::new();
            for (m, c) in p.terms() {
                let (i, j, e) = (m[xi] as i64, m[yi] as i64, m[ei] as i64);
                let new_e = e + 2 * i + 3 * j + shift;
                if new_e < 0 {
                    return Err(Error::InconsistentWeights(format!(
                        "term {} in {}",
                        c, p
                    )));
                }
                let mut exp = m.to_vec();
                exp[xi] = j as u16;
                exp[yi] = i as u16;
                exp[ei] = new_e as u16;
                terms.push((exp.into(), c.clone()));
            }
            Ok(ParamPoly::from_terms(&v, terms))
        };
        let up = (transform(&self.upper.1, -4)?, transform(&self.upper.0, -3)?);
        let lo = (transform(&self.lower.1, -4)?, transform(&self.lower.0, -3)?);
        SwitchingSystem::new(up, lo, Manifold::Y)
    }

    /// Substitute parameter bindings into all four components.
    pub fn substitute(&self, bindings: &BTreeMap<String, ParamRational>) -> Result<Self> {
        let sub = |p: &ParamPoly| p.substitute_poly(bindings);
        SwitchingSystem::new(
            (sub(&self.upper.0)?, sub(&self.upper.1)?),
            (sub(&self.lower.0)?, sub(&self.lower.1)?),
            self.manifold,
        )
    }
}

/// Lienard data for both halves: F_side(x) = sum a_i x^i, g_side(x) = sum b_i x^i.
#[derive(Clone, Debug)]
pub struct LienardCoeffs {
    pub a_plus: [ParamRational; 4],
    pub b_plus: [ParamRational; 4],
    pub a_minus: [ParamRational; 4],
    pub b_minus: [ParamRational; 4],
}

impl LienardCoeffs {
    /// Cubic nilpotent family: a0 = a1 = b0 = b1 = 0 on both sides.
    pub fn cubic(
        vars: &VarSet,
        a2p: ParamRational,
        a3p: ParamRational,
        b2p: ParamRational,
        b3p: ParamRational,
        a2m: ParamRational,
        a3m: ParamRational,
        b2m: ParamRational,
        b3m: ParamRational,
    ) -> Self {
        let z = || ParamRational::zero(vars);
        LienardCoeffs {
            a_plus: [z(), z(), a2p, a3p],
            b_plus: [z(), z(), b2p, b3p],
            a_minus: [z(), z(), a2m, a3m],
            b_minus: [z(), z(), b2m, b3m],
        }
    }

    /// Fully symbolic cubic family over the standard parameter names.
    pub fn symbolic(vars: &VarSet) -> Self {
        let v = |n: &str| ParamRational::var(vars, n);
        Self::cubic(
            vars,
            v("a2p"),
            v("a3p"),
            v("b2p"),
            v("b3p"),
            v("a2m"),
            v("a3m"),
            v("b2m"),
            v("b3m"),
        )
    }

    /// Concrete rational cubic family (empty varset not required; values are
    /// embedded as constants).
    pub fn concrete(vars: &VarSet, vals: [Rational; 8]) -> Self {
        let [a2p, a3p, b2p, b3p, a2m, a3m, b2m, b3m] = vals;
        let c = |q: Rational| ParamRational::from_rational(vars, q);
        Self::cubic(
            vars,
            c(a2p),
            c(a3p),
            c(b2p),
            c(b3p),
            c(a2m),
            c(a3m),
            c(b2m),
            c(b3m),
        )
    }

    pub fn side(&self, s: Side) -> (&[ParamRational; 4], &[ParamRational; 4]) {
        match s {
            Side::Plus => (&self.a_plus, &self.b_plus),
            Side::Minus => (&self.a_minus, &self.b_minus),
        }
    }

    /// All eight cubic coefficients as concrete rationals, if possible:
    /// (a2p, a3p, b2p, b3p, a2m, a3m, b2m, b3m).
    pub fn concrete_values(&self) -> Option<[Rational; 8]> {
        Some([
            self.a_plus[2].as_rational()?,
            self.a_plus[3].as_rational()?,
            self.b_plus[2].as_rational()?,
            self.b_plus[3].as_rational()?,
            self.a_minus[2].as_rational()?,
            self.a_minus[3].as_rational()?,
            self.b_minus[2].as_rational()?,
            self.b_minus[3].as_rational()?,
        ])
    }
}

/// Build the nilpotent switching Lienard system (manifold x = 0):
/// xdot = y - F_side(x), ydot = -g_side(x).
pub fn build_lienard(vars: &VarSet, coeffs: &LienardCoeffs) -> Result<SwitchingSystem> {
    for (name, c) in [
        ("a0", &coeffs.a_plus[0]),
        ("a1", &coeffs.a_plus[1]),
        ("b0", &coeffs.b_plus[0]),
        ("b1", &coeffs.b_plus[1]),
        ("a0-", &coeffs.a_minus[0]),
        ("a1-", &coeffs.a_minus[1]),
        ("b0-", &coeffs.b_minus[0]),
        ("b1-", &coeffs.b_minus[1]),
    ] {
        if !c.is_zero() {
            return Err(Error::NotNilpotent(format!("{name} must vanish")));
        }
    }
    let x = ParamPoly::var(vars, VAR_X);
    let y = ParamPoly::var(vars, VAR_Y);
    let half = |a: &[ParamRational; 4], b: &[ParamRational; 4]| -> Result<(ParamPoly, ParamPoly)> {
        let mut fx = ParamPoly::zero(vars);
        let mut gx = ParamPoly::zero(vars);
        for i in 2..=3usize {
            let ai = a[i]
                .as_poly()
                .ok_or_else(|| Error::Other("Lienard coefficient must be polynomial".into()))?;
            let bi = b[i]
                .as_poly()
                .ok_or_else(|| Error::Other("Lienard coefficient must be polynomial".into()))?;
            fx = fx.add(&ai.mul(&x.pow(i as u32))?)?;
            gx = gx.add(&bi.mul(&x.pow(i as u32))?)?;
        }
        Ok((y.sub(&fx)?, gx.neg()))
    };
    SwitchingSystem::new(
        half(&coeffs.a_plus, &coeffs.b_plus)?,
        half(&coeffs.a_minus, &coeffs.b_minus)?,
        Manifold::X,
    )
}

/// Perturbation layers added to the nilpotent Lienard family, in the
/// convention whose eps-scaling reproduces the rotated normal forms verbatim:
///
///   xdot += theta1 eps x - sum_k eps^k P_k(x) + sum_k eps^{k+1} delta_k x
///           [+ d eps^E on the lower half]
///   ydot += -eps^2 x + theta2 eps y - sum_k eps^k Q_k(x)
///
/// with P_k = p_k2 x^2 + p_k3 x^3 and Q_k likewise.
#[derive(Clone, Debug, Default)]
pub struct PerturbationScheme {
    pub unfolding: bool,
    pub theta1: Option<ParamPoly>,
    pub theta2: Option<ParamPoly>,
    /// (k, monomial degree in {2,3}, side) -> coefficient
    pub p: BTreeMap<(u32, u32, Side), ParamPoly>,
    pub q: BTreeMap<(u32, u32, Side), ParamPoly>,
    /// k -> delta_k (enters both halves at eps^{k+1})
    pub deltas: BTreeMap<u32, ParamPoly>,
    /// constant term on the lower half's xdot: coefficient and eps exponent
    pub d_const: Option<(ParamPoly, u32)>,
}

impl PerturbationScheme {
    pub fn unfolding_only() -> Self {
        PerturbationScheme {
            unfolding: true,
            ..Default::default()
        }
    }

    /// The section-3 scheme: eps^2-order P/Q perturbations with symbolic
    /// coefficients p22*, p23*, q22*, q23*.
    pub fn order2_symbolic(vars: &VarSet) -> Self {
        let mut s = Self::unfolding_only();
        for side in [Side::Plus, Side::Minus] {
            let sfx = if side == Side::Plus { "p" } else { "m" };
            for deg in [2u32, 3] {
                s.p.insert((2, deg, side), ParamPoly::var(vars, &format!("p2{deg}{sfx}")));
                s.q.insert((2, deg, side), ParamPoly::var(vars, &format!("q2{deg}{sfx}")));
            }
        }
        s
    }

    /// The section-5 scheme: P/Q layers k = 1..5, deltas k = 1..6, constant d
    /// at eps^9 on the lower half.
    pub fn bifurcation_symbolic(vars: &VarSet, with_d: bool) -> Self {
        let mut s = Self::unfolding_only();
        for side in [Side::Plus, Side::Minus] {
            let sfx = if side == Side::Plus { "p" } else { "m" };
            for k in 1..=5u32 {
                for deg in [2u32, 3] {
                    s.p.insert((k, deg, side), ParamPoly::var(vars, &format!("p{k}{deg}{sfx}")));
                    s.q.insert((k, deg, side), ParamPoly::var(vars, &format!("q{k}{deg}{sfx}")));
                }
            }
        }
        for k in 1..=6u32 {
            s.deltas.insert(k, ParamPoly::var(vars, &format!("delta{k}")));
        }
        if with_d {
            s.d_const = Some((ParamPoly::var(vars, "d"), 9));
        }
        s
    }
}

/// Attach a perturbation scheme to a nilpotent Lienard system (manifold x = 0).
pub fn apply_perturbation(
    sys: &SwitchingSystem,
    scheme: &PerturbationScheme,
) -> Result<SwitchingSystem> {
    if sys.manifold != Manifold::X {
        return Err(Error::NotInNormalForm("perturbation expects manifold x = 0".into()));
    }
    let vars = sys.vars().clone();
    check_lienard_shape(sys)?;
    for key in scheme.p.keys().chain(scheme.q.keys()) {
        if key.1 != 2 && key.1 != 3 {
            return Err(Error::UnsupportedMonomial(key.1));
        }
    }
    let x = ParamPoly::var(&vars, VAR_X);
    let y = ParamPoly::var(&vars, VAR_Y);
    let eps = ParamPoly::var(&vars, VAR_EPS);
    let eps_pow = |k: u32| eps.pow(k);

    let mut upper = sys.upper.clone();
    let mut lower = sys.lower.clone();
    for (side, half) in [(Side::Plus, &mut upper), (Side::Minus, &mut lower)] {
        if scheme.unfolding {
            half.1 = half.1.sub(&eps_pow(2).mul(&x)?)?;
        }
        if let Some(t1) = &scheme.theta1 {
            half.0 = half.0.add(&t1.mul(&eps)?.mul(&x)?)?;
        }
        if let Some(t2) = &scheme.theta2 {
            half.1 = half.1.add(&t2.mul(&eps)?.mul(&y)?)?;
        }
        for (&(k, deg, s), c) in &scheme.p {
            if s == side {
                half.0 = half.0.sub(&c.mul(&eps_pow(k))?.mul(&x.pow(deg))?)?;
            }
        }
        for (&(k, deg, s), c) in &scheme.q {
            if s == side {
                half.1 = half.1.sub(&c.mul(&eps_pow(k))?.mul(&x.pow(deg))?)?;
            }
        }
        for (&k, dk) in &scheme.deltas {
            half.0 = half.0.add(&dk.mul(&eps_pow(k + 1))?.mul(&x)?)?;
        }
    }
    if let Some((d, e)) = &scheme.d_const {
        lower.0 = lower.0.add(&d.mul(&eps_pow(*e))?)?;
    }
    SwitchingSystem::new(upper, lower, Manifold::X)
}

fn check_lienard_shape(sys: &SwitchingSystem) -> Result<()> {
    let v = sys.vars();
    let (xi, yi, ei) = (
        v.index(VAR_X).unwrap(),
        v.index(VAR_Y).unwrap(),
        v.index(VAR_EPS).unwrap(),
    );
    for (label, p, is_xdot) in [
        ("upper xdot", &sys.upper.0, true),
        ("upper ydot", &sys.upper.1, false),
        ("lower xdot", &sys.lower.0, true),
        ("lower ydot", &sys.lower.1, false),
    ] {
        for (m, _) in p.terms() {
            if m[ei] > 0 {
                return Err(Error::NotNilpotent(format!(
                    "{label} already carries eps terms"
                )));
            }
            let ok = if is_xdot {
                (m[yi] == 1 && m[xi] == 0) || (m[yi] == 0 && (2..=3).contains(&m[xi]))
            } else {
                m[yi] == 0 && (2..=3).contains(&m[xi])
            };
            if !ok {
                return Err(Error::NotNilpotent(format!(
                    "{label} is not in nilpotent Lienard form"
                )));
            }
        }
    }
    Ok(())
}

/// Local type of the nilpotent origin of one half, per the printed
/// classification table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OriginKind {
    CenterOrFocus,
    Saddle,
    Cusp,
    Node,
    SaddleNode,
    HyperbolicPlusElliptic,
}

#[derive(Clone, Debug)]
pub struct OriginClass {
    pub kind: OriginKind,
    /// Multiplicity of the singular point (= m, least index with b_m != 0).
    pub multiplicity: u32,
    pub delta: Option<Rational>,
    /// Monodromic flag per the Xi_1 set.
    pub monodromic: bool,
    /// Cusp flag per the Xi_2 set.
    pub cusp: bool,
    /// Monodromic-with-multiplicity-three test (the section-3 conditions).
    pub mult3_monodromic: bool,
}

/// Classify a single Lienard half (F, g) at the origin. Coefficients must be
/// concrete rationals; inequalities on symbols are refused.
pub fn classify_origin(a: &[ParamRational; 4], b: &[ParamRational; 4]) -> Result<OriginClass> {
    let conc = |c: &ParamRational| -> Result<Rational> {
        c.as_rational()
            .ok_or_else(|| Error::UndecidableAtSymbol(format!("{c}")))
    };
    let av: Vec<Rational> = a.iter().map(conc).collect::<Result<_>>()?;
    let bv: Vec<Rational> = b.iter().map(conc).collect::<Result<_>>()?;
    if !av[0].is_zero() || !av[1].is_zero() || !bv[0].is_zero() || !bv[1].is_zero() {
        return Err(Error::NotNilpotent(
            "classification requires a0 = a1 = b0 = b1 = 0".into(),
        ));
    }
    let n = (2..=3).find(|&i| !av[i].is_zero());
    let m = match (2..=3).find(|&i| !bv[i].is_zero()) {
        Some(m) => m,
        None => return Err(Error::NonIsolated),
    };
    let bm = &bv[m];
    let mult3 = {
        // (3-1)/(3-5): b2 = 0 and either (a2 = 0, b3 > 3/4 a3^2)
        // or (a2 != 0, b3 > 1/3 a2^2)
        bv[2].is_zero()
            && if av[2].is_zero() {
                bv[3] > &av[3] * &av[3] * Rational::new(3.into(), 4.into())
            } else {
                bv[3] > &av[2] * &av[2] * Rational::new(1.into(), 3.into())
            }
    };
    let (kind, delta) = match n {
        None => (
            if m % 2 == 1 {
                if bm.is_positive() {
                    OriginKind::CenterOrFocus
                } else {
                    OriginKind::Saddle
                }
            } else {
                OriginKind::Cusp
            },
            None,
        ),
        Some(n) => {
            let an = &av[n];
            let delta = Rational::from_integer((-4 * (n as i64 + 1)).into()) * bm
                + Rational::from_integer(((n * n) as i64).into()) * an * an;
            let kind = if m % 2 == 1 {
                let k = (m - 1) / 2;
                if bm.is_negative() {
                    OriginKind::Saddle
                } else if k > n - 1 || (k == n - 1 && !delta.is_negative()) {
                    if n % 2 == 0 {
                        OriginKind::HyperbolicPlusElliptic
                    } else {
                        OriginKind::Node
                    }
                } else {
                    OriginKind::CenterOrFocus
                }
            } else {
                let k = m / 2;
                if n < k {
                    OriginKind::SaddleNode
                } else {
                    OriginKind::Cusp
                }
            };
            (kind, Some(delta))
        }
    };
    // Xi_1 (verbatim): monodromic configurations with m = 2k+1, b_m > 0
    let monodromic = m % 2 == 1
        && bm.is_positive()
        && match n {
            None => true,
            Some(n) => {
                let k = (m - 1) / 2;
                k > n || (k == n && delta.as_ref().is_some_and(|d| d.is_negative()))
            }
        };
    // Xi_2 (verbatim): cusp configurations with m = 2k
    let cusp = m % 2 == 0
        && match n {
            None => true,
            Some(n) => m / 2 <= n,
        };
    Ok(OriginClass {
        kind,
        multiplicity: m as u32,
        delta,
        monodromic,
        cusp,
        mult3_monodromic: mult3,
    })
}

/// Monodromy of the switching origin per the section-3 combinations: each
/// half is either a cusp with the admissible b2 sign or a multiplicity-three
/// monodromic point.
pub fn switching_origin_monodromic(coeffs: &LienardCoeffs) -> Result<bool> {
    let conc = |c: &ParamRational| -> Result<Rational> {
        c.as_rational()
            .ok_or_else(|| Error::UndecidableAtSymbol(format!("{c}")))
    };
    let b2p = conc(&coeffs.b_plus[2])?;
    let b2m = conc(&coeffs.b_minus[2])?;
    let plus_ok = if b2p.is_positive() {
        true
    } else if b2p.is_zero() {
        classify_origin(&coeffs.a_plus, &coeffs.b_plus)?.mult3_monodromic
    } else {
        false
    };
    let minus_ok = if b2m.is_negative() {
        true
    } else if b2m.is_zero() {
        classify_origin(&coeffs.a_minus, &coeffs.b_minus)?.mult3_monodromic
    } else {
        false
    };
    Ok(plus_ok && minus_ok)
}

/// Standard variable set for the cubic family plus a perturbation scheme.
pub fn standard_vars(extra: &[&str]) -> VarSet {
    let mut names: Vec<String> = vec![
        VAR_EPS.into(),
        VAR_X.into(),
        VAR_Y.into(),
        "a2p".into(),
        "a3p".into(),
        "b2p".into(),
        "b3p".into(),
        "a2m".into(),
        "a3m".into(),
        "b2m".into(),
        "b3m".into(),
    ];
    names.extend(extra.iter().map(|s| s.to_string()));
    VarSet::new(names)
}

/// Variable names used by the section-5 bifurcation scheme.
pub fn bifurcation_var_names(with_d: bool) -> Vec<String> {
    let mut names = Vec::new();
    for k in 1..=5u32 {
        for deg in [2u32, 3] {
            for sfx in ["p", "m"] {
                names.push(format!("p{k}{deg}{sfx}"));
                names.push(format!("q{k}{deg}{sfx}"));
            }
        }
    }
    for k in 1..=6u32 {
        names.push(format!("delta{k}"));
    }
    if with_d {
        names.push("d".into());
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn symbolic_34() -> SwitchingSystem {
        // the order-2 perturbed, scaled family
        let extra: Vec<String> = ["p22p", "p23p", "q22p", "q23p", "p22m", "p23m", "q22m", "q23m"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let extra_refs: Vec<&str> = extra.iter().map(|s| s.as_str()).collect();
        let vars = standard_vars(&extra_refs);
        let lienard = build_lienard(&vars, &LienardCoeffs::symbolic(&vars)).unwrap();
        let pert = apply_perturbation(&lienard, &PerturbationScheme::order2_symbolic(&vars)).unwrap();
        pert.scale().unwrap()
    }

    #[test]
    fn scaled_family_matches_rotated_normal_form() {
        // upper xdot = -y - (b2p + q22p e^2) y^2 - (b3p e^2 + q23p e^4) y^3
        // upper ydot =  x - (a2p e + p22p e^3) y^2 - (a3p e^3 + p23p e^5) y^3
        let sys = symbolic_34();
        let v = sys.vars().clone();
        let var = |n: &str| ParamPoly::var(&v, n);
        let e = var(VAR_EPS);
        let x = var(VAR_X);
        let y = var(VAR_Y);
        let y2 = y.pow(2);
        let y3 = y.pow(3);
        let expect_up0 = y
            .neg()
            .sub(&var("b2p").add(&var("q22p").mul(&e.pow(2)).unwrap()).unwrap().mul(&y2).unwrap())
            .unwrap()
            .sub(
                &var("b3p")
                    .mul(&e.pow(2))
                    .unwrap()
                    .add(&var("q23p").mul(&e.pow(4)).unwrap())
                    .unwrap()
                    .mul(&y3)
                    .unwrap(),
            )
            .unwrap();
        assert_eq!(sys.upper.0, expect_up0);
        let expect_up1 = x
            .sub(
                &var("a2p")
                    .mul(&e)
                    .unwrap()
                    .add(&var("p22p").mul(&e.pow(3)).unwrap())
                    .unwrap()
                    .mul(&y2)
                    .unwrap(),
            )
            .unwrap()
            .sub(
                &var("a3p")
                    .mul(&e.pow(3))
                    .unwrap()
                    .add(&var("p23p").mul(&e.pow(5)).unwrap())
                    .unwrap()
                    .mul(&y3)
                    .unwrap(),
            )
            .unwrap();
        assert_eq!(sys.upper.1, expect_up1);
        assert_eq!(sys.manifold, Manifold::Y);
    }

    #[test]
    fn scale_matches_direct_substitution_oracle() {
        // independent monomial-by-monomial oracle: substitute x -> e^2 y,
        // y -> e^3 x into each component, multiply xdot by e^-3 (it becomes
        // the new ydot) and ydot by e^-4, on the unperturbed system.
        let vars = standard_vars(&[]);
        let sys = build_lienard(&vars, &LienardCoeffs::symbolic(&vars)).unwrap();
        let pert = apply_perturbation(&sys, &PerturbationScheme::unfolding_only()).unwrap();
        let scaled = pert.scale().unwrap();
        let e = ParamPoly::var(&vars, VAR_EPS);
        let x = ParamPoly::var(&vars, VAR_X);
        let y = ParamPoly::var(&vars, VAR_Y);
        let subst = |p: &ParamPoly| -> ParamPoly {
            let mut b = BTreeMap::new();
            b.insert(
                VAR_X.to_string(),
                ParamRational::from_poly(e.pow(2).mul(&y).unwrap()),
            );
            b.insert(
                VAR_Y.to_string(),
                ParamRational::from_poly(e.pow(3).mul(&x).unwrap()),
            );
            p.substitute_poly(&b).unwrap()
        };
        // new ydot * e^3 must equal subst(old xdot)
        assert_eq!(scaled.upper.1.mul(&e.pow(3)).unwrap(), subst(&pert.upper.0));
        assert_eq!(scaled.upper.0.mul(&e.pow(4)).unwrap(), subst(&pert.upper.1));
        assert_eq!(scaled.lower.1.mul(&e.pow(3)).unwrap(), subst(&pert.lower.0));
        assert_eq!(scaled.lower.0.mul(&e.pow(4)).unwrap(), subst(&pert.lower.1));
    }

    #[test]
    fn scale_undo_roundtrip() {
        // scaling followed by eps := 1 is the coordinate swap of the original
        let vars = standard_vars(&[]);
        let sys = build_lienard(&vars, &LienardCoeffs::symbolic(&vars)).unwrap();
        let pert = apply_perturbation(&sys, &PerturbationScheme::unfolding_only()).unwrap();
        let scaled = pert.scale().unwrap();
        let mut b = BTreeMap::new();
        b.insert(
            VAR_EPS.to_string(),
            ParamRational::from_rational(&vars, rat(1, 1)),
        );
        let at1 = |p: &ParamPoly| p.substitute_poly(&b).unwrap();
        let swap = |p: &ParamPoly| -> ParamPoly {
            let mut sb = BTreeMap::new();
            sb.insert(VAR_X.to_string(), ParamRational::var(&vars, VAR_Y));
            sb.insert(VAR_Y.to_string(), ParamRational::var(&vars, VAR_X));
            p.substitute_poly(&sb).unwrap()
        };
        assert_eq!(at1(&scaled.upper.1), swap(&at1(&pert.upper.0)));
        assert_eq!(at1(&scaled.upper.0), swap(&at1(&pert.upper.1)));
    }

    #[test]
    fn reflect_is_involution() {
        let sys = symbolic_34();
        assert_eq!(sys.reflect().unwrap().reflect().unwrap(), sys);
    }

    #[test]
    fn reflect_fixes_x_axis_symmetric_smooth_system() {
        // smooth system symmetric about the x-axis: xdot even in y is absent,
        // A_{i,2k} = B_{i,2k+1} = 0; reflection returns the same system with
        // halves exchanged (here both halves identical).
        let vars = VarSet::new([VAR_EPS, VAR_X, VAR_Y, "c"]);
        let x = ParamPoly::var(&vars, VAR_X);
        let y = ParamPoly::var(&vars, VAR_Y);
        let c = ParamPoly::var(&vars, "c");
        // xdot = -y + c x y (odd in y), ydot = x + c x^2 (even in y)
        let f = y.neg().add(&c.mul(&x).unwrap().mul(&y).unwrap()).unwrap();
        let g = x.add(&c.mul(&x.pow(2)).unwrap()).unwrap();
        let sys =
            SwitchingSystem::new((f.clone(), g.clone()), (f, g), Manifold::Y).unwrap();
        assert_eq!(sys.reflect().unwrap(), sys);
    }

    #[test]
    fn rejects_nonnilpotent() {
        let vars = standard_vars(&[]);
        let mut c = LienardCoeffs::symbolic(&vars);
        c.a_plus[1] = ParamRational::from_rational(&vars, rat(1, 1));
        assert!(matches!(
            build_lienard(&vars, &c),
            Err(Error::NotNilpotent(_))
        ));
    }

    #[test]
    fn classify_table_rows() {
        let vars = VarSet::empty();
        let z = || ParamRational::zero(&vars);
        let c = |n: i64, d: i64| ParamRational::from_rational(&vars, rat(n, d));
        // a_n = 0, m = 3 odd, b3 > 0 -> center or focus
        let cls = classify_origin(&[z(), z(), z(), z()], &[z(), z(), z(), c(1, 1)]).unwrap();
        assert_eq!(cls.kind, OriginKind::CenterOrFocus);
        assert!(cls.monodromic);
        assert_eq!(cls.multiplicity, 3);
        // m = 2 even -> cusp (both for b2 > 0 and b2 < 0)
        for s in [1, -1] {
            let cls = classify_origin(
                &[z(), z(), c(1, 1), z()],
                &[z(), z(), c(s, 1), z()],
            )
            .unwrap();
            assert_eq!(cls.kind, OriginKind::Cusp);
            assert!(cls.cusp);
            assert_eq!(cls.multiplicity, 2);
        }
        // a2 = b2 = 0, b3 > 3/4 a3^2 -> multiplicity-three monodromic
        let cls = classify_origin(
            &[z(), z(), z(), c(1, 1)],
            &[z(), z(), z(), c(1, 1)],
        )
        .unwrap();
        assert!(cls.mult3_monodromic);
        let cls = classify_origin(
            &[z(), z(), z(), c(2, 1)],
            &[z(), z(), z(), c(1, 1)],
        )
        .unwrap();
        assert!(!cls.mult3_monodromic); // b3 = 1 < 3/4 * 4
        // m odd, b_m < 0 -> saddle
        let cls = classify_origin(&[z(), z(), z(), z()], &[z(), z(), z(), c(-1, 1)]).unwrap();
        assert_eq!(cls.kind, OriginKind::Saddle);
        // g = 0 -> non-isolated
        assert!(matches!(
            classify_origin(&[z(), z(), c(1, 1), z()], &[z(), z(), z(), z()]),
            Err(Error::NonIsolated)
        ));
        // symbolic input -> undecidable
        let sv = VarSet::new(["b3p"]);
        let sz = || ParamRational::zero(&sv);
        assert!(matches!(
            classify_origin(
                &[sz(), sz(), sz(), sz()],
                &[sz(), sz(), sz(), ParamRational::var(&sv, "b3p")]
            ),
            Err(Error::UndecidableAtSymbol(_))
        ));
    }
}
