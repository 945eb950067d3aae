//! Poincare-disc portrait data: orbits of the switching system projected to
//! the closed unit disc, the dashed switching line, and labeled equilibria
//! (finite and infinite). Portraits are qualitative; f64 is plenty.

use crate::error::Result;
use crate::numerics::ode::{integrate_switching, IntegrateOpts, State, SwitchingField};
use crate::system::SwitchingSystem;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct PortraitLabel {
    /// position in disc coordinates
    pub at: (f64, f64),
    pub text: String,
}

#[derive(Clone, Debug)]
pub struct Portrait {
    pub orbits: Vec<Vec<(f64, f64)>>,
    pub labels: Vec<PortraitLabel>,
    /// switching manifold endpoints in disc coordinates (drawn dashed)
    pub switching_line: ((f64, f64), (f64, f64)),
}

fn to_disc(s: &State<f64>) -> (f64, f64) {
    let n = (1.0 + s[0] * s[0] + s[1] * s[1]).sqrt();
    (s[0] / n, s[1] / n)
}

/// Integrate orbits from a ring of seeds (several radii and angles) and
/// project them to the disc.
pub fn compute_portrait(
    sys: &SwitchingSystem,
    values: &BTreeMap<String, f64>,
    labels: Vec<PortraitLabel>,
) -> Result<Portrait> {
    let field = SwitchingField::compile(sys, values, &0.0f64)?;
    let mut orbits = Vec::new();
    let radii = [0.3, 0.7, 1.2, 2.0, 3.5, 6.0];
    let angles = [0.0, 1.3, 2.4, 3.6, 4.9];
    let opts = IntegrateOpts {
        record: true,
        escape: 1e4,
        max_steps: 20_000,
        ..IntegrateOpts::new(&0.0f64, -10)
    };
    for r in radii {
        for a in angles {
            let start = [r * f64::cos(a), r * f64::sin(a)];
            for dir in [1.0f64, -1.0] {
                // time reversal via field negation: integrate the reversed
                // system forward
                let rsys = if dir > 0.0 {
                    sys.clone()
                } else {
                    reverse_time(sys)
                };
                let rfield = if dir > 0.0 {
                    None
                } else {
                    Some(SwitchingField::compile(&rsys, values, &0.0f64)?)
                };
                let fld = rfield.as_ref().unwrap_or(&field);
                let t_end = 8.0;
                match integrate_switching(fld, &start, &t_end, &opts) {
                    Ok(traj) => {
                        let pts: Vec<(f64, f64)> =
                            traj.samples.iter().map(|(_, s, _)| to_disc(s)).collect();
                        if pts.len() > 2 {
                            orbits.push(pts);
                        }
                    }
                    Err(_) => continue, // escaped or stiff: skip seed
                }
            }
        }
    }
    let switching_line = match sys.manifold {
        crate::system::Manifold::X => ((0.0, -1.0), (0.0, 1.0)),
        crate::system::Manifold::Y => ((-1.0, 0.0), (1.0, 0.0)),
    };
    Ok(Portrait {
        orbits,
        labels,
        switching_line,
    })
}

fn reverse_time(sys: &SwitchingSystem) -> SwitchingSystem {
    // (x, y, t) -> (x, y, -t): negate both components; halves keep their side
    SwitchingSystem::new(
        (sys.upper.0.neg(), sys.upper.1.neg()),
        (sys.lower.0.neg(), sys.lower.1.neg()),
        sys.manifold,
    )
    .expect("same shape")
}

/// Deterministic standalone SVG.
pub fn to_svg(p: &Portrait) -> String {
    let size = 640.0;
    let c = size / 2.0;
    let rad = size / 2.0 - 20.0;
    let px = |x: f64, y: f64| -> (f64, f64) { (c + x * rad, c - y * rad) };
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    ));
    s.push_str(&format!(
        "  <circle cx=\"{c}\" cy=\"{c}\" r=\"{rad}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n"
    ));
    let ((x1, y1), (x2, y2)) = p.switching_line;
    let (a1, b1) = px(x1, y1);
    let (a2, b2) = px(x2, y2);
    s.push_str(&format!(
        "  <line x1=\"{a1:.2}\" y1=\"{b1:.2}\" x2=\"{a2:.2}\" y2=\"{b2:.2}\" stroke=\"black\" stroke-dasharray=\"6,4\" stroke-width=\"1\"/>\n"
    ));
    for orbit in &p.orbits {
        let mut d = String::from("M");
        for (i, (x, y)) in orbit.iter().enumerate() {
            let (a, b) = px(*x, *y);
            if i == 0 {
                d.push_str(&format!("{a:.2},{b:.2}"));
            } else {
                d.push_str(&format!(" L{a:.2},{b:.2}"));
            }
        }
        s.push_str(&format!(
            "  <path d=\"{d}\" fill=\"none\" stroke=\"#1a56a0\" stroke-width=\"0.8\"/>\n"
        ));
    }
    for l in &p.labels {
        let (a, b) = px(l.at.0, l.at.1);
        s.push_str(&format!(
            "  <circle cx=\"{a:.2}\" cy=\"{b:.2}\" r=\"3\" fill=\"#b02020\"/>\n"
        ));
        s.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" font-family=\"monospace\">{}</text>\n",
            a + 5.0,
            b - 5.0,
            l.text
        ));
    }
    s.push_str("</svg>\n");
    s
}
