use std::f64::consts::PI;

use serde::Serialize;

use super::curve::{cross, ImmersedCurve};
use super::FlowError;
use crate::novikov::NovikovSeries;
use crate::planes::{crossing_data, plane_from_angles, C64};

/// Crossings with |sin φ| at or below this are treated as tangencies.
pub const ANGLE_TOL: f64 = 1e-6;

/// One branch of the curve through a crossing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sheet {
    pub component: usize,
    pub edge: usize,
    /// Position along the edge in [0, 1).
    pub param: f64,
    pub theta: f64,
    pub potential: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    /// Identity kept while the crossing persists under the flow; 0 until tracked.
    pub id: u64,
    pub point: C64,
    /// The plus sheet first.
    pub sheets: [Sheet; 2],
    /// Characteristic angle from the plus line to the minus line, in (0, π).
    pub angle: f64,
    /// (μ₊₋, μ₋₊), only for graded curves.
    pub degrees: Option<(i64, i64)>,
    pub cochain: Option<NovikovSeries>,
}

impl Crossing {
    pub fn theta_plus(&self) -> f64 {
        self.sheets[0].theta
    }

    pub fn theta_minus(&self) -> f64 {
        self.sheets[1].theta
    }

    /// θ₋ − θ₊, the rate at which a cochain exponent moves.
    pub fn rate(&self) -> f64 {
        self.theta_minus() - self.theta_plus()
    }

    /// f₊(p) − f₋(p) in exact mode.
    pub fn potential_gap(&self) -> Option<f64> {
        Some(self.sheets[0].potential? - self.sheets[1].potential?)
    }

    pub fn has_degree_one(&self) -> bool {
        self.degrees.is_some_and(|(d, _)| d == 1)
    }
}

struct Segment {
    component: usize,
    edge: usize,
    a: C64,
    b: C64,
}

/// Intersection parameters (s, u) of a + s(b−a) and c + u(d−c) on [0,1)².
fn intersect(a: C64, b: C64, c: C64, d: C64) -> Result<Option<(f64, f64)>, FlowError> {
    let r = b - a;
    let w = d - c;
    let denom = cross(r, w);
    let qp = c - a;
    if denom.abs() <= 1e-14 * r.norm() * w.norm() {
        // parallel: only an overlap is a problem
        if cross(qp, r).abs() <= 1e-14 * r.norm() * qp.norm().max(r.norm()) {
            let t0 = (qp.re * r.re + qp.im * r.im) / r.norm_sqr();
            let t1 = ((d - a).re * r.re + (d - a).im * r.im) / r.norm_sqr();
            // touching end to end is fine, a shared stretch is not
            if t0.max(t1).min(1.0) - t0.min(t1).max(0.0) > 1e-12 {
                return Err(FlowError::Degenerate { x: c.re, y: c.im, angle: 0.0 });
            }
        }
        return Ok(None);
    }
    let s = cross(qp, w) / denom;
    let u = cross(qp, r) / denom;
    if (0.0..1.0).contains(&s) && (0.0..1.0).contains(&u) {
        Ok(Some((s, u)))
    } else {
        Ok(None)
    }
}

fn adjacent(curve: &ImmersedCurve, x: &Segment, y: &Segment) -> bool {
    if x.component != y.component {
        return false;
    }
    let n = curve.components[x.component].len();
    let gap = (x.edge + n - y.edge) % n;
    gap == 1 || gap == n - 1 || gap == 0
}

/// Consecutive edges of one component, with `y` translated back by `shift`.
fn joined(x: &Segment, y: &Segment, shift: C64) -> bool {
    let tol = 1e-9 * (x.b - x.a).norm().min((y.b - y.a).norm());
    x.component == y.component && ((x.b - y.a + shift).norm() <= tol || (x.a - y.b + shift).norm() <= tol)
}

fn make_crossing(curve: &ImmersedCurve, x: &Segment, s: f64, y: &Segment, u: f64, point: C64) -> Result<Crossing, FlowError> {
    let sheet = |seg: &Segment, param: f64| {
        let c = &curve.components[seg.component];
        Sheet {
            component: seg.component,
            edge: seg.edge,
            param,
            theta: c.theta[seg.edge],
            potential: c.potential_at(seg.edge, seg.a + (seg.b - seg.a) * param),
        }
    };
    let (s0, s1) = (sheet(x, s), sheet(y, u));
    let sin = cross((x.b - x.a).unscale((x.b - x.a).norm()), (y.b - y.a).unscale((y.b - y.a).norm()));
    if sin.abs() <= ANGLE_TOL {
        return Err(FlowError::Degenerate { x: point.re, y: point.im, angle: sin.abs().asin() });
    }
    if !curve.graded {
        let angle = (s1.theta - s0.theta).rem_euclid(PI);
        return Ok(Crossing { id: 0, point, sheets: [s0, s1], angle, degrees: None, cochain: None });
    }
    let line = |t: f64| plane_from_angles(&[t], t);
    let forward = crossing_data(&line(s0.theta)?, &line(s1.theta)?)?;
    let (sheets, data) = if forward.mu_plus_minus == 1 || (forward.mu_minus_plus != 1 && forward.mu_plus_minus > forward.mu_minus_plus) {
        ([s0, s1], forward)
    } else {
        let back = crossing_data(&line(s1.theta)?, &line(s0.theta)?)?;
        ([s1, s0], back)
    };
    Ok(Crossing {
        id: 0,
        point,
        sheets,
        angle: data.angles[0],
        degrees: Some((data.mu_plus_minus, data.mu_minus_plus)),
        cochain: None,
    })
}

/// All transverse self-intersections of the curve, with sheet phases,
/// potentials and degrees.
pub fn self_intersections(curve: &ImmersedCurve) -> Result<Vec<Crossing>, FlowError> {
    let mut segs = Vec::with_capacity(curve.vertex_count());
    for (ci, c) in curve.components.iter().enumerate() {
        for k in 0..c.len() {
            segs.push(Segment { component: ci, edge: k, a: c.points[k], b: c.at(k as isize + 1) });
        }
    }
    let mut out = Vec::new();
    if curve.ambient.is_plane() {
        let key = |s: &Segment| (s.a.re.min(s.b.re), s.a.re.max(s.b.re));
        segs.sort_by(|x, y| key(x).0.total_cmp(&key(y).0));
        for i in 0..segs.len() {
            let (_, xmax) = key(&segs[i]);
            let (ylo, yhi) = (segs[i].a.im.min(segs[i].b.im), segs[i].a.im.max(segs[i].b.im));
            for j in i + 1..segs.len() {
                if key(&segs[j]).0 > xmax {
                    break;
                }
                let (x, y) = (&segs[i], &segs[j]);
                if y.a.im.max(y.b.im) < ylo || y.a.im.min(y.b.im) > yhi || adjacent(curve, x, y) {
                    continue;
                }
                if let Some((s, u)) = intersect(x.a, x.b, y.a, y.b)? {
                    out.push(make_crossing(curve, x, s, y, u, x.a + (x.b - x.a) * s)?);
                }
            }
        }
    } else {
        for i in 0..segs.len() {
            for j in i..segs.len() {
                let (x, y) = (&segs[i], &segs[j]);
                let mid = (y.a + y.b - x.a - x.b) * 0.5;
                let (a, b) = curve.ambient.lattice_coords(mid).expect("torus");
                for m in a.round() as i64 - 1..=a.round() as i64 + 1 {
                    for n in b.round() as i64 - 1..=b.round() as i64 + 1 {
                        let shift = curve.ambient.lattice(m, n);
                        if i == j || joined(x, y, shift) {
                            continue;
                        }
                        if let Some((s, u)) = intersect(x.a, x.b, y.a - shift, y.b - shift)? {
                            let p = curve.ambient.reduce(x.a + (x.b - x.a) * s);
                            out.push(make_crossing(curve, x, s, y, u, p)?);
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| {
        let ka = (a.sheets[0].component.min(a.sheets[1].component), a.sheets[0].edge.min(a.sheets[1].edge));
        let kb = (b.sheets[0].component.min(b.sheets[1].component), b.sheets[0].edge.min(b.sheets[1].edge));
        ka.cmp(&kb)
    });
    Ok(out)
}
