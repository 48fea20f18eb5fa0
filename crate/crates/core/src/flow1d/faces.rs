use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::Serialize;

use super::crossings::{self_intersections, Crossing};
use super::curve::{cross, ImmersedCurve};
use super::FlowError;
use crate::planes::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceKind {
    Teardrop,
    Bigon,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corner {
    /// Index into the crossing list the faces were built from.
    pub crossing: usize,
    /// Interior angle of the face at the corner.
    pub angle: f64,
}

/// A bounded face of the planar arrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub corners: Vec<Corner>,
    pub kind: FaceKind,
    /// Area with any nested pieces of the curve cut out.
    pub area: f64,
    /// Winding number of the curve around the face.
    pub winding: i64,
    /// Total phase increment along the boundary traversed with the face on the left.
    pub theta_increment: f64,
    /// Counterclockwise boundary polygon.
    pub boundary: Vec<C64>,
    pub centroid: C64,
    /// Components contributing boundary arcs, sorted.
    pub components: Vec<usize>,
}

impl Face {
    pub fn corner_crossings(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.corners.iter().map(|c| c.crossing).collect();
        v.sort_unstable();
        v
    }
}

/// Predicted dA/dt of each face: minus the phase increment around its boundary.
pub fn area_rates(faces: &[Face]) -> Vec<f64> {
    faces.iter().map(|f| -f.theta_increment).collect()
}

struct Arc {
    component: usize,
    start: Option<usize>,
    end: Option<usize>,
    points: Vec<C64>,
    increment: f64,
    dir_start: C64,
    dir_end: C64,
}

struct Cycle {
    half_edges: Vec<usize>,
    polygon: Vec<C64>,
    area: f64,
    corners: Vec<Corner>,
}

fn shoelace(poly: &[C64]) -> f64 {
    let n = poly.len();
    (0..n).map(|k| 0.5 * cross(poly[k], poly[(k + 1) % n])).sum()
}

fn centroid(poly: &[C64]) -> C64 {
    let n = poly.len();
    let mut acc = C64::new(0.0, 0.0);
    let mut a = 0.0;
    for k in 0..n {
        let (p, q) = (poly[k], poly[(k + 1) % n]);
        let w = cross(p, q);
        acc += (p + q) * w;
        a += w;
    }
    if a.abs() < 1e-300 {
        return poly.iter().sum::<C64>() / n as f64;
    }
    acc / (3.0 * a)
}

/// Even-odd containment test.
pub(crate) fn contains(poly: &[C64], z: C64) -> bool {
    let n = poly.len();
    let mut inside = false;
    for k in 0..n {
        let (a, b) = (poly[k], poly[(k + 1) % n]);
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if x > z.re {
                inside = !inside;
            }
        }
    }
    inside
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

fn build_arcs(curve: &ImmersedCurve, crossings: &[Crossing]) -> Vec<Arc> {
    let mut cuts: Vec<Vec<(usize, f64, usize, C64)>> = vec![Vec::new(); curve.components.len()];
    for (xi, x) in crossings.iter().enumerate() {
        for s in &x.sheets {
            cuts[s.component].push((s.edge, s.param, xi, x.point));
        }
    }
    let mut arcs = Vec::new();
    for (ci, c) in curve.components.iter().enumerate() {
        let n = c.len();
        let unit = |k: usize| {
            let e = c.edge(k);
            e / e.norm()
        };
        let list = &mut cuts[ci];
        if list.is_empty() {
            let mut points = c.points.clone();
            points.push(c.points[0]);
            arcs.push(Arc {
                component: ci,
                start: None,
                end: None,
                points,
                increment: 2.0 * PI * c.maslov as f64,
                dir_start: unit(0),
                dir_end: unit(0),
            });
            continue;
        }
        list.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).expect("finite"));
        let m = list.len();
        for j in 0..m {
            let (e0, s0, x0, p0) = list[j];
            let (e1, s1, x1, p1) = list[(j + 1) % m];
            let wraps = j + 1 == m;
            let mut points = vec![p0];
            if !(e1 == e0 && s1 > s0 && !wraps) {
                let stop = if wraps || e1 < e0 || (e1 == e0 && s1 <= s0) { e1 + n } else { e1 };
                for k in e0 + 1..=stop {
                    points.push(c.at(k as isize));
                }
            }
            points.push(p1);
            let mut increment = c.theta[e1] - c.theta[e0];
            if wraps {
                increment += 2.0 * PI * c.maslov as f64;
            }
            arcs.push(Arc { component: ci, start: Some(x0), end: Some(x1), points, increment, dir_start: unit(e0), dir_end: unit(e1) });
        }
    }
    arcs
}

/// Bounded faces of the arrangement of a plane curve.
pub fn faces(curve: &ImmersedCurve) -> Result<Vec<Face>, FlowError> {
    let crossings = self_intersections(curve)?;
    faces_with(curve, &crossings)
}

/// Bounded faces, using precomputed crossings.
pub fn faces_with(curve: &ImmersedCurve, crossings: &[Crossing]) -> Result<Vec<Face>, FlowError> {
    if !curve.ambient.is_plane() {
        return Err(FlowError::Precondition("faces are only defined in the plane".into()));
    }
    let arcs = build_arcs(curve, crossings);
    let nh = 2 * arcs.len();
    let origin = |h: usize| if h % 2 == 0 { arcs[h / 2].start } else { arcs[h / 2].end };
    let dest = |h: usize| if h % 2 == 0 { arcs[h / 2].end } else { arcs[h / 2].start };
    let out_dir = |h: usize| if h % 2 == 0 { arcs[h / 2].dir_start } else { -arcs[h / 2].dir_end };

    let mut around: Vec<Vec<(f64, usize)>> = vec![Vec::new(); crossings.len()];
    for h in 0..nh {
        if let Some(v) = origin(h) {
            around[v].push((out_dir(h).arg(), h));
        }
    }
    for list in &mut around {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        if list.len() != 4 {
            return Err(FlowError::Arrangement(format!("crossing with {} branches", list.len())));
        }
    }
    let next = |h: usize| -> usize {
        match dest(h) {
            None => h,
            Some(v) => {
                let list = &around[v];
                let i = list.iter().position(|(_, g)| *g == h ^ 1).expect("twin present");
                list[(i + list.len() - 1) % list.len()].1
            }
        }
    };

    let mut cycle_of = vec![usize::MAX; nh];
    let mut cycles: Vec<Cycle> = Vec::new();
    for h0 in 0..nh {
        if cycle_of[h0] != usize::MAX {
            continue;
        }
        let mut half_edges = Vec::new();
        let mut h = h0;
        loop {
            if cycle_of[h] != usize::MAX {
                return Err(FlowError::Arrangement("inconsistent face tracing".into()));
            }
            cycle_of[h] = cycles.len();
            half_edges.push(h);
            h = next(h);
            if h == h0 {
                break;
            }
            if half_edges.len() > nh {
                return Err(FlowError::Arrangement("face tracing did not close".into()));
            }
        }
        let mut polygon = Vec::new();
        let mut corners = Vec::new();
        for (i, &h) in half_edges.iter().enumerate() {
            let pts = &arcs[h / 2].points;
            if h % 2 == 0 {
                polygon.extend_from_slice(&pts[..pts.len() - 1]);
            } else {
                polygon.extend(pts[1..].iter().rev());
            }
            if let Some(v) = dest(h) {
                let g = half_edges[(i + 1) % half_edges.len()];
                let angle = (out_dir(h ^ 1).arg() - out_dir(g).arg()).rem_euclid(2.0 * PI);
                corners.push(Corner { crossing: v, angle });
            }
        }
        let area = shoelace(&polygon);
        cycles.push(Cycle { half_edges, polygon, area, corners });
    }

    // pieces: components linked through crossings
    let nc = curve.components.len();
    let mut parent: Vec<usize> = (0..nc).collect();
    for x in crossings {
        let (a, b) = (find(&mut parent, x.sheets[0].component), find(&mut parent, x.sheets[1].component));
        parent[a] = b;
    }
    let piece_of_cycle: Vec<usize> = cycles
        .iter()
        .map(|c| {
            let comp = arcs[c.half_edges[0] / 2].component;
            find(&mut parent, comp)
        })
        .collect();
    let mut pieces: Vec<usize> = piece_of_cycle.clone();
    pieces.sort_unstable();
    pieces.dedup();
    let outer_of = |p: usize| -> usize {
        (0..cycles.len())
            .filter(|&i| piece_of_cycle[i] == p)
            .min_by(|&a, &b| cycles[a].area.total_cmp(&cycles[b].area))
            .expect("piece has cycles")
    };
    let mut order: Vec<(usize, usize)> = pieces.iter().map(|&p| (p, outer_of(p))).collect();
    order.sort_by(|a, b| cycles[a.1].area.total_cmp(&cycles[b.1].area));

    let mut winding: Vec<Option<i64>> = vec![None; cycles.len()];
    let mut area: Vec<f64> = cycles.iter().map(|c| c.area).collect();
    for &(p, outer) in &order {
        let probe = arcs[cycles[outer].half_edges[0] / 2].points[0];
        let host = (0..cycles.len())
            .filter(|&i| piece_of_cycle[i] != p && cycles[i].area > 0.0 && contains(&cycles[i].polygon, probe))
            .min_by(|&a, &b| cycles[a].area.total_cmp(&cycles[b].area));
        let base = match host {
            Some(f) => {
                area[f] -= cycles[outer].area.abs();
                winding[f].ok_or_else(|| FlowError::Arrangement("nesting order broken".into()))?
            }
            None => 0,
        };
        winding[outer] = Some(base);
        // spread across arcs: the left side of a forward arc winds once more
        let mut queue = VecDeque::from([outer]);
        while let Some(ci) = queue.pop_front() {
            let w = winding[ci].expect("set");
            for &h in &cycles[ci].half_edges {
                let other = cycle_of[h ^ 1];
                if winding[other].is_none() {
                    winding[other] = Some(if h % 2 == 0 { w - 1 } else { w + 1 });
                    queue.push_back(other);
                }
            }
        }
    }

    let mut out = Vec::new();
    for (i, c) in cycles.iter().enumerate() {
        if c.area <= 0.0 {
            continue;
        }
        let kind = match c.corners.len() {
            1 => FaceKind::Teardrop,
            2 => FaceKind::Bigon,
            _ => FaceKind::Other,
        };
        let increment = c
            .half_edges
            .iter()
            .map(|&h| if h % 2 == 0 { arcs[h / 2].increment } else { -arcs[h / 2].increment })
            .sum();
        let mut components: Vec<usize> = c.half_edges.iter().map(|&h| arcs[h / 2].component).collect();
        components.sort_unstable();
        components.dedup();
        out.push(Face {
            corners: c.corners.clone(),
            kind,
            area: area[i],
            winding: winding[i].ok_or_else(|| FlowError::Arrangement("face without winding".into()))?,
            theta_increment: increment,
            centroid: centroid(&c.polygon),
            boundary: c.polygon.clone(),
            components,
        });
    }
    Ok(out)
}
