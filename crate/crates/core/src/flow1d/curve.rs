use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{self_intersections, FlowError};
use crate::novikov::{CoefficientField, Scalar};
use crate::planes::C64;

pub const MIN_VERTICES: usize = 32;
/// Consecutive tangents may turn by less than this.
pub const MAX_TURN: f64 = PI / 2.0;
/// Relative tolerance on the enclosed signed area for exact mode.
const EXACT_TOL: f64 = 1e-6;

/// z ∧ w = Im(conj(z) w), the area form on ℂ.
pub fn cross(z: C64, w: C64) -> f64 {
    z.re * w.im - z.im * w.re
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Ambient {
    Plane,
    /// ℂ/(ℤ + τℤ).
    Torus { tau: [f64; 2] },
}

impl Ambient {
    pub fn validate(&self) -> Result<(), FlowError> {
        match self {
            Ambient::Plane => Ok(()),
            Ambient::Torus { tau } if tau[1] > 0.0 && tau[0].is_finite() => Ok(()),
            Ambient::Torus { tau } => Err(FlowError::Ambient(format!("Im τ must be positive, got τ = {tau:?}"))),
        }
    }

    pub fn is_plane(&self) -> bool {
        matches!(self, Ambient::Plane)
    }

    pub fn tau(&self) -> Option<C64> {
        match self {
            Ambient::Plane => None,
            Ambient::Torus { tau } => Some(C64::new(tau[0], tau[1])),
        }
    }

    /// The lattice vector m + nτ (zero in the plane).
    pub fn lattice(&self, m: i64, n: i64) -> C64 {
        match self.tau() {
            None => C64::new(0.0, 0.0),
            Some(tau) => C64::new(m as f64, 0.0) + tau * n as f64,
        }
    }

    /// Coordinates (a, b) with z = a + bτ.
    pub fn lattice_coords(&self, z: C64) -> Option<(f64, f64)> {
        let tau = self.tau()?;
        let b = z.im / tau.im;
        Some((z.re - b * tau.re, b))
    }

    /// Representative of z in the fundamental parallelogram.
    pub fn reduce(&self, z: C64) -> C64 {
        match self.lattice_coords(z) {
            None => z,
            Some((a, b)) => z - self.lattice(a.floor() as i64, b.floor() as i64),
        }
    }
}

/// A closed polyline; on a torus `class` is the lattice class (m, n) of the loop.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexLoop {
    pub points: Vec<C64>,
    pub class: [i64; 2],
}

impl VertexLoop {
    pub fn closed(points: Vec<C64>) -> Self {
        VertexLoop { points, class: [0, 0] }
    }
}

#[derive(Debug, Clone)]
pub struct CurveOptions {
    pub graded: bool,
    pub exact: bool,
    pub field: CoefficientField,
    /// One per component; missing entries default to 1.
    pub holonomies: Vec<Scalar>,
    /// Integer shifts of each component's grading by 2π.
    pub grading_shifts: Vec<i64>,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            graded: true,
            exact: false,
            field: CoefficientField::Rational,
            holonomies: Vec::new(),
            grading_shifts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Component {
    pub points: Vec<C64>,
    /// Lattice translation taking the first vertex to its copy after one turn.
    pub period: C64,
    /// Lifted tangent angle of edge k, which runs from vertex k to vertex k+1.
    pub theta: Vec<f64>,
    pub maslov: i64,
    pub holonomy: Scalar,
    /// Potential at each vertex with df = λ along edges; empty unless exact.
    pub potential: Vec<f64>,
}

impl Component {
    /// Creates a component with its phase lift anchored so that the first
    /// edge's angle is the branch nearest `anchor`.
    pub fn new(points: Vec<C64>, period: C64, holonomy: Scalar, anchor: f64) -> Result<Self, FlowError> {
        let mut c = Component { points, period, theta: Vec::new(), maslov: 0, holonomy, potential: Vec::new() };
        c.relift_at(0, anchor)?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Vertex k of the periodic lift, for any integer k.
    pub fn at(&self, k: isize) -> C64 {
        let n = self.points.len() as isize;
        let (q, r) = (k.div_euclid(n), k.rem_euclid(n));
        self.points[r as usize] + self.period * q as f64
    }

    pub fn edge(&self, k: usize) -> C64 {
        self.at(k as isize + 1) - self.points[k]
    }

    /// Turning angle at vertex k, from edge k−1 to edge k.
    pub fn turn(&self, k: usize) -> f64 {
        let prev = self.points[k] - self.at(k as isize - 1);
        (self.edge(k) / prev).arg()
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.edge(k).norm()).collect()
    }

    pub fn length(&self) -> f64 {
        self.edge_lengths().iter().sum()
    }

    /// ½ Σ p_k ∧ p_{k+1}; the enclosed signed area of a plane loop.
    pub fn signed_area(&self) -> f64 {
        (0..self.len()).map(|k| 0.5 * cross(self.points[k], self.at(k as isize + 1))).sum()
    }

    pub fn centroid(&self) -> C64 {
        self.points.iter().sum::<C64>() / self.len() as f64
    }

    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.max((a - b).norm());
            }
        }
        best
    }

    /// Diagonal of the bounding box, an upper bound for the diameter.
    pub fn extent(&self) -> f64 {
        let (mut lo, mut hi) = (self.points[0], self.points[0]);
        for p in &self.points {
            lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        (hi - lo).norm()
    }

    /// Phase at vertex k, the mean of the adjacent edge phases.
    pub fn vertex_theta(&self, k: usize) -> f64 {
        let n = self.len();
        let prev = if k == 0 { self.theta[n - 1] - 2.0 * PI * self.maslov as f64 } else { self.theta[k - 1] };
        0.5 * (prev + self.theta[k])
    }

    /// Circumscribed-circle curvature vectors, one per vertex.
    pub fn curvature(&self) -> Vec<C64> {
        (0..self.len())
            .map(|k| {
                let b = self.points[k];
                circumcircle_curvature(self.at(k as isize - 1) - b, self.at(k as isize + 1) - b)
            })
            .collect()
    }

    /// Recomputes the phase lift with edge k0 placed on the branch nearest
    /// `anchor`, and the Maslov number.
    pub fn relift_at(&mut self, k0: usize, anchor: f64) -> Result<(), FlowError> {
        let n = self.len();
        let mut theta = Vec::with_capacity(n);
        theta.push(self.edge(0).arg());
        let mut total = 0.0;
        for k in 0..n {
            let turn = self.turn(k);
            if turn.abs() >= MAX_TURN {
                return Err(FlowError::Resolution { component: 0, index: k, turn });
            }
            total += turn;
            if k > 0 {
                theta.push(theta[k - 1] + turn);
            }
        }
        let shift = 2.0 * PI * ((anchor - theta[k0]) / (2.0 * PI)).round();
        for t in &mut theta {
            *t += shift;
        }
        self.theta = theta;
        self.maslov = (total / (2.0 * PI)).round() as i64;
        Ok(())
    }

    /// Rebuilds the potential from its value at vertex 0 by integrating
    /// λ = ½(x dy − y dx) along the edges.
    pub fn integrate_potential(&mut self) {
        let base = self.potential.first().copied().unwrap_or(0.0);
        let mut f = Vec::with_capacity(self.len());
        f.push(base);
        for k in 1..self.len() {
            f.push(f[k - 1] + 0.5 * cross(self.points[k - 1], self.points[k]));
        }
        self.potential = f;
    }

    /// Potential at a point on edge k.
    pub fn potential_at(&self, k: usize, z: C64) -> Option<f64> {
        self.potential.get(k).map(|f| f + 0.5 * cross(self.points[k], z))
    }
}

/// Curvature vector of the circle through b+u, b, b+w, seen from b.
pub(crate) fn circumcircle_curvature(u: C64, w: C64) -> C64 {
    let d = cross(u, w);
    let (uu, ww) = (u.norm_sqr(), w.norm_sqr());
    let v = C64::new(uu * w.im - ww * u.im, u.re * ww - w.re * uu);
    let vv = v.norm_sqr();
    if vv == 0.0 {
        return C64::new(0.0, 0.0);
    }
    v * (2.0 * d / vv)
}

#[derive(Debug, Clone)]
pub struct ImmersedCurve {
    pub ambient: Ambient,
    pub components: Vec<Component>,
    pub graded: bool,
    pub exact: bool,
    pub field: CoefficientField,
}

impl ImmersedCurve {
    pub fn vertex_count(&self) -> usize {
        self.components.iter().map(Component::len).sum()
    }

    pub fn total_length(&self) -> f64 {
        self.components.iter().map(Component::length).sum()
    }

    pub fn min_edge(&self) -> f64 {
        self.components.iter().flat_map(|c| c.edge_lengths()).fold(f64::INFINITY, f64::min)
    }

    pub fn mean_edge(&self) -> f64 {
        self.total_length() / self.vertex_count().max(1) as f64
    }

    /// Smallest and largest phase over all edges.
    pub fn theta_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for c in &self.components {
            for t in &c.theta {
                lo = lo.min(*t);
                hi = hi.max(*t);
            }
        }
        (lo, hi)
    }

    pub fn max_curvature(&self) -> f64 {
        self.components.iter().flat_map(|c| c.curvature()).map(|k| k.norm()).fold(0.0, f64::max)
    }

    /// Vertex counts and, for graded curves, vanishing Maslov numbers.
    pub fn check_shape(&self) -> Result<(), FlowError> {
        for (i, c) in self.components.iter().enumerate() {
            if c.len() < MIN_VERTICES {
                return Err(FlowError::TooFewVertices { component: i, count: c.len() });
            }
            if self.graded && c.maslov != 0 {
                return Err(FlowError::NotMaslovZero { component: i, maslov: c.maslov });
            }
        }
        Ok(())
    }

    /// Shape checks plus vanishing enclosed area in exact mode.
    pub fn check_invariants(&self) -> Result<(), FlowError> {
        self.check_shape()?;
        for (i, c) in self.components.iter().enumerate() {
            if self.exact {
                let scale = c.length().powi(2);
                let area = c.signed_area();
                if area.abs() > EXACT_TOL * scale {
                    return Err(FlowError::NotExact { component: i, area });
                }
            }
        }
        Ok(())
    }
}

fn check_loop(index: usize, points: &[C64]) -> Result<(), FlowError> {
    if points.len() < MIN_VERTICES {
        return Err(FlowError::TooFewVertices { component: index, count: points.len() });
    }
    let mut keys: Vec<(u64, u64, usize)> =
        points.iter().enumerate().map(|(k, p)| (p.re.to_bits(), p.im.to_bits(), k)).collect();
    keys.sort_unstable();
    for w in keys.windows(2) {
        if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
            return Err(FlowError::RepeatedVertex { component: index, index: w[1].2 });
        }
    }
    if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return Err(FlowError::Precondition(format!("component {index} has a non-finite vertex")));
    }
    Ok(())
}

/// Builds a curve from closed vertex loops: phase lifts, Maslov numbers,
/// potentials in exact mode, and a transversality check.
pub fn build_curve(ambient: Ambient, loops: Vec<VertexLoop>, options: &CurveOptions) -> Result<ImmersedCurve, FlowError> {
    ambient.validate()?;
    if options.exact && !ambient.is_plane() {
        return Err(FlowError::Precondition("exact mode needs the plane".into()));
    }
    if loops.is_empty() {
        return Err(FlowError::Precondition("no loops given".into()));
    }
    let mut components = Vec::with_capacity(loops.len());
    for (i, l) in loops.into_iter().enumerate() {
        check_loop(i, &l.points)?;
        if ambient.is_plane() && l.class != [0, 0] {
            return Err(FlowError::Precondition(format!("component {i}: plane loops have class (0, 0)")));
        }
        let period = ambient.lattice(l.class[0], l.class[1]);
        let holonomy = options.holonomies.get(i).cloned().unwrap_or_else(|| Scalar::one(options.field));
        if holonomy.is_zero() || holonomy.field() != options.field {
            return Err(FlowError::Precondition(format!("component {i}: holonomy must be a nonzero element of the field")));
        }
        let shift = options.grading_shifts.get(i).copied().unwrap_or(0) as f64;
        let first = l.points[1] - l.points[0];
        let mut c = Component::new(l.points, period, holonomy, first.arg() + 2.0 * PI * shift)
            .map_err(|e| relabel(e, i))?;
        if options.exact {
            c.potential = vec![0.0];
            c.integrate_potential();
        }
        components.push(c);
    }
    let curve = ImmersedCurve { ambient, components, graded: options.graded, exact: options.exact, field: options.field };
    curve.check_invariants()?;
    self_intersections(&curve)?;
    Ok(curve)
}

pub(crate) fn relabel(e: FlowError, component: usize) -> FlowError {
    match e {
        FlowError::Resolution { index, turn, .. } => FlowError::Resolution { component, index, turn },
        other => other,
    }
}

