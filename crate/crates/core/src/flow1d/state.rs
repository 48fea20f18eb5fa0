use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::crossings::{self_intersections, Crossing};
use super::curve::{cross, relabel, Component, ImmersedCurve, MIN_VERTICES};
use super::faces::{faces_with, Face, FaceKind};
use super::remesh::{refine_near, remesh_component, RemeshParams};
use super::FlowError;
use crate::novikov::{nv_classify, nv_shift, nv_valuation, rationalize, NovikovClass, NovikovSeries, Scalar};
use crate::planes::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowPolicy {
    /// dt ≤ dt_factor · (shortest edge)².
    pub dt_factor: f64,
    pub remesh: bool,
    /// Target turning per edge for the remesher, in radians.
    pub turn_resolution: f64,
    /// Longest edge; defaults to the initial mean edge length.
    pub max_edge: Option<f64>,
    /// Collapse threshold on the diameter, in initial mean edge lengths.
    pub collapse_mesh_lengths: f64,
    /// Teardrops at a common corner count as equal when their areas differ by at most this.
    pub area_tol: f64,
    /// An obstructing teardrop smaller than this ends the run.
    pub terminal_area: f64,
    pub open_neck: bool,
    /// Radius of the region replaced at a neck; defaults to three local edge lengths.
    pub neck_radius: Option<f64>,
    /// Sign of the holonomy forced on a pair of cancelling teardrops.
    pub holonomy_sign: i8,
    /// Flow quantities enter the exponents rounded to multiples of 1/denominator.
    pub exponent_denominator: u64,
    /// Cochain terms at or above this exponent are dropped.
    pub truncation: i64,
    /// Leading coefficient of seeded cochains.
    pub cochain_leading: i64,
    pub seed_cochains: bool,
}

impl Default for FlowPolicy {
    fn default() -> Self {
        FlowPolicy {
            dt_factor: 0.25,
            remesh: true,
            turn_resolution: 0.08,
            max_edge: None,
            collapse_mesh_lengths: 5.0,
            area_tol: 2e-3,
            terminal_area: 1e-5,
            open_neck: true,
            neck_radius: None,
            holonomy_sign: -1,
            exponent_denominator: 1 << 40,
            truncation: 16,
            cochain_leading: 1,
            seed_cochains: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub t: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    CrossingAppeared { crossing: u64, point: [f64; 2] },
    CrossingVanished { crossing: u64, point: [f64; 2] },
    CochainSeeded { crossing: u64, series: String },
    /// The cochain valuation reached exactly zero.
    Wall { crossing: u64, series: String },
    /// The cochain left the nonnegative subring and was discarded.
    CochainDropped { crossing: u64, class: NovikovClass },
    OpenNeck {
        crossing: u64,
        point: [f64; 2],
        radius: f64,
        components_before: usize,
        components_after: usize,
        crossings_before: usize,
        crossings_after: usize,
        adjacent_areas: Vec<f64>,
    },
    Collapse { component: usize, point: [f64; 2], diameter: f64 },
    ObstructedTerminal { crossing: Option<u64>, witness_area: f64, estimated_time: f64 },
    TerminalSingularity { component: usize, estimated_time: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Index into the face list.
    pub face: usize,
    /// Index into the crossing list of the teardrop's corner.
    pub crossing: usize,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomyConstraint {
    pub components: Vec<usize>,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ObstructionStatus {
    Unobstructed { constraints: Vec<HolonomyConstraint> },
    Obstructed { witnesses: Vec<Witness> },
}

impl ObstructionStatus {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, ObstructionStatus::Obstructed { .. })
    }
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub curve: ImmersedCurve,
    pub t: f64,
    pub steps: usize,
    /// Tracked crossings with identities and cochains.
    pub crossings: Vec<Crossing>,
    pub events: Vec<Event>,
    pub policy: FlowPolicy,
    /// Mean edge length of the initial curve.
    pub mesh_length: f64,
    /// Largest per-edge mismatch between the flowed potential and λ seen so far.
    pub potential_defect: f64,
    next_id: u64,
}

fn pt(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl FlowState {
    pub fn new(curve: ImmersedCurve, policy: FlowPolicy) -> Result<Self, FlowError> {
        curve.check_invariants()?;
        let mesh_length = curve.mean_edge();
        let mut crossings = self_intersections(&curve)?;
        let mut state = FlowState {
            curve,
            t: 0.0,
            steps: 0,
            crossings: Vec::new(),
            events: Vec::new(),
            policy,
            mesh_length,
            potential_defect: 0.0,
            next_id: 1,
        };
        for x in &mut crossings {
            x.id = state.next_id;
            state.next_id += 1;
        }
        state.crossings = crossings;
        if state.policy.seed_cochains && state.curve.graded && state.curve.exact {
            state.seed_cochains();
        }
        Ok(state)
    }

    /// Puts a₀·P^{f₊−f₋} on each degree-one crossing where the gap is nonnegative.
    fn seed_cochains(&mut self) {
        let leading = Scalar::from_i64(self.curve.field, self.policy.cochain_leading);
        if leading.is_zero() {
            return;
        }
        let truncation = BigRational::from_integer(self.policy.truncation.into());
        for x in &mut self.crossings {
            let Some(gap) = x.potential_gap() else { continue };
            if x.has_degree_one() && gap >= 0.0 {
                let series = NovikovSeries::monomial(leading.clone(), rationalize(gap, self.policy.exponent_denominator), truncation.clone());
                self.events.push(Event { t: self.t, kind: EventKind::CochainSeeded { crossing: x.id, series: series.to_string() } });
                x.cochain = Some(series);
            }
        }
    }

    pub fn stable_dt(&self) -> f64 {
        self.policy.dt_factor * self.curve.min_edge().powi(2)
    }

    pub fn collapse_threshold(&self) -> f64 {
        self.policy.collapse_mesh_lengths * self.mesh_length
    }

    pub fn remesh_params(&self) -> RemeshParams {
        RemeshParams {
            max_edge: self.policy.max_edge.unwrap_or(self.mesh_length),
            turn: self.policy.turn_resolution,
            min_edge: 1e-7,
        }
    }

    pub fn crossing_index(&self, id: u64) -> Option<usize> {
        self.crossings.iter().position(|x| x.id == id)
    }

    /// Recomputes crossings and matches them to the tracked ones by position
    /// and sheet phases; identities and cochains carry over.
    pub fn refresh_crossings(&mut self) -> Result<(), FlowError> {
        let mut fresh = self_intersections(&self.curve)?;
        let radius = 0.5 * self.curve.mean_edge().max(self.mesh_length * 1e-3);
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, old) in self.crossings.iter().enumerate() {
            for (j, new) in fresh.iter().enumerate() {
                let d = (old.point - new.point).norm();
                let phase = (old.theta_plus() - new.theta_plus()).abs() + (old.theta_minus() - new.theta_minus()).abs();
                let swapped = (old.theta_plus() - new.theta_minus()).abs() + (old.theta_minus() - new.theta_plus()).abs();
                if d < radius && phase.min(swapped) < 0.5 {
                    pairs.push((d, i, j));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut old_used = vec![false; self.crossings.len()];
        let mut new_used = vec![false; fresh.len()];
        for (_, i, j) in pairs {
            if old_used[i] || new_used[j] {
                continue;
            }
            old_used[i] = true;
            new_used[j] = true;
            fresh[j].id = self.crossings[i].id;
            fresh[j].cochain = self.crossings[i].cochain.take();
        }
        for (i, old) in self.crossings.iter().enumerate() {
            if !old_used[i] {
                self.events.push(Event { t: self.t, kind: EventKind::CrossingVanished { crossing: old.id, point: pt(old.point) } });
            }
        }
        for (j, new) in fresh.iter_mut().enumerate() {
            if !new_used[j] {
                new.id = self.next_id;
                self.next_id += 1;
                self.events.push(Event { t: self.t, kind: EventKind::CrossingAppeared { crossing: new.id, point: pt(new.point) } });
            }
        }
        self.crossings = fresh;
        Ok(())
    }
}

/// Moves every vertex by dt times its curvature vector, updates the phase
/// lift and potential, and remeshes.
pub fn csf_step(state: &mut FlowState, dt: f64) -> Result<(), FlowError> {
    let limit = state.stable_dt();
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-9) {
        return Err(FlowError::StepTooLarge { dt, limit });
    }
    let params = state.remesh_params();
    let t = state.t;
    for (ci, c) in state.curve.components.iter_mut().enumerate() {
        let kappa = c.curvature();
        let lens = c.edge_lengths();
        let n = c.len();
        for k in 0..n {
            let h = lens[k].min(lens[(k + n - 1) % n]);
            if kappa[k].norm() * h > 1.0 {
                return Err(FlowError::CurvatureOverflow { curvature: kappa[k].norm(), t });
            }
        }
        let flowed: Option<Vec<f64>> = (!c.potential.is_empty()).then(|| {
            (0..n).map(|k| c.potential[k] + 0.5 * cross(c.points[k], kappa[k] * dt) - c.vertex_theta(k) * dt).collect()
        });
        for (p, k) in c.points.iter_mut().zip(&kappa) {
            *p += k * dt;
        }
        let (anchor, maslov) = (c.theta[0], c.maslov);
        c.relift_at(0, anchor).map_err(|e| match relabel(e, ci) {
            FlowError::Resolution { .. } => FlowError::CurvatureOverflow { curvature: kappa.iter().map(|k| k.norm()).fold(0.0, f64::max), t },
            other => other,
        })?;
        if c.maslov != maslov {
            return Err(FlowError::CurvatureOverflow { curvature: kappa.iter().map(|k| k.norm()).fold(0.0, f64::max), t });
        }
        if let Some(f) = flowed {
            let defect = (0..n - 1)
                .map(|k| (f[k + 1] - f[k] - 0.5 * cross(c.points[k], c.points[k + 1])).abs())
                .fold(0.0, f64::max);
            state.potential_defect = state.potential_defect.max(defect);
            c.potential = f;
            c.integrate_potential();
        }
        if state.policy.remesh {
            remesh_component(c, &params).map_err(|e| relabel(e, ci))?;
        }
    }
    state.t += dt;
    state.steps += 1;
    Ok(())
}

/// Time until a valuation reaches zero at a constant negative rate.
pub fn wall_time(valuation: &BigRational, rate: &BigRational) -> Option<BigRational> {
    if rate.is_negative() && !valuation.is_negative() {
        Some(valuation / -rate)
    } else {
        None
    }
}

/// Shifts a cochain's exponents by rate · dt.
pub fn shift_cochain(series: &NovikovSeries, rate: &BigRational, dt: &BigRational) -> NovikovSeries {
    nv_shift(series, &(rate * dt))
}

/// Rounded cochain rate θ₋ − θ₊ of a crossing.
pub(crate) fn exact_rate(x: &Crossing, denominator: u64) -> BigRational {
    rationalize(x.rate(), denominator)
}

/// Shifts every cochain by (θ₋ − θ₊)·dt, with dt rounded to the exponent grid.
/// Returns the crossings whose valuation became exactly zero.
pub fn transport_cochain(state: &mut FlowState, dt: f64) -> Vec<u64> {
    let dt = rationalize(dt, state.policy.exponent_denominator);
    transport_exact(state, &dt)
}

pub(crate) fn transport_exact(state: &mut FlowState, dt: &BigRational) -> Vec<u64> {
    let denominator = state.policy.exponent_denominator;
    let mut walls = Vec::new();
    let t = state.t + dt_f64(dt);
    for x in &mut state.crossings {
        let Some(series) = x.cochain.take() else { continue };
        let before = nv_classify(&series);
        let shifted = shift_cochain(&series, &exact_rate(x, denominator), dt);
        let after = nv_classify(&shifted);
        if after == NovikovClass::Negative || after == NovikovClass::Zero {
            state.events.push(Event { t, kind: EventKind::CochainDropped { crossing: x.id, class: after } });
            continue;
        }
        if before == NovikovClass::Positive && after == NovikovClass::NonNegativeOnly {
            state.events.push(Event { t, kind: EventKind::Wall { crossing: x.id, series: shifted.to_string() } });
            walls.push(x.id);
        }
        x.cochain = Some(shifted);
    }
    walls
}

pub(crate) fn dt_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn valuation_nonnegative(x: &Crossing) -> bool {
    x.cochain
        .as_ref()
        .and_then(nv_valuation)
        .is_some_and(|v| !v.is_negative())
}

/// Teardrops grouped by corner: equal pairs cancel and force a holonomy
/// sign, a lone teardrop is cancelled by a bigon whose other corner carries
/// a nonnegative cochain, and anything else is a witness.
pub fn obstruction_status(curve: &ImmersedCurve, crossings: &[Crossing], faces: &[Face], policy: &FlowPolicy) -> Result<ObstructionStatus, FlowError> {
    if !curve.graded {
        return Err(FlowError::Precondition("obstruction needs a graded curve".into()));
    }
    let mut corners: Vec<usize> = faces
        .iter()
        .filter(|f| f.kind == FaceKind::Teardrop)
        .map(|f| f.corners[0].crossing)
        .collect();
    corners.sort_unstable();
    corners.dedup();
    let mut witnesses = Vec::new();
    let mut constraints = Vec::new();
    for q in corners {
        let mut tears: Vec<usize> =
            (0..faces.len()).filter(|&i| faces[i].kind == FaceKind::Teardrop && faces[i].corners[0].crossing == q).collect();
        tears.sort_by(|&a, &b| faces[a].area.total_cmp(&faces[b].area));
        let smallest = tears[0];
        if tears.len() >= 2 {
            let spread = faces[*tears.last().expect("nonempty")].area - faces[smallest].area;
            if spread <= policy.area_tol {
                let mut comps: Vec<usize> = tears.iter().flat_map(|&i| faces[i].components.clone()).collect();
                comps.sort_unstable();
                comps.dedup();
                constraints.push(HolonomyConstraint { components: comps, sign: policy.holonomy_sign });
                continue;
            }
        } else {
            let cancelled = faces.iter().any(|f| {
                f.kind == FaceKind::Bigon && {
                    let cs = f.corner_crossings();
                    cs.contains(&q) && cs.iter().any(|&p| p != q && valuation_nonnegative(&crossings[p]))
                }
            });
            if cancelled {
                continue;
            }
        }
        witnesses.push(Witness { face: smallest, crossing: q, area: faces[smallest].area });
    }
    Ok(if witnesses.is_empty() {
        ObstructionStatus::Unobstructed { constraints }
    } else {
        ObstructionStatus::Obstructed { witnesses }
    })
}

/// Removes a small unobstructed graded component.
pub fn surgery_collapse(state: &mut FlowState, component: usize) -> Result<(), FlowError> {
    let c = state.curve.components.get(component).ok_or_else(|| FlowError::Precondition(format!("no component {component}")))?;
    let diameter = c.diameter();
    if diameter >= state.collapse_threshold() {
        return Err(FlowError::Precondition(format!(
            "component {component} has diameter {diameter} above the collapse threshold {}",
            state.collapse_threshold()
        )));
    }
    if !state.curve.graded {
        return Err(FlowError::Precondition("only graded components collapse".into()));
    }
    if state.curve.ambient.is_plane() {
        let faces = faces_with(&state.curve, &state.crossings)?;
        let own: Vec<Face> = faces.into_iter().filter(|f| f.components == [component]).collect();
        let status = obstruction_status(&state.curve, &state.crossings, &own, &state.policy)?;
        if status.is_obstructed() {
            return Err(FlowError::Precondition(format!("component {component} is obstructed")));
        }
    }
    let point = c.centroid();
    state.curve.components.remove(component);
    state.events.push(Event { t: state.t, kind: EventKind::Collapse { component, point: pt(point), diameter } });
    let dropped: Vec<u64> = state
        .crossings
        .iter()
        .filter(|x| x.sheets.iter().any(|s| s.component == component))
        .map(|x| x.id)
        .collect();
    state.crossings.retain(|x| !dropped.contains(&x.id));
    state.refresh_crossings()
}

/// Two arcs replacing the crossing of lines through `point` with unit
/// directions `plus` and `minus`: branches of the hyperbolas with those
/// asymptotes, running from the incoming plus ray to the outgoing minus ray
/// and from the incoming minus ray to the outgoing plus ray.
pub fn neck_arcs(point: C64, plus: C64, minus: C64, radius: f64) -> [Vec<C64>; 2] {
    let eps = radius / 4.0;
    let reach = (2.0 * 0.8 * radius / eps).ln();
    let branch = |from: C64, to: C64| -> Vec<C64> {
        let z = |s: f64| point + (to * s.exp() - from * (-s).exp()) * (eps / 2.0);
        let dense: Vec<C64> = (0..=800).map(|i| z(-reach + 2.0 * reach * i as f64 / 800.0)).collect();
        let mut cum = vec![0.0];
        for w in dense.windows(2) {
            cum.push(cum.last().expect("nonempty") + (w[1] - w[0]).norm());
        }
        let total = *cum.last().expect("nonempty");
        let count = (total / (eps / 4.0)).ceil().max(8.0) as usize;
        let mut out = Vec::with_capacity(count + 1);
        let mut j = 0;
        for i in 0..=count {
            let target = total * i as f64 / count as f64;
            while j + 1 < cum.len() - 1 && cum[j + 1] < target {
                j += 1;
            }
            let span = cum[j + 1] - cum[j];
            let w = if span > 0.0 { (target - cum[j]) / span } else { 0.0 };
            out.push(dense[j] + (dense[j + 1] - dense[j]) * w.clamp(0.0, 1.0));
        }
        out
    };
    [branch(plus, minus), branch(minus, plus)]
}

/// Vertex range of a strand cut out by the disc around `point`: the last
/// vertex before entering and the first after leaving, as unreduced indices.
fn strand_range(c: &Component, edge: usize, point: C64, radius: f64) -> Result<(isize, isize), FlowError> {
    let n = c.len() as isize;
    let mut a = edge as isize;
    while (c.at(a) - point).norm() < radius {
        a -= 1;
        if edge as isize - a > n / 3 {
            return Err(FlowError::Precondition("neck radius swallows a whole strand".into()));
        }
    }
    let mut b = edge as isize + 1;
    while (c.at(b) - point).norm() < radius {
        b += 1;
        if b - edge as isize > n / 3 {
            return Err(FlowError::Precondition("neck radius swallows a whole strand".into()));
        }
    }
    Ok((a, b))
}

/// Vertices from index `from` forward to `to` inclusive, cyclically.
fn walk(c: &Component, from: isize, to: isize) -> Vec<C64> {
    let n = c.len() as isize;
    let len = (to - from).rem_euclid(n) + 1;
    (0..len).map(|i| c.points[(from + i).rem_euclid(n) as usize]).collect()
}

fn new_component(points: Vec<C64>, holonomy: Scalar, anchor: f64, potential: Option<f64>) -> Result<Component, FlowError> {
    if points.len() < MIN_VERTICES {
        return Err(FlowError::Precondition(format!("surgery left a loop with {} vertices", points.len())));
    }
    let mut c = Component::new(points, C64::new(0.0, 0.0), holonomy, anchor)?;
    if let Some(f) = potential {
        c.potential = vec![f];
        c.integrate_potential();
    }
    Ok(c)
}

/// Replaces the crossing by the oriented smoothing; one component splits in
/// two or two components merge. Passing from the plus to the minus sheet
/// multiplies the holonomy by `a0`.
pub(crate) fn smooth_crossing(curve: &mut ImmersedCurve, x: &Crossing, radius: f64, a0: &Scalar) -> Result<(), FlowError> {
    let (ca, cb) = (x.sheets[0].component, x.sheets[1].component);
    let p = x.point;
    let (a, b) = (&curve.components[ca], &curve.components[cb]);
    let ua = a.edge(x.sheets[0].edge).unscale(a.edge(x.sheets[0].edge).norm());
    let ub = b.edge(x.sheets[1].edge).unscale(b.edge(x.sheets[1].edge).norm());
    let [to_minus, to_plus] = neck_arcs(p, ua, ub, radius);
    let (a_in, a_out) = strand_range(a, x.sheets[0].edge, p, radius)?;
    let (b_in, b_out) = strand_range(b, x.sheets[1].edge, p, radius)?;
    let pot = |c: &Component, k: isize| c.potential.get(k.rem_euclid(c.len() as isize) as usize).copied();
    let lift = |c: &Component, k: isize| c.theta[k.rem_euclid(c.len() as isize) as usize];
    let mut made = Vec::new();
    if ca == cb {
        let n = a.len() as isize;
        let inside = |k: isize, lo: isize, hi: isize| (k - lo).rem_euclid(n) <= (hi - lo).rem_euclid(n);
        if inside(b_in, a_in, a_out) || inside(b_out, a_in, a_out) || inside(a_in, b_in, b_out) {
            return Err(FlowError::Precondition("neck regions of the two strands overlap".into()));
        }
        let inv = a0.inv()?;
        let mut first = walk(a, a_out, b_in);
        first.extend(to_plus.iter().copied());
        let mut second = walk(a, b_out, a_in);
        second.extend(to_minus.iter().copied());
        made.push(new_component(first, a.holonomy.mul(&inv), lift(a, a_out), pot(a, a_out))?);
        made.push(new_component(second, a0.clone(), lift(a, b_out), pot(a, b_out))?);
    } else {
        let mut pts = walk(a, a_out, a_in);
        pts.extend(to_minus.iter().copied());
        pts.extend(walk(b, b_out, b_in));
        pts.extend(to_plus.iter().copied());
        made.push(new_component(pts, a.holonomy.mul(&b.holonomy), lift(a, a_out), pot(a, a_out))?);
    }
    let mut kept: Vec<Component> =
        curve.components.drain(..).enumerate().filter(|(i, _)| *i != ca && *i != cb).map(|(_, c)| c).collect();
    kept.extend(made);
    curve.components = kept;
    Ok(())
}

/// Opens a neck at a degree-one crossing whose cochain has just reached
/// valuation zero.
pub fn surgery_open_neck(state: &mut FlowState, crossing: usize) -> Result<(), FlowError> {
    let x = state.crossings.get(crossing).cloned().ok_or_else(|| FlowError::Precondition(format!("no crossing {crossing}")))?;
    if !state.curve.graded || !state.curve.ambient.is_plane() {
        return Err(FlowError::Precondition("necks open only on graded plane curves".into()));
    }
    if !x.has_degree_one() {
        return Err(FlowError::Precondition(format!("crossing {} has degrees {:?}, need μ₊₋ = 1", x.id, x.degrees)));
    }
    let series = x.cochain.as_ref().ok_or_else(|| FlowError::Precondition(format!("crossing {} carries no cochain", x.id)))?;
    let lead = series.leading().ok_or_else(|| FlowError::Precondition("zero cochain".into()))?;
    if !lead.exponent.is_zero() {
        return Err(FlowError::Precondition(format!("cochain valuation is {}, not 0", lead.exponent)));
    }
    let a0 = lead.coeff.clone();
    if a0.is_zero() {
        return Err(FlowError::Precondition("leading coefficient is not invertible".into()));
    }
    if x.theta_plus() <= x.theta_minus() {
        return Err(FlowError::Precondition(format!("θ₊ = {} must exceed θ₋ = {}", x.theta_plus(), x.theta_minus())));
    }
    let local = 0.5
        * (state.curve.components[x.sheets[0].component].edge(x.sheets[0].edge).norm()
            + state.curve.components[x.sheets[1].component].edge(x.sheets[1].edge).norm());
    let radius = state.policy.neck_radius.unwrap_or(3.0 * local);
    let (components_before, crossings_before) = (state.curve.components.len(), state.crossings.len());

    // refine around the neck so the template meets a fine mesh
    let mut curve = state.curve.clone();
    for ci in [x.sheets[0].component, x.sheets[1].component] {
        refine_near(&mut curve.components[ci], x.point, 2.0 * radius, radius / 16.0)?;
    }
    let located = self_intersections(&curve)?
        .into_iter()
        .filter(|y| (y.point - x.point).norm() < radius)
        .min_by(|u, v| (u.point - x.point).norm().total_cmp(&(v.point - x.point).norm()))
        .ok_or_else(|| FlowError::Precondition("crossing lost during refinement".into()))?;
    let mut target = located;
    if (target.theta_plus() - x.theta_plus()).abs() > (target.theta_minus() - x.theta_plus()).abs() {
        target.sheets.swap(0, 1);
    }
    smooth_crossing(&mut curve, &target, radius, &a0)?;
    curve.check_shape()?;
    state.curve = curve;
    state.crossings.retain(|y| y.id != x.id);
    state.refresh_crossings()?;
    let faces = faces_with(&state.curve, &state.crossings)?;
    let adjacent_areas = faces
        .iter()
        .filter(|f| f.boundary.iter().any(|z| (z - x.point).norm() < radius))
        .map(|f| f.area)
        .collect();
    state.events.push(Event {
        t: state.t,
        kind: EventKind::OpenNeck {
            crossing: x.id,
            point: pt(x.point),
            radius,
            components_before,
            components_after: state.curve.components.len(),
            crossings_before,
            crossings_after: state.crossings.len(),
            adjacent_areas,
        },
    });
    Ok(())
}
