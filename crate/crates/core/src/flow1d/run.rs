use serde::{Deserialize, Serialize};

use super::faces::{area_rates, faces_with, Face, FaceKind};
use super::state::{
    csf_step, dt_f64, exact_rate, obstruction_status, surgery_collapse, surgery_open_neck, transport_exact, wall_time,
    Event, EventKind, FlowState, ObstructionStatus,
};
use super::FlowError;
use num_rational::BigRational;
use num_traits::Signed;

use crate::novikov::{nv_valuation, valuation_f64};
use crate::planes::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    pub t_max: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_max_steps() -> usize {
    2_000_000
}

impl Horizon {
    pub fn until(t_max: f64) -> Self {
        Horizon { t_max, max_steps: default_max_steps() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecordOptions {
    /// A sample is taken every this many steps and at every event.
    pub sample_every: usize,
    /// Time between snapshots of the whole curve; none when absent.
    pub snapshot_interval: Option<f64>,
}

impl Default for RecordOptions {
    fn default() -> Self {
        RecordOptions { sample_every: 20, snapshot_interval: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    /// Reached the time horizon.
    Horizon,
    StepLimit,
    /// Every component collapsed.
    Empty,
    ObstructedTerminal,
    TerminalSingularity,
}

impl RunStatus {
    pub fn is_terminal(&self) -> bool {
        matches!(self, RunStatus::ObstructedTerminal | RunStatus::TerminalSingularity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceSample {
    pub id: u64,
    pub kind: FaceKind,
    /// Identities of the corner crossings.
    pub corners: Vec<u64>,
    pub area: f64,
    pub predicted_rate: f64,
    pub components: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub step: usize,
    pub total_length: f64,
    pub components: usize,
    pub crossings: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    pub max_curvature: f64,
    pub min_edge: f64,
    pub faces: Vec<FaceSample>,
    /// (crossing id, valuation) for each live cochain.
    pub cochains: Vec<(u64, f64)>,
    pub obstructed: Option<bool>,
    pub potential_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub loops: Vec<Vec<[f64; 2]>>,
    pub crossings: Vec<[f64; 2]>,
    /// (face id, label point, kind).
    pub faces: Vec<(u64, [f64; 2], FaceKind)>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub status: RunStatus,
    /// Estimated singular time for terminal runs.
    pub terminal_time: Option<f64>,
    /// (t, max |κ|) after every step.
    pub curvature: Vec<(f64, f64)>,
    pub snapshots: Vec<Snapshot>,
    /// Step counts at which necks were opened.
    pub surgery_steps: Vec<usize>,
    pub final_state: FlowState,
}

/// Keeps face identities across steps by matching corner sets and centroids.
#[derive(Default)]
struct FaceTracker {
    known: Vec<(u64, Vec<u64>, C64, f64)>,
    next: u64,
}

impl FaceTracker {
    fn assign(&mut self, faces: &[Face], corner_ids: &[Vec<u64>]) -> Vec<(u64, Option<f64>)> {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, old) in self.known.iter().enumerate() {
            for (j, f) in faces.iter().enumerate() {
                if old.1 == corner_ids[j] {
                    pairs.push(((old.2 - f.centroid).norm(), i, j));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<Option<(u64, Option<f64>)>> = vec![None; faces.len()];
        let mut used = vec![false; self.known.len()];
        for (d, i, j) in pairs {
            let scale = self.known[i].3.max(faces[j].area).sqrt();
            if used[i] || out[j].is_some() || d > scale {
                continue;
            }
            used[i] = true;
            out[j] = Some((self.known[i].0, Some(self.known[i].3)));
        }
        let ids: Vec<(u64, Option<f64>)> = out
            .into_iter()
            .map(|o| {
                o.unwrap_or_else(|| {
                    self.next += 1;
                    (self.next, None)
                })
            })
            .collect();
        self.known = faces
            .iter()
            .zip(&ids)
            .zip(corner_ids)
            .map(|((f, (id, _)), cs)| (*id, cs.clone(), f.centroid, f.area))
            .collect();
        ids
    }
}

struct Analysis {
    faces: Vec<Face>,
    corner_ids: Vec<Vec<u64>>,
    ids: Vec<(u64, Option<f64>)>,
    status: Option<ObstructionStatus>,
}

fn analyse(state: &FlowState, tracker: &mut FaceTracker) -> Result<Analysis, FlowError> {
    if !state.curve.ambient.is_plane() || state.curve.components.is_empty() {
        return Ok(Analysis { faces: Vec::new(), corner_ids: Vec::new(), ids: Vec::new(), status: None });
    }
    let faces = faces_with(&state.curve, &state.crossings)?;
    let corner_ids: Vec<Vec<u64>> = faces
        .iter()
        .map(|f| {
            let mut v: Vec<u64> = f.corners.iter().map(|c| state.crossings[c.crossing].id).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let ids = tracker.assign(&faces, &corner_ids);
    let status = if state.curve.graded {
        Some(obstruction_status(&state.curve, &state.crossings, &faces, &state.policy)?)
    } else {
        None
    };
    Ok(Analysis { faces, corner_ids, ids, status })
}

fn sample(state: &FlowState, a: &Analysis) -> Sample {
    let rates = area_rates(&a.faces);
    let faces = a
        .faces
        .iter()
        .zip(&a.ids)
        .zip(&rates)
        .enumerate()
        .map(|(i, ((f, (id, _)), r))| FaceSample {
            id: *id,
            kind: f.kind,
            corners: a.corner_ids[i].clone(),
            area: f.area,
            predicted_rate: *r,
            components: f.components.clone(),
        })
        .collect();
    let (theta_min, theta_max) = if state.curve.components.is_empty() { (0.0, 0.0) } else { state.curve.theta_range() };
    Sample {
        t: state.t,
        step: state.steps,
        total_length: state.curve.total_length(),
        components: state.curve.components.len(),
        crossings: state.crossings.len(),
        theta_min,
        theta_max,
        max_curvature: state.curve.max_curvature(),
        min_edge: if state.curve.components.is_empty() { 0.0 } else { state.curve.min_edge() },
        faces,
        cochains: state
            .crossings
            .iter()
            .filter_map(|x| x.cochain.as_ref().map(|c| (x.id, valuation_f64(c))))
            .collect(),
        obstructed: a.status.as_ref().map(ObstructionStatus::is_obstructed),
        potential_defect: state.potential_defect,
    }
}

fn snapshot(state: &FlowState, a: &Analysis) -> Snapshot {
    let amb = state.curve.ambient;
    Snapshot {
        t: state.t,
        loops: state
            .curve
            .components
            .iter()
            .map(|c| c.points.iter().map(|z| amb.reduce(*z)).map(|z| [z.re, z.im]).collect())
            .collect(),
        crossings: state.crossings.iter().map(|x| [x.point.re, x.point.im]).collect(),
        faces: a.faces.iter().zip(&a.ids).map(|(f, (id, _))| (*id, [f.centroid.re, f.centroid.im], f.kind)).collect(),
    }
}

/// Time left until a face vanishes, from its measured or predicted shrinking rate.
fn time_to_vanish(face: &Face, previous: Option<f64>, dt: f64) -> f64 {
    let measured = previous.map(|a| (face.area - a) / dt).filter(|r| *r < 0.0 && dt > 0.0);
    let rate = measured.unwrap_or(-face.theta_increment);
    if rate < 0.0 {
        face.area / -rate
    } else {
        0.0
    }
}

/// Flows with the full event handling: walls open necks, small unobstructed
/// components collapse, and a vanishing obstructing teardrop or a small
/// ungraded component ends the run.
pub fn run_with_surgeries(initial: FlowState, horizon: &Horizon, record: &RecordOptions) -> Result<Trajectory, FlowError> {
    let mut state = initial;
    let mut tracker = FaceTracker::default();
    let mut samples = Vec::new();
    let mut snapshots = Vec::new();
    let mut curvature = Vec::new();
    let mut surgery_steps = Vec::new();
    let mut terminal_time = None;
    let mut analysis = analyse(&state, &mut tracker)?;
    samples.push(sample(&state, &analysis));
    let mut next_snapshot = 0.0;
    if let Some(dt) = record.snapshot_interval {
        snapshots.push(snapshot(&state, &analysis));
        next_snapshot = dt;
    }
    let denominator = state.policy.exponent_denominator;
    let mut last_dt;
    let status = loop {
        if state.curve.components.is_empty() {
            break RunStatus::Empty;
        }
        if state.t >= horizon.t_max {
            break RunStatus::Horizon;
        }
        if state.steps >= horizon.max_steps {
            break RunStatus::StepLimit;
        }
        let events_before = state.events.len();
        let mut dt = state.stable_dt().min(horizon.t_max - state.t);
        // exponents move by exactly the binary value of dt, unless a wall is closer
        let mut dt_exact = BigRational::from_float(dt).ok_or(FlowError::StepTooLarge { dt, limit: state.stable_dt() })?;
        for x in &state.crossings {
            let Some(v) = x.cochain.as_ref().and_then(nv_valuation) else { continue };
            if let Some(tw) = wall_time(&v, &exact_rate(x, denominator)) {
                if tw.is_positive() && tw < dt_exact {
                    dt_exact = tw;
                    dt = dt_f64(&dt_exact);
                }
            }
        }
        let walls = transport_exact(&mut state, &dt_exact);
        csf_step(&mut state, dt)?;
        last_dt = dt;
        state.refresh_crossings()?;
        curvature.push((state.t, state.curve.max_curvature()));

        for id in walls {
            if !state.policy.open_neck {
                continue;
            }
            if let Some(ix) = state.crossing_index(id) {
                surgery_open_neck(&mut state, ix)?;
                surgery_steps.push(state.steps);
            }
        }
        let previous = analysis;
        analysis = analyse(&state, &mut tracker)?;

        // a crossing at the corner of an obstructing teardrop disappeared: the loop pinched off
        if let Some(ObstructionStatus::Obstructed { witnesses }) = &previous.status {
            let vanished: Vec<u64> = state.events[events_before..]
                .iter()
                .filter_map(|e| match e.kind {
                    EventKind::CrossingVanished { crossing, .. } => Some(crossing),
                    _ => None,
                })
                .collect();
            let hit = witnesses.iter().map(|w| previous.corner_ids[w.face][0]).find(|id| vanished.contains(id));
            if let Some(id) = hit {
                state.events.push(Event {
                    t: state.t,
                    kind: EventKind::ObstructedTerminal { crossing: Some(id), witness_area: 0.0, estimated_time: state.t },
                });
                terminal_time = Some(state.t);
                break RunStatus::ObstructedTerminal;
            }
        }
        if let Some(ObstructionStatus::Obstructed { witnesses }) = &analysis.status {
            if let Some(w) = witnesses.iter().find(|w| w.area <= state.policy.terminal_area) {
                let face = &analysis.faces[w.face];
                let eta = state.t + time_to_vanish(face, analysis.ids[w.face].1, last_dt);
                state.events.push(Event {
                    t: state.t,
                    kind: EventKind::ObstructedTerminal {
                        crossing: Some(state.crossings[w.crossing].id),
                        witness_area: w.area,
                        estimated_time: eta,
                    },
                });
                terminal_time = Some(eta);
                break RunStatus::ObstructedTerminal;
            }
        }

        // small components
        let threshold = state.collapse_threshold();
        let mut ended = None;
        let mut ci = 0;
        while ci < state.curve.components.len() {
            let c = &state.curve.components[ci];
            if c.extent() >= threshold || c.diameter() >= threshold {
                ci += 1;
                continue;
            }
            if !state.curve.graded {
                let own: Vec<usize> = (0..analysis.faces.len()).filter(|&i| analysis.faces[i].components == [ci]).collect();
                let left = own
                    .iter()
                    .map(|&i| time_to_vanish(&analysis.faces[i], analysis.ids[i].1, last_dt))
                    .fold(0.0, f64::max);
                let eta = state.t + left;
                state.events.push(Event { t: state.t, kind: EventKind::TerminalSingularity { component: ci, estimated_time: eta } });
                terminal_time = Some(eta);
                ended = Some(RunStatus::TerminalSingularity);
                break;
            }
            match surgery_collapse(&mut state, ci) {
                Ok(()) => {
                    analysis = analyse(&state, &mut tracker)?;
                }
                Err(FlowError::Precondition(_)) => {
                    let own: Vec<usize> = (0..analysis.faces.len()).filter(|&i| analysis.faces[i].components == [ci]).collect();
                    let left = own
                        .iter()
                        .map(|&i| time_to_vanish(&analysis.faces[i], analysis.ids[i].1, last_dt))
                        .fold(f64::INFINITY, f64::min);
                    let eta = state.t + if left.is_finite() { left } else { 0.0 };
                    state.events.push(Event {
                        t: state.t,
                        kind: EventKind::ObstructedTerminal { crossing: None, witness_area: 0.0, estimated_time: eta },
                    });
                    terminal_time = Some(eta);
                    ended = Some(RunStatus::ObstructedTerminal);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(s) = ended {
            break s;
        }

        let eventful = state.events.len() > events_before;
        if eventful || state.steps % record.sample_every.max(1) == 0 {
            samples.push(sample(&state, &analysis));
        }
        if let Some(interval) = record.snapshot_interval {
            if state.t >= next_snapshot {
                snapshots.push(snapshot(&state, &analysis));
                next_snapshot += interval;
            }
        }
    };
    if samples.last().map(|s| s.step) != Some(state.steps) {
        samples.push(sample(&state, &analysis));
    }
    Ok(Trajectory {
        samples,
        events: state.events.clone(),
        status,
        terminal_time,
        curvature,
        snapshots,
        surgery_steps,
        final_state: state,
    })
}
