//! Curve-shortening flow of immersed graded curves in ℂ and on flat tori,
//! with crossing and face analytics, cochain exponents, wall detection and
//! surgeries.
//!
//! A curve is a list of closed polylines. The phase θ of a curve is the lifted
//! tangent angle, stored per edge, and the flow moves vertices by the discrete
//! curvature vector, which is the Lagrangian mean curvature flow in dimension
//! one with Ω = dz.

mod crossings;
mod curve;
mod faces;
pub mod presets;
mod probe;
mod remesh;
mod run;
mod state;
#[cfg(test)]
mod tests;

use thiserror::Error;

use crate::novikov::NovikovError;
use crate::planes::PlaneError;

pub use crossings::{self_intersections, Crossing, Sheet, ANGLE_TOL};
pub use curve::{build_curve, cross, Ambient, Component, CurveOptions, ImmersedCurve, VertexLoop, MAX_TURN, MIN_VERTICES};
pub use faces::{area_rates, faces, faces_with, Corner, Face, FaceKind};
pub use probe::{singularity_probe, ProbeReport, SingularityType};
pub use remesh::{remesh_component, RemeshParams};
pub use run::{run_with_surgeries, FaceSample, Horizon, RecordOptions, RunStatus, Sample, Snapshot, Trajectory};
pub use state::{
    csf_step, neck_arcs, obstruction_status, shift_cochain, surgery_collapse, surgery_open_neck, transport_cochain,
    wall_time, Event, EventKind, FlowPolicy, FlowState, HolonomyConstraint, ObstructionStatus, Witness,
};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("component {component} has {count} vertices, at least {min} are needed", min = MIN_VERTICES)]
    TooFewVertices { component: usize, count: usize },
    #[error("component {component} repeats vertex {index}")]
    RepeatedVertex { component: usize, index: usize },
    #[error("component {component} turns by {turn:.4} at vertex {index}, beyond the resolution limit")]
    Resolution { component: usize, index: usize, turn: f64 },
    #[error("component {component} has Maslov number {maslov}; a grading needs 0")]
    NotMaslovZero { component: usize, maslov: i64 },
    #[error("component {component} encloses signed area {area:e}; exact mode needs 0")]
    NotExact { component: usize, area: f64 },
    #[error("near-tangent crossing at ({x:.6}, {y:.6}) with angle {angle:e}")]
    Degenerate { x: f64, y: f64, angle: f64 },
    #[error("time step {dt:e} exceeds the stable limit {limit:e}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("curvature {curvature:e} overflows the mesh at t = {t}")]
    CurvatureOverflow { curvature: f64, t: f64 },
    #[error("face construction failed: {0}")]
    Arrangement(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid ambient surface: {0}")]
    Ambient(String),
    #[error("insufficient probe window: {0}")]
    Window(String),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error(transparent)]
    Plane(#[from] PlaneError),
}
