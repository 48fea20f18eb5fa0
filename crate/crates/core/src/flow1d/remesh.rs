//! Curvature-adaptive remeshing: edges are split where they turn too much
//! or run too long and merged where they are far shorter than needed.

use super::curve::{Component, MIN_VERTICES};
use super::FlowError;
use crate::planes::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemeshParams {
    /// Longest edge allowed anywhere.
    pub max_edge: f64,
    /// Target turning angle per edge.
    pub turn: f64,
    /// Edges are never split below this length.
    pub min_edge: f64,
}

/// Four-point subdivision midpoint of edge k.
fn midpoint(c: &Component, k: usize) -> C64 {
    let k = k as isize;
    (-c.at(k - 1) + c.at(k) * 9.0 + c.at(k + 1) * 9.0 - c.at(k + 2)) / 16.0
}

fn targets(c: &Component, p: &RemeshParams) -> Vec<f64> {
    let kappa: Vec<f64> = c.curvature().iter().map(|k| k.norm()).collect();
    let n = c.len();
    (0..n)
        .map(|k| {
            let curv = kappa[k].max(kappa[(k + 1) % n]).max(1e-12);
            (p.turn / curv).clamp(p.min_edge, p.max_edge)
        })
        .collect()
}

fn rebuild(c: &mut Component, points: Vec<C64>, potential: Vec<f64>) -> Result<(), FlowError> {
    let anchor = c.theta[0];
    c.points = points;
    c.potential = potential;
    c.relift_at(0, anchor)
}

/// One split pass followed by one merge pass; returns whether anything changed.
pub fn remesh_component(c: &mut Component, p: &RemeshParams) -> Result<bool, FlowError> {
    let mut changed = false;
    for _ in 0..4 {
        let t = targets(c, p);
        let n = c.len();
        let lens = c.edge_lengths();
        if !(0..n).any(|k| lens[k] > 1.5 * t[k] && lens[k] > 2.0 * p.min_edge) {
            break;
        }
        let mut pts = Vec::with_capacity(n + n / 4);
        let mut pot = Vec::new();
        for k in 0..n {
            pts.push(c.points[k]);
            if let Some(f) = c.potential.get(k) {
                pot.push(*f);
            }
            if lens[k] > 1.5 * t[k] && lens[k] > 2.0 * p.min_edge {
                let m = midpoint(c, k);
                pts.push(m);
                if let Some(f) = c.potential_at(k, m) {
                    pot.push(f);
                }
            }
        }
        rebuild(c, pts, pot)?;
        changed = true;
    }
    let t = targets(c, p);
    let lens = c.edge_lengths();
    let n = c.len();
    let mut keep = vec![true; n];
    let mut removed = 0;
    // vertex 0 anchors the lift and the potential
    let mut k = 1;
    while k < n {
        let target = t[k - 1].min(t[k]);
        let short = lens[k - 1] + lens[k] < 0.6 * target || lens[k - 1].min(lens[k]) < 0.2 * target;
        if short && n - removed > MIN_VERTICES {
            keep[k] = false;
            removed += 1;
            k += 2;
        } else {
            k += 1;
        }
    }
    if removed > 0 {
        let pts = (0..n).filter(|&k| keep[k]).map(|k| c.points[k]).collect();
        let pot = if c.potential.is_empty() { Vec::new() } else { (0..n).filter(|&k| keep[k]).map(|k| c.potential[k]).collect() };
        rebuild(c, pts, pot)?;
        changed = true;
    }
    if changed && !c.potential.is_empty() {
        c.integrate_potential();
    }
    Ok(changed)
}

/// Splits edges touching the disc |z − center| < radius until none is longer than `max_len`.
pub(crate) fn refine_near(c: &mut Component, center: C64, radius: f64, max_len: f64) -> Result<(), FlowError> {
    for _ in 0..12 {
        let n = c.len();
        let lens = c.edge_lengths();
        let hit = |k: usize| (c.points[k] - center).norm() < radius || (c.at(k as isize + 1) - center).norm() < radius;
        if !(0..n).any(|k| hit(k) && lens[k] > max_len) {
            return Ok(());
        }
        let mut pts = Vec::with_capacity(2 * n);
        let mut pot = Vec::new();
        for k in 0..n {
            pts.push(c.points[k]);
            if let Some(f) = c.potential.get(k) {
                pot.push(*f);
            }
            if hit(k) && lens[k] > max_len {
                let m = midpoint(c, k);
                pts.push(m);
                if let Some(f) = c.potential_at(k, m) {
                    pot.push(f);
                }
            }
        }
        rebuild(c, pts, pot)?;
    }
    Ok(())
}
