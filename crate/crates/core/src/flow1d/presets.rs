//! Ready-made initial curves.

use std::f64::consts::PI;

use super::curve::{build_curve, Ambient, CurveOptions, ImmersedCurve, VertexLoop};
use super::faces::{faces, FaceKind};
use super::FlowError;
use crate::planes::C64;

/// Samples per output vertex in the dense parametrizations.
const DENSE: usize = 64;

pub fn circle(center: C64, radius: f64, n: usize) -> VertexLoop {
    let points = (0..n).map(|k| center + C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64)).collect();
    VertexLoop::closed(points)
}

/// Resamples a closed dense polyline at n points equally spaced in arclength,
/// the first half a spacing after the first dense point.
pub fn resample(dense: &[C64], n: usize) -> Vec<C64> {
    let m = dense.len();
    let mut cum = vec![0.0];
    for k in 0..m {
        cum.push(cum[k] + (dense[(k + 1) % m] - dense[k]).norm());
    }
    let total = cum[m];
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    for i in 0..n {
        let s = total * (i as f64 + 0.5) / n as f64;
        while cum[j + 1] < s {
            j += 1;
        }
        let w = (s - cum[j]) / (cum[j + 1] - cum[j]);
        out.push(dense[j] + (dense[(j + 1) % m] - dense[j]) * w);
    }
    out
}

fn sample_closed<F: Fn(f64) -> C64>(f: F, n: usize) -> Vec<C64> {
    let m = DENSE * n;
    let dense: Vec<C64> = (0..m).map(|k| f(2.0 * PI * k as f64 / m as f64)).collect();
    resample(&dense, n)
}

/// Gerono lemniscate with its right lobe scaled by `right` and left lobe by
/// `left`; the lobes wind in opposite senses.
fn lemniscate(right: f64, left: f64, n: usize) -> VertexLoop {
    VertexLoop::closed(sample_closed(
        |t| {
            let z = C64::new(t.cos(), t.sin() * t.cos());
            z * if z.re >= 0.0 { right } else { left }
        },
        n,
    ))
}

/// Figure-eight whose two teardrops have areas `right` and `left`.
pub fn infinity(right: f64, left: f64, n: usize, options: &CurveOptions) -> Result<ImmersedCurve, FlowError> {
    if !(right > 0.0 && left > 0.0) {
        return Err(FlowError::Precondition("lobe areas must be positive".into()));
    }
    // each lobe of the unit lemniscate has area 2/3
    let (mut sr, mut sl) = ((1.5 * right).sqrt(), (1.5 * left).sqrt());
    for _ in 0..8 {
        let curve = build_curve(Ambient::Plane, vec![lemniscate(sr, sl, n)], &CurveOptions { exact: false, ..options.clone() })?;
        let fs = faces(&curve)?;
        let find = |right_side: bool| {
            fs.iter()
                .find(|f| f.kind == FaceKind::Teardrop && (f.centroid.re > 0.0) == right_side)
                .map(|f| f.area)
                .ok_or_else(|| FlowError::Arrangement("lemniscate lobe missing".into()))
        };
        let (ar, al) = (find(true)?, find(false)?);
        if (ar - right).abs() < 1e-13 && (al - left).abs() < 1e-13 {
            break;
        }
        sr *= (right / ar).sqrt();
        sl *= (left / al).sqrt();
    }
    build_curve(Ambient::Plane, vec![lemniscate(sr, sl, n)], options)
}

/// Closed curve x = cos t + b cos³t, y = h sin 4t: a chain of four lobes
/// joined at three crossings on the x-axis, with outer teardrops and inner
/// bigons. Symmetric under x ↦ −x with reversed orientation, so its enclosed
/// signed area vanishes. `n` should be even.
pub fn chain(b: f64, h: f64, n: usize) -> VertexLoop {
    VertexLoop::closed(sample_closed(|t| C64::new(t.cos() + b * t.cos().powi(3), h * (4.0 * t).sin()), n))
}

/// Chain used for wall crossing: outer teardrops slightly larger than the bigons.
pub fn wall_chain(n: usize) -> VertexLoop {
    chain(1.5, 0.4, n)
}

/// Graph of y = c + a sin 2πx over one period on ℂ/(ℤ + τℤ), c = Im τ / 2;
/// a loop in the class (1, 0).
pub fn torus_wave(tau: [f64; 2], amplitude: f64, n: usize) -> VertexLoop {
    let c = tau[1] / 2.0;
    let points = (0..n)
        .map(|k| {
            let x = k as f64 / n as f64;
            C64::new(x, c + amplitude * (2.0 * PI * x).sin())
        })
        .collect();
    VertexLoop { points, class: [1, 0] }
}

/// Straight loop y = Im τ / 2 in the class (1, 0).
pub fn torus_geodesic(tau: [f64; 2], n: usize) -> VertexLoop {
    torus_wave(tau, 0.0, n)
}
