//! Explicit special Lagrangian and mean-curvature-flow soliton families in
//! ℂ^m: Lawlor necks, expanders, translators, the grim reaper, the
//! Harvey-Lawson T²-cone family and U(1)-invariant potentials.

mod invert;
pub mod profile;
pub mod u1;

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planes::{plane_phase, wrap_angle, GradedPlane, PlaneError, C64};
use crate::quadrature::QuadratureError;
pub use invert::family_invert;
use profile::{full_integrals, psi_tail, Profile, Weight};

/// Quadrature tolerance for angles.
pub const ANGLE_TOL: f64 = 1e-14;
/// Looser tolerance used for the second, independent evaluation.
const COARSE_TOL: f64 = 1e-10;
const PROFILE_INTERVALS: usize = 2048;

#[derive(Debug, Clone, Error)]
pub enum SolitonError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("quadrature precisions disagree by {0:e}")]
    PrecisionMismatch(f64),
    #[error("target angles outside the admissible region: {0}")]
    Inadmissible(String),
    #[error("Newton iteration did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("sample parameter out of range: {0}")]
    OutOfRange(String),
    #[error("induced metric is degenerate at the sample")]
    DegenerateMetric,
    #[error("operation not available for {0:?}")]
    Unsupported(SolitonKind),
    #[error(transparent)]
    Plane(#[from] PlaneError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonKind {
    Lawlor,
    Expander,
    Translator,
    GrimReaper,
    HlCone,
    HlL1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub kind: SolitonKind,
    pub m: usize,
    #[serde(default)]
    pub a: Vec<f64>,
    #[serde(default)]
    pub alpha: f64,
    /// Size parameter of the Harvey-Lawson smoothing.
    #[serde(default)]
    pub area: Option<f64>,
}

impl SolitonParams {
    pub fn lawlor(a: &[f64]) -> Self {
        SolitonParams { kind: SolitonKind::Lawlor, m: a.len(), a: a.to_vec(), alpha: 0.0, area: None }
    }

    pub fn expander(alpha: f64, a: &[f64]) -> Self {
        SolitonParams { kind: SolitonKind::Expander, m: a.len(), a: a.to_vec(), alpha, area: None }
    }

    pub fn translator(alpha: f64, a: &[f64]) -> Self {
        SolitonParams { kind: SolitonKind::Translator, m: a.len() + 1, a: a.to_vec(), alpha, area: None }
    }

    pub fn grim_reaper() -> Self {
        SolitonParams { kind: SolitonKind::GrimReaper, m: 1, a: Vec::new(), alpha: 1.0, area: None }
    }

    pub fn validate(&self) -> Result<(), SolitonError> {
        let bad = |s: String| Err(SolitonError::InvalidParams(s));
        if self.a.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return bad(format!("every a_k must be positive, got {:?}", self.a));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("alpha must be nonnegative, got {}", self.alpha));
        }
        match self.kind {
            SolitonKind::Lawlor | SolitonKind::Expander => {
                if self.m <= 2 {
                    return bad(format!("dimension must exceed 2, got {}", self.m));
                }
                if self.a.len() != self.m {
                    return bad(format!("expected {} a-values, got {}", self.m, self.a.len()));
                }
                if self.kind == SolitonKind::Lawlor && self.alpha != 0.0 {
                    return bad("the neck family has alpha = 0".into());
                }
            }
            SolitonKind::Translator => {
                if self.m < 2 || self.alpha <= 0.0 {
                    return bad("translators need m >= 2 and alpha > 0".into());
                }
                if self.a.len() + 1 != self.m {
                    return bad(format!("expected {} a-values, got {}", self.m - 1, self.a.len()));
                }
            }
            SolitonKind::GrimReaper => {
                if self.m != 1 {
                    return bad("the grim reaper is a curve (m = 1)".into());
                }
            }
            SolitonKind::HlCone | SolitonKind::HlL1 => {
                if self.m != 3 {
                    return bad("the T²-cone family lives in ℂ³".into());
                }
                if self.kind == SolitonKind::HlL1 && !self.area.is_some_and(|a| a > 0.0) {
                    return bad("hl_l1 needs a positive size parameter".into());
                }
            }
        }
        Ok(())
    }

    /// The translating vector (0, ..., 0, α), or 1 for the grim reaper.
    pub fn translation(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.m];
        if let Some(last) = v.last_mut() {
            *last = C64::new(self.alpha, 0.0);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleData {
    pub phi: Vec<f64>,
    /// Neck size, for the neck family only.
    pub area: Option<f64>,
}

impl AngleData {
    pub fn sum(&self) -> f64 {
        self.phi.iter().sum()
    }
}

fn angles_two_precisions(a: &[f64], alpha: f64) -> Result<(Vec<f64>, f64), SolitonError> {
    let w = Weight::new(a, alpha);
    let (phi, area) = full_integrals(&w, ANGLE_TOL)?;
    let (phi_c, area_c) = full_integrals(&w, COARSE_TOL)?;
    let gap = phi.iter().zip(&phi_c).map(|(p, q)| (p - q).abs()).fold((area - area_c).abs(), f64::max);
    if gap > 1e-8 {
        return Err(SolitonError::PrecisionMismatch(gap));
    }
    Ok((phi, area))
}

pub fn lawlor_angles(a: &[f64]) -> Result<AngleData, SolitonError> {
    SolitonParams::lawlor(a).validate()?;
    let (phi, area) = angles_two_precisions(a, 0.0)?;
    Ok(AngleData { phi, area: Some(area) })
}

pub fn expander_angles(alpha: f64, a: &[f64]) -> Result<AngleData, SolitonError> {
    SolitonParams::expander(alpha, a).validate()?;
    let (phi, area) = angles_two_precisions(a, alpha)?;
    Ok(AngleData { phi, area: (alpha == 0.0).then_some(area) })
}

pub fn translator_angles(alpha: f64, a: &[f64]) -> Result<AngleData, SolitonError> {
    SolitonParams::translator(alpha, a).validate()?;
    let (phi, _) = angles_two_precisions(a, alpha)?;
    Ok(AngleData { phi, area: None })
}

pub fn family_angles(params: &SolitonParams) -> Result<AngleData, SolitonError> {
    match params.kind {
        SolitonKind::Lawlor => lawlor_angles(&params.a),
        SolitonKind::Expander => expander_angles(params.alpha, &params.a),
        SolitonKind::Translator => translator_angles(params.alpha, &params.a),
        k => Err(SolitonError::Unsupported(k)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub point: Vec<C64>,
    pub y: f64,
    pub x: Vec<f64>,
    pub theta: f64,
}

/// A soliton with its angle profiles tabulated once.
#[derive(Debug, Clone)]
pub struct Soliton {
    params: SolitonParams,
    weight: Option<Weight>,
    profile: Option<Profile>,
    angles: Option<AngleData>,
}

impl Soliton {
    pub fn build(params: &SolitonParams) -> Result<Self, SolitonError> {
        params.validate()?;
        match params.kind {
            SolitonKind::Lawlor | SolitonKind::Expander | SolitonKind::Translator => {
                let angles = family_angles(params)?;
                let weight = Weight::new(&params.a, params.alpha);
                let profile = Profile::build(&weight, PROFILE_INTERVALS, 1e-13)?;
                Ok(Soliton { params: params.clone(), weight: Some(weight), profile: Some(profile), angles: Some(angles) })
            }
            SolitonKind::GrimReaper => Ok(Soliton { params: params.clone(), weight: None, profile: None, angles: None }),
            k => Err(SolitonError::Unsupported(k)),
        }
    }

    pub fn params(&self) -> &SolitonParams {
        &self.params
    }

    pub fn angles(&self) -> Option<&AngleData> {
        self.angles.as_ref()
    }

    fn profile(&self) -> &Profile {
        self.profile.as_ref().expect("profile families only")
    }

    fn weight(&self) -> &Weight {
        self.weight.as_ref().expect("profile families only")
    }

    pub fn psi(&self, k: usize, y: f64) -> f64 {
        self.profile().psi(k, y)
    }

    fn psi_sum(&self, y: f64) -> f64 {
        (0..self.profile().dim()).map(|k| self.psi(k, y)).sum()
    }

    /// Point of the soliton at profile parameter y and direction x. For the
    /// translator x ranges over ℝ^{m-1}; otherwise it is a unit vector.
    pub fn point(&self, y: f64, x: &[f64]) -> Result<Vec<C64>, SolitonError> {
        if !y.is_finite() {
            return Err(SolitonError::OutOfRange(format!("y = {y}")));
        }
        let p = &self.params;
        match p.kind {
            SolitonKind::Lawlor | SolitonKind::Expander => {
                if x.len() != p.m {
                    return Err(SolitonError::InvalidParams(format!("direction has {} entries", x.len())));
                }
                Ok((0..p.m)
                    .map(|k| C64::from_polar((1.0 / p.a[k] + y * y).sqrt(), self.psi(k, y)) * x[k])
                    .collect())
            }
            SolitonKind::Translator => {
                let n = p.m - 1;
                if x.len() != n {
                    return Err(SolitonError::InvalidParams(format!("translator chart needs {n} coordinates")));
                }
                let mut z: Vec<C64> = (0..n)
                    .map(|j| C64::from_polar((1.0 / p.a[j] + y * y).sqrt(), self.psi(j, y)) * x[j])
                    .collect();
                let s = self.weight().inv_sqrt_p(y);
                let re = 0.5 * y * y - 0.5 * x.iter().map(|v| v * v).sum::<f64>();
                let im = -(self.psi_sum(y) + s.atan2(y)) / p.alpha;
                z.push(C64::new(re, im));
                Ok(z)
            }
            SolitonKind::GrimReaper => {
                if y.abs() >= FRAC_PI_2 {
                    return Err(SolitonError::OutOfRange(format!("grim reaper needs |y| < π/2, got {y}")));
                }
                Ok(vec![C64::new(-y.cos().ln(), y)])
            }
            k => Err(SolitonError::Unsupported(k)),
        }
    }

    /// Closed-form Lagrangian angle; depends on y only.
    pub fn theta(&self, y: f64) -> f64 {
        match self.params.kind {
            SolitonKind::Lawlor | SolitonKind::Expander => {
                let s = self.weight().inv_sqrt_p(y);
                self.psi_sum(y) + (-s).atan2(-y)
            }
            SolitonKind::Translator => {
                let s = self.weight().inv_sqrt_p(y);
                self.psi_sum(y) + s.atan2(y)
            }
            SolitonKind::GrimReaper => FRAC_PI_2 - y,
            _ => f64::NAN,
        }
    }

    pub fn sample(&self, y: f64, x: &[f64]) -> Result<SurfaceSample, SolitonError> {
        let point = self.point(y, x)?;
        Ok(SurfaceSample { point, y, x: x.to_vec(), theta: self.theta(y) })
    }

    /// Local chart around (y, x) used for finite differences.
    fn chart(&self, y: f64, x: &[f64]) -> Chart<'_> {
        Chart::new(self, y, x)
    }

    /// Tangent frame at (y, x) by central differences with step h, and the
    /// orientation under which its phase equals the closed-form angle.
    pub fn tangent_frame(&self, y: f64, x: &[f64], h: f64) -> Result<GradedPlane, SolitonError> {
        let chart = self.chart(y, x);
        let tangents = chart.tangents(h, 4)?;
        let m = tangents.len();
        let frame = DMatrix::from_fn(m, m, |i, j| tangents[j][i]);
        let plane = GradedPlane { frame, orientation: chart.orientation, grading: 0.0 };
        Ok(plane)
    }

    /// Phase of the finite-difference tangent frame.
    pub fn frame_phase(&self, y: f64, x: &[f64], h: f64) -> Result<f64, SolitonError> {
        Ok(plane_phase(&self.tangent_frame(y, x, h)?)?)
    }

    /// H = J∇θ with both the tangent vectors and dθ taken by finite
    /// differences of the given order (2 or 4).
    pub fn mean_curvature(&self, y: f64, x: &[f64], h: f64, order: usize) -> Result<Vec<C64>, SolitonError> {
        let chart = self.chart(y, x);
        let e = chart.tangents(h, order)?;
        let dtheta = chart.theta_gradient(h, order);
        let grad = metric_raise(&e, &dtheta)?;
        Ok(grad.into_iter().map(|v| C64::new(0.0, 1.0) * v).collect())
    }

    /// ‖H − αF^⊥‖ (expanders and necks) or ‖H − v^⊥‖ (translators).
    pub fn residual_at(&self, y: f64, x: &[f64], h: f64, order: usize) -> Result<f64, SolitonError> {
        let chart = self.chart(y, x);
        let e = chart.tangents(h, order)?;
        let dtheta = chart.theta_gradient(h, order);
        let grad = metric_raise(&e, &dtheta)?;
        let hvec: Vec<C64> = grad.iter().map(|v| C64::new(0.0, 1.0) * v).collect();
        let target = match self.params.kind {
            SolitonKind::Translator | SolitonKind::GrimReaper => normal_part(&self.params.translation(), &e)?,
            _ => {
                let f = self.point(y, x)?;
                normal_part(&f, &e)?.into_iter().map(|v| v * self.params.alpha).collect()
            }
        };
        Ok(hvec.iter().zip(&target).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn residual(&self, grid: &[(f64, Vec<f64>)], h: f64) -> Result<f64, SolitonError> {
        let mut worst: f64 = 0.0;
        for (y, x) in grid {
            worst = worst.max(self.residual_at(*y, x, h, 2)?);
        }
        Ok(worst)
    }

    /// Distance from the sample at (y, x) to the cone Π₀ ∪ Π_φ.
    pub fn cone_distance(&self, y: f64, x: &[f64]) -> Result<f64, SolitonError> {
        let phi = &self.angles.as_ref().ok_or(SolitonError::Unsupported(self.params.kind))?.phi;
        let w = self.weight();
        let a = &self.params.a;
        // phase defects taken from one-sided integrals so that neither end cancels
        let mut d_phi = 0.0;
        let mut d_0 = 0.0;
        for k in 0..phi.len() {
            let r = (1.0 / a[k] + y * y).sqrt() * x[k];
            let lo = if y < 0.0 { psi_tail(w, k, -y, 1e-16)? } else { self.psi(k, y) };
            let hi = if y > 0.0 { psi_tail(w, k, y, 1e-16)? } else { phi[k] - self.psi(k, y) };
            d_phi += (r * hi.sin()).powi(2);
            d_0 += (r * lo.sin()).powi(2);
        }
        Ok(d_phi.sqrt().min(d_0.sqrt()))
    }

    /// Asymptotic rate ρ: the least-squares slope of log(distance to the
    /// cone) against log r, plus one. Radii where the distance has dropped
    /// below double precision are skipped; if fewer than two remain the decay
    /// is faster than any power and −∞ is returned.
    pub fn asymptotic_decay(&self, radii: &[f64]) -> Result<f64, SolitonError> {
        if !matches!(self.params.kind, SolitonKind::Lawlor | SolitonKind::Expander) {
            return Err(SolitonError::Unsupported(self.params.kind));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) || radii.len() < 2 {
            return Err(SolitonError::InvalidParams("radii must be increasing (at least two)".into()));
        }
        let m = self.params.m;
        let x = vec![1.0 / (m as f64).sqrt(); m];
        let offset: f64 = self.params.a.iter().map(|a| 1.0 / (a * m as f64)).sum();
        let mut pts = Vec::new();
        for &r in radii {
            if r * r <= offset {
                return Err(SolitonError::InvalidParams(format!("radius {r} is inside the neck")));
            }
            let y = (r * r - offset).sqrt();
            let d = self.cone_distance(y, &x)?;
            if d > 1e-13 * r {
                pts.push((r.ln(), d.ln()));
            }
        }
        if pts.len() < 2 {
            return Ok(f64::NEG_INFINITY);
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Ok(sxy / sxx + 1.0)
    }
}

/// Coordinates around a base point: (y, s_2..s_m) for necks and expanders,
/// (x_1..x_{m-1}, y) for translators, y for the grim reaper.
struct Chart<'a> {
    sol: &'a Soliton,
    base: Vec<f64>,
    dir: Vec<f64>,
    sphere: Vec<Vec<f64>>,
    orientation: i8,
}

impl<'a> Chart<'a> {
    fn new(sol: &'a Soliton, y: f64, x: &[f64]) -> Self {
        match sol.params.kind {
            SolitonKind::Lawlor | SolitonKind::Expander => {
                let m = x.len();
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let dir: Vec<f64> = x.iter().map(|v| v / norm).collect();
                let sphere = sphere_basis(&dir);
                let mut base = vec![0.0; m];
                base[0] = y;
                // the closed-form angle uses the orientation (−∂_y, sphere)
                Chart { sol, base, dir, sphere, orientation: -1 }
            }
            SolitonKind::Translator => {
                let mut base = x.to_vec();
                base.push(y);
                Chart { sol, base, dir: Vec::new(), sphere: Vec::new(), orientation: 1 }
            }
            _ => Chart { sol, base: vec![y], dir: Vec::new(), sphere: Vec::new(), orientation: 1 },
        }
    }

    fn split(&self, c: &[f64]) -> (f64, Vec<f64>) {
        match self.sol.params.kind {
            SolitonKind::Lawlor | SolitonKind::Expander => {
                let mut x = self.dir.clone();
                for (j, b) in self.sphere.iter().enumerate() {
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi += c[j + 1] * bi;
                    }
                }
                let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                x.iter_mut().for_each(|v| *v /= n);
                (c[0], x)
            }
            SolitonKind::Translator => {
                let n = c.len() - 1;
                (c[n], c[..n].to_vec())
            }
            _ => (c[0], Vec::new()),
        }
    }

    fn eval(&self, c: &[f64]) -> Result<Vec<C64>, SolitonError> {
        let (y, x) = self.split(c);
        self.sol.point(y, &x)
    }

    fn theta(&self, c: &[f64]) -> f64 {
        let (y, _) = self.split(c);
        self.sol.theta(y)
    }

    fn stencil(order: usize) -> &'static [(f64, f64)] {
        if order >= 4 {
            &[(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)]
        } else {
            &[(-1.0, -0.5), (1.0, 0.5)]
        }
    }

    fn tangents(&self, h: f64, order: usize) -> Result<Vec<Vec<C64>>, SolitonError> {
        let dim = self.base.len();
        let mut out = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut acc: Option<Vec<C64>> = None;
            for &(off, w) in Self::stencil(order) {
                let mut c = self.base.clone();
                c[i] += off * h;
                let f = self.eval(&c)?;
                let acc = acc.get_or_insert_with(|| vec![C64::new(0.0, 0.0); f.len()]);
                for (a, v) in acc.iter_mut().zip(&f) {
                    *a += v * (w / h);
                }
            }
            out.push(acc.expect("non-empty stencil"));
        }
        Ok(out)
    }

    fn theta_gradient(&self, h: f64, order: usize) -> Vec<f64> {
        (0..self.base.len())
            .map(|i| {
                Self::stencil(order)
                    .iter()
                    .map(|&(off, w)| {
                        let mut c = self.base.clone();
                        c[i] += off * h;
                        w * self.theta(&c) / h
                    })
                    .sum()
            })
            .collect()
    }
}

/// Orthonormal basis of x^⊥ with det[x, w_2, ..., w_m] = +1.
fn sphere_basis(x: &[f64]) -> Vec<Vec<f64>> {
    let m = x.len();
    let mut basis: Vec<Vec<f64>> = vec![x.to_vec()];
    for e in 0..m {
        if basis.len() == m {
            break;
        }
        let mut v = vec![0.0; m];
        v[e] = 1.0;
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(p, q)| p * q).sum();
            v.iter_mut().zip(b).for_each(|(p, q)| *p -= d * q);
        }
        let n = v.iter().map(|p| p * p).sum::<f64>().sqrt();
        if n > 1e-6 {
            basis.push(v.into_iter().map(|p| p / n).collect());
        }
    }
    let mat = DMatrix::from_fn(m, m, |i, j| basis[j][i]);
    if mat.determinant() < 0.0 {
        let last = basis.last_mut().expect("m >= 2");
        last.iter_mut().for_each(|p| *p = -*p);
    }
    basis.remove(0);
    basis
}

fn real_dot(u: &[C64], v: &[C64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a.re * b.re + a.im * b.im).sum()
}

fn gram(e: &[Vec<C64>]) -> DMatrix<f64> {
    let n = e.len();
    DMatrix::from_fn(n, n, |i, j| real_dot(&e[i], &e[j]))
}

/// Σ g^{ij} c_j e_i: the tangent vector whose pairings with the e_j are c.
fn metric_raise(e: &[Vec<C64>], c: &[f64]) -> Result<Vec<C64>, SolitonError> {
    let g = gram(e);
    let chol = g.cholesky().ok_or(SolitonError::DegenerateMetric)?;
    let w = chol.solve(&DVector::from_column_slice(c));
    let mut out = vec![C64::new(0.0, 0.0); e[0].len()];
    for (i, ei) in e.iter().enumerate() {
        for (o, v) in out.iter_mut().zip(ei) {
            *o += v * w[i];
        }
    }
    Ok(out)
}

/// Component of f normal to the span of the tangents e.
fn normal_part(f: &[C64], e: &[Vec<C64>]) -> Result<Vec<C64>, SolitonError> {
    let c: Vec<f64> = e.iter().map(|ei| real_dot(ei, f)).collect();
    let t = metric_raise(e, &c)?;
    Ok(f.iter().zip(&t).map(|(a, b)| a - b).collect())
}

/// Membership in the Harvey-Lawson cone (`HlCone`) or its smoothing
/// |z₁|² − A = |z₂|² = |z₃|² (`HlL1`), both with z₁z₂z₃ ∈ [0, ∞). Returns the
/// verdict at tolerance `tol` and the worst defect.
pub fn hl_membership(kind: SolitonKind, z: [C64; 3], area: f64, tol: f64) -> Result<(bool, f64), SolitonError> {
    let shift = match kind {
        SolitonKind::HlCone => 0.0,
        SolitonKind::HlL1 => area,
        k => return Err(SolitonError::Unsupported(k)),
    };
    let n = z.map(|v| v.norm_sqr());
    let prod = z[0] * z[1] * z[2];
    let ray = if prod.re >= 0.0 { prod.im.abs() } else { prod.norm() };
    let defect = [(n[0] - shift - n[1]).abs(), (n[1] - n[2]).abs(), ray].into_iter().fold(0.0, f64::max);
    Ok((defect <= tol, defect))
}

/// The variants L^A_2, L^A_3: the distinguished coordinate is `index`.
pub fn hl_variant_membership(index: usize, z: [C64; 3], area: f64, tol: f64) -> Result<(bool, f64), SolitonError> {
    if !(1..=3).contains(&index) {
        return Err(SolitonError::InvalidParams(format!("variant index {index} not in 1..=3")));
    }
    let r = index - 1;
    let rotated = [z[r], z[(r + 1) % 3], z[(r + 2) % 3]];
    hl_membership(SolitonKind::HlL1, rotated, area, tol)
}

/// Angles wrapped for comparison against the frame phase.
pub fn phase_gap(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

pub fn default_sample_grid(m: usize, ys: &[f64]) -> Vec<(f64, Vec<f64>)> {
    let dirs: Vec<Vec<f64>> = {
        let mut d = vec![vec![1.0 / (m as f64).sqrt(); m]];
        let mut e = vec![0.2; m];
        e[0] = 1.0;
        let n = e.iter().map(|v: &f64| v * v).sum::<f64>().sqrt();
        d.push(e.into_iter().map(|v| v / n).collect());
        d
    };
    let mut out = Vec::new();
    for y in ys {
        for x in &dirs {
            out.push((*y, x.clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests;
