//! Graded Lagrangian m-planes in ℂ^m, characteristic angles and degrees of
//! transverse intersections.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex<f64>;

/// Planes are transverse when every angle satisfies |sin φ| above this.
pub const TRANSVERSALITY_TOL: f64 = 1e-9;
/// Degrees are accepted when within this distance of an integer.
pub const DEGREE_TOL: f64 = 1e-9;
const LAGRANGIAN_TOL: f64 = 1e-12;
const GRADING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error)]
pub enum PlaneError {
    #[error("frame is degenerate (column {0} dependent on the previous ones)")]
    DegenerateFrame(usize),
    #[error("frame is not Lagrangian: symplectic defect {0:e}")]
    NotLagrangian(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("grading {grading} disagrees with the frame phase {phase}")]
    GradingInconsistent { grading: f64, phase: f64 },
    #[error("planes are not transverse; {} common direction(s)", directions.len())]
    NonTransverse { angles: Vec<f64>, directions: Vec<Vec<C64>> },
    #[error("grading mismatch: (Σφ + θ - θ')/π = {0} is not an integer")]
    GradingMismatch(f64),
}

/// An oriented Lagrangian plane spanned over ℝ by the columns of `frame`,
/// together with a real lift of its phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedPlane {
    pub frame: DMatrix<C64>,
    /// +1 when the column order is the orientation, -1 for the opposite one.
    pub orientation: i8,
    pub grading: f64,
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Gram-Schmidt for the real inner product Re⟨u, v⟩. Keeps orientation.
pub fn orthonormalize(frame: &DMatrix<C64>) -> Result<DMatrix<C64>, PlaneError> {
    let mut q = frame.clone();
    let scale = frame.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    for j in 0..q.ncols() {
        let mut v = q.column(j).clone_owned();
        for _ in 0..2 {
            for k in 0..j {
                let u = q.column(k);
                let proj = u.dotc(&v).re;
                v -= u * C64::new(proj, 0.0);
            }
        }
        let n = v.norm();
        if n < 1e-12 * scale {
            return Err(PlaneError::DegenerateFrame(j));
        }
        q.set_column(j, &(v / C64::new(n, 0.0)));
    }
    Ok(q)
}

/// Largest |ω(u_i, u_j)| over an orthonormalized frame.
pub fn symplectic_defect(unitary: &DMatrix<C64>) -> f64 {
    let g = unitary.adjoint() * unitary;
    g.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

impl GradedPlane {
    /// Checks the Lagrangian condition and that the grading lifts the phase.
    pub fn new(frame: DMatrix<C64>, orientation: i8, grading: f64) -> Result<Self, PlaneError> {
        if frame.nrows() != frame.ncols() {
            return Err(PlaneError::DimensionMismatch(frame.nrows(), frame.ncols()));
        }
        let plane = GradedPlane { frame, orientation: if orientation < 0 { -1 } else { 1 }, grading };
        let u = plane.unitary()?;
        let defect = symplectic_defect(&u);
        if defect > LAGRANGIAN_TOL {
            return Err(PlaneError::NotLagrangian(defect));
        }
        let phase = plane_phase(&plane)?;
        if wrap_angle(grading - phase).abs() > GRADING_TOL {
            return Err(PlaneError::GradingInconsistent { grading, phase });
        }
        Ok(plane)
    }

    /// Grades an ungraded oriented plane with the principal phase.
    pub fn with_principal_grading(frame: DMatrix<C64>, orientation: i8) -> Result<Self, PlaneError> {
        let tmp = GradedPlane { frame: frame.clone(), orientation, grading: 0.0 };
        let phase = plane_phase(&tmp)?;
        GradedPlane::new(frame, orientation, phase)
    }

    pub fn dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn unitary(&self) -> Result<DMatrix<C64>, PlaneError> {
        orthonormalize(&self.frame)
    }

    /// Same plane, opposite orientation, grading raised by π.
    pub fn shifted(&self) -> GradedPlane {
        GradedPlane { frame: self.frame.clone(), orientation: -self.orientation, grading: self.grading + PI }
    }

    /// Applies a unitary map of ℂ^m.
    pub fn transformed(&self, u: &DMatrix<C64>) -> Result<GradedPlane, PlaneError> {
        let frame = u * &self.frame;
        let det_phase = u.determinant().arg();
        GradedPlane::new(frame, self.orientation, self.grading + det_phase)
    }
}

/// The plane {(e^{iφ_1}x_1, ..., e^{iφ_m}x_m)}. A grading congruent to Σφ + π
/// mod 2π selects the reversed orientation.
pub fn plane_from_angles(phi: &[f64], grading: f64) -> Result<GradedPlane, PlaneError> {
    let m = phi.len();
    let frame = DMatrix::from_fn(m, m, |i, j| if i == j { C64::from_polar(1.0, phi[i]) } else { C64::new(0.0, 0.0) });
    let sum: f64 = phi.iter().sum();
    let orientation = if wrap_angle(grading - sum).abs() <= GRADING_TOL {
        1
    } else if wrap_angle(grading - sum - PI).abs() <= GRADING_TOL {
        -1
    } else {
        return Err(PlaneError::GradingInconsistent { grading, phase: wrap_angle(sum) });
    };
    GradedPlane::new(frame, orientation, grading)
}

/// Argument of Ω = dz_1∧…∧dz_m on the oriented orthonormalized frame, in (-π, π].
pub fn plane_phase(plane: &GradedPlane) -> Result<f64, PlaneError> {
    let u = plane.unitary()?;
    let mut arg = u.determinant().arg();
    if plane.orientation < 0 {
        arg += PI;
    }
    Ok(wrap_angle(arg))
}

/// Characteristic angles of a transverse pair, sorted ascending in (0, π).
pub fn characteristic_angles(a: &GradedPlane, b: &GradedPlane) -> Result<Vec<f64>, PlaneError> {
    if a.dim() != b.dim() {
        return Err(PlaneError::DimensionMismatch(a.dim(), b.dim()));
    }
    let ua = a.unitary()?;
    let ub = b.unitary()?;
    let w = ua.adjoint() * &ub;
    let s = &w * w.transpose();
    let eig = s
        .clone()
        .schur()
        .eigenvalues()
        .expect("complex Schur form always exposes the eigenvalues");
    let mut angles: Vec<f64> = eig
        .iter()
        .map(|l| {
            let mut phi = 0.5 * l.arg();
            if phi < 0.0 {
                phi += PI;
            }
            phi
        })
        .collect();
    angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if angles.iter().any(|p| p.sin().abs() <= TRANSVERSALITY_TOL) {
        return Err(PlaneError::NonTransverse { directions: common_directions(&ua, &ub), angles });
    }
    Ok(angles)
}

/// Real directions shared by the spans of two unitary frames.
fn common_directions(ua: &DMatrix<C64>, ub: &DMatrix<C64>) -> Vec<Vec<C64>> {
    let m = ua.nrows();
    let sys = DMatrix::from_fn(2 * m, 2 * m, |i, j| {
        let row = i % m;
        let (mat, col, sign) = if j < m { (ua, j, 1.0) } else { (ub, j - m, -1.0) };
        let z = mat[(row, col)];
        sign * if i < m { z.re } else { z.im }
    });
    let svd = sys.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let mut out = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s < 1e-7 {
            let x = v_t.row(k).transpose();
            let coeffs = DVector::from_fn(m, |i, _| C64::new(x[i], 0.0));
            let dir = ua * coeffs;
            let n = dir.norm();
            out.push(dir.iter().map(|z| z / C64::new(n, 0.0)).collect());
        }
    }
    out
}

/// Degree (Σφ + θ_L − θ_L')/π of a transverse intersection point.
pub fn maslov_degree(angles: &[f64], theta_l: f64, theta_lp: f64) -> Result<i64, PlaneError> {
    let raw = (angles.iter().sum::<f64>() + theta_l - theta_lp) / PI;
    let n = raw.round();
    if (raw - n).abs() > DEGREE_TOL {
        return Err(PlaneError::GradingMismatch(raw));
    }
    Ok(n as i64)
}

/// Strict bounds (θ_L − θ_L')/π < μ < (θ_L − θ_L')/π + m.
pub fn degree_bounds_hold(m: usize, theta_l: f64, theta_lp: f64, mu: i64) -> bool {
    let base = (theta_l - theta_lp) / PI;
    let mu = mu as f64;
    base < mu && mu < base + m as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingData {
    pub angles: Vec<f64>,
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub mu_plus_minus: i64,
    pub mu_minus_plus: i64,
}

/// Angles and both degrees for the ordered pair (plus, minus).
pub fn crossing_data(plus: &GradedPlane, minus: &GradedPlane) -> Result<CrossingData, PlaneError> {
    let angles = characteristic_angles(plus, minus)?;
    let reverse: Vec<f64> = angles.iter().rev().map(|a| PI - a).collect();
    let mu_plus_minus = maslov_degree(&angles, plus.grading, minus.grading)?;
    let mu_minus_plus = maslov_degree(&reverse, minus.grading, plus.grading)?;
    Ok(CrossingData { angles, theta_plus: plus.grading, theta_minus: minus.grading, mu_plus_minus, mu_minus_plus })
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(m, m, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / C64::new(d.norm(), 0.0) } else { C64::new(1.0, 0.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// A random oriented Lagrangian plane with grading shifted by a random multiple of 2π.
pub fn random_graded_plane<R: Rng + ?Sized>(m: usize, rng: &mut R) -> GradedPlane {
    let u = random_unitary(m, rng);
    let orientation = if rng.gen_bool(0.5) { 1 } else { -1 };
    let base = GradedPlane::with_principal_grading(u.clone(), orientation).expect("unitary frame");
    let winding = rng.gen_range(-2i32..=2) as f64;
    GradedPlane::new(u, orientation, base.grading + 2.0 * PI * winding).expect("consistent grading")
}
