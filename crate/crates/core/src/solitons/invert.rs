//! Inverting the quadrature maps a ↦ φ (and the neck size) by damped Newton
//! iteration in log a.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::profile::{full_integrals, Weight};
use super::{SolitonError, SolitonKind, ANGLE_TOL};

const NEWTON_TOL: f64 = 1e-12;
const MAX_ITER: usize = 60;
const FD_STEP: f64 = 1e-6;

fn forward(a: &[f64], alpha: f64) -> Result<(Vec<f64>, f64), SolitonError> {
    Ok(full_integrals(&Weight::new(a, alpha), ANGLE_TOL)?)
}

fn check_admissible(kind: SolitonKind, alpha: f64, phi: &[f64], area: Option<f64>) -> Result<(), SolitonError> {
    let sum: f64 = phi.iter().sum();
    if phi.iter().any(|p| !(*p > 0.0 && *p < PI)) {
        return Err(SolitonError::Inadmissible(format!("each angle must lie in (0, π): {phi:?}")));
    }
    match kind {
        SolitonKind::Lawlor => {
            if phi.len() < 3 {
                return Err(SolitonError::Inadmissible("necks need m > 2".into()));
            }
            if (sum - PI).abs() > 1e-8 {
                return Err(SolitonError::Inadmissible(format!("neck angles must sum to π, got {sum}")));
            }
            if !area.is_some_and(|a| a > 0.0) {
                return Err(SolitonError::Inadmissible("neck size must be positive".into()));
            }
        }
        SolitonKind::Expander | SolitonKind::Translator => {
            if alpha <= 0.0 {
                return Err(SolitonError::Inadmissible("alpha must be positive".into()));
            }
            if kind == SolitonKind::Expander && phi.len() < 3 {
                return Err(SolitonError::Inadmissible("expanders need m > 2".into()));
            }
            if sum >= PI {
                return Err(SolitonError::Inadmissible(format!("angles must sum below π, got {sum}")));
            }
        }
        k => return Err(SolitonError::Unsupported(k)),
    }
    Ok(())
}

/// Solves residual(u) = 0 for u ∈ ℝ^n by Newton with a central-difference
/// Jacobian and backtracking on the residual norm.
fn damped_newton<F>(mut u: Vec<f64>, residual: F) -> Result<Vec<f64>, SolitonError>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, SolitonError>,
{
    let n = u.len();
    let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut r = residual(&u)?;
    for _ in 0..MAX_ITER {
        let rn = norm(&r);
        if rn < NEWTON_TOL {
            return Ok(u);
        }
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += FD_STEP;
            dn[j] -= FD_STEP;
            let (rp, rm) = (residual(&up)?, residual(&dn)?);
            for i in 0..n {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * FD_STEP);
            }
        }
        let rhs = -DVector::from_column_slice(&r);
        let step = jac.lu().solve(&rhs).ok_or(SolitonError::NoConvergence(rn))?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
            if let Ok(rt) = residual(&trial) {
                if norm(&rt) < (1.0 - 1e-4 * t) * rn || t < 1e-3 && norm(&rt) < rn {
                    u = trial;
                    r = rt;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-8 {
                return Err(SolitonError::NoConvergence(rn));
            }
        }
    }
    let rn = norm(&r);
    if rn < 1e-10 {
        Ok(u)
    } else {
        Err(SolitonError::NoConvergence(rn))
    }
}

/// Scale c for which the symmetric choice a = (c, ..., c) has mean angle
/// `mean`; bisection in log c.
fn symmetric_scale(n: usize, alpha: f64, mean: f64) -> Result<f64, SolitonError> {
    let (mut lo, mut hi) = (-20.0f64, 20.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let (phi, _) = forward(&vec![mid.exp(); n], alpha)?;
        if phi[0] < mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Finds a with forward angles `phi` (and neck size `area` for necks).
pub fn family_invert(kind: SolitonKind, alpha: f64, phi: &[f64], area: Option<f64>) -> Result<Vec<f64>, SolitonError> {
    check_admissible(kind, alpha, phi, area)?;
    let n = phi.len();
    let mean = phi.iter().sum::<f64>() / n as f64;
    match kind {
        SolitonKind::Lawlor => {
            // angles are invariant under a ↦ s·a; fix a_1 = 1, then rescale by the size
            let guess: Vec<f64> = phi[1..].iter().map(|p| 2.0 * (p / phi[0]).ln()).collect();
            let residual = |u: &[f64]| -> Result<Vec<f64>, SolitonError> {
                let mut a = vec![1.0];
                a.extend(u.iter().map(|v| v.exp()));
                let (got, _) = forward(&a, 0.0)?;
                Ok((1..n).map(|k| got[k] - phi[k]).collect())
            };
            let u = damped_newton(guess, residual)?;
            let mut a = vec![1.0];
            a.extend(u.iter().map(|v| v.exp()));
            let (_, shape_area) = forward(&a, 0.0)?;
            let s = shape_area / area.expect("checked");
            Ok(a.into_iter().map(|v| v * s).collect())
        }
        SolitonKind::Expander | SolitonKind::Translator => {
            let c = symmetric_scale(n, alpha, mean)?;
            let guess: Vec<f64> = phi.iter().map(|p| (c * (p / mean).powi(2)).ln()).collect();
            let residual = |u: &[f64]| -> Result<Vec<f64>, SolitonError> {
                let a: Vec<f64> = u.iter().map(|v| v.exp()).collect();
                let (got, _) = forward(&a, alpha)?;
                Ok(got.iter().zip(phi).map(|(g, p)| g - p).collect())
            };
            let u = damped_newton(guess, residual)?;
            Ok(u.into_iter().map(f64::exp).collect())
        }
        k => Err(SolitonError::Unsupported(k)),
    }
}
