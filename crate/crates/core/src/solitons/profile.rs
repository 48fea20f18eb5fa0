//! The weight function P and the angle profiles ψ_k shared by the neck,
//! expander and translator families.
//!
//! All integrals over ℝ are taken in the variable u = arctan x, which turns
//! the algebraic tails into smooth integrands on a bounded interval.

use std::f64::consts::FRAC_PI_2;

use crate::quadrature::{integrate_vec, QuadratureError};

/// Above this exponent the weight is evaluated in log space.
const LOG_SWITCH: f64 = 40.0;

#[derive(Debug, Clone)]
pub struct Weight {
    a: Vec<f64>,
    alpha: f64,
    /// Elementary symmetric polynomials e_1..e_n of the a_k.
    esym: Vec<f64>,
}

impl Weight {
    pub fn new(a: &[f64], alpha: f64) -> Self {
        let n = a.len();
        let mut e = vec![0.0; n + 1];
        e[0] = 1.0;
        for &ak in a {
            for j in (1..=n).rev() {
                e[j] += ak * e[j - 1];
            }
        }
        Weight { a: a.to_vec(), alpha, esym: e[1..].to_vec() }
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// (∏(1 + a_k x²) − 1)/x² as a polynomial in x², free of cancellation.
    fn poly_part(&self, x2: f64) -> f64 {
        self.esym.iter().rev().fold(0.0, |acc, e| acc * x2 + e)
    }

    fn log_exponent(&self, x2: f64) -> f64 {
        self.alpha * x2 + self.a.iter().map(|a| (a * x2).ln_1p()).sum::<f64>()
    }

    /// P(x), possibly +∞ for very large arguments.
    pub fn p(&self, x: f64) -> f64 {
        let s = self.inv_sqrt_p(x);
        1.0 / (s * s)
    }

    /// P(x)^{-1/2}.
    pub fn inv_sqrt_p(&self, x: f64) -> f64 {
        let x2 = x * x;
        if self.alpha == 0.0 {
            return 1.0 / self.poly_part(x2).sqrt();
        }
        let l = self.log_exponent(x2);
        if l < LOG_SWITCH {
            let u = self.alpha * x2;
            let growth = if u == 0.0 { self.alpha } else { self.alpha * u.exp_m1() / u };
            let prod: f64 = self.a.iter().map(|a| 1.0 + a * x2).product();
            1.0 / (growth * prod + self.poly_part(x2)).sqrt()
        } else {
            let ln_p = l + (-(-l).exp()).ln_1p() - x2.ln();
            (-0.5 * ln_p).exp()
        }
    }

    /// dψ_k/dy = 1/((1/a_k + y²)√P(y)).
    pub fn psi_slope(&self, k: usize, y: f64) -> f64 {
        self.inv_sqrt_p(y) / (1.0 / self.a[k] + y * y)
    }

    /// Integrands in u: ψ_k slopes for every k followed by the neck-size
    /// density 1/(2√P), all multiplied by dx/du.
    pub fn integrands_u(&self, u: f64, out: &mut [f64]) {
        let (s, c) = u.sin_cos();
        let x = s / c;
        let w = self.inv_sqrt_p(x);
        let (c2, s2) = (c * c, s * s);
        for (k, a) in self.a.iter().enumerate() {
            out[k] = a * w / (c2 + a * s2);
        }
        let n = self.a.len();
        out[n] = if w == 0.0 { 0.0 } else { 0.5 * w / c2 };
    }
}

/// Full-line integrals: the angles φ_k and the neck size A.
pub fn full_integrals(weight: &Weight, tol: f64) -> Result<(Vec<f64>, f64), QuadratureError> {
    let n = weight.a().len();
    let est = integrate_vec(|u, out: &mut [f64]| weight.integrands_u(u, out), 0.0, FRAC_PI_2, n + 1, 0.5 * tol, 50_000)?;
    let phi = est.value[..n].iter().map(|v| 2.0 * v).collect();
    Ok((phi, 2.0 * est.value[n]))
}

/// Tabulated ψ_k on a uniform grid in u = arctan y with cubic Hermite
/// interpolation using the exact slopes.
#[derive(Debug, Clone)]
pub struct Profile {
    du: f64,
    values: Vec<Vec<f64>>,
    slopes: Vec<Vec<f64>>,
}

impl Profile {
    pub fn build(weight: &Weight, intervals: usize, tol: f64) -> Result<Self, QuadratureError> {
        let n = weight.a().len();
        let du = 2.0 * FRAC_PI_2 / intervals as f64;
        let node = |i: usize| -FRAC_PI_2 + i as f64 * du;
        let mut values = vec![vec![0.0; intervals + 1]; n];
        let mut slopes = vec![vec![0.0; intervals + 1]; n];
        let mut buf = vec![0.0; n + 1];
        let per_panel = tol / intervals as f64;
        for i in 0..=intervals {
            let u = node(i).clamp(-FRAC_PI_2, FRAC_PI_2);
            weight.integrands_u(u, &mut buf);
            for k in 0..n {
                slopes[k][i] = if buf[k].is_finite() { buf[k] } else { 0.0 };
            }
            if i < intervals {
                let est = integrate_vec(
                    |v, out: &mut [f64]| weight.integrands_u(v, out),
                    node(i),
                    node(i + 1),
                    n + 1,
                    per_panel,
                    200,
                )?;
                for k in 0..n {
                    values[k][i + 1] = values[k][i] + est.value[k];
                }
            }
        }
        Ok(Profile { du, values, slopes })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// ψ_k(+∞) as accumulated by the table.
    pub fn total(&self, k: usize) -> f64 {
        *self.values[k].last().expect("non-empty table")
    }

    pub fn psi(&self, k: usize, y: f64) -> f64 {
        let u = y.atan();
        let t = (u + FRAC_PI_2) / self.du;
        let last = self.values[k].len() - 1;
        let i = (t.floor() as usize).min(last - 1);
        let s = (t - i as f64).clamp(0.0, 1.0);
        let (y0, y1) = (self.values[k][i], self.values[k][i + 1]);
        let (mut m0, mut m1) = (self.slopes[k][i] * self.du, self.slopes[k][i + 1] * self.du);
        let delta = y1 - y0;
        if delta > 0.0 {
            // Fritsch-Carlson limiter keeps the interpolant monotone
            let (al, be) = (m0 / delta, m1 / delta);
            let r = al * al + be * be;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                m0 *= tau;
                m1 *= tau;
            }
        }
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
    }
}

/// φ_k − ψ_k(y) by direct quadrature, for the far end of the profile where
/// the table difference would cancel.
pub fn psi_tail(weight: &Weight, k: usize, y: f64, tol: f64) -> Result<f64, QuadratureError> {
    let n = weight.a().len();
    let est = integrate_vec(|u, out: &mut [f64]| weight.integrands_u(u, out), y.atan(), FRAC_PI_2, n + 1, tol, 10_000)?;
    Ok(est.value[k])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_matches_definition_away_from_zero() {
        let w = Weight::new(&[1.0, 2.0, 3.0], 0.7);
        for x in [0.3f64, 1.0, 2.5] {
            let x2 = x * x;
            let direct = ((0.7 * x2).exp() * (1.0 + x2) * (1.0 + 2.0 * x2) * (1.0 + 3.0 * x2) - 1.0) / x2;
            assert!((w.p(x) / direct - 1.0).abs() < 1e-13);
        }
        // value at the origin
        assert!((w.p(0.0) - (0.7 + 6.0)).abs() < 1e-14);
        assert!((w.p(1e-9) - 6.7).abs() < 1e-8);
    }

    #[test]
    fn log_branch_continuous() {
        let w = Weight::new(&[1.0, 1.0, 1.0], 2.0);
        let x = (LOG_SWITCH / 2.0).sqrt();
        let below = w.inv_sqrt_p(x * (1.0 - 1e-9));
        let above = w.inv_sqrt_p(x * (1.0 + 1e-9));
        assert!((below / above - 1.0).abs() < 1e-6);
    }

    #[test]
    fn neck_weight_is_polynomial() {
        let w = Weight::new(&[1.0, 1.0, 1.0], 0.0);
        // (1+x²)³ − 1 over x² = 3 + 3x² + x⁴
        assert!((w.p(2.0) - (3.0 + 12.0 + 16.0)).abs() < 1e-12);
    }

    #[test]
    fn profile_endpoints_and_midpoint() {
        let w = Weight::new(&[1.0, 2.0, 3.0], 0.0);
        let (phi, _) = full_integrals(&w, 1e-14).unwrap();
        let p = Profile::build(&w, 512, 1e-13).unwrap();
        for k in 0..3 {
            assert!((p.total(k) - phi[k]).abs() < 1e-12);
            assert!(p.psi(k, f64::NEG_INFINITY).abs() < 1e-15);
            assert!((p.psi(k, 0.0) - 0.5 * phi[k]).abs() < 1e-12);
            let tail = psi_tail(&w, k, 3.0, 1e-15).unwrap();
            assert!((p.psi(k, 3.0) + tail - phi[k]).abs() < 1e-11);
        }
    }
}
