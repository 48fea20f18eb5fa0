//! Adaptive Gauss-Kronrod (7/15) quadrature for vector-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum QuadratureError {
    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}) within {intervals} intervals")]
    Tolerance { tol: f64, estimate: f64, intervals: usize },
    #[error("integrand produced a non-finite value at {0}")]
    NonFinite(f64),
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone)]
pub struct Estimate {
    pub value: Vec<f64>,
    pub error: f64,
    pub intervals: usize,
}

/// One 15-point Kronrod panel; returns the Kronrod sums and the max
/// component-wise Gauss/Kronrod discrepancy.
pub fn gk15<F>(f: &F, a: f64, b: f64, dim: usize) -> Result<(Vec<f64>, f64), QuadratureError>
where
    F: Fn(f64, &mut [f64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    let eval = |x: f64, buf: &mut [f64]| -> Result<(), QuadratureError> {
        f(x, buf);
        if buf.iter().any(|v| !v.is_finite()) {
            return Err(QuadratureError::NonFinite(x));
        }
        Ok(())
    };
    eval(c, &mut buf)?;
    for i in 0..dim {
        kron[i] += WGK[7] * buf[i];
        gauss[i] += WG[3] * buf[i];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        for x in [c - dx, c + dx] {
            eval(x, &mut buf)?;
            for i in 0..dim {
                kron[i] += WGK[j] * buf[i];
                if j % 2 == 1 {
                    gauss[i] += WG[j / 2] * buf[i];
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for i in 0..dim {
        kron[i] *= h;
        gauss[i] *= h;
        err = err.max((kron[i] - gauss[i]).abs());
    }
    Ok((kron, err))
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates a `dim`-vector integrand over [a, b] to absolute tolerance
/// `tol` (max over components), bisecting the worst panel first.
pub fn integrate_vec<F>(f: F, a: f64, b: f64, dim: usize, tol: f64, max_intervals: usize) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64, &mut [f64]),
{
    let (value, error) = gk15(&f, a, b, dim)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= tol {
            break;
        }
        if heap.len() >= max_intervals {
            return Err(QuadratureError::Tolerance { tol, estimate: total_err, intervals: heap.len() });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(QuadratureError::Tolerance { tol, estimate: total_err, intervals: heap.len() + 1 });
        }
        let (v1, e1) = gk15(&f, worst.a, mid, dim)?;
        let (v2, e2) = gk15(&f, mid, worst.b, dim)?;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = vec![0.0; dim];
    let mut error = 0.0;
    for p in &panels {
        for i in 0..dim {
            value[i] += p.value[i];
        }
        error += p.error;
    }
    Ok(Estimate { value, error, intervals: panels.len() })
}

/// Scalar convenience wrapper.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    integrate_vec(|x, out: &mut [f64]| out[0] = f(x), a, b, 1, tol, 20_000).map(|e| e.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_exact() {
        let v = integrate(|x| x.powi(20), 0.0, 1.0, 1e-15).unwrap();
        assert!((v - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn peaked_integrand() {
        // ∫ 1/(1+x²) over ℝ via x = tan u
        let v = integrate(|u| {
            let x = u.tan();
            1.0 / (1.0 + x * x) / u.cos().powi(2)
        }, -PI / 2.0, PI / 2.0, 1e-13)
        .unwrap();
        assert!((v - PI).abs() < 1e-12);
        let w = integrate(|x| 1e-3 / (1e-6 + x * x), -1.0, 1.0, 1e-12).unwrap();
        assert!((w - 2.0 * (1e3f64).atan()).abs() < 1e-10);
    }

    #[test]
    fn vector_components_share_panels() {
        let e = integrate_vec(|x, o: &mut [f64]| {
            o[0] = x.sin();
            o[1] = x.exp();
        }, 0.0, 2.0, 2, 1e-14, 1000)
        .unwrap();
        assert!((e.value[0] - (1.0 - 2f64.cos())).abs() < 1e-14);
        assert!((e.value[1] - (2f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn non_finite_reported() {
        assert!(matches!(integrate(|x| 1.0 / x, -1.0, 1.0, 1e-10), Err(QuadratureError::NonFinite(_))));
    }
}
