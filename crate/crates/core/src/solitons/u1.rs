//! U(1)-invariant special Lagrangian 3-folds from a potential f(x, y) solving
//!
//!   ((f_x)² + y² + a²)^{-1/2} f_xx + 2 f_yy = 0
//!
//! on a grid, with Dirichlet data. The five-point discretization is solved by
//! damped Newton iteration; each linear step is a banded LU factorization.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planes::C64;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum U1Error {
    #[error("a = 0 is the singular case and is not supported")]
    SingularParameter,
    #[error("grid needs at least 3 nodes per direction and a nondegenerate box")]
    BadGrid,
    #[error("polygon must be convex with at least 3 vertices")]
    BadPolygon,
    #[error("Newton iteration stalled after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular pivot in the linear solve")]
    SingularPivot,
    #[error("point ({0}, {1}) is not an interior grid node")]
    NotInterior(f64, f64),
}

/// Region on which unknowns live. For a polygon, grid nodes strictly inside
/// are unknowns and all other nodes of the bounding grid carry Dirichlet data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum U1Domain {
    Rectangle,
    ConvexPolygon { vertices: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct U1Problem {
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub a: f64,
    #[serde(default = "default_domain")]
    pub domain: U1Domain,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_domain() -> U1Domain {
    U1Domain::Rectangle
}
fn default_tol() -> f64 {
    1e-9
}
fn default_max_iter() -> usize {
    50
}

impl U1Problem {
    pub fn rectangle(x_range: [f64; 2], y_range: [f64; 2], nx: usize, ny: usize, a: f64) -> Self {
        U1Problem { x_range, y_range, nx, ny, a, domain: U1Domain::Rectangle, tol: default_tol(), max_iter: default_max_iter() }
    }

    fn hx(&self) -> f64 {
        (self.x_range[1] - self.x_range[0]) / (self.nx - 1) as f64
    }

    fn hy(&self) -> f64 {
        (self.y_range[1] - self.y_range[0]) / (self.ny - 1) as f64
    }

    fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x_range[0] + i as f64 * self.hx(), self.y_range[0] + j as f64 * self.hy())
    }

    fn check(&self) -> Result<(), U1Error> {
        if self.a == 0.0 || !self.a.is_finite() {
            return Err(U1Error::SingularParameter);
        }
        if self.nx < 3 || self.ny < 3 || !(self.x_range[1] > self.x_range[0]) || !(self.y_range[1] > self.y_range[0]) {
            return Err(U1Error::BadGrid);
        }
        if let U1Domain::ConvexPolygon { vertices } = &self.domain {
            if vertices.len() < 3 || polygon_orientation(vertices).is_none() {
                return Err(U1Error::BadPolygon);
            }
        }
        Ok(())
    }

    /// Interior mask over the full grid, row-major with x fastest.
    fn interior(&self) -> Vec<bool> {
        let mut mask = vec![false; self.nx * self.ny];
        for j in 1..self.ny - 1 {
            for i in 1..self.nx - 1 {
                mask[j * self.nx + i] = match &self.domain {
                    U1Domain::Rectangle => true,
                    U1Domain::ConvexPolygon { vertices } => {
                        let (x, y) = self.node(i, j);
                        strictly_inside(vertices, x, y)
                    }
                };
            }
        }
        mask
    }
}

/// +1 for counterclockwise, −1 for clockwise, None if not strictly convex.
fn polygon_orientation(v: &[[f64; 2]]) -> Option<f64> {
    let n = v.len();
    let mut sign = 0.0;
    for k in 0..n {
        let (p, q, r) = (v[k], v[(k + 1) % n], v[(k + 2) % n]);
        let c = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
        if c == 0.0 || sign * c < 0.0 {
            return None;
        }
        sign = c.signum();
    }
    Some(sign)
}

fn strictly_inside(v: &[[f64; 2]], x: f64, y: f64) -> bool {
    let s = polygon_orientation(v).unwrap_or(1.0);
    let n = v.len();
    (0..n).all(|k| {
        let (p, q) = (v[k], v[(k + 1) % n]);
        s * ((q[0] - p[0]) * (y - p[1]) - (q[1] - p[1]) * (x - p[0])) > 1e-12
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct U1Solution {
    pub problem: U1Problem,
    /// Potential on the full grid, row-major with x fastest.
    pub f: Vec<f64>,
    pub interior: Vec<bool>,
    /// Max |discrete operator| over interior nodes.
    pub residual: f64,
    pub iterations: usize,
}

/// Discrete operator at interior node p and its partial derivatives with
/// respect to the (W, E, S, N, P) values.
fn stencil(f: &[f64], p: usize, nx: usize, y: f64, a2: f64, hx: f64, hy: f64) -> (f64, [f64; 5]) {
    let (w, e, s, n, c) = (f[p - 1], f[p + 1], f[p - nx], f[p + nx], f[p]);
    let v = (e - w) / (2.0 * hx);
    let q = v * v + y * y + a2;
    let coef = 1.0 / q.sqrt();
    let fxx = (e - 2.0 * c + w) / (hx * hx);
    let fyy = (n - 2.0 * c + s) / (hy * hy);
    let r = coef * fxx + 2.0 * fyy;
    let dcoef_dv = -v / (q * q.sqrt());
    let dv = dcoef_dv * fxx / (2.0 * hx);
    let dw = coef / (hx * hx) - dv;
    let de = coef / (hx * hx) + dv;
    let dy = 2.0 / (hy * hy);
    let dc = -2.0 * coef / (hx * hx) - 2.0 * dy;
    (r, [dw, de, dy, dy, dc])
}

fn residual_vector(problem: &U1Problem, mask: &[bool], f: &[f64]) -> Vec<f64> {
    let (nx, hx, hy, a2) = (problem.nx, problem.hx(), problem.hy(), problem.a * problem.a);
    let mut r = vec![0.0; f.len()];
    for (p, inside) in mask.iter().enumerate() {
        if *inside {
            let y = problem.node(p % nx, p / nx).1;
            r[p] = stencil(f, p, nx, y, a2, hx, hy).0;
        }
    }
    r
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Banded matrix with partial pivoting. The row at position i stores the
/// columns [i − bw, i + 2bw]; the extra bw columns hold fill-in from swaps.
/// Multipliers are kept per elimination step together with the pivot row.
struct BandLu {
    n: usize,
    bw: usize,
    rows: Vec<Vec<f64>>,
    pivots: Vec<usize>,
    lower: Vec<Vec<f64>>,
}

impl BandLu {
    fn new(n: usize, bw: usize) -> Self {
        BandLu { n, bw, rows: vec![vec![0.0; 3 * bw + 1]; n], pivots: Vec::new(), lower: Vec::new() }
    }

    fn window(&self, row: usize, col: usize) -> Option<usize> {
        let s = col as isize - row as isize + self.bw as isize;
        (s >= 0 && s <= 3 * self.bw as isize).then_some(s as usize)
    }

    fn set(&mut self, row: usize, col: usize, v: f64) {
        let s = self.window(row, col).expect("entry inside the band");
        self.rows[row][s] = v;
    }

    fn get(&self, row: usize, col: usize) -> f64 {
        self.window(row, col).map_or(0.0, |s| self.rows[row][s])
    }

    /// Swaps positions k < p, re-indexing both rows into their new windows.
    fn swap_rows(&mut self, k: usize, p: usize) {
        let shift = p - k;
        let width = 3 * self.bw + 1;
        let (top, bottom) = self.rows.split_at_mut(p);
        let (rk, rp) = (&mut top[k], &mut bottom[0]);
        let mut new_k = vec![0.0; width];
        let mut new_p = vec![0.0; width];
        for s in 0..width {
            // column of slot s in row p becomes slot s + shift at position k
            if s + shift < width {
                new_k[s + shift] = rp[s];
            } else {
                debug_assert!(rp[s] == 0.0);
            }
            if s >= shift {
                new_p[s - shift] = rk[s];
            } else {
                debug_assert!(rk[s] == 0.0);
            }
        }
        *rk = new_k;
        *rp = new_p;
    }

    fn factor(&mut self) -> Result<(), U1Error> {
        let (n, bw) = (self.n, self.bw);
        for k in 0..n {
            let last = (k + bw).min(n - 1);
            let mut piv = k;
            let mut best = self.get(k, k).abs();
            for r in k + 1..=last {
                let v = self.get(r, k).abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return Err(U1Error::SingularPivot);
            }
            if piv != k {
                self.swap_rows(k, piv);
            }
            self.pivots.push(piv);
            let pivot = self.get(k, k);
            let cmax = (k + 2 * bw).min(n - 1);
            let mut col = vec![0.0; last - k];
            for r in k + 1..=last {
                let l = self.get(r, k) / pivot;
                col[r - k - 1] = l;
                if l == 0.0 {
                    continue;
                }
                self.set(r, k, 0.0);
                for c in k + 1..=cmax {
                    let u = self.get(k, c);
                    if u != 0.0 {
                        let s = self.window(r, c).expect("fill stays in the band");
                        self.rows[r][s] -= l * u;
                    }
                }
            }
            self.lower.push(col);
        }
        Ok(())
    }

    /// Solves with the factored matrix; `b` is in original row order.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for (i, l) in self.lower[k].iter().enumerate() {
                x[k + 1 + i] -= l * xk;
            }
        }
        for r in (0..n).rev() {
            let hi = (r + 2 * bw).min(n - 1);
            let mut acc = x[r];
            for c in r + 1..=hi {
                acc -= self.get(r, c) * x[c];
            }
            x[r] = acc / self.get(r, r);
        }
        x
    }
}

/// Solves the potential equation with Dirichlet data taken from `boundary`
/// at every non-interior node.
pub fn u1_solve<B>(problem: &U1Problem, boundary: B) -> Result<U1Solution, U1Error>
where
    B: Fn(f64, f64) -> f64,
{
    problem.check()?;
    let (nx, ny) = (problem.nx, problem.ny);
    let n = nx * ny;
    let (hx, hy, a2) = (problem.hx(), problem.hy(), problem.a * problem.a);
    let mask = problem.interior();
    let mut f = vec![0.0; n];
    for (p, inside) in mask.iter().enumerate() {
        if !*inside {
            let (x, y) = problem.node(p % nx, p / nx);
            f[p] = boundary(x, y);
        }
    }
    let mut r = residual_vector(problem, &mask, &f);
    let mut rn = max_abs(&r);
    for it in 0..problem.max_iter {
        if rn <= problem.tol {
            return Ok(U1Solution { problem: problem.clone(), f, interior: mask, residual: rn, iterations: it });
        }
        let mut lu = BandLu::new(n, nx);
        for p in 0..n {
            if !mask[p] {
                lu.set(p, p, 1.0);
                continue;
            }
            let y = problem.node(p % nx, p / nx).1;
            let (_, d) = stencil(&f, p, nx, y, a2, hx, hy);
            for (q, v) in [p - 1, p + 1, p - nx, p + nx, p].into_iter().zip(d) {
                // Dirichlet neighbours are fixed; their columns drop out
                if mask[q] {
                    lu.set(p, q, v);
                }
            }
        }
        lu.factor()?;
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = lu.solve(&rhs);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = f.iter().zip(&step).zip(&mask).map(|((v, s), m)| if *m { v + t * s } else { *v }).collect();
            let rt = residual_vector(problem, &mask, &trial);
            let rtn = max_abs(&rt);
            if rtn < rn || t < 1e-4 {
                f = trial;
                r = rt;
                rn = rtn;
                break;
            }
            t *= 0.5;
        }
    }
    if rn <= problem.tol {
        return Ok(U1Solution { problem: problem.clone(), f, interior: mask, residual: rn, iterations: problem.max_iter });
    }
    Err(U1Error::NoConvergence { iterations: problem.max_iter, residual: rn })
}

impl U1Solution {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.f[j * self.problem.nx + i]
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        self.problem.node(i, j)
    }

    /// (v, u) = (∂f/∂x, ∂f/∂y) at an interior node by central differences.
    pub fn gradient(&self, i: usize, j: usize) -> Result<(f64, f64), U1Error> {
        let nx = self.problem.nx;
        if i == 0 || j == 0 || i + 1 >= nx || j + 1 >= self.problem.ny {
            let (x, y) = self.node(i, j);
            return Err(U1Error::NotInterior(x, y));
        }
        let v = (self.value(i + 1, j) - self.value(i - 1, j)) / (2.0 * self.problem.hx());
        let u = (self.value(i, j + 1) - self.value(i, j - 1)) / (2.0 * self.problem.hy());
        Ok((v, u))
    }

    /// Point of the 3-fold over node (i, j) at circle angle `sigma`:
    /// z₁z₂ = v + iy, z₃ = x + iu, |z₁|² − |z₂|² = 2a.
    pub fn surface_point(&self, i: usize, j: usize, sigma: f64) -> Result<[C64; 3], U1Error> {
        let (x, y) = self.node(i, j);
        let (v, u) = self.gradient(i, j)?;
        Ok(u1_point(self.problem.a, x, y, v, u, sigma))
    }
}

/// The U(1)-orbit point determined by (x, y), the derivatives (v, u) and the
/// circle angle.
pub fn u1_point(a: f64, x: f64, y: f64, v: f64, u: f64, sigma: f64) -> [C64; 3] {
    let w = C64::new(v, y);
    let r1 = (a + (a * a + w.norm_sqr()).sqrt()).sqrt();
    let z1 = C64::from_polar(r1, sigma);
    let z2 = w / z1;
    [z1, z2, C64::new(x, u)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_data_reproduced() {
        let p = U1Problem::rectangle([-1.0, 1.0], [-1.0, 1.0], 17, 17, 1.0);
        let sol = u1_solve(&p, |x, y| 0.7 * x - 1.3 * y).unwrap();
        for j in 0..17 {
            for i in 0..17 {
                let (x, y) = sol.node(i, j);
                assert!((sol.value(i, j) - (0.7 * x - 1.3 * y)).abs() < 1e-10);
            }
        }
        assert!(sol.residual < 1e-8);
    }

    #[test]
    fn zero_data_gives_zero() {
        let p = U1Problem::rectangle([0.0, 1.0], [0.0, 2.0], 9, 13, 0.5);
        let sol = u1_solve(&p, |_, _| 0.0).unwrap();
        assert!(sol.f.iter().all(|v| *v == 0.0));
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn singular_parameter_rejected() {
        let p = U1Problem::rectangle([0.0, 1.0], [0.0, 1.0], 5, 5, 0.0);
        assert_eq!(u1_solve(&p, |_, _| 0.0).unwrap_err(), U1Error::SingularParameter);
    }

    #[test]
    fn band_lu_matches_dense() {
        // tridiagonal-plus system with a zero leading pivot forces a swap
        let n = 7;
        let mut lu = BandLu::new(n, 2);
        let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                let v = if i == 0 && j == 0 { 0.0 } else { ((i * 7 + j * 3) % 5) as f64 - 1.5 + if i == j { 4.0 } else { 0.0 } };
                lu.set(i, j, v);
                dense[(i, j)] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        lu.factor().unwrap();
        let x = lu.solve(&b);
        let want = dense.lu().solve(&nalgebra::DVector::from_column_slice(&b)).unwrap();
        for i in 0..n {
            assert!((x[i] - want[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn nonlinear_data_on_fine_grid() {
        let p = U1Problem::rectangle([-1.0, 1.0], [-1.0, 1.0], 65, 65, 1.0);
        let sol = u1_solve(&p, |x, y| x * x * x + x * y + (2.0 * y).sin()).unwrap();
        assert!(sol.residual < 1e-6, "residual {}", sol.residual);
        assert!(sol.iterations <= 20);
    }

    #[test]
    fn polygon_domain() {
        let mut p = U1Problem::rectangle([-1.0, 1.0], [-1.0, 1.0], 33, 33, 2.0);
        p.domain = U1Domain::ConvexPolygon { vertices: vec![[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0]] };
        let sol = u1_solve(&p, |x, y| (x + y).exp()).unwrap();
        assert!(sol.residual < 1e-8);
        assert!(sol.interior.iter().filter(|b| **b).count() > 100);
        let mut bad = p.clone();
        bad.domain = U1Domain::ConvexPolygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]] };
        assert_eq!(u1_solve(&bad, |_, _| 0.0).unwrap_err(), U1Error::BadPolygon);
    }

    #[test]
    fn surface_satisfies_moment_constraints() {
        let p = U1Problem::rectangle([-1.0, 1.0], [-1.0, 1.0], 21, 21, 0.5);
        let sol = u1_solve(&p, |x, y| x * y + 0.3 * x * x).unwrap();
        let z = sol.surface_point(7, 12, 0.4).unwrap();
        let (x, y) = sol.node(7, 12);
        let (v, u) = sol.gradient(7, 12).unwrap();
        assert!((z[0].norm_sqr() - z[1].norm_sqr() - 1.0).abs() < 1e-12);
        assert!(((z[0] * z[1]) - C64::new(v, y)).norm() < 1e-12);
        assert!((z[2] - C64::new(x, u)).norm() < 1e-15);
        assert!(sol.gradient(0, 3).is_err());
    }
}
