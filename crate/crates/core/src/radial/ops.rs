//! Quadrature, norms, inner products, derivatives and the radial Laplacian.

use super::field::{ComplexField, RealField};
use super::grid::RadialGrid;
use super::tail::Tail;
use crate::banded::{BandMatrix, Scalar};
use crate::error::{Error, Result};

/// Outer ghost values `u_{n+k} = α_k·u_{n−1} + β_k`, `k = 0, 1, 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Closure {
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
}

impl Closure {
    /// Homogeneous Dirichlet ghosts; makes the Laplacian self-adjoint.
    pub fn zero() -> Self {
        Closure { alpha: [0.0; 3], beta: [0.0; 3] }
    }

    /// `u ∝ e^{−λr}/r` past the grid; `λ = 0` gives the `1/r` law of W-class fields.
    pub fn decaying(grid: &RadialGrid, lambda: f64) -> Self {
        let rl = grid.r_max();
        let alpha = grid.ghost_nodes().map(|rk| rl / rk * (-lambda * (rk - rl)).exp());
        Closure { alpha, beta: [0.0; 3] }
    }

    pub fn power_law(grid: &RadialGrid) -> Self {
        Self::decaying(grid, 0.0)
    }

    /// Closure for `η = Q − b` when `Q` decays like `e^{−λr}/r` and the
    /// background `b` is known in closed form.
    pub fn shifted(grid: &RadialGrid, lambda: f64, background: impl Fn(f64) -> f64) -> Self {
        let base = Self::decaying(grid, lambda);
        let bl = background(grid.r_max());
        let rg = grid.ghost_nodes();
        let beta = [0, 1, 2].map(|k| base.alpha[k] * bl - background(rg[k]));
        Closure { alpha: base.alpha, beta }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.beta.iter().all(|&b| b == 0.0)
    }
}

/// Values at extended indices `−3..n+3`: mirror at the origin, closure outside.
fn extend<T: Scalar>(values: &[T], closure: &Closure) -> Vec<T> {
    let n = values.len();
    let mut ext = Vec::with_capacity(n + 6);
    for k in (0..3).rev() {
        ext.push(values[k]);
    }
    ext.extend_from_slice(values);
    let last = values[n - 1];
    for k in 0..3 {
        ext.push(T::from_f64(closure.alpha[k]) * last + T::from_f64(closure.beta[k]));
    }
    ext
}

/// Radii at extended indices; odd reflection at the origin.
fn extended_radii(grid: &RadialGrid) -> Vec<f64> {
    let r = grid.nodes();
    let mut ext = Vec::with_capacity(r.len() + 6);
    for k in (0..3).rev() {
        ext.push(-r[k]);
    }
    ext.extend_from_slice(r);
    ext.extend_from_slice(&grid.ghost_nodes());
    ext
}

const C4: [f64; 4] = [1.0, -27.0, 27.0, -1.0];

/// Staggered derivative of `v = r·u` at half points `j = −1..=n+1` (index `j+1`).
fn half_derivatives<T: Scalar>(grid: &RadialGrid, ext: &[T]) -> Vec<T> {
    let n = ext.len() - 6;
    let re = extended_radii(grid);
    let inv = 1.0 / (24.0 * grid.h());
    (-1..=n as i64 + 1)
        .map(|j| {
            let b = (j - 2 + 3) as usize;
            let mut acc = T::zero();
            for q in 0..4 {
                acc += T::from_f64(C4[q] * inv * re[b + q]) * ext[b + q];
            }
            acc
        })
        .collect()
}

/// Fourth-order Laplacian in the form `Δu = r^{-1}(r·u)_{rr}`, written
/// conservatively in the mapped coordinate so that it is self-adjoint
/// under the quadrature weights when the closure is homogeneous zero.
pub fn laplacian_values<T: Scalar>(grid: &RadialGrid, values: &[T], closure: &Closure) -> Vec<T> {
    let n = grid.n();
    assert_eq!(values.len(), n);
    let h = grid.h();
    let ext = extend(values, closure);
    let d = half_derivatives(grid, &ext);
    let q = grid.flux_weights();
    let flux: Vec<T> =
        (-1..=n as i64 + 1).map(|j| T::from_f64(q[j.unsigned_abs() as usize]) * d[(j + 1) as usize]).collect();
    let r = grid.nodes();
    let rs = grid.jacobian();
    (0..n)
        .map(|i| {
            let mut acc = T::zero();
            for m in 0..4 {
                acc += T::from_f64(C4[m]) * flux[i + m];
            }
            acc * T::from_f64(1.0 / (24.0 * h * r[i] * rs[i]))
        })
        .collect()
}

pub fn apply_laplacian(f: &RealField, closure: &Closure) -> RealField {
    let v = laplacian_values(f.grid(), f.values(), closure);
    RealField::new(f.grid().clone(), v).expect("laplacian of a finite field is finite")
}

/// Discrete Laplacian as `A·u + offset`.
pub struct AffineOperator {
    pub matrix: BandMatrix<f64>,
    pub offset: Vec<f64>,
}

pub fn laplacian_operator(grid: &RadialGrid, closure: &Closure) -> AffineOperator {
    let n = grid.n();
    let h = grid.h();
    let qh = grid.flux_weights();
    let r = grid.nodes();
    let rs = grid.jacobian();
    let re = extended_radii(grid);
    let mut a = BandMatrix::zeros(n, 3, 3);
    let mut offset = vec![0.0; n];
    let inv = 1.0 / (24.0 * h);
    for i in 0..n {
        let pre = 1.0 / (24.0 * h * r[i] * rs[i]);
        for m in 0..4 {
            let j = i as i64 - 1 + m as i64;
            let qj = qh[j.unsigned_abs() as usize];
            for q in 0..4 {
                let k = j - 2 + q as i64;
                let c = pre * C4[m] * qj * C4[q] * inv * re[(k + 3) as usize];
                if k < 0 {
                    a.add_to(i, (-k - 1) as usize, c);
                } else if (k as usize) < n {
                    a.add_to(i, k as usize, c);
                } else {
                    let g = k as usize - n;
                    a.add_to(i, n - 1, c * closure.alpha[g]);
                    offset[i] += c * closure.beta[g];
                }
            }
        }
    }
    AffineOperator { matrix: a, offset }
}

/// Fourth-order collocated `du/dr`.
pub fn derivative_values<T: Scalar>(grid: &RadialGrid, values: &[T], closure: &Closure) -> Vec<T> {
    let n = grid.n();
    let ext = extend(values, closure);
    let h = grid.h();
    let rs = grid.jacobian();
    (0..n)
        .map(|i| {
            let b = i + 3;
            let num = ext[b - 2] - T::from_f64(8.0) * ext[b - 1] + T::from_f64(8.0) * ext[b + 1] - ext[b + 2];
            num * T::from_f64(1.0 / (12.0 * h * rs[i]))
        })
        .collect()
}

pub fn derivative(f: &RealField, closure: &Closure) -> RealField {
    let v = derivative_values(f.grid(), f.values(), closure);
    RealField::new(f.grid().clone(), v).expect("derivative of a finite field is finite")
}

/// `∫|∇u|² = 4π∫|(r·u)_r|² dr` in the summation-by-parts form matching
/// [`laplacian_values`]; exact for the zero closure.
pub fn gradient_energy_values<T: Scalar>(grid: &RadialGrid, values: &[T], closure: &Closure) -> f64 {
    let ext = extend(values, closure);
    let d = half_derivatives(grid, &ext);
    let q = grid.flux_weights();
    let n = grid.n();
    let m0 = d[1].modulus();
    let mut acc = 0.5 * q[0] * m0 * m0;
    for j in 1..=n + 1 {
        let m = d[j + 1].modulus();
        acc += q[j] * m * m;
    }
    4.0 * std::f64::consts::PI * grid.h() * acc
}

pub fn quad_values(grid: &RadialGrid, values: &[f64]) -> f64 {
    grid.weights().iter().zip(values).map(|(w, v)| w * v).sum()
}

/// `∫_{ℝ³} f` by the grid's quadrature rule.
pub fn quad(f: &RealField) -> f64 {
    quad_values(f.grid(), f.values())
}

/// `∫_{ℝ³} f` including the far-field model.
pub fn quad_with_tail(f: &RealField, tail: &Tail) -> f64 {
    quad(f) + tail.contribution(f.grid(), f.values())
}

pub fn inner(f: &RealField, g: &RealField) -> Result<f64> {
    f.check_same_grid(g)?;
    Ok(f.grid().weights().iter().zip(f.values()).zip(g.values()).map(|((w, a), b)| w * a * b).sum())
}

/// Anything with a modulus per node.
pub trait Sampled {
    fn grid_ref(&self) -> &RadialGrid;
    fn abs_values(&self) -> Vec<f64>;
}

impl Sampled for RealField {
    fn grid_ref(&self) -> &RadialGrid {
        self.grid()
    }
    fn abs_values(&self) -> Vec<f64> {
        self.values().iter().map(|v| v.abs()).collect()
    }
}

impl Sampled for ComplexField {
    fn grid_ref(&self) -> &RadialGrid {
        self.grid()
    }
    fn abs_values(&self) -> Vec<f64> {
        self.values().iter().map(|v| v.norm()).collect()
    }
}

/// `‖f‖_{L^p}`; `p = ∞` gives the largest nodal modulus.
pub fn lp_norm(f: &impl Sampled, p: f64) -> Result<f64> {
    lp_norm_with_tail(f, p, false)
}

/// As [`lp_norm`], adding a power-fit far field when `tail` is set.
pub fn lp_norm_with_tail(f: &impl Sampled, p: f64, tail: bool) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidExponent(format!("L^p norm needs p >= 1, got {p}")));
    }
    let a = f.abs_values();
    if p.is_infinite() {
        return Ok(a.iter().fold(0.0, |m: f64, &v| m.max(v)));
    }
    let vals: Vec<f64> = a.iter().map(|v| v.powf(p)).collect();
    let grid = f.grid_ref();
    let mut s = quad_values(grid, &vals);
    if tail {
        s += Tail::PowerFit.contribution(grid, &vals);
    }
    Ok(s.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::{make_grid, Stretch};
    use std::f64::consts::PI;

    fn w(r: f64) -> f64 {
        (1.0 + r * r / 3.0).powf(-0.5)
    }

    #[test]
    fn laplacian_of_gaussian() {
        let g = make_grid(800, 100.0, Stretch::default()).unwrap();
        let f = RealField::from_fn(&g, |r| (-r * r).exp());
        let l = apply_laplacian(&f, &Closure::zero());
        for (r, v) in g.nodes().iter().zip(l.values()) {
            assert!((v - (4.0 * r * r - 6.0) * (-r * r).exp()).abs() < 1e-6, "{r}");
        }
    }

    #[test]
    fn constant_is_harmonic_inside() {
        let g = make_grid(200, 60.0, Stretch::default()).unwrap();
        let f = RealField::from_fn(&g, |_| 1.0);
        let l = apply_laplacian(&f, &Closure::zero());
        for v in &l.values()[..g.n() - 3] {
            assert!(v.abs() < 1e-8);
        }
    }

    #[test]
    fn band_matches_stencil() {
        let g = make_grid(120, 80.0, Stretch::Algebraic { scale: 5.0 }).unwrap();
        let f = RealField::from_fn(&g, |r| w(r) + 0.1 * (-r).exp());
        let cl = Closure::shifted(&g, 0.05, w);
        let op = laplacian_operator(&g, &cl);
        let a = op.matrix.matvec(f.values());
        let b = laplacian_values(&g, f.values(), &cl);
        for i in 0..g.n() {
            assert!((a[i] + op.offset[i] - b[i]).abs() < 1e-9 * (1.0 + b[i].abs()));
        }
    }

    #[test]
    fn self_adjoint_with_zero_closure() {
        let g = make_grid(100, 60.0, Stretch::default()).unwrap();
        let u = RealField::from_fn(&g, |r| (-(r - 1.0) * (r - 1.0)).exp());
        let v = RealField::from_fn(&g, |r| (1.0 + r).recip() * (-r / 5.0).exp());
        let lu = apply_laplacian(&u, &Closure::zero());
        let lv = apply_laplacian(&v, &Closure::zero());
        let a = inner(&v, &lu).unwrap();
        let b = inner(&u, &lv).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        let e = gradient_energy_values(&g, u.values(), &Closure::zero());
        assert!((e + inner(&u, &lu).unwrap()).abs() < 1e-12 * e);
    }

    #[test]
    fn quadrature_of_w_powers() {
        let g = make_grid(512, 200.0, Stretch::default()).unwrap();
        let w6 = RealField::from_fn(&g, |r| w(r).powi(6));
        let exact6 = 3.0 * 3f64.sqrt() * PI * PI / 4.0;
        assert!((quad_with_tail(&w6, &Tail::w_power(6.0)) / exact6 - 1.0).abs() < 1e-10);
        let w5 = RealField::from_fn(&g, |r| w(r).powi(5));
        let exact5 = 4.0 * 3f64.sqrt() * PI;
        assert!((quad_with_tail(&w5, &Tail::w_power(5.0)) / exact5 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn norms() {
        let g = make_grid(512, 200.0, Stretch::default()).unwrap();
        let f = RealField::from_fn(&g, w);
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 1.0).abs() < 1e-4);
        assert!(matches!(lp_norm(&f, 0.5), Err(Error::InvalidExponent(_))));
        let z = RealField::zeros(&g);
        assert_eq!(lp_norm(&z, 3.0).unwrap(), 0.0);
    }
}
