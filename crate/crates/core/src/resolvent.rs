//! Free resolvent `R₀(−λ²)`, full resolvent `(H+λ²)⁻¹` and probes of the
//! resonance at zero energy.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::banded::{BandLu, BandMatrix};
use crate::error::{Error, Result};
use crate::profiles::{psi_scale, ProfileSet};
use crate::radial::{inner, laplacian_operator, quad_with_tail, Closure, RadialGrid, RealField, Tail};

/// `N_k(x) = ∫₀¹ t^k e^{−xt} dt` for `k = 0..4`.
fn moments_n(x: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    if x < 3.0 {
        for (k, o) in out.iter_mut().enumerate() {
            let mut term = 1.0;
            let mut acc = 0.0;
            for m in 0..60 {
                if m > 0 {
                    term *= -x / m as f64;
                }
                let t = term / (k + m + 1) as f64;
                acc += t;
                if t.abs() < 1e-18 * acc.abs() {
                    break;
                }
            }
            *o = acc;
        }
    } else {
        let e = (-x).exp();
        out[0] = -(-x).exp_m1() / x;
        for k in 1..4 {
            out[k] = (k as f64 * out[k - 1] - e) / x;
        }
    }
    out
}

/// `M_k(x) = ∫₀¹ t^k e^{−x(1−t)} dt = ∫₀¹ (1−τ)^k e^{−xτ} dτ`.
fn moments_m(n: &[f64; 4]) -> [f64; 4] {
    [n[0], n[0] - n[1], n[0] - 2.0 * n[1] + n[2], n[0] - 3.0 * n[1] + 3.0 * n[2] - n[3]]
}

/// Monomial coefficients of the cubic interpolating `y` at nodes `t`.
fn cubic_coefficients(t: [f64; 4], y: [f64; 4]) -> [f64; 4] {
    let mut c = [0.0; 4];
    for k in 0..4 {
        let mut poly = [1.0, 0.0, 0.0, 0.0];
        let mut denom = 1.0;
        let mut deg = 0;
        for j in 0..4 {
            if j == k {
                continue;
            }
            for d in (0..=deg).rev() {
                poly[d + 1] += poly[d];
                poly[d] *= -t[j];
            }
            deg += 1;
            denom *= t[k] - t[j];
        }
        for d in 0..4 {
            c[d] += y[k] * poly[d] / denom;
        }
    }
    c
}

/// `u = R₀(−λ²)f` through the radial reduction
/// `u(r) = (2λr)⁻¹∫₀^∞ s f(s)[e^{−λ|r−s|} − e^{−λ(r+s)}] ds`,
/// evaluated by product integration: `f` is interpolated by local cubics
/// and the exponential kernel is integrated exactly on each cell.
/// The recursion keeps only decaying exponentials.
pub fn apply_r0(lambda: f64, f: &RealField) -> Result<RealField> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let grid = f.grid();
    let n = grid.n();
    let r = grid.nodes();
    let fv = f.values();
    // Node `k` in −2..n, read through the even reflection of `f`.
    let node = |k: i64| -> (f64, f64) {
        if k < 0 {
            let m = (-k - 1) as usize;
            (-r[m], fv[m])
        } else {
            (r[k as usize], fv[k as usize])
        }
    };
    let g_plain = |s: f64, fs: f64| s * fs;
    let g_damped = |s: f64, fs: f64| s * fs * (-(-2.0 * lambda * s).exp_m1()) / (2.0 * lambda);

    let cell_stencil = |c: usize| -> i64 {
        let lo = c as i64 - 2;
        lo.min(n as i64 - 4)
    };

    // Forward sweep: A(r_c) = ∫₀^{r_c} g̃(s) e^{−λ(r_c − s)} ds.
    let mut a = vec![0.0; n];
    let mut prev = 0.0;
    let mut x_left = 0.0;
    for c in 0..n {
        let x_right = r[c];
        let delta = x_right - x_left;
        let lo = cell_stencil(c);
        let mut tn = [0.0; 4];
        let mut yd = [0.0; 4];
        for q in 0..4 {
            let (s, fs) = node(lo + q as i64);
            tn[q] = (s - x_left) / delta;
            yd[q] = g_damped(s, fs);
        }
        let x = lambda * delta;
        let mm = moments_m(&moments_n(x));
        let coef = cubic_coefficients(tn, yd);
        let cell: f64 = (0..4).map(|k| coef[k] * mm[k]).sum::<f64>() * delta;
        a[c] = (-x).exp() * prev + cell;
        prev = a[c];
        x_left = x_right;
    }

    // Backward sweep: B(r_c) = ∫_{r_c}^∞ g(s) e^{−λ(s − r_c)} ds, with the
    // integrand taken to vanish past the last node.
    let mut b = vec![0.0; n];
    for c in (0..n - 1).rev() {
        let (xl, xr) = (r[c], r[c + 1]);
        let delta = xr - xl;
        let lo = cell_stencil(c + 1);
        let mut tn = [0.0; 4];
        let mut yp = [0.0; 4];
        for q in 0..4 {
            let (s, fs) = node(lo + q as i64);
            tn[q] = (s - xl) / delta;
            yp[q] = g_plain(s, fs);
        }
        let x = lambda * delta;
        let nn = moments_n(x);
        let coef = cubic_coefficients(tn, yp);
        let cell: f64 = (0..4).map(|k| coef[k] * nn[k]).sum::<f64>() * delta;
        b[c] = (-x).exp() * b[c + 1] + cell;
    }

    let u: Vec<f64> = (0..n)
        .map(|i| {
            let ri = r[i];
            a[i] / ri + b[i] * (-(-2.0 * lambda * ri).exp_m1()) / (2.0 * lambda * ri)
        })
        .collect();
    RealField::new(grid.clone(), u)
}

/// `R₀(−λ²)Vψ`.
pub fn r0_v_psi(lambda: f64, profiles: &ProfileSet) -> Result<RealField> {
    apply_r0(lambda, profiles.v_psi())
}

/// `∫_{r_end}^∞ 4πr² u F` for `u ∝ e^{−λr}/r` and `F ∝ 1/r` past the grid.
fn w_tail_correction(lambda: f64, u: &RealField, f: &RealField) -> f64 {
    let grid = u.grid();
    let n = grid.n();
    let rl = grid.r_max();
    let re = grid.r_end();
    let ue = u.values()[n - 1] * rl / re * (-lambda * (re - rl)).exp();
    let fe = f.values()[n - 1] * rl / re;
    4.0 * PI * ue * fe * re * re / lambda
}

/// `⟨R₀(−λ²)Vψ, F⟩`; `w_tail` adds the far field of a `1/r`-class `F`.
pub fn orth_pairing(lambda: f64, f: &RealField, profiles: &ProfileSet, w_tail: bool) -> Result<f64> {
    let u = r0_v_psi(lambda, profiles)?;
    pairing_with(&u, lambda, f, w_tail)
}

/// As [`orth_pairing`] with a precomputed `R₀(−λ²)Vψ`.
pub fn pairing_with(u: &RealField, lambda: f64, f: &RealField, w_tail: bool) -> Result<f64> {
    let mut s = inner(u, f)?;
    if w_tail {
        s += w_tail_correction(lambda, u, f);
    }
    Ok(s)
}

/// Factorized `H + λ² = −Δ − 5W⁴ + λ²` with a given outer closure.
pub struct ResolventWorkspace {
    grid: Arc<RadialGrid>,
    lambda: f64,
    closure: Closure,
    matrix: BandMatrix<f64>,
    offset: Vec<f64>,
    lu: BandLu<f64>,
}

impl ResolventWorkspace {
    pub fn new(profiles: &ProfileSet, lambda: f64, closure: Closure) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveLambda(lambda));
        }
        let grid = profiles.grid().clone();
        let op = laplacian_operator(&grid, &closure);
        let mut matrix = op.matrix.map(|x| -x);
        let diag: Vec<f64> = profiles.v().values().iter().map(|v| v + lambda * lambda).collect();
        matrix.add_diagonal(&diag);
        let lu = matrix.factor()?;
        Ok(Self { grid, lambda, closure, matrix, offset: op.offset, lu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    /// Solves `(H+λ²)η = F` with the closure's affine ghost data.
    pub fn solve(&self, f: &RealField) -> Result<RealField> {
        if !f.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let rhs: Vec<f64> = f.values().iter().zip(&self.offset).map(|(a, b)| a + b).collect();
        let mut x = self.lu.solve(&rhs);
        // One refinement sweep.
        let ax = self.matrix.matvec(&x);
        let mut corr: Vec<f64> = rhs.iter().zip(&ax).map(|(b, y)| b - y).collect();
        self.lu.solve_in_place(&mut corr);
        for (xi, ci) in x.iter_mut().zip(&corr) {
            *xi += ci;
        }
        RealField::new(self.grid.clone(), x)
    }

    /// `‖(H+λ²)η − F‖_∞ / ‖F‖_∞`.
    pub fn relative_residual(&self, eta: &RealField, f: &RealField) -> f64 {
        let ax = self.matrix.matvec(eta.values());
        let mut worst = 0.0f64;
        for i in 0..ax.len() {
            worst = worst.max((ax[i] - self.offset[i] - f.values()[i]).abs());
        }
        worst / f.sup().max(f64::MIN_POSITIVE)
    }
}

/// `(H+λ²)⁻¹F` with the decaying closure `e^{−λr}/r`.
pub fn solve_full(lambda: f64, f: &RealField, profiles: &ProfileSet) -> Result<RealField> {
    let ws = ResolventWorkspace::new(profiles, lambda, Closure::decaying(profiles.grid(), lambda))?;
    ws.solve(f)
}

/// One row of a singularity probe.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProbeRow {
    pub lambda: f64,
    pub amplification: f64,
}

/// `⟨Vψ, ψ⟩ = ∫Vψ²`, including the far field.
pub fn v_psi_psi(profiles: &ProfileSet) -> f64 {
    let f = profiles.v_psi().zip(profiles.psi(), |a, b| a * b).expect("same grid");
    let s2 = psi_scale() * psi_scale();
    // Vψ² = −5W⁴(W³ − W/2)²/(3π).
    let tail = Tail::w_power(10.0)
        .plus(Tail::w_power(8.0).scaled(-1.0))
        .plus(Tail::w_power(6.0).scaled(0.25))
        .scaled(-5.0 * s2);
    quad_with_tail(&f, &tail)
}

/// Removes the `Vψ`-component along `ψ`: `f − (⟨Vψ,f⟩/⟨Vψ,ψ⟩)ψ`.
pub fn orthogonalize(f: &RealField, profiles: &ProfileSet) -> Result<RealField> {
    let c = inner(profiles.v_psi(), f)? / v_psi_psi(profiles);
    f.zip(profiles.psi(), |a, b| a - c * b)
}

/// `‖(1 + R₀(−λ²)V)⁻¹f‖_∞ / ‖f‖_∞` for each `λ`, using the identity
/// `(1 + R₀V)⁻¹f = f − (H+λ²)⁻¹(Vf)`.
pub fn singularity_probe(
    lambdas: &[f64],
    f: &RealField,
    orthogonal: bool,
    profiles: &ProfileSet,
) -> Result<Vec<ProbeRow>> {
    let data = if orthogonal { orthogonalize(f, profiles)? } else { f.clone() };
    let norm = data.sup();
    if !(norm > 1e-10 * f.sup()) {
        return Err(Error::Assumption("probe data vanish after removing the ψ-component".into()));
    }
    let vf = data.zip(profiles.v(), |a, b| a * b)?;
    lambdas
        .par_iter()
        .map(|&lambda| {
            let g = solve_full(lambda, &vf, profiles)?;
            let h = data.zip(&g, |a, b| a - b)?;
            Ok(ProbeRow { lambda, amplification: h.sup() / norm })
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
