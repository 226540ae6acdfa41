//! Two-level fixed point for `Q = W + η`: a scalar equation for `λ` and a
//! resolvent fixed point for `η`, plus an independent Newton solve.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::banded::BandMatrix;
use crate::error::{Error, Result};
use crate::profiles::{w, LeadingOrder, Nonlinearity, ProfileSet};
use crate::radial::{inner, laplacian_operator, lp_norm, Closure, RadialGrid, RealField};
use crate::resolvent::{pairing_with, r0_v_psi, ResolventWorkspace};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructConfig {
    /// Ball radius multiplier: `‖η‖_∞ ≤ R·ε`.
    pub r_ball: f64,
    /// Relative tolerance on the `λ` fixed point.
    pub tol_lambda: f64,
    /// Tolerance on `‖Δη‖_∞/ε` inside the outer loop.
    pub tol_eta: f64,
    /// Tolerance on `|Δλ|/λ` for the outer loop.
    pub tol_outer: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    /// History depth of Anderson mixing on `η`; 0 gives plain iteration.
    pub anderson_depth: usize,
    pub newton_tol: f64,
    pub newton_max_steps: usize,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        ConstructConfig {
            r_ball: 10.0,
            tol_lambda: 1e-14,
            tol_eta: 1e-9,
            tol_outer: 1e-10,
            max_inner: 100,
            max_outer: 200,
            anderson_depth: 5,
            newton_tol: 1e-11,
            newton_max_steps: 20,
        }
    }
}

impl ConstructConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [self.tol_lambda, self.tol_eta, self.tol_outer, self.newton_tol];
        if tols.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(self.r_ball >= 1.0) {
            return Err(Error::Config(format!("ball multiplier must be at least 1, got {}", self.r_ball)));
        }
        Ok(())
    }
}

/// Convergence record of a construction.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub outer_iterations: usize,
    pub lambda_iterations: usize,
    /// `⟨R₀(−λ²)Vψ, ℱ⟩` at the returned state.
    pub orth_residual: f64,
    /// `‖−ΔQ − Q⁵ − εf(Q) + ωQ‖_∞`.
    pub pde_residual: f64,
    /// Coefficient of `W` removed from `ℱ` before each resolvent solve.
    pub projections: Vec<f64>,
    pub omega1: f64,
    /// `ω − ω₁ε²`.
    pub omega_tilde: f64,
    pub method: String,
}

/// A solution `Q = W + η` of `−ΔQ − Q⁵ − εf(Q) + ωQ = 0`.
#[derive(Clone, Debug)]
pub struct SolitaryWave {
    pub eps: f64,
    pub lambda: f64,
    pub omega: f64,
    pub eta: RealField,
    pub q: RealField,
    pub nl: Nonlinearity,
    pub diagnostics: Diagnostics,
}

impl SolitaryWave {
    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.q.grid()
    }
}

/// `(W+η)⁵ − W⁵ − 5W⁴η + ε(f(W+η) − f(W))`.
pub fn nonlinear_n(eta: &RealField, eps: f64, nl: &Nonlinearity, profiles: &ProfileSet) -> Result<RealField> {
    eta.zip(profiles.w(), |e, wv| {
        let w2 = wv * wv;
        let quintic = e * e * (10.0 * w2 * wv + e * (10.0 * w2 + e * (5.0 * wv + e)));
        let pert = if eps == 0.0 { 0.0 } else { eps * (nl.f(wv + e) - nl.f(wv)) };
        quintic + pert
    })
}

/// `ℱ = −λ²W + εf(W) + N(η)`.
pub fn rhs_f(eps: f64, lambda: f64, eta: &RealField, nl: &Nonlinearity, profiles: &ProfileSet) -> Result<RealField> {
    let n = nonlinear_n(eta, eps, nl, profiles)?;
    n.zip(profiles.w(), |nv, wv| -lambda * lambda * wv + eps * nl.f(wv) + nv)
}

/// Result of the scalar solve.
#[derive(Clone, Debug)]
pub struct LambdaSolve {
    pub lambda: f64,
    pub iterations: usize,
    /// `|λ − ℋ(λ)|` at the returned point.
    pub residual: f64,
}

fn ball_check(eps: f64, eta: &RealField, cfg: &ConstructConfig) -> Result<()> {
    let s = eta.sup();
    if s > cfg.r_ball * eps {
        return Err(Error::BallExit(format!("‖η‖_∞ = {s:.3e} exceeds R·ε = {:.3e}", cfg.r_ball * eps)));
    }
    Ok(())
}

/// `ℋ(λ) = [ε⟨u, f(W)⟩ + ⟨u, N(η)⟩] / (λ⟨u, W⟩)`, `u = R₀(−λ²)Vψ`.
fn h_map(lambda: f64, eps: f64, fw: &RealField, n: &RealField, profiles: &ProfileSet) -> Result<f64> {
    let u = r0_v_psi(lambda, profiles)?;
    let num = eps * inner(&u, fw)? + inner(&u, n)?;
    let den = lambda * pairing_with(&u, lambda, profiles.w(), true)?;
    Ok(num / den)
}

/// Fixed point of `λ = ℋ(λ)` by direct iteration from `ελ⁽¹⁾`.
pub fn solve_lambda(
    eps: f64,
    eta: &RealField,
    nl: &Nonlinearity,
    profiles: &ProfileSet,
    cfg: &ConstructConfig,
) -> Result<LambdaSolve> {
    let lo = profiles.leading_order(nl)?;
    ball_check(eps, eta, cfg)?;
    let fw = profiles.w().map(|v| nl.f(v));
    let n = nonlinear_n(eta, eps, nl, profiles)?;
    let (low, high) = (0.5 * eps * lo.lambda1, 1.5 * eps * lo.lambda1);
    let mut lambda = eps * lo.lambda1;
    for it in 1..=cfg.max_inner {
        let next = h_map(lambda, eps, &fw, &n, profiles)?;
        if !(next >= low && next <= high) {
            return Err(Error::NoConvergence {
                level: "lambda",
                detail: format!("iterate {next:.6e} left [{low:.6e}, {high:.6e}] at ε = {eps}"),
            });
        }
        let step = (next - lambda).abs();
        lambda = next;
        if step <= cfg.tol_lambda * lambda {
            let residual = (lambda - h_map(lambda, eps, &fw, &n, profiles)?).abs();
            return Ok(LambdaSolve { lambda, iterations: it, residual });
        }
    }
    Err(Error::NoConvergence { level: "lambda", detail: format!("{} iterations at ε = {eps}", cfg.max_inner) })
}

/// Outer closure for `η` when `Q = W + η` decays like `e^{−λr}/r`.
pub fn eta_closure(grid: &RadialGrid, lambda: f64) -> Closure {
    Closure::shifted(grid, lambda, w)
}

/// One application of `η ↦ (H+λ²)⁻¹ℱ(ε, λ, η)`.
#[derive(Clone, Debug)]
pub struct EtaStep {
    pub eta: RealField,
    /// Coefficient `c` in `ℱ ← ℱ − cW` that restored orthogonality.
    pub projection: f64,
}

pub fn solve_eta(
    eps: f64,
    lambda: f64,
    eta_prev: &RealField,
    nl: &Nonlinearity,
    profiles: &ProfileSet,
    cfg: &ConstructConfig,
) -> Result<EtaStep> {
    let f = rhs_f(eps, lambda, eta_prev, nl, profiles)?;
    let u = r0_v_psi(lambda, profiles)?;
    let orth = pairing_with(&u, lambda, &f, true)?;
    let c = orth / pairing_with(&u, lambda, profiles.w(), true)?;
    let f = f.zip(profiles.w(), |a, b| a - c * b)?;
    let ws = ResolventWorkspace::new(profiles, lambda, eta_closure(profiles.grid(), lambda))?;
    let eta = ws.solve(&f)?;
    ball_check(eps, &eta, cfg)?;
    Ok(EtaStep { eta, projection: c })
}

/// `−Δ_h η + W⁵ − Q⁵ − εf(Q) + ωQ` with `ΔW = −W⁵` used exactly.
pub fn pde_residual_field(
    eps: f64,
    omega: f64,
    eta: &RealField,
    nl: &Nonlinearity,
    profiles: &ProfileSet,
) -> Result<RealField> {
    let grid = profiles.grid();
    let closure = eta_closure(grid, omega.sqrt());
    let lap = crate::radial::ops::laplacian_values(grid.as_ref(), eta.values(), &closure);
    let vals: Vec<f64> = (0..grid.n())
        .map(|i| {
            let wv = profiles.w().values()[i];
            let q = wv + eta.values()[i];
            -lap[i] + wv.powi(5) - q.powi(5) - eps * nl.f(q) + omega * q
        })
        .collect();
    RealField::new(grid.clone(), vals)
}

fn finish(
    eps: f64,
    lambda: f64,
    eta: RealField,
    nl: &Nonlinearity,
    profiles: &ProfileSet,
    lo: &LeadingOrder,
    mut diagnostics: Diagnostics,
) -> Result<SolitaryWave> {
    let omega = lambda * lambda;
    let q = eta.zip(profiles.w(), |a, b| a + b)?;
    let f = rhs_f(eps, lambda, &eta, nl, profiles)?;
    diagnostics.orth_residual = pairing_with(&r0_v_psi(lambda, profiles)?, lambda, &f, true)?;
    diagnostics.pde_residual = pde_residual_field(eps, omega, &eta, nl, profiles)?.sup();
    diagnostics.omega1 = lo.omega1;
    diagnostics.omega_tilde = omega - lo.omega1 * eps * eps;
    Ok(SolitaryWave { eps, lambda, omega, eta, q, nl: nl.clone(), diagnostics })
}

/// Outer iterations allowed without halving the best `‖Δη‖_∞`.
const STALL_WINDOW: usize = 30;

/// Anderson mixing of a fixed-point map on `R^n`.
struct Anderson {
    depth: usize,
    xs: Vec<Vec<f64>>,
    fs: Vec<Vec<f64>>,
}

impl Anderson {
    fn new(depth: usize) -> Self {
        Anderson { depth, xs: Vec::new(), fs: Vec::new() }
    }

    fn reset(&mut self) {
        self.xs.clear();
        self.fs.clear();
    }

    /// Next iterate from `x` and `g(x)`.
    fn next(&mut self, x: &[f64], gx: &[f64]) -> Vec<f64> {
        let f: Vec<f64> = gx.iter().zip(x).map(|(a, b)| a - b).collect();
        if self.depth == 0 {
            return gx.to_vec();
        }
        self.xs.push(x.to_vec());
        self.fs.push(f.clone());
        if self.xs.len() > self.depth + 1 {
            self.xs.remove(0);
            self.fs.remove(0);
        }
        let m = self.xs.len() - 1;
        if m == 0 {
            return gx.to_vec();
        }
        let diff = |v: &[Vec<f64>], j: usize| -> Vec<f64> { v[j + 1].iter().zip(&v[j]).map(|(a, b)| a - b).collect() };
        let df: Vec<Vec<f64>> = (0..m).map(|j| diff(&self.fs, j)).collect();
        let dx: Vec<Vec<f64>> = (0..m).map(|j| diff(&self.xs, j)).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut a = vec![vec![0.0; m]; m];
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                a[i][j] = dot(&df[i], &df[j]);
            }
            rhs[i] = dot(&df[i], &f);
        }
        let trace: f64 = (0..m).map(|i| a[i][i]).sum();
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += 1e-12 * trace;
        }
        let gamma = match small_solve(a, rhs) {
            Some(g) => g,
            None => {
                self.xs.drain(..m);
                self.fs.drain(..m);
                return gx.to_vec();
            }
        };
        let mut out = gx.to_vec();
        for j in 0..m {
            for k in 0..out.len() {
                out[k] -= gamma[j] * (dx[j][k] + df[j][k]);
            }
        }
        out
    }
}

fn small_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    for c in 0..m {
        let piv = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if !(a[piv][c].abs() > 0.0) {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..m {
            let l = a[r][c] / a[c][c];
            for k in c..m {
                a[r][k] -= l * a[c][k];
            }
            b[r] -= l * b[c];
        }
    }
    let mut x = vec![0.0; m];
    for c in (0..m).rev() {
        let s: f64 = (c + 1..m).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Alternates [`solve_lambda`] and [`solve_eta`] from `η = 0`, with the
/// `η` iteration accelerated by Anderson mixing.
pub fn construct_q(eps: f64, nl: &Nonlinearity, profiles: &ProfileSet, cfg: &ConstructConfig) -> Result<SolitaryWave> {
    construct_q_seeded(eps, None, nl, profiles, cfg)
}

/// [`construct_q`] started from a given `η` instead of zero.
pub fn construct_q_seeded(
    eps: f64,
    seed: Option<&RealField>,
    nl: &Nonlinearity,
    profiles: &ProfileSet,
    cfg: &ConstructConfig,
) -> Result<SolitaryWave> {
    cfg.validate()?;
    if !(eps > 0.0) {
        return Err(Error::Config(format!("ε must be positive, got {eps}")));
    }
    let lo = profiles.leading_order(nl)?;
    let grid = profiles.grid();
    let mut eta = match seed {
        Some(s) => {
            s.check_same_grid(profiles.w())?;
            s.clone()
        }
        None => RealField::zeros(grid),
    };
    let first = solve_lambda(eps, &eta, nl, profiles, cfg)?;
    let mut lambda = first.lambda;
    let mut diag = Diagnostics { lambda_iterations: first.iterations, method: "lyapunov-schmidt".into(), ..Default::default() };
    let mut mixer = Anderson::new(cfg.anderson_depth);
    let mut best = (f64::INFINITY, 0usize);
    for outer in 1..=cfg.max_outer {
        let step = solve_eta(eps, lambda, &eta, nl, profiles, cfg)?;
        diag.projections.push(step.projection);
        let d_eta = step.eta.zip(&eta, |a, b| (a - b).abs())?.sup() / eps;
        let mixed = mixer.next(eta.values(), step.eta.values());
        let candidate = RealField::new(grid.clone(), mixed)?;
        let mixed_ok = candidate.sup() <= cfg.r_ball * eps;
        let (next_eta, next) = match mixed_ok.then(|| solve_lambda(eps, &candidate, nl, profiles, cfg)) {
            Some(Ok(l)) => (candidate, l),
            _ => {
                mixer.reset();
                let l = solve_lambda(eps, &step.eta, nl, profiles, cfg)?;
                (step.eta, l)
            }
        };
        diag.lambda_iterations += next.iterations;
        let d_lambda = (next.lambda - lambda).abs() / lambda;
        diag.outer_iterations = outer;
        if d_eta <= cfg.tol_eta && d_lambda <= cfg.tol_outer {
            return finish(eps, lambda, eta, nl, profiles, &lo, diag);
        }
        if d_eta < 0.5 * best.0 {
            best = (d_eta, outer);
        } else if outer - best.1 > STALL_WINDOW {
            return Err(Error::NoConvergence {
                level: "outer",
                detail: format!("stalled at ‖Δη‖_∞/ε = {:.3e} after {outer} iterations at ε = {eps}", best.0),
            });
        }
        eta = next_eta;
        lambda = next.lambda;
    }
    Err(Error::NoConvergence { level: "outer", detail: format!("{} outer iterations at ε = {eps}", cfg.max_outer) })
}

/// Constructs every `ε` in parallel; failures are kept per entry.
pub fn construct_sweep(
    eps_list: &[f64],
    nl: &Nonlinearity,
    profiles: &ProfileSet,
    cfg: &ConstructConfig,
) -> Vec<Result<SolitaryWave>> {
    eps_list.par_iter().map(|&e| construct_q(e, nl, profiles, cfg)).collect()
}

/// `μ` with `ε = μ^{(5−p)/2}·ε̂` for a pure power.
pub fn scaling_factor(nl: &Nonlinearity, eps_hat: f64, eps: f64) -> Result<f64> {
    let p = nl
        .power()
        .ok_or_else(|| Error::Unsupported("scaling needs a pure-power perturbation".into()))?
        .p;
    if !(p < 5.0) {
        return Err(Error::Unsupported(format!("scaling needs p < 5, got {p}")));
    }
    if !(eps_hat > 0.0 && eps > 0.0) {
        return Err(Error::Config("scaling needs positive ε and ε̂".into()));
    }
    Ok((eps / eps_hat).powf(2.0 / (5.0 - p)))
}

/// `μ^{1/2}Q(μ·)` with `ε ← μ^{(5−p)/2}ε`, `ω ← μ²ω`, sampled on the same grid.
/// Beyond the grid the profile is continued as `c·e^{−λr}/r`.
pub fn rescale_wave(wave: &SolitaryWave, mu: f64, profiles: &ProfileSet) -> Result<SolitaryWave> {
    let p = wave
        .nl
        .power()
        .ok_or_else(|| Error::Unsupported("scaling needs a pure-power perturbation".into()))?
        .p;
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Config(format!("scale factor must be positive, got {mu}")));
    }
    let grid = wave.grid();
    wave.q.check_same_grid(profiles.w())?;
    grid.check_scale(mu)?;
    let r_last = grid.r_max();
    let q_last = *wave.q.values().last().expect("nonempty grid");
    let lambda = wave.lambda;
    let radii: Vec<f64> = grid.nodes().iter().map(|r| mu * r).collect();
    let sampled = grid.interpolate(wave.q.values(), &radii, |rq| q_last * (r_last / rq) * (-lambda * (rq - r_last)).exp());
    let q: Vec<f64> = sampled.iter().map(|v| mu.sqrt() * v).collect();
    let q = RealField::new(grid.clone(), q)?;
    let eta = q.zip(profiles.w(), |a, b| a - b)?;
    let mut diagnostics = wave.diagnostics.clone();
    diagnostics.method = format!("scaled(mu={mu})");
    let eps = mu.powf((5.0 - p) / 2.0) * wave.eps;
    let omega = mu * mu * wave.omega;
    let lo = profiles.leading_order(&wave.nl)?;
    diagnostics.omega_tilde = omega - lo.omega1 * eps * eps;
    diagnostics.pde_residual = pde_residual_field(eps, omega, &eta, &wave.nl, profiles)?.sup();
    Ok(SolitaryWave { eps, lambda: omega.sqrt(), omega, eta, q, nl: wave.nl.clone(), diagnostics })
}

/// Provenance of a wave returned by [`solitary_wave`].
#[derive(Clone, Debug, Serialize)]
pub enum WaveSource {
    Direct,
    /// Scaled from the direct construction at `eps_hat` and polished by Newton.
    Scaled { eps_hat: f64, mu: f64 },
}

/// Direct construction when it converges; otherwise, for a pure power, the
/// member of the scaling family anchored at the largest constructible `ε̂`,
/// polished by [`newton_oracle`].
pub fn solitary_wave(
    eps: f64,
    nl: &Nonlinearity,
    profiles: &ProfileSet,
    cfg: &ConstructConfig,
) -> Result<(SolitaryWave, WaveSource)> {
    let err = match construct_q(eps, nl, profiles, cfg) {
        Ok(w) => return Ok((w, WaveSource::Direct)),
        Err(e @ (Error::NoConvergence { .. } | Error::BallExit(_))) => e,
        Err(e) => return Err(e),
    };
    if nl.power().is_none() {
        return Err(err);
    }
    let lo = (eps * 0.05).min(1e-3);
    let eps_hat = find_eps0(nl, profiles, cfg, lo, eps, 12).map_err(|_| err)?;
    let anchor = construct_q(eps_hat, nl, profiles, cfg)?;
    let mu = scaling_factor(nl, eps_hat, eps)?;
    let scaled = rescale_wave(&anchor, mu, profiles)?;
    let (mut polished, _) = newton_oracle(eps, scaled.omega, &scaled.q, nl, profiles, cfg)?;
    polished.diagnostics.method = scaled.diagnostics.method.clone();
    polished.diagnostics.omega_tilde = scaled.diagnostics.omega_tilde;
    Ok((polished, WaveSource::Scaled { eps_hat, mu }))
}

/// Newton history.
#[derive(Clone, Debug, Serialize)]
pub struct NewtonReport {
    pub steps: usize,
    pub residuals: Vec<f64>,
    /// Largest `‖η_k − η_0‖_∞` over the iteration.
    pub max_departure: f64,
    /// Stopped because the residual stalled just above the tolerance.
    pub roundoff_floor: bool,
}

/// Newton stops once the residual stalls within this factor of the tolerance.
const NEWTON_FLOOR: f64 = 100.0;

/// Newton's method on the discrete `−ΔQ − Q⁵ − εf(Q) + ωQ = 0` at fixed `ω`,
/// with unknown `η = Q − W`.
pub fn newton_oracle(
    eps: f64,
    omega: f64,
    q_init: &RealField,
    nl: &Nonlinearity,
    profiles: &ProfileSet,
    cfg: &ConstructConfig,
) -> Result<(SolitaryWave, NewtonReport)> {
    if !(omega > 0.0) && eps != 0.0 {
        return Err(Error::NonPositiveLambda(omega));
    }
    let grid = profiles.grid();
    let lambda = omega.max(0.0).sqrt();
    let closure = if omega > 0.0 { eta_closure(grid, lambda) } else { Closure::power_law(grid) };
    let op = laplacian_operator(grid, &closure);
    let wv = profiles.w().values();
    let eta0: Vec<f64> = q_init.values().iter().zip(wv).map(|(q, w)| q - w).collect();
    let mut eta = eta0.clone();
    let residual = |eta: &[f64]| -> Vec<f64> {
        let ae = op.matrix.matvec(eta);
        (0..eta.len())
            .map(|i| {
                let q = wv[i] + eta[i];
                -(ae[i] + op.offset[i]) + wv[i].powi(5) - q.powi(5) - eps * nl.f(q) + omega * q
            })
            .collect()
    };
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut res = residual(&eta);
    let mut report = NewtonReport { steps: 0, residuals: vec![sup(&res)], max_departure: 0.0, roundoff_floor: false };
    let r0 = report.residuals[0];
    while *report.residuals.last().unwrap() > cfg.newton_tol {
        if report.steps >= cfg.newton_max_steps {
            return Err(Error::Divergence(format!(
                "residual {:.3e} after {} steps",
                report.residuals.last().unwrap(),
                report.steps
            )));
        }
        let mut jac: BandMatrix<f64> = op.matrix.map(|x| -x);
        let diag: Vec<f64> = (0..eta.len())
            .map(|i| {
                let q = wv[i] + eta[i];
                -5.0 * q.powi(4) - eps * nl.df(q) + omega
            })
            .collect();
        jac.add_diagonal(&diag);
        let mut delta: Vec<f64> = res.iter().map(|x| -x).collect();
        jac.factor()?.solve_in_place(&mut delta);
        for (e, d) in eta.iter_mut().zip(&delta) {
            *e += d;
        }
        report.steps += 1;
        let dep = eta.iter().zip(&eta0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        report.max_departure = report.max_departure.max(dep);
        res = residual(&eta);
        let rn = sup(&res);
        if !rn.is_finite() || rn > 1e3 * r0.max(cfg.newton_tol) {
            return Err(Error::Divergence(format!("residual grew to {rn:.3e}")));
        }
        let prev = *report.residuals.last().unwrap();
        report.residuals.push(rn);
        if rn > cfg.newton_tol && rn <= NEWTON_FLOOR * cfg.newton_tol && rn > 0.5 * prev {
            report.roundoff_floor = true;
            break;
        }
    }
    let eta = RealField::new(grid.clone(), eta)?;
    let q = eta.zip(profiles.w(), |a, b| a + b)?;
    let lo = profiles.leading_order(nl).ok();
    let diagnostics = Diagnostics {
        outer_iterations: report.steps,
        pde_residual: *report.residuals.last().unwrap(),
        omega1: lo.map_or(f64::NAN, |l| l.omega1),
        omega_tilde: lo.map_or(f64::NAN, |l| omega - l.omega1 * eps * eps),
        method: "newton".into(),
        ..Default::default()
    };
    Ok((SolitaryWave { eps, lambda, omega, eta, q, nl: nl.clone(), diagnostics }, report))
}

/// One `(ε₁, ε₂)` comparison.
#[derive(Clone, Debug, Serialize)]
pub struct PairRow {
    pub eps1: f64,
    pub eps2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `|(λ₂−λ₁) − λ⁽¹⁾(ε₂−ε₁)| / |ε₂−ε₁|`; `None` for a degenerate pair.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaRow {
    pub eps_hat: f64,
    pub omega: f64,
    /// `Ω_ε(ε̂) = (ε/ε̂)^{4/(5−p)} ω(ε̂)`.
    pub big_omega: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub pairs: Vec<PairRow>,
    /// Pair ratios shrink as the pairs shrink (pairs listed from large to small scale).
    pub ratios_decreasing: bool,
    pub eps_ref: f64,
    pub omegas: Vec<OmegaRow>,
    /// `Ω_ε` strictly decreasing along increasing `ε̂`.
    pub omega_decreasing: bool,
}

pub fn lambda_monotonicity_check(
    pairs: &[(f64, f64)],
    eps_ref: f64,
    eps_hats: &[f64],
    nl: &Nonlinearity,
    profiles: &ProfileSet,
    cfg: &ConstructConfig,
) -> Result<MonotonicityReport> {
    let p = match nl.power() {
        Some(ps) if ps.p > 3.0 && ps.p < 5.0 && ps.sign == 1.0 => ps.p,
        _ => return Err(Error::Unsupported("monotonicity check needs a focusing power 3 < p < 5".into())),
    };
    let lo = profiles.leading_order(nl)?;
    let rows: Vec<PairRow> = pairs
        .par_iter()
        .map(|&(e1, e2)| {
            if e1 == e2 {
                let l = construct_q(e1, nl, profiles, cfg)?.lambda;
                return Ok(PairRow { eps1: e1, eps2: e2, lambda1: l, lambda2: l, ratio: None });
            }
            let l1 = construct_q(e1, nl, profiles, cfg)?.lambda;
            let l2 = construct_q(e2, nl, profiles, cfg)?.lambda;
            let ratio = ((l2 - l1) - lo.lambda1 * (e2 - e1)).abs() / (e2 - e1).abs();
            Ok(PairRow { eps1: e1, eps2: e2, lambda1: l1, lambda2: l2, ratio: Some(ratio) })
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let ratios_decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let mut hats = eps_hats.to_vec();
    hats.sort_by(|a, b| a.partial_cmp(b).expect("finite ε̂"));
    let omegas: Vec<OmegaRow> = hats
        .par_iter()
        .map(|&eh| {
            let omega = construct_q(eh, nl, profiles, cfg)?.omega;
            let big_omega = (eps_ref / eh).powf(4.0 / (5.0 - p)) * omega;
            Ok(OmegaRow { eps_hat: eh, omega, big_omega })
        })
        .collect::<Result<_>>()?;
    let omega_decreasing = omegas.windows(2).all(|w| w[1].big_omega < w[0].big_omega);
    Ok(MonotonicityReport { pairs: rows, ratios_decreasing, eps_ref, omegas, omega_decreasing })
}

/// Largest `ε` in `[lo, hi]` for which [`construct_q`] succeeds, by bisection.
pub fn find_eps0(
    nl: &Nonlinearity,
    profiles: &ProfileSet,
    cfg: &ConstructConfig,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<f64> {
    if construct_q(lo, nl, profiles, cfg).is_err() {
        return Err(Error::NoConvergence { level: "eps0", detail: format!("construction fails already at ε = {lo}") });
    }
    if construct_q(hi, nl, profiles, cfg).is_ok() {
        return Ok(hi);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..steps {
        let m = (a * b).sqrt();
        if construct_q(m, nl, profiles, cfg).is_ok() {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(a)
}

/// `‖η‖_{L^r}`, `r ∈ [1, ∞]`.
pub fn eta_norm(wave: &SolitaryWave, r: f64) -> Result<f64> {
    lp_norm(&wave.eta, r)
}
