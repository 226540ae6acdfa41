//! Mass, energy, action, the virial functionals and Pohozaev residuals,
//! mass- and `Ḣ¹`-preserving rescalings, and the action gap.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::construct::{rescale_wave, scaling_factor, solitary_wave, ConstructConfig, SolitaryWave, WaveSource};
use crate::error::{Error, Result};
use crate::profiles::{w, w_prime, Nonlinearity, ProfileSet};
use crate::radial::ops::{derivative_values, gradient_energy_values, quad_values};
use crate::radial::{Closure, ComplexField, RadialGrid, RealField, Tail};

/// A field handed to [`evaluate`].
#[derive(Clone, Copy, Debug)]
pub enum FieldView<'a> {
    Real(&'a RealField),
    Complex(&'a ComplexField),
}

impl<'a> From<&'a RealField> for FieldView<'a> {
    fn from(f: &'a RealField) -> Self {
        FieldView::Real(f)
    }
}

impl<'a> From<&'a ComplexField> for FieldView<'a> {
    fn from(f: &'a ComplexField) -> Self {
        FieldView::Complex(f)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FunctionalReport {
    pub eps: f64,
    pub omega: f64,
    pub p: Option<f64>,
    /// `∫|∇u|²`.
    pub gradient: f64,
    /// `∫|u|⁶`.
    pub sextic: f64,
    /// `∫|u|²`.
    pub l2: f64,
    /// `∫F(|u|)`.
    pub potential: f64,
    /// `∫|u|f(|u|)`.
    pub nehari: f64,
    pub mass: f64,
    pub energy: f64,
    pub action: f64,
    pub k: f64,
    pub k0: f64,
    /// `𝒮 − (2/(3(p−1)))𝒦`, pure powers only.
    pub i_omega: Option<f64>,
    /// The expanded positive-coefficient form of `I_ω`.
    pub i_expanded: Option<f64>,
    pub pohozaev_residual_k: f64,
    pub pohozaev_residual_k0: f64,
}

impl FunctionalReport {
    pub const CSV_HEADER: &'static str =
        "eps,omega,p,mass,energy,action,K,K0,I,I_expanded,pohozaev_residual_K,pohozaev_residual_K0";

    pub fn csv_row(&self) -> String {
        let f = crate::radial::io::fmt17;
        let o = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), f);
        [
            f(self.eps),
            f(self.omega),
            o(self.p),
            f(self.mass),
            f(self.energy),
            f(self.action),
            f(self.k),
            f(self.k0),
            o(self.i_omega),
            o(self.i_expanded),
            f(self.pohozaev_residual_k),
            f(self.pohozaev_residual_k0),
        ]
        .join(",")
    }
}

/// Far-field model of a real profile beyond the last node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FarField {
    Negligible,
    /// `u ≈ b·W`.
    Power { b: f64 },
    /// `u ≈ a·(r₀/r)·e^{−κ(r−r₀)}`.
    Exponential { a: f64, r0: f64, kappa: f64 },
}

/// Largest `κR` for which an exponential tail is still added.
const TAIL_CUTOFF: f64 = 700.0;

/// Edge values below this fraction of the sup are cancellation noise.
const ROUNDOFF_FLOOR: f64 = 1e-14;

impl FarField {
    /// Classifies from the last two nodes.
    pub fn detect(grid: &RadialGrid, values: &[f64]) -> FarField {
        let n = values.len();
        let (u1, u2) = (values[n - 2], values[n - 1]);
        let (r1, r2) = (grid.nodes()[n - 2], grid.nodes()[n - 1]);
        let floor = ROUNDOFF_FLOOR * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if u2.abs() <= floor || u1.abs() <= floor || u1.signum() != u2.signum() {
            return FarField::Negligible;
        }
        let kappa = -((u2 * r2) / (u1 * r1)).ln() / (r2 - r1);
        let b = u2 / w(r2);
        let wk = -((w(r2) * r2) / (w(r1) * r1)).ln() / (r2 - r1);
        if (kappa - wk).abs() * r2 < 1e-3 {
            return FarField::Power { b };
        }
        if kappa > 0.0 {
            if kappa * grid.r_end() > TAIL_CUTOFF {
                return FarField::Negligible;
            }
            return FarField::Exponential { a: u2, r0: r2, kappa };
        }
        FarField::Power { b }
    }

    /// `∫_{r>R}|u|^k` with `R` the last cell edge.
    pub fn power_tail(&self, grid: &RadialGrid, values: &[f64], k: f64) -> Result<f64> {
        match *self {
            FarField::Negligible => Ok(0.0),
            FarField::Power { b } => Ok(Tail::w_power(k).scaled(b.abs().powf(k)).contribution(grid, values)),
            FarField::Exponential { a, r0, kappa } => {
                let r = grid.r_end();
                Ok(4.0 * PI * (a * r0).abs().powf(k) * exp_tail(k - 2.0, k * kappa, r, r0)?)
            }
        }
    }

    /// `∫_{r>R}|u_r|²`.
    pub fn gradient_tail(&self, grid: &RadialGrid, values: &[f64]) -> Result<f64> {
        match *self {
            FarField::Negligible => Ok(0.0),
            FarField::Power { b } => Ok(w_prime_sq_tail().scaled(b * b).contribution(grid, values)),
            FarField::Exponential { a, r0, kappa } => {
                let r = grid.r_end();
                let b = 2.0 * kappa;
                let t = kappa * kappa * exp_tail(0.0, b, r, r0)?
                    + 2.0 * kappa * exp_tail(1.0, b, r, r0)?
                    + exp_tail(2.0, b, r, r0)?;
                Ok(4.0 * PI * (a * r0).powi(2) * t)
            }
        }
    }

    /// Value at `r > r_max`.
    pub fn extrapolate(&self, r: f64) -> f64 {
        match *self {
            FarField::Negligible => 0.0,
            FarField::Power { b } => b * w(r),
            FarField::Exponential { a, r0, kappa } => a * r0 * (-kappa * (r - r0)).exp() / r,
        }
    }
}

/// Series of `W'² = r²W⁶/9`.
fn w_prime_sq_tail() -> Tail {
    match Tail::w_power(6.0) {
        Tail::Series(t) => Tail::Series(t.into_iter().map(|(c, m)| (c / 9.0, m - 2.0)).collect()),
        other => other,
    }
}

/// `∫_R^∞ r^{−m}e^{−β(r−r₀)} dr = R^{1−m}E_m(βR)e^{βr₀}`.
fn exp_tail(m: f64, beta: f64, r: f64, r0: f64) -> Result<f64> {
    let x = beta * r;
    if x < 1.0 {
        return Err(Error::Resolution(format!("field has not decayed by r_max (κR = {x:.3})")));
    }
    Ok(r.powf(1.0 - m) * expint_scaled(m, x) * (-beta * (r - r0)).exp())
}

#[cfg(test)]
fn expint(m: f64, x: f64) -> f64 {
    expint_scaled(m, x) * (-x).exp()
}

/// `eˣE_m(x)` for `x ≥ 1` by its continued fraction.
fn expint_scaled(m: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + m;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let a = -(i as f64) * (m - 1.0 + i as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    h
}

struct Integrals {
    gradient: f64,
    sextic: f64,
    l2: f64,
    potential: f64,
    nehari: f64,
}

fn real_integrals(u: &RealField, nl: &Nonlinearity) -> Result<Integrals> {
    let grid = u.grid();
    let vals = u.values();
    let nodes = grid.nodes();
    let far = FarField::detect(grid, vals);
    let a = vals[0] / w(nodes[0]);
    let rest: Vec<f64> = vals.iter().zip(nodes).map(|(v, r)| v - a * w(*r)).collect();
    let d_rest = derivative_values(grid.as_ref(), &rest, &Closure::power_law(grid));
    let grad_sq: Vec<f64> = d_rest.iter().zip(nodes).map(|(d, r)| (a * w_prime(*r) + d).powi(2)).collect();
    let gradient = quad_values(grid, &grad_sq) + far.gradient_tail(grid, &grad_sq)?;
    let moduli: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
    let power = |k: f64| -> Result<f64> {
        let g: Vec<f64> = moduli.iter().map(|m| m.powf(k)).collect();
        Ok(quad_values(grid, &g) + far.power_tail(grid, &g, k)?)
    };
    let sextic = power(6.0)?;
    let l2 = power(2.0)?;
    let (potential, nehari) = match nl.power() {
        Some(ps) => {
            let pp = power(ps.p + 1.0)?;
            (ps.sign * pp / (ps.p + 1.0), ps.sign * pp)
        }
        None => {
            let f: Vec<f64> = moduli.iter().map(|m| nl.big_f(*m)).collect();
            let g: Vec<f64> = moduli.iter().map(|m| m * nl.f(*m)).collect();
            let tf = Tail::PowerFit.contribution(grid, &f);
            let tg = Tail::PowerFit.contribution(grid, &g);
            (quad_values(grid, &f) + tf, quad_values(grid, &g) + tg)
        }
    };
    Ok(Integrals { gradient, sextic, l2, potential, nehari })
}

fn complex_integrals(u: &ComplexField, nl: &Nonlinearity) -> Integrals {
    let grid = u.grid();
    let gradient = gradient_energy_values(grid.as_ref(), u.values(), &Closure::zero());
    let moduli: Vec<f64> = u.values().iter().map(|v| v.norm()).collect();
    let q = |f: &dyn Fn(f64) -> f64| -> f64 { quad_values(grid, &moduli.iter().map(|m| f(*m)).collect::<Vec<_>>()) };
    Integrals {
        gradient,
        sextic: q(&|m| m.powi(6)),
        l2: q(&|m| m * m),
        potential: q(&|m| nl.big_f(m)),
        nehari: q(&|m| m * nl.f(m)),
    }
}

/// All functionals of `u` at parameters `(ε, ω)`.
///
/// Real profiles use the closed-form `W'` for the core and far-field
/// models for the integrals past `r_max`; complex states are treated as
/// supported on the grid, with the gradient in the summation-by-parts form
/// of the zero-closure Laplacian.
pub fn evaluate<'a>(u: impl Into<FieldView<'a>>, eps: f64, omega: f64, nl: &Nonlinearity) -> Result<FunctionalReport> {
    let it = match u.into() {
        FieldView::Real(f) => real_integrals(f, nl)?,
        FieldView::Complex(f) => complex_integrals(f, nl),
    };
    let p = nl.power().map(|ps| ps.p);
    let mass = 0.5 * it.l2;
    let omega_mass = if omega == 0.0 { 0.0 } else { omega * mass };
    let energy = 0.5 * it.gradient - it.sextic / 6.0 - eps * it.potential;
    let action = energy + omega_mass;
    let eps_k = eps * (3.0 * it.potential - 1.5 * it.nehari);
    let k = it.gradient - it.sextic + eps_k;
    let omega_l2 = if omega == 0.0 { 0.0 } else { omega * it.l2 };
    let k0 = eps * (3.0 * it.potential - 0.5 * it.nehari) - omega_l2;
    let (i_omega, i_expanded) = match p {
        Some(p) => (
            Some(action - 2.0 / (3.0 * (p - 1.0)) * k),
            Some(
                (p - 7.0 / 3.0) / (2.0 * (p - 1.0)) * it.gradient
                    + (5.0 - p) / (6.0 * (p - 1.0)) * it.sextic
                    + omega_mass,
            ),
        ),
        None => (None, None),
    };
    let ratio = |num: f64, scale: f64| if scale > 0.0 { num.abs() / scale } else { num.abs() };
    let k_scale = it.gradient + it.sextic + eps_k.abs();
    let k0_scale = (eps * 3.0 * it.potential).abs() + (eps * 0.5 * it.nehari).abs() + omega_l2.abs();
    Ok(FunctionalReport {
        eps,
        omega,
        p,
        gradient: it.gradient,
        sextic: it.sextic,
        l2: it.l2,
        potential: it.potential,
        nehari: it.nehari,
        mass,
        energy,
        action,
        k,
        k0,
        i_omega,
        i_expanded,
        pohozaev_residual_k: ratio(k, k_scale),
        pohozaev_residual_k0: ratio(k0, k0_scale),
    })
}

/// Functionals of a constructed wave at its own parameters.
pub fn evaluate_wave(wave: &SolitaryWave) -> Result<FunctionalReport> {
    evaluate(&wave.q, wave.eps, wave.omega, &wave.nl)
}

fn resample_real(u: &RealField, mu: f64, power: f64) -> Result<RealField> {
    let grid = u.grid();
    grid.check_scale(mu)?;
    if mu == 1.0 {
        return Ok(u.clone());
    }
    let far = FarField::detect(grid, u.values());
    let radii: Vec<f64> = grid.nodes().iter().map(|r| mu * r).collect();
    let v = grid.interpolate(u.values(), &radii, |r| far.extrapolate(r));
    let c = mu.powf(power);
    RealField::new(grid.clone(), v.into_iter().map(|x| c * x).collect())
}

fn resample_complex(u: &ComplexField, mu: f64, power: f64) -> Result<ComplexField> {
    let grid = u.grid();
    grid.check_scale(mu)?;
    if mu == 1.0 {
        return Ok(u.clone());
    }
    let radii: Vec<f64> = grid.nodes().iter().map(|r| mu * r).collect();
    let re: Vec<f64> = u.values().iter().map(|z| z.re).collect();
    let im: Vec<f64> = u.values().iter().map(|z| z.im).collect();
    let re = grid.interpolate(&re, &radii, |_| 0.0);
    let im = grid.interpolate(&im, &radii, |_| 0.0);
    let c = mu.powf(power);
    ComplexField::new(grid.clone(), re.into_iter().zip(im).map(|(a, b)| Complex64::new(c * a, c * b)).collect())
}

/// `μ^{3/2}u(μ·)`, which preserves `‖u‖_{L²}`.
pub fn scale_t(mu: f64, u: &RealField) -> Result<RealField> {
    resample_real(u, mu, 1.5)
}

/// `μ^{1/2}u(μ·)`, which preserves `‖u‖_{L⁶}` and `‖∇u‖_{L²}`.
pub fn scale_s(mu: f64, u: &RealField) -> Result<RealField> {
    resample_real(u, mu, 0.5)
}

pub fn scale_t_complex(mu: f64, u: &ComplexField) -> Result<ComplexField> {
    resample_complex(u, mu, 1.5)
}

pub fn scale_s_complex(mu: f64, u: &ComplexField) -> Result<ComplexField> {
    resample_complex(u, mu, 0.5)
}

/// Five-point central difference of `μ ↦ 𝒮(T_μu)` at `μ = 1`.
pub fn action_scaling_derivative(u: &RealField, eps: f64, omega: f64, nl: &Nonlinearity, delta: f64) -> Result<f64> {
    let s = |mu: f64| -> Result<f64> { Ok(evaluate(&scale_t(mu, u)?, eps, omega, nl)?.action) };
    let (a, b, c, d) = (s(1.0 - 2.0 * delta)?, s(1.0 - delta)?, s(1.0 + delta)?, s(1.0 + 2.0 * delta)?);
    Ok((a - 8.0 * b + 8.0 * c - d) / (12.0 * delta))
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionGap {
    pub eps: f64,
    pub omega: f64,
    /// `𝒮_{ε,ω(ε)}(Q_ε) − ⅓∫W⁶`.
    pub gap: f64,
    /// `−((p−3)/(2(p+1)))·ε∫W^{p+1}`.
    pub predicted: f64,
    pub scaled: bool,
}

impl ActionGap {
    pub fn ratio(&self) -> f64 {
        self.gap / self.predicted
    }
}

/// `−((p−3)/(2(p+1)))·ε∫W^{p+1}`.
pub fn predicted_gap(p: f64, eps: f64, profiles: &ProfileSet) -> f64 {
    -((p - 3.0) / (2.0 * (p + 1.0))) * eps * profiles.w_power_integral(p + 1.0)
}

/// Builds `Q_ε` and compares its action with the unperturbed level.
pub fn action_gap(eps: f64, nl: &Nonlinearity, profiles: &ProfileSet, cfg: &ConstructConfig) -> Result<ActionGap> {
    let p = match nl.power() {
        Some(ps) if ps.p > 3.0 && ps.p < 5.0 && ps.sign == 1.0 => ps.p,
        _ => return Err(Error::Unsupported("action gap needs a focusing power 3 < p < 5".into())),
    };
    if eps == 0.0 {
        return Ok(ActionGap { eps, omega: 0.0, gap: 0.0, predicted: 0.0, scaled: false });
    }
    let (wave, src) = solitary_wave(eps, nl, profiles, cfg)?;
    action_gap_of(&wave, p, profiles, matches!(src, WaveSource::Scaled { .. }))
}

/// [`action_gap`] for an already constructed wave.
pub fn action_gap_of(wave: &SolitaryWave, p: f64, profiles: &ProfileSet, scaled: bool) -> Result<ActionGap> {
    let rep = evaluate_wave(wave)?;
    let gap = rep.action - profiles.w_power_integral(6.0) / 3.0;
    Ok(ActionGap { eps: wave.eps, omega: wave.omega, gap, predicted: predicted_gap(p, wave.eps, profiles), scaled })
}

/// The member of the scaling family through `wave` (at `ε̂`) that solves
/// the equation at `ε`.
pub fn scaled_family(eps: f64, eps_hat: f64, wave: &SolitaryWave, profiles: &ProfileSet) -> Result<SolitaryWave> {
    if (wave.eps - eps_hat).abs() > 1e-12 * eps_hat.abs().max(1e-300) {
        return Err(Error::Config(format!("wave was built at ε = {}, not ε̂ = {eps_hat}", wave.eps)));
    }
    let mu = scaling_factor(&wave.nl, eps_hat, eps)?;
    if mu == 1.0 {
        return Ok(wave.clone());
    }
    rescale_wave(wave, mu, profiles)
}

#[derive(Clone, Debug, Serialize)]
pub struct RayRow {
    pub a: f64,
    pub action: f64,
    pub k: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RayReport {
    pub rows: Vec<RayRow>,
    pub action_at_one: f64,
    /// `𝒮(aQ) < 𝒮(Q)` for every sampled `a ≠ 1`.
    pub maximal_at_one: bool,
    /// `K(aQ) > 0` below `a = 1` and `< 0` above it.
    pub k_changes_sign: bool,
}

/// Action and `K` along `a ↦ aQ`.
pub fn ray_profile(wave: &SolitaryWave, samples: &[f64]) -> Result<RayReport> {
    let at = |a: f64| -> Result<RayRow> {
        let r = evaluate(&wave.q.scaled(a), wave.eps, wave.omega, &wave.nl)?;
        Ok(RayRow { a, action: r.action, k: r.k })
    };
    let one = at(1.0)?;
    let rows: Vec<RayRow> = samples.iter().filter(|a| **a != 1.0).map(|&a| at(a)).collect::<Result<_>>()?;
    let maximal_at_one = rows.iter().all(|r| r.action < one.action);
    let k_changes_sign = rows.iter().all(|r| if r.a < 1.0 { r.k > 0.0 } else { r.k < 0.0 });
    Ok(RayReport { rows, action_at_one: one.action, maximal_at_one, k_changes_sign })
}

/// `‖u‖_{L^6}` including the far field of a real profile.
pub fn l6_norm(u: &RealField) -> Result<f64> {
    let g: Vec<f64> = u.values().iter().map(|v| v.abs().powi(6)).collect();
    let far = FarField::detect(u.grid(), u.values());
    Ok((quad_values(u.grid(), &g) + far.power_tail(u.grid(), &g, 6.0)?).powf(1.0 / 6.0))
}

/// `‖∇u‖_{L²}` as used by [`evaluate`].
pub fn h1_seminorm(u: &RealField) -> Result<f64> {
    Ok(real_integrals(u, &Nonlinearity::pure_power_unchecked(3.0, 1.0))?.gradient.sqrt())
}

/// Grid shared by a set of fields, if any.
pub fn common_grid(fields: &[&RealField]) -> Option<Arc<RadialGrid>> {
    let g = fields.first()?.grid().clone();
    fields.iter().all(|f| f.grid().same_as(&g)).then_some(g)
}
