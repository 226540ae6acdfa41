//! Closed-form objects of the unperturbed problem: `W`, `ΛW`, `ψ`, `V`.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::radial::ops::laplacian_values;
use crate::radial::{quad_with_tail, Closure, RadialGrid, RealField, Tail};

/// Aubin–Talenti profile `(1 + r²/3)^{−1/2}`.
pub fn w(r: f64) -> f64 {
    (1.0 + r * r / 3.0).sqrt().recip()
}

pub fn w_prime(r: f64) -> f64 {
    let x = w(r);
    -(r / 3.0) * x * x * x
}

/// Scaling generator applied to `W`, in its algebraic form.
pub fn lambda_w(r: f64) -> f64 {
    let x = w(r);
    x * x * x - 0.5 * x
}

/// `(½ + r∂_r)W`, kept as a cross-check on [`lambda_w`].
pub fn lambda_w_derivative_form(r: f64) -> f64 {
    0.5 * w(r) + r * w_prime(r)
}

pub fn psi_scale() -> f64 {
    (3.0 * PI).sqrt().recip()
}

pub fn psi(r: f64) -> f64 {
    psi_scale() * lambda_w(r)
}

/// Potential of the linearization, `−5W⁴`.
pub fn potential(r: f64) -> f64 {
    -5.0 * w(r).powi(4)
}

/// Caller-supplied nonlinearity `f(q) = g(q²)q`.
pub struct CustomNl {
    pub name: String,
    pub f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Primitive with `F(0) = 0`.
    pub big_f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub p1: f64,
    pub p2: f64,
}

/// The perturbation `f`.
#[derive(Clone)]
pub enum Nonlinearity {
    /// `sign·|q|^{p−1}q`.
    PurePower { p: f64, sign: f64 },
    Custom(Arc<CustomNl>),
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::PurePower { p, sign } => write!(fm, "PurePower {{ p: {p}, sign: {sign} }}"),
            Nonlinearity::Custom(c) => write!(fm, "Custom({})", c.name),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct PowerSpec {
    pub p: f64,
    pub sign: f64,
}

impl Nonlinearity {
    pub fn pure_power(p: f64, sign: f64) -> Result<Self> {
        if !(p > 2.0) || !p.is_finite() || p == 5.0 {
            return Err(Error::InvalidExponent(format!("pure power needs p in (2,5)∪(5,∞), got {p}")));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidExponent(format!("sign must be ±1, got {sign}")));
        }
        Ok(Nonlinearity::PurePower { p, sign })
    }

    /// Pure powers only; `p = 5` is accepted here so that the assumption
    /// check can report it instead of the constructor.
    pub fn pure_power_unchecked(p: f64, sign: f64) -> Self {
        Nonlinearity::PurePower { p, sign }
    }

    pub fn power(&self) -> Option<PowerSpec> {
        match *self {
            Nonlinearity::PurePower { p, sign } => Some(PowerSpec { p, sign }),
            Nonlinearity::Custom(_) => None,
        }
    }

    pub fn f(&self, q: f64) -> f64 {
        match self {
            Nonlinearity::PurePower { p, sign } => sign * q.abs().powf(p - 1.0) * q,
            Nonlinearity::Custom(c) => (c.f)(q),
        }
    }

    pub fn df(&self, q: f64) -> f64 {
        match self {
            Nonlinearity::PurePower { p, sign } => sign * p * q.abs().powf(p - 1.0),
            Nonlinearity::Custom(c) => (c.df)(q),
        }
    }

    pub fn big_f(&self, q: f64) -> f64 {
        match self {
            Nonlinearity::PurePower { p, sign } => sign * q.abs().powf(p + 1.0) / (p + 1.0),
            Nonlinearity::Custom(c) => (c.big_f)(q),
        }
    }

    /// `g(m²) = f(m)/m` for a modulus `m ≥ 0`.
    pub fn gauge(&self, m: f64) -> f64 {
        match self {
            Nonlinearity::PurePower { p, sign } => sign * m.powf(p - 1.0),
            Nonlinearity::Custom(c) => {
                if m == 0.0 {
                    (c.df)(0.0)
                } else {
                    (c.f)(m) / m
                }
            }
        }
    }

    /// Growth exponents `p₁ ≤ p₂`.
    pub fn growth(&self) -> (f64, f64) {
        match self {
            Nonlinearity::PurePower { p, .. } => (*p, *p),
            Nonlinearity::Custom(c) => (c.p1, c.p2),
        }
    }

    /// Far-field expansion of `f(W)·W^k`, when known exactly.
    fn tail_with(&self, k: f64) -> Tail {
        match self {
            Nonlinearity::PurePower { p, sign } => Tail::w_power(p + k).scaled(*sign),
            Nonlinearity::Custom(_) => Tail::PowerFit,
        }
    }
}

/// `∫_{ℝ³} W^k` by quadrature with the exact far-field series.
pub fn w_power_integral(grid: &Arc<RadialGrid>, k: f64) -> f64 {
    let f = RealField::from_fn(grid, |r| w(r).powf(k));
    quad_with_tail(&f, &Tail::w_power(k))
}

/// Leading-order constants of the bifurcation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LeadingOrder {
    /// `⟨ΛW, f(W)⟩`.
    pub pairing: f64,
    pub lambda1: f64,
    pub omega1: f64,
}

/// `⟨ΛW, f(W)⟩`.
pub fn pairing_lambda_w_fw(nl: &Nonlinearity, grid: &Arc<RadialGrid>) -> f64 {
    let integrand = RealField::from_fn(grid, |r| lambda_w(r) * nl.f(w(r)));
    let tail = nl.tail_with(3.0).plus(nl.tail_with(1.0).scaled(-0.5));
    quad_with_tail(&integrand, &tail)
}

/// `λ⁽¹⁾ = −⟨ΛW,f(W)⟩/(6π)` and `ω₁ = (λ⁽¹⁾)²`.
pub fn omega1(nl: &Nonlinearity, grid: &Arc<RadialGrid>) -> Result<LeadingOrder> {
    let pairing = pairing_lambda_w_fw(nl, grid);
    leading_from_pairing(pairing)
}

fn leading_from_pairing(pairing: f64) -> Result<LeadingOrder> {
    // Quadrature noise around an exactly vanishing pairing must not pass.
    if !(pairing < -1e-9) {
        return Err(Error::Assumption(format!("<ΛW, f(W)> = {pairing:.3e} is not negative")));
    }
    let lambda1 = -pairing / (6.0 * PI);
    Ok(LeadingOrder { pairing, lambda1, omega1: lambda1 * lambda1 })
}

/// `‖(−Δ − 5W⁴)g‖_∞` over nodes away from the outer closure.
pub fn h_residual(grid: &Arc<RadialGrid>, g: impl Fn(f64) -> f64) -> f64 {
    let vals: Vec<f64> = grid.nodes().iter().map(|&r| g(r)).collect();
    let lap = laplacian_values(grid.as_ref(), &vals, &Closure::power_law(grid));
    let n = grid.n();
    (0..n - 3).fold(0.0, |m: f64, i| {
        let r = grid.nodes()[i];
        m.max((-lap[i] + potential(r) * vals[i]).abs())
    })
}

/// `‖HΛW‖_∞`, zero in exact arithmetic.
pub fn resonance_residual(grid: &Arc<RadialGrid>) -> f64 {
    h_residual(grid, lambda_w)
}

/// Sampled profiles on one grid with memoized integrals.
pub struct ProfileSet {
    grid: Arc<RadialGrid>,
    w: RealField,
    lambda_w: RealField,
    psi: RealField,
    v: RealField,
    vpsi: RealField,
    cache: RwLock<HashMap<(u64, u64), f64>>,
}

impl fmt::Debug for ProfileSet {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("ProfileSet").field("n", &self.grid.n()).finish()
    }
}

impl ProfileSet {
    pub fn new(grid: &Arc<RadialGrid>) -> Self {
        let v = RealField::from_fn(grid, potential);
        let psi = RealField::from_fn(grid, psi);
        let vpsi = RealField::from_fn(grid, |r| potential(r) * self::psi(r));
        ProfileSet {
            grid: grid.clone(),
            w: RealField::from_fn(grid, w),
            lambda_w: RealField::from_fn(grid, lambda_w),
            psi,
            v,
            vpsi,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn w(&self) -> &RealField {
        &self.w
    }
    pub fn lambda_w(&self) -> &RealField {
        &self.lambda_w
    }
    pub fn psi(&self) -> &RealField {
        &self.psi
    }
    pub fn v(&self) -> &RealField {
        &self.v
    }
    pub fn v_psi(&self) -> &RealField {
        &self.vpsi
    }

    fn memo(&self, key: (u64, u64), compute: impl FnOnce() -> f64) -> f64 {
        if let Some(v) = self.cache.read().expect("profile cache poisoned").get(&key) {
            return *v;
        }
        let v = compute();
        self.cache.write().expect("profile cache poisoned").insert(key, v);
        v
    }

    /// `∫W^k`.
    pub fn w_power_integral(&self, k: f64) -> f64 {
        self.memo((0, k.to_bits()), || w_power_integral(&self.grid, k))
    }

    /// `∫Vψ`; equals `√(4π)`.
    pub fn v_psi_integral(&self) -> f64 {
        self.memo((1, 0), || {
            let tail = Tail::w_power(7.0).plus(Tail::w_power(5.0).scaled(-0.5)).scaled(-5.0 * psi_scale());
            quad_with_tail(&self.vpsi, &tail)
        })
    }

    /// `⟨ΛW, f(W)⟩`, memoized for pure powers.
    pub fn pairing(&self, nl: &Nonlinearity) -> f64 {
        match nl.power() {
            Some(PowerSpec { p, sign }) => self.memo((2, p.to_bits() ^ sign.to_bits().rotate_left(7)), || {
                pairing_lambda_w_fw(nl, &self.grid)
            }),
            None => pairing_lambda_w_fw(nl, &self.grid),
        }
    }

    pub fn leading_order(&self, nl: &Nonlinearity) -> Result<LeadingOrder> {
        leading_from_pairing(self.pairing(nl))
    }
}
