//! Radial evolution of `i∂_t u = −Δu − |u|⁴u − εf(u)` by Strang splitting,
//! conservation and virial tracking, and the scatter / blow-up classifier.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::sync::Arc;

use crate::banded::{BandLu, BandMatrix};
use crate::construct::SolitaryWave;
use crate::error::{Error, Result};
use crate::functionals::evaluate;
use crate::profiles::Nonlinearity;
use crate::radial::ops::{derivative_values, quad_values};
use crate::radial::{laplacian_operator, lp_norm, make_grid, Closure, ComplexField, RadialGrid};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    /// Largest nonlinear phase `dt·sup g(|u|)` per step.
    pub c_nl: f64,
    /// `dt ≤ c_lin·max(t, t_ref)`.
    pub c_lin: f64,
    pub t_ref: f64,
    pub dt_max: f64,
    /// Fixed step; disables the controller.
    pub dt_fixed: Option<f64>,
    /// Phase per step beyond which a step is refused.
    pub stability_limit: f64,
    pub absorb: bool,
    /// Fraction of `[0, r_max]` covered by the absorbing layer.
    pub absorb_fraction: f64,
    pub absorb_strength: f64,
    /// Drop the nonlinearity (free evolution).
    pub linear_only: bool,
    /// Relative mass and action drift tolerated before a run is flagged.
    pub drift_budget: f64,
    pub history_len: usize,
    /// Steps between history samples.
    pub sample_every: usize,
    pub horizon_scatter: f64,
    pub horizon_blowup: f64,
    pub decay_threshold: f64,
    pub growth_threshold: f64,
    pub dt_min: f64,
    pub max_steps: usize,
    pub refine_retry: bool,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            c_nl: 0.02,
            c_lin: 0.01,
            t_ref: 1.0,
            dt_max: 50.0,
            dt_fixed: None,
            stability_limit: 1.0,
            absorb: false,
            absorb_fraction: 0.2,
            absorb_strength: 1.0,
            linear_only: false,
            drift_budget: 1e-6,
            history_len: 4096,
            sample_every: 10,
            horizon_scatter: 2.0e4,
            horizon_blowup: 200.0,
            decay_threshold: 10.0,
            growth_threshold: 1.0e3,
            dt_min: 1e-13,
            max_steps: 2_000_000,
            refine_retry: true,
        }
    }
}

impl DynamicsConfig {
    /// Defaults for classification runs: absorbing layer on.
    pub fn classification() -> Self {
        DynamicsConfig { absorb: true, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [self.c_nl, self.c_lin, self.t_ref, self.dt_max, self.stability_limit, self.drift_budget];
        if pos.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Config("time-step controls must be positive".into()));
        }
        if let Some(dt) = self.dt_fixed {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("fixed dt must be positive, got {dt}")));
            }
        }
        if !(self.absorb_fraction > 0.0 && self.absorb_fraction < 1.0) {
            return Err(Error::Config("absorbing fraction must lie in (0, 1)".into()));
        }
        if self.sample_every == 0 || self.history_len == 0 {
            return Err(Error::Config("history sampling must be positive".into()));
        }
        Ok(())
    }
}

/// One history record.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub dt: f64,
    pub mass: f64,
    pub energy: f64,
    pub action: f64,
    pub k: f64,
    pub virial: f64,
    pub supgrad: f64,
    pub l6: f64,
}

impl Sample {
    pub const CSV_HEADER: &'static str = "t,mass,energy,K,virial,supgrad,L6norm";

    pub fn csv_row(&self) -> String {
        let f = crate::radial::io::fmt17;
        [f(self.t), f(self.mass), f(self.energy), f(self.k), f(self.virial), f(self.supgrad), f(self.l6)].join(",")
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionState {
    pub u: ComplexField,
    pub t: f64,
    pub dt: f64,
    pub history: VecDeque<Sample>,
    pub refinement: u32,
    pub steps: usize,
    pub initial: Sample,
    pub trustworthy: bool,
}

/// `4π∫r³Im(ū∂_r u)dr = ∫x·Im(ū∇u)`.
pub fn track_virial(u: &ComplexField) -> f64 {
    let grid = u.grid();
    let du = derivative_values(grid.as_ref(), u.values(), &Closure::zero());
    let g: Vec<f64> = u.values().iter().zip(&du).zip(grid.nodes()).map(|((a, d), r)| r * (a.conj() * d).im).collect();
    quad_values(grid, &g)
}

/// `sup|∂_r u|`.
pub fn sup_gradient(u: &ComplexField) -> f64 {
    let du = derivative_values(u.grid().as_ref(), u.values(), &Closure::zero());
    du.iter().fold(0.0, |m: f64, d| m.max(d.norm()))
}

/// Quadratic absorbing profile over the outer layer.
pub fn absorber(grid: &RadialGrid, cfg: &DynamicsConfig) -> Vec<f64> {
    let r0 = (1.0 - cfg.absorb_fraction) * grid.r_max();
    let width = grid.r_max() - r0;
    grid.nodes()
        .iter()
        .map(|&r| if cfg.absorb && r > r0 { cfg.absorb_strength * ((r - r0) / width).powi(2) } else { 0.0 })
        .collect()
}

/// Crank–Nicolson factors for `u_t = iΔu − Γu` at one `dt`.
struct LinearStep {
    dt: f64,
    lhs: BandLu<Complex64>,
    rhs: BandMatrix<Complex64>,
}

/// Strang-split propagator on one grid.
pub struct Evolver {
    grid: Arc<RadialGrid>,
    lap: BandMatrix<f64>,
    gamma: Vec<f64>,
    eps: f64,
    omega: f64,
    nl: Nonlinearity,
    cfg: DynamicsConfig,
    cached: Option<LinearStep>,
}

impl Evolver {
    pub fn new(grid: &Arc<RadialGrid>, eps: f64, nl: &Nonlinearity, cfg: &DynamicsConfig) -> Result<Self> {
        cfg.validate()?;
        let op = laplacian_operator(grid, &Closure::zero());
        Ok(Evolver {
            grid: grid.clone(),
            lap: op.matrix,
            gamma: absorber(grid, cfg),
            eps,
            omega: 0.0,
            nl: nl.clone(),
            cfg: cfg.clone(),
            cached: None,
        })
    }

    /// Frequency entering the tracked action `E + ωM`.
    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn config(&self) -> &DynamicsConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// `g(|u|) = |u|⁴ + ε·f(|u|)/|u|`.
    fn gauge(&self, m: f64) -> f64 {
        if self.cfg.linear_only {
            return 0.0;
        }
        m.powi(4) + if self.eps == 0.0 { 0.0 } else { self.eps * self.nl.gauge(m) }
    }

    fn sup_gauge(&self, u: &ComplexField) -> f64 {
        u.values().iter().fold(0.0, |m: f64, z| m.max(self.gauge(z.norm()).abs()))
    }

    /// Step size chosen by the controller at the current state.
    pub fn propose_dt(&self, state: &EvolutionState) -> f64 {
        if let Some(dt) = self.cfg.dt_fixed {
            return dt;
        }
        let g = self.sup_gauge(&state.u);
        let nl_bound = if g > 0.0 { self.cfg.c_nl / g } else { f64::INFINITY };
        let lin_bound = self.cfg.c_lin * state.t.max(self.cfg.t_ref);
        nl_bound.min(lin_bound).min(self.cfg.dt_max)
    }

    fn linear(&mut self, dt: f64) -> Result<&LinearStep> {
        if self.cached.as_ref().map_or(true, |c| c.dt != dt) {
            let n = self.grid.n();
            let half = 0.5 * dt;
            let gen = self.lap.map(|x| Complex64::new(0.0, half * x));
            let mut lhs = gen.map(|z| -z);
            let mut rhs = gen;
            let one_minus: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + half * self.gamma[i], 0.0)).collect();
            let one_plus: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 - half * self.gamma[i], 0.0)).collect();
            lhs.add_diagonal(&one_minus);
            rhs.add_diagonal(&one_plus);
            let lhs = lhs.factor()?;
            self.cached = Some(LinearStep { dt, lhs, rhs });
        }
        Ok(self.cached.as_ref().expect("linear step cached above"))
    }

    fn phase(&self, u: &mut ComplexField, tau: f64) {
        if self.cfg.linear_only {
            return;
        }
        for z in u.values_mut() {
            let g = self.gauge(z.norm());
            *z *= Complex64::from_polar(1.0, tau * g);
        }
    }

    /// One Strang step of size `dt`.
    pub fn step_with(&mut self, state: &mut EvolutionState, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Stability(format!("invalid step {dt}")));
        }
        let phase = dt * self.sup_gauge(&state.u);
        if phase > self.cfg.stability_limit {
            return Err(Error::Stability(format!(
                "dt = {dt:.3e} rotates the phase by {phase:.3e} at t = {:.6e}",
                state.t
            )));
        }
        self.phase(&mut state.u, 0.5 * dt);
        {
            let lin = self.linear(dt)?;
            let mut v = lin.rhs.matvec(state.u.values());
            lin.lhs.solve_in_place(&mut v);
            state.u.values_mut().copy_from_slice(&v);
        }
        self.phase(&mut state.u, 0.5 * dt);
        if !state.u.is_finite() {
            return Err(Error::NonFinite(format!("solution at t = {:.6e}", state.t + dt)));
        }
        state.t += dt;
        state.dt = dt;
        state.steps += 1;
        if state.steps % self.cfg.sample_every == 0 {
            self.record(state)?;
        }
        Ok(())
    }

    /// One step with the controller's `dt`.
    pub fn step(&mut self, state: &mut EvolutionState) -> Result<()> {
        let dt = self.propose_dt(state);
        self.step_with(state, dt)
    }

    pub fn sample(&self, u: &ComplexField, t: f64, dt: f64) -> Result<Sample> {
        let nl = if self.cfg.linear_only { Nonlinearity::pure_power_unchecked(3.0, 0.0) } else { self.nl.clone() };
        let eps = if self.cfg.linear_only { 0.0 } else { self.eps };
        let rep = evaluate(u, eps, 0.0, &nl)?;
        let (energy, k) = if self.cfg.linear_only { (0.5 * rep.gradient, 0.0) } else { (rep.energy, rep.k) };
        Ok(Sample {
            t,
            dt,
            mass: rep.mass,
            energy,
            action: energy + self.omega * rep.mass,
            k,
            virial: track_virial(u),
            supgrad: sup_gradient(u),
            l6: lp_norm(u, 6.0)?,
        })
    }

    fn record(&self, state: &mut EvolutionState) -> Result<()> {
        let s = self.sample(&state.u, state.t, state.dt)?;
        if state.history.len() == self.cfg.history_len {
            state.history.pop_front();
        }
        state.history.push_back(s);
        let (m_drift, e_drift) = drifts(&state.initial, &s);
        if !self.cfg.absorb && (m_drift > self.cfg.drift_budget || e_drift > self.cfg.drift_budget) {
            state.trustworthy = false;
        }
        Ok(())
    }

    pub fn start(&self, u0: ComplexField) -> Result<EvolutionState> {
        if !u0.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        if !u0.is_finite() {
            return Err(Error::NonFinite("initial data".into()));
        }
        let initial = self.sample(&u0, 0.0, 0.0)?;
        let mut history = VecDeque::with_capacity(self.cfg.history_len);
        history.push_back(initial);
        Ok(EvolutionState { u: u0, t: 0.0, dt: 0.0, history, refinement: 0, steps: 0, initial, trustworthy: true })
    }

    /// Advances to exactly `t_end`.
    pub fn run_until(&mut self, state: &mut EvolutionState, t_end: f64) -> Result<()> {
        while state.t < t_end {
            if state.steps >= self.cfg.max_steps {
                return Err(Error::Stability(format!("step budget exhausted at t = {:.6e}", state.t)));
            }
            let dt = self.propose_dt(state).min(t_end - state.t);
            self.step_with(state, dt)?;
        }
        Ok(())
    }
}

/// Relative mass and action drift between two samples.
pub fn drifts(a: &Sample, b: &Sample) -> (f64, f64) {
    let rel = |x: f64, y: f64| if x != 0.0 { ((y - x) / x).abs() } else { (y - x).abs() };
    (rel(a.mass, b.mass), rel(a.action, b.action))
}

/// Free Gaussian `(1+it/σ²)^{−3/2}·exp(−r²/(4σ²(1+it/σ²)))`.
pub fn free_gaussian(r: f64, t: f64, sigma: f64) -> Complex64 {
    let z = Complex64::new(1.0, t / (sigma * sigma));
    z.powf(-1.5) * (-(r * r) / (4.0 * sigma * sigma * z)).exp()
}

/// `‖|u(t)| − Q‖_∞` and the phase rate of `u(0, t)` over `[0, t_end]`.
#[derive(Clone, Debug, Serialize)]
pub struct CoherenceReport {
    pub t_end: f64,
    pub max_modulus_error: f64,
    pub phase_rate: f64,
    pub omega: f64,
    pub relative_rate_error: f64,
}

pub fn soliton_coherence(wave: &SolitaryWave, t_end: f64, cfg: &DynamicsConfig) -> Result<CoherenceReport> {
    let mut ev = Evolver::new(wave.grid(), wave.eps, &wave.nl, cfg)?.with_omega(wave.omega);
    let mut st = ev.start(wave.q.to_complex())?;
    let q = wave.q.values().to_vec();
    let mut worst = 0.0f64;
    let mut unwrapped = 0.0;
    let mut last_arg = 0.0;
    let (mut st_sum, mut s_tt, mut s_t, mut s_p, mut count) = (0.0, 0.0, 0.0, 0.0, 0.0);
    while st.t < t_end {
        let dt = ev.propose_dt(&st).min(t_end - st.t);
        ev.step_with(&mut st, dt)?;
        let err = st.u.values().iter().zip(&q).fold(0.0f64, |m, (z, qv)| m.max((z.norm() - qv).abs()));
        worst = worst.max(err);
        let arg = st.u.values()[0].arg();
        let mut d = arg - last_arg;
        d -= (d / (2.0 * std::f64::consts::PI)).round() * 2.0 * std::f64::consts::PI;
        unwrapped += d;
        last_arg = arg;
        st_sum += st.t * unwrapped;
        s_tt += st.t * st.t;
        s_t += st.t;
        s_p += unwrapped;
        count += 1.0;
    }
    let rate = (count * st_sum - s_t * s_p) / (count * s_tt - s_t * s_t);
    Ok(CoherenceReport {
        t_end,
        max_modulus_error: worst,
        phase_rate: rate,
        omega: wave.omega,
        relative_rate_error: ((rate - wave.omega) / wave.omega).abs(),
    })
}

/// One centered difference of the momentum functional.
#[derive(Clone, Debug, Serialize)]
pub struct VirialSample {
    pub t: f64,
    pub derivative: f64,
    pub two_k: f64,
    pub relative_error: f64,
}

/// Evolves with a fixed step and compares `(V(t+dt) − V(t−dt))/(2dt)`
/// with `2K_ε(u(t))` at `count` evenly spaced times in `(0, t_end]`.
pub fn virial_check(
    u0: &ComplexField,
    eps: f64,
    nl: &Nonlinearity,
    cfg: &DynamicsConfig,
    dt: f64,
    t_end: f64,
    count: usize,
) -> Result<Vec<VirialSample>> {
    let mut cfg = cfg.clone();
    cfg.dt_fixed = Some(dt);
    let mut ev = Evolver::new(u0.grid(), eps, nl, &cfg)?;
    let mut st = ev.start(u0.clone())?;
    let mut out = Vec::with_capacity(count);
    for j in 1..=count {
        let target = t_end * j as f64 / count as f64 - dt;
        ev.run_until(&mut st, target)?;
        let before = track_virial(&st.u);
        ev.step_with(&mut st, dt)?;
        let t = st.t;
        let two_k = 2.0 * evaluate(&st.u, eps, 0.0, nl)?.k;
        ev.step_with(&mut st, dt)?;
        let derivative = (track_virial(&st.u) - before) / (2.0 * dt);
        out.push(VirialSample { t, derivative, two_k, relative_error: ((derivative - two_k) / two_k).abs() });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ScatterLike,
    BlowupLike,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Hypothesis {
    pub action: f64,
    pub threshold: f64,
    pub k: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    /// `‖u₀‖_{L⁶}/min_t ‖u(t)‖_{L⁶}`.
    pub l6_decay: f64,
    /// `max_t sup|∂_r u| / sup|∂_r u₀|`.
    pub gradient_growth: f64,
    /// Growth reached by the confirmation run at half the step controls.
    pub confirm_growth: Option<f64>,
    pub horizon: f64,
    pub mass_drift: f64,
    pub action_drift: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub refinement: u32,
    pub steps: usize,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyVerdict {
    pub verdict: Verdict,
    pub hypothesis: Hypothesis,
    pub evidence: Evidence,
}

/// Result of one monitored run.
struct RunSummary {
    l6_decay: f64,
    growth: f64,
    t: f64,
    mass_drift: f64,
    action_drift: f64,
    k_min: f64,
    k_max: f64,
    steps: usize,
    trustworthy: bool,
    failure: Option<String>,
}

fn monitored_run(
    u0: &ComplexField,
    eps: f64,
    omega: f64,
    nl: &Nonlinearity,
    cfg: &DynamicsConfig,
    expect_blowup: bool,
) -> Result<RunSummary> {
    let mut ev = Evolver::new(u0.grid(), eps, nl, cfg)?.with_omega(omega);
    let mut st = ev.start(u0.clone())?;
    let first = st.initial;
    let horizon = if expect_blowup { cfg.horizon_blowup } else { cfg.horizon_scatter };
    let mut s = RunSummary {
        l6_decay: 1.0,
        growth: 1.0,
        t: 0.0,
        mass_drift: 0.0,
        action_drift: 0.0,
        k_min: first.k,
        k_max: first.k,
        steps: 0,
        trustworthy: true,
        failure: None,
    };
    loop {
        if st.t >= horizon {
            break;
        }
        if st.steps >= cfg.max_steps {
            s.failure = Some("step budget exhausted".into());
            break;
        }
        let dt = ev.propose_dt(&st).min(horizon - st.t);
        if dt < cfg.dt_min {
            s.failure = Some(format!("step fell below {:.1e}", cfg.dt_min));
            break;
        }
        if let Err(e) = ev.step_with(&mut st, dt) {
            s.failure = Some(e.to_string());
            break;
        }
        if st.steps % cfg.sample_every == 0 {
            let smp = *st.history.back().expect("sample recorded");
            s.l6_decay = s.l6_decay.max(first.l6 / smp.l6);
            s.growth = s.growth.max(smp.supgrad / first.supgrad);
            s.k_min = s.k_min.min(smp.k);
            s.k_max = s.k_max.max(smp.k);
            let (m, a) = drifts(&first, &smp);
            s.mass_drift = m;
            s.action_drift = a;
            if expect_blowup && s.growth >= cfg.growth_threshold {
                break;
            }
            if !expect_blowup && s.l6_decay >= cfg.decay_threshold {
                break;
            }
        }
    }
    s.t = st.t;
    s.steps = st.steps;
    s.trustworthy = st.trustworthy;
    Ok(s)
}

/// Resamples onto the grid with twice as many nodes.
pub fn refine(u: &ComplexField) -> Result<ComplexField> {
    let g = u.grid();
    let fine = make_grid(2 * g.n(), g.r_max(), g.stretch())?;
    let re: Vec<f64> = u.values().iter().map(|z| z.re).collect();
    let im: Vec<f64> = u.values().iter().map(|z| z.im).collect();
    let re = g.interpolate(&re, fine.nodes(), |_| 0.0);
    let im = g.interpolate(&im, fine.nodes(), |_| 0.0);
    ComplexField::new(fine, re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect())
}

/// Relative band below `m` treated as `𝒮 = m`.
pub const THRESHOLD_MARGIN: f64 = 1e-10;

/// Classifies `u₀` below the threshold `m = 𝒮_{ε,ω}(Q_ε)`.
pub fn classify(
    u0: &ComplexField,
    eps: f64,
    omega: f64,
    threshold: f64,
    nl: &Nonlinearity,
    cfg: &DynamicsConfig,
) -> Result<DichotomyVerdict> {
    match nl.power() {
        Some(ps) if ps.p > 3.0 && ps.p < 5.0 && ps.sign == 1.0 => {}
        _ => return Err(Error::Unsupported("classification needs a focusing power 3 < p < 5".into())),
    }
    let rep = if u0.values().iter().all(|z| z.im == 0.0) {
        evaluate(&u0.real(), eps, omega, nl)?
    } else {
        evaluate(u0, eps, omega, nl)?
    };
    let hypothesis = Hypothesis { action: rep.action, threshold, k: rep.k };
    if !(rep.action < threshold - THRESHOLD_MARGIN * threshold.abs()) {
        return Err(Error::HypothesisNotMet(format!(
            "S(u0) = {:.12e} is not below m = {threshold:.12e}",
            rep.action
        )));
    }
    let expect_blowup = rep.k < 0.0;
    let mut data = u0.clone();
    let mut refinement = 0;
    loop {
        let run = monitored_run(&data, eps, omega, nl, cfg, expect_blowup)?;
        let mut ev = Evidence {
            l6_decay: run.l6_decay,
            gradient_growth: run.growth,
            confirm_growth: None,
            horizon: run.t,
            mass_drift: run.mass_drift,
            action_drift: run.action_drift,
            k_min: run.k_min,
            k_max: run.k_max,
            refinement,
            steps: run.steps,
            note: run.failure.clone().unwrap_or_default(),
        };
        let verdict = if expect_blowup {
            if run.growth >= cfg.growth_threshold && run.mass_drift <= cfg.drift_budget.max(1e-6) {
                let mut half = cfg.clone();
                half.c_nl *= 0.5;
                half.c_lin *= 0.5;
                let confirm = monitored_run(&data, eps, omega, nl, &half, true)?;
                ev.confirm_growth = Some(confirm.growth);
                if confirm.growth >= cfg.growth_threshold {
                    Verdict::BlowupLike
                } else {
                    Verdict::Inconclusive
                }
            } else {
                Verdict::Inconclusive
            }
        } else if run.l6_decay >= cfg.decay_threshold && run.k_min >= 0.0 && (run.trustworthy || cfg.absorb) {
            Verdict::ScatterLike
        } else {
            Verdict::Inconclusive
        };
        if verdict == Verdict::Inconclusive && cfg.refine_retry && refinement == 0 {
            data = refine(&data)?;
            refinement = 1;
            continue;
        }
        return Ok(DichotomyVerdict { verdict, hypothesis, evidence: ev });
    }
}

/// One row of a dichotomy sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub action: f64,
    pub k: f64,
    pub outcome: SweepOutcome,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SweepOutcome {
    Classified(DichotomyVerdict),
    HypothesisNotMet { detail: String },
    Failed { detail: String },
}

impl SweepOutcome {
    pub fn verdict(&self) -> Option<Verdict> {
        match self {
            SweepOutcome::Classified(v) => Some(v.verdict),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub eps: f64,
    pub omega: f64,
    pub threshold: f64,
    pub rows: Vec<SweepRow>,
    /// Scatter-like rows all precede blow-up-like rows in `a`.
    pub monotone: bool,
}

/// Classifies `a·Q` for each `a` in parallel.
pub fn dichotomy_sweep(a_values: &[f64], base: &SolitaryWave, cfg: &DynamicsConfig) -> Result<SweepReport> {
    let threshold = evaluate(&base.q, base.eps, base.omega, &base.nl)?.action;
    let rows: Vec<SweepRow> = a_values
        .par_iter()
        .map(|&a| -> Result<SweepRow> {
            let u0 = base.q.scaled(a).to_complex();
            let rep = evaluate(&base.q.scaled(a), base.eps, base.omega, &base.nl)?;
            let outcome = match classify(&u0, base.eps, base.omega, threshold, &base.nl, cfg) {
                Ok(v) => SweepOutcome::Classified(v),
                Err(Error::HypothesisNotMet(d)) => SweepOutcome::HypothesisNotMet { detail: d },
                Err(e) => SweepOutcome::Failed { detail: e.to_string() },
            };
            Ok(SweepRow { a, action: rep.action, k: rep.k, outcome })
        })
        .collect::<Result<_>>()?;
    let mut ordered: Vec<(f64, Verdict)> =
        rows.iter().filter_map(|r| r.outcome.verdict().map(|v| (r.a, v))).filter(|(_, v)| *v != Verdict::Inconclusive).collect();
    ordered.sort_by(|x, y| x.0.total_cmp(&y.0));
    let monotone = ordered.windows(2).all(|w| !(w[0].1 == Verdict::BlowupLike && w[1].1 == Verdict::ScatterLike));
    Ok(SweepReport { eps: base.eps, omega: base.omega, threshold, rows, monotone })
}
