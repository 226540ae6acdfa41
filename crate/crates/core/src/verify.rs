//! Named numerical checks grouped into suites, shared by the CLI.

use serde::Serialize;
use std::f64::consts::PI;

use crate::construct::{solitary_wave, ConstructConfig, SolitaryWave, WaveSource};
use crate::dynamics::{
    dichotomy_sweep, drifts, free_gaussian, soliton_coherence, virial_check, DynamicsConfig, Evolver, Verdict,
};
use crate::error::{Error, Result};
use crate::functionals::{action_gap_of, evaluate, evaluate_wave, ray_profile, FunctionalReport};
use crate::profiles::{lambda_w, lambda_w_derivative_form, resonance_residual, Nonlinearity, ProfileSet};
use crate::radial::io::fmt17;
use crate::radial::{make_grid, ComplexField, GridSpec, RealField, Stretch};
use crate::resolvent::{loglog_slope, orth_pairing, singularity_probe};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub const CSV_HEADER: &'static str = "name,computed,expected,error,tolerance,pass";

    /// `|computed − expected| ≤ tol`.
    pub fn abs(name: impl Into<String>, computed: f64, expected: f64, tol: f64) -> Check {
        let error = (computed - expected).abs();
        Check { name: name.into(), computed, expected, error, tolerance: tol, pass: error <= tol }
    }

    /// `|computed/expected − 1| ≤ tol`.
    pub fn rel(name: impl Into<String>, computed: f64, expected: f64, tol: f64) -> Check {
        let error = ((computed - expected) / expected).abs();
        Check { name: name.into(), computed, expected, error, tolerance: tol, pass: error <= tol }
    }

    /// `computed ≤ bound`.
    pub fn at_most(name: impl Into<String>, computed: f64, bound: f64) -> Check {
        Check { name: name.into(), computed, expected: bound, error: computed, tolerance: bound, pass: computed <= bound }
    }

    /// `computed ≥ bound`.
    pub fn at_least(name: impl Into<String>, computed: f64, bound: f64) -> Check {
        Check { name: name.into(), computed, expected: bound, error: computed, tolerance: bound, pass: computed >= bound }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Check {
        let v = if ok { 1.0 } else { 0.0 };
        Check { name: name.into(), computed: v, expected: 1.0, error: 1.0 - v, tolerance: 0.0, pass: ok }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.name,
            fmt17(self.computed),
            fmt17(self.expected),
            fmt17(self.error),
            fmt17(self.tolerance),
            self.pass
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Profiles,
    Resolvent,
    Functionals,
    Dynamics,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Profiles, Suite::Resolvent, Suite::Functionals, Suite::Dynamics];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Profiles => "profiles",
            Suite::Resolvent => "resolvent",
            Suite::Functionals => "functionals",
            Suite::Dynamics => "dynamics",
        }
    }

    /// `all` expands to every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        match s {
            "all" => Ok(Suite::ALL.to_vec()),
            "profiles" => Ok(vec![Suite::Profiles]),
            "resolvent" => Ok(vec![Suite::Resolvent]),
            "functionals" => Ok(vec![Suite::Functionals]),
            "dynamics" => Ok(vec![Suite::Dynamics]),
            other => Err(Error::Config(format!("unknown suite '{other}'"))),
        }
    }
}

/// Inputs shared by the suites.
#[derive(Clone, Debug)]
pub struct SuiteContext {
    pub grid: GridSpec,
    pub nl: Nonlinearity,
    pub construct: ConstructConfig,
    pub dynamics: DynamicsConfig,
    pub functional_eps: Vec<f64>,
    pub dynamics_eps: f64,
    pub dichotomy_a: Vec<f64>,
}

impl Default for SuiteContext {
    fn default() -> Self {
        SuiteContext {
            grid: GridSpec::default(),
            nl: Nonlinearity::pure_power(4.0, 1.0).expect("p = 4 is admissible"),
            construct: ConstructConfig::default(),
            dynamics: DynamicsConfig::default(),
            functional_eps: vec![1e-3, 1e-2, 3e-2],
            dynamics_eps: 0.05,
            dichotomy_a: vec![0.3, 0.5, 0.8, 1.0, 1.2, 1.5],
        }
    }
}

/// Checks plus named CSV tables.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub tables: Vec<(String, String)>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn checks_csv(&self) -> String {
        let mut s = String::from(Check::CSV_HEADER);
        s.push('\n');
        for c in &self.checks {
            s.push_str(&c.csv_row());
            s.push('\n');
        }
        s
    }
}

pub fn run_suite(suite: Suite, ctx: &SuiteContext) -> Result<SuiteReport> {
    match suite {
        Suite::Profiles => profiles_suite(ctx),
        Suite::Resolvent => resolvent_suite(ctx),
        Suite::Functionals => functionals_suite(ctx),
        Suite::Dynamics => dynamics_suite(ctx),
    }
}

/// Coarse grid used for the profile identities.
pub fn profile_grid(n: usize) -> Result<std::sync::Arc<crate::radial::RadialGrid>> {
    make_grid(n, 200.0, Stretch::default())
}

pub fn profiles_suite(_ctx: &SuiteContext) -> Result<SuiteReport> {
    let g = profile_grid(512)?;
    let ps = ProfileSet::new(&g);
    let mut checks = Vec::new();
    let worst = (0..2000).fold(0.0f64, |m, i| {
        let r = i as f64 * 0.05;
        m.max((lambda_w(r) - lambda_w_derivative_form(r)).abs())
    });
    checks.push(Check::at_most("lambda_w_closed_form", worst, 1e-12));
    let r512 = resonance_residual(&g);
    let r1024 = resonance_residual(&profile_grid(1024)?);
    checks.push(Check::at_most("resonance_residual_n512", r512, 1e-6));
    checks.push(Check::at_most("resonance_residual_n1024", r1024, r512));
    checks.push(Check::abs("v_psi_integral", ps.v_psi_integral(), (4.0 * PI).sqrt(), 1e-8));
    let p4 = Nonlinearity::pure_power(4.0, 1.0)?;
    let wrep = evaluate(ps.w(), 0.0, 0.0, &p4)?;
    checks.push(Check::abs("gradient_w_equals_sextic", wrep.gradient, ps.w_power_integral(6.0), 1e-8));
    for p in [2.5, 3.0, 4.0, 4.9, 6.0] {
        let nl = Nonlinearity::pure_power(p, 1.0)?;
        let closed = (0.5 - 3.0 / (p + 1.0)) * ps.w_power_integral(p + 1.0);
        checks.push(Check::abs(format!("pairing_closed_form_p{p}"), ps.pairing(&nl), closed, 1e-8));
    }
    checks.push(Check::abs("pairing_p4", ps.pairing(&p4), -2.17656, 1e-4));
    let lo = ps.leading_order(&p4)?;
    checks.push(Check::abs("lambda1_p4", lo.lambda1, 3f64.sqrt() / 15.0, 1e-8));
    checks.push(Check::abs("omega1_p4", lo.omega1, 1.0 / 75.0, 1e-8));
    Ok(SuiteReport { suite: Suite::Profiles, checks, tables: Vec::new() })
}

/// `n` log-spaced values from `a` to `b`.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| match i {
            0 => a,
            _ if i == n - 1 => b,
            _ => (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Default probe ladder: `3·10⁻²` halved eight times.
pub fn probe_lambdas() -> Vec<f64> {
    (0..9).map(|k| 3e-2 / 2f64.powi(k)).collect()
}

pub fn gaussian_data(ps: &ProfileSet) -> RealField {
    RealField::from_fn(ps.grid(), |r| (-r * r).exp())
}

/// `(λ, λ⟨R₀(−λ²)Vψ, W⟩)` rows.
pub fn resolvent_limit(lambdas: &[f64], ps: &ProfileSet) -> Result<Vec<(f64, f64)>> {
    lambdas.iter().map(|&l| Ok((l, l * orth_pairing(l, ps.w(), ps, true)?))).collect()
}

pub fn resolvent_suite(ctx: &SuiteContext) -> Result<SuiteReport> {
    let g = ctx.grid.build()?;
    let ps = ProfileSet::new(&g);
    let target = 2.0 * (3.0 * PI).sqrt();
    let lams = logspace(1e-3, 1e-1, 9);
    let rows = resolvent_limit(&lams, &ps)?;
    let errs: Vec<f64> = rows.iter().map(|(_, v)| (v - target).abs()).collect();
    let mut checks = vec![Check::abs("resolvent_limit_exponent", loglog_slope(&lams, &errs), 1.0, 0.2)];
    let mut limit = String::from("lambda,value,error\n");
    for ((l, v), e) in rows.iter().zip(&errs) {
        limit.push_str(&format!("{},{},{}\n", fmt17(*l), fmt17(*v), fmt17(*e)));
    }
    let f = gaussian_data(&ps);
    let plams = probe_lambdas();
    let generic = singularity_probe(&plams, &f, false, &ps)?;
    let orth = singularity_probe(&plams, &f, true, &ps)?;
    let amp = |rows: &[crate::resolvent::ProbeRow]| rows.iter().map(|r| r.amplification).collect::<Vec<_>>();
    checks.push(Check::abs("probe_slope_generic", loglog_slope(&plams, &amp(&generic)), -1.0, 0.15));
    checks.push(Check::abs("probe_slope_orthogonal", loglog_slope(&plams, &amp(&orth)), 0.0, 0.15));
    Ok(SuiteReport {
        suite: Suite::Resolvent,
        checks,
        tables: vec![("resolvent_limit".into(), limit), ("probe".into(), probe_csv(&generic, &orth))],
    })
}

pub fn probe_csv(generic: &[crate::resolvent::ProbeRow], orth: &[crate::resolvent::ProbeRow]) -> String {
    let mut s = String::from("lambda,generic,orthogonal\n");
    for (a, b) in generic.iter().zip(orth) {
        s.push_str(&format!("{},{},{}\n", fmt17(a.lambda), fmt17(a.amplification), fmt17(b.amplification)));
    }
    s
}

pub fn functional_table(reports: &[FunctionalReport]) -> String {
    let mut s = String::from(FunctionalReport::CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Checks every constructed wave must satisfy.
pub fn wave_checks(wave: &SolitaryWave, rep: &FunctionalReport) -> Vec<Check> {
    let tag = format!("eps={:e}", wave.eps);
    vec![
        Check::at_most(format!("pohozaev_k[{tag}]"), rep.pohozaev_residual_k, 1e-8),
        Check::at_most(format!("pohozaev_k0[{tag}]"), rep.pohozaev_residual_k0, 1e-8),
    ]
}

pub fn functionals_suite(ctx: &SuiteContext) -> Result<SuiteReport> {
    let g = ctx.grid.build()?;
    let ps = ProfileSet::new(&g);
    let p = ctx.nl.power().map(|s| s.p).ok_or_else(|| Error::Unsupported("functional suite needs a pure power".into()))?;
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut gaps = String::from("eps,omega,gap,predicted,ratio\n");
    let eps_min = ctx.functional_eps.iter().cloned().fold(f64::INFINITY, f64::min);
    for &eps in &ctx.functional_eps {
        let (wave, src) = solitary_wave(eps, &ctx.nl, &ps, &ctx.construct)?;
        let rep = evaluate_wave(&wave)?;
        checks.extend(wave_checks(&wave, &rep));
        let gap = action_gap_of(&wave, p, &ps, matches!(src, WaveSource::Scaled { .. }))?;
        checks.push(Check::flag(format!("gap_negative[eps={eps:e}]"), gap.gap < 0.0));
        if eps == eps_min {
            checks.push(Check::rel(format!("gap_ratio[eps={eps:e}]"), gap.ratio(), 1.0, 0.1));
            let ray = ray_profile(&wave, &[0.5, 0.8, 0.9, 0.99, 1.0, 1.01, 1.1, 1.2, 1.5])?;
            checks.push(Check::flag("ray_maximal_at_one", ray.maximal_at_one));
            checks.push(Check::flag("ray_k_changes_sign", ray.k_changes_sign));
        }
        gaps.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt17(eps),
            fmt17(gap.omega),
            fmt17(gap.gap),
            fmt17(gap.predicted),
            fmt17(gap.ratio())
        ));
        reports.push(rep);
    }
    Ok(SuiteReport {
        suite: Suite::Functionals,
        checks,
        tables: vec![("functionals".into(), functional_table(&reports)), ("action_gap".into(), gaps)],
    })
}

/// `max_r |u(r, 1) − G(r, 1)|` for the free Gaussian of width one.
pub fn gaussian_oracle_error(grid: &GridSpec, dt: f64) -> Result<f64> {
    let g = grid.build()?;
    let cfg = DynamicsConfig { linear_only: true, dt_fixed: Some(dt), ..Default::default() };
    let nl = Nonlinearity::pure_power_unchecked(3.0, 1.0);
    let mut ev = Evolver::new(&g, 0.0, &nl, &cfg)?;
    let mut st = ev.start(ComplexField::from_fn(&g, |r| free_gaussian(r, 0.0, 1.0)))?;
    ev.run_until(&mut st, 1.0)?;
    Ok(st.u.values().iter().zip(g.nodes()).fold(0.0f64, |m, (z, &r)| m.max((z - free_gaussian(r, 1.0, 1.0)).norm())))
}

/// Mass and action drift over `[0, t_end]` with the absorbing layer off.
pub fn conservation_drift(u0: &ComplexField, wave: &SolitaryWave, cfg: &DynamicsConfig, t_end: f64) -> Result<(f64, f64)> {
    let cfg = DynamicsConfig { absorb: false, ..cfg.clone() };
    let mut ev = Evolver::new(u0.grid(), wave.eps, &wave.nl, &cfg)?.with_omega(wave.omega);
    let mut st = ev.start(u0.clone())?;
    ev.run_until(&mut st, t_end)?;
    let s = ev.sample(&st.u, st.t, st.dt)?;
    Ok(drifts(&st.initial, &s))
}

pub fn dynamics_suite(ctx: &SuiteContext) -> Result<SuiteReport> {
    let g = ctx.grid.build()?;
    let ps = ProfileSet::new(&g);
    let mut checks = vec![Check::at_most("free_gaussian_oracle", gaussian_oracle_error(&ctx.grid, 1e-3)?, 1e-6)];
    let (wave, _) = solitary_wave(ctx.dynamics_eps, &ctx.nl, &ps, &ctx.construct)?;
    let half = wave.q.scaled(0.5).to_complex();
    let (dm, da) = conservation_drift(&half, &wave, &ctx.dynamics, 1.0)?;
    checks.push(Check::at_most("mass_drift", dm, 1e-6));
    checks.push(Check::at_most("action_drift", da, 1e-6));
    let vir = virial_check(&half, wave.eps, &wave.nl, &ctx.dynamics, 1e-3, 1.0, 10)?;
    let worst = vir.iter().fold(0.0f64, |m, v| m.max(v.relative_error));
    checks.push(Check::at_most("virial_identity", worst, 1e-3));
    let coh_cfg = DynamicsConfig { dt_fixed: Some(2e-4), absorb: false, ..ctx.dynamics.clone() };
    let coh = soliton_coherence(&wave, 5.0, &coh_cfg)?;
    checks.push(Check::at_most("soliton_modulus", coh.max_modulus_error, 1e-4));
    checks.push(Check::rel("soliton_phase_rate", coh.phase_rate, coh.omega, 0.01));
    let cls = DynamicsConfig { absorb: true, ..ctx.dynamics.clone() };
    let sweep = dichotomy_sweep(&ctx.dichotomy_a, &wave, &cls)?;
    let mut table = String::from("a,action,K,verdict\n");
    for row in &sweep.rows {
        let verdict = match &row.outcome {
            crate::dynamics::SweepOutcome::Classified(v) => format!("{:?}", v.verdict),
            crate::dynamics::SweepOutcome::HypothesisNotMet { .. } => "HypothesisNotMet".into(),
            crate::dynamics::SweepOutcome::Failed { .. } => "Failed".into(),
        };
        table.push_str(&format!("{},{},{},{verdict}\n", fmt17(row.a), fmt17(row.action), fmt17(row.k)));
        let expect = if (row.a - 1.0).abs() < 1e-12 {
            None
        } else if row.k >= 0.0 {
            Some(Verdict::ScatterLike)
        } else {
            Some(Verdict::BlowupLike)
        };
        let ok = match expect {
            None => matches!(row.outcome, crate::dynamics::SweepOutcome::HypothesisNotMet { .. }),
            Some(v) => row.outcome.verdict() == Some(v),
        };
        checks.push(Check::flag(format!("dichotomy[a={}]", row.a), ok));
    }
    checks.push(Check::flag("dichotomy_monotone", sweep.monotone));
    Ok(SuiteReport { suite: Suite::Dynamics, checks, tables: vec![("dichotomy".into(), table)] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_constructors() {
        assert!(Check::abs("a", 1.0, 1.05, 0.1).pass);
        assert!(!Check::rel("r", 1.2, 1.0, 0.1).pass);
        assert!(Check::at_most("m", 1e-9, 1e-8).pass);
        assert!(!Check::at_least("l", 2.0, 2.8).pass);
        let f = Check::flag("f", false);
        assert!(!f.pass && f.error == 1.0);
        assert_eq!(Check::abs("x", 0.5, 0.5, 0.0).csv_row().split(',').count(), 6);
    }

    #[test]
    fn suite_names() {
        assert_eq!(Suite::parse_list("all").unwrap().len(), 4);
        for s in Suite::ALL {
            assert_eq!(Suite::parse_list(s.name()).unwrap(), vec![s]);
        }
        assert!(Suite::parse_list("Profiles").is_err());
    }

    #[test]
    fn log_ladders() {
        let v = logspace(1e-3, 1e-1, 5);
        assert_eq!((v[0], v[4]), (1e-3, 1e-1));
        assert!((v[2] - 1e-2).abs() < 1e-17);
        assert_eq!(logspace(2.0, 3.0, 1), vec![2.0]);
        let p = probe_lambdas();
        assert_eq!(p.len(), 9);
        assert!(p.windows(2).all(|w| (w[0] / w[1] - 2.0).abs() < 1e-15));
    }

    #[test]
    fn profile_suite_passes() {
        let rep = profiles_suite(&SuiteContext::default()).unwrap();
        for c in &rep.checks {
            assert!(c.pass, "{c:?}");
        }
        assert!(rep.checks_csv().starts_with(Check::CSV_HEADER));
    }
}
