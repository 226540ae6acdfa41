use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use critnls::construct::{
    construct_q, newton_oracle, rescale_wave, scaling_factor, solitary_wave, ConstructConfig, WaveSource,
};
use critnls::profiles::{psi_scale, w, Nonlinearity, ProfileSet};
use critnls::radial::{GridSpec, RadialGrid, RealField};
use critnls::resolvent::{loglog_slope, orth_pairing};
use critnls::verify::logspace;
use critnls::Error;

fn setup() -> &'static (Arc<RadialGrid>, ProfileSet) {
    static S: OnceLock<(Arc<RadialGrid>, ProfileSet)> = OnceLock::new();
    S.get_or_init(|| {
        let g = GridSpec::default().build().unwrap();
        let ps = ProfileSet::new(&g);
        (g, ps)
    })
}

/// `⟨ΛW, W^p⟩` by midpoint quadrature in `θ` with `r = √3·tan θ`.
fn pairing_oracle(p: f64) -> f64 {
    let m = 200_000;
    let h = 0.5 * PI / m as f64;
    (0..m)
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            let r = 3f64.sqrt() * t.tan();
            let jac = 3f64.sqrt() / (t.cos() * t.cos());
            let wv = w(r);
            4.0 * PI * r * r * (wv.powi(3) - 0.5 * wv) * wv.powf(p) * jac * h
        })
        .sum()
}

/// `Q > 0` up to cancellation against `W` where `Q` is far below it.
fn positive(q: &RealField, ps: &ProfileSet) -> bool {
    q.values().iter().zip(ps.w().values()).all(|(v, wv)| *v > -1e-13 * wv)
}

#[test]
fn orthogonal_pairing_converges_at_the_predicted_rate() {
    let (g, ps) = setup();
    let lams = logspace(1e-3, 1e-1, 9);
    for p in [2.5, 3.5, 4.0] {
        let nl = Nonlinearity::pure_power(p, 1.0).unwrap();
        let fw = RealField::from_fn(g, |r| nl.f(w(r)));
        let target = pairing_oracle(p) * psi_scale();
        let errs: Vec<f64> = lams.iter().map(|&l| (orth_pairing(l, &fw, ps, true).unwrap() + target).abs()).collect();
        let slope = loglog_slope(&lams, &errs);
        let need = 0.8 * (p - 2.0).min(1.0);
        assert!(slope >= need, "p = {p}: exponent {slope} below {need}");
    }
}

#[test]
fn waves_are_positive_and_solve_the_equation() {
    let (_, ps) = setup();
    let nl = Nonlinearity::pure_power(4.0, 1.0).unwrap();
    let cfg = ConstructConfig::default();
    for eps in [1e-3, 1e-2, 3e-2] {
        let wave = construct_q(eps, &nl, ps, &cfg).unwrap();
        assert!(positive(&wave.q, ps), "ε = {eps}");
        assert!(wave.diagnostics.pde_residual < 1e-8, "ε = {eps}: {}", wave.diagnostics.pde_residual);
        assert!(wave.eta.sup() <= cfg.r_ball * eps);
        let q = wave.q.values();
        assert!(q.windows(2).all(|p| p[1] <= p[0] + 1e-12), "profile not radially decreasing at ε = {eps}");
    }
}

#[test]
fn newton_reproduces_the_reduction() {
    let (_, ps) = setup();
    let nl = Nonlinearity::pure_power(4.0, 1.0).unwrap();
    let cfg = ConstructConfig::default();
    for eps in [3e-3, 2e-2] {
        let wave = construct_q(eps, &nl, ps, &cfg).unwrap();
        let (nw, rep) = newton_oracle(eps, wave.omega, &wave.q, &nl, ps, &cfg).unwrap();
        let d = nw.q.zip(&wave.q, |a, b| a - b).unwrap().sup();
        assert!(d <= 1e-8, "ε = {eps}: {d:e}");
        assert!(rep.steps <= 5);
    }
}

#[test]
fn scaling_maps_solutions_to_solutions() {
    let (_, ps) = setup();
    let nl = Nonlinearity::pure_power(4.0, 1.0).unwrap();
    let cfg = ConstructConfig::default();
    let base = construct_q(0.02, &nl, ps, &cfg).unwrap();
    let mu = scaling_factor(&nl, 0.02, 0.024).unwrap();
    assert!((mu - 1.44).abs() < 1e-12);
    let s = rescale_wave(&base, mu, ps).unwrap();
    assert!((s.eps - 0.024).abs() < 1e-15);
    assert!((s.omega - mu * mu * base.omega).abs() < 1e-18);
    assert!(s.diagnostics.pde_residual < 1e-6, "{}", s.diagnostics.pde_residual);
}

#[test]
fn fallback_beyond_the_branch_end() {
    let (_, ps) = setup();
    let nl = Nonlinearity::pure_power(4.0, 1.0).unwrap();
    let cfg = ConstructConfig::default();
    assert!(matches!(construct_q(0.05, &nl, ps, &cfg), Err(Error::NoConvergence { .. } | Error::BallExit(_))));
    let (wave, src) = solitary_wave(0.05, &nl, ps, &cfg).unwrap();
    match src {
        WaveSource::Scaled { eps_hat, mu } => {
            assert!(eps_hat > 0.035 && eps_hat < 0.05);
            assert!((mu - (0.05 / eps_hat).powi(2)).abs() < 1e-12);
        }
        WaveSource::Direct => panic!("expected the scaled fallback"),
    }
    assert_eq!(wave.eps, 0.05);
    assert!(wave.diagnostics.pde_residual <= 1e-9);
    assert!(positive(&wave.q, ps));
}

#[test]
fn defocusing_and_out_of_range_exponents_are_rejected() {
    let (_, ps) = setup();
    let cfg = ConstructConfig::default();
    assert!(Nonlinearity::pure_power(1.0, 1.0).is_err());
    let defocusing = Nonlinearity::pure_power(4.0, -1.0).unwrap();
    assert!(construct_q(1e-2, &defocusing, ps, &cfg).is_err());
}
