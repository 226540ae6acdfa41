//! Acceptance criteria for the library, one PASS/FAIL line each.
//!
//! Reference values are computed here from closed forms (Beta integrals,
//! explicit derivatives, independent quadrature) rather than taken from the
//! library. A criterion listed in `KNOWN_FAILURES` still prints FAIL; only
//! failures outside that list make the binary exit non-zero.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use critnls::construct::{
    construct_q, construct_sweep, lambda_monotonicity_check, newton_oracle, rescale_wave, solitary_wave,
    ConstructConfig, SolitaryWave, WaveSource,
};
use critnls::dynamics::{dichotomy_sweep, soliton_coherence, virial_check, DynamicsConfig, SweepOutcome, Verdict};
use critnls::functionals::{evaluate, evaluate_wave};
use critnls::profiles::{lambda_w, resonance_residual, Nonlinearity, ProfileSet};
use critnls::radial::{GridSpec, RadialGrid};
use critnls::resolvent::singularity_probe;
use critnls::verify::{conservation_drift, gaussian_data, logspace, probe_lambdas, profile_grid, resolvent_limit};
use statrs::function::beta::beta;

/// Criteria expected to fail, with the reason printed next to the FAIL line.
const KNOWN_FAILURES: &[(usize, &str)] = &[(
    8,
    "the reduction branch folds at eps ~ 0.0405, so eps = 0.05 is a scaled wave with a different eta; \
     and ||eta||_L12 is core dominated (~ eps), so its eps^-3/4 ratio drifts by eps^1/4 over the range",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn w_oracle(r: f64) -> f64 {
    (1.0 + r * r / 3.0).powf(-0.5)
}

fn w_prime_oracle(r: f64) -> f64 {
    -(r / 3.0) * (1.0 + r * r / 3.0).powf(-1.5)
}

/// `∫_{ℝ³} W^k = 2π·3^{3/2}·B(3/2, (k−3)/2)`.
fn w_power_oracle(k: f64) -> f64 {
    2.0 * PI * 3f64.powf(1.5) * beta(1.5, (k - 3.0) / 2.0)
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `‖η‖_{L^q}` by trapezoid in `r` plus the far field `η ≈ −√3/r`.
fn eta_lq(grid: &RadialGrid, eta: &[f64], q: f64) -> f64 {
    let r = grid.nodes();
    if q.is_infinite() {
        return eta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let g: Vec<f64> = eta.iter().zip(r).map(|(v, x)| v.abs().powf(q) * x * x).collect();
    let body: f64 = (1..r.len()).map(|i| 0.5 * (g[i] + g[i - 1]) * (r[i] - r[i - 1])).sum();
    let rm = grid.r_max();
    let tail = 3f64.powf(q / 2.0) * rm.powf(3.0 - q) / (q - 3.0);
    (4.0 * PI * (body + tail)).powf(1.0 / q)
}

/// `‖∇η‖_{L²}` from centered differences plus the far field `|∇W|² ≈ 3/r⁴`.
fn eta_h1(grid: &RadialGrid, eta: &[f64]) -> f64 {
    let r = grid.nodes();
    let n = r.len();
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            (eta[b] - eta[a]) / (r[b] - r[a])
        })
        .collect();
    let g: Vec<f64> = d.iter().zip(r).map(|(v, x)| v * v * x * x).collect();
    let body: f64 = (1..n).map(|i| 0.5 * (g[i] + g[i - 1]) * (r[i] - r[i - 1])).sum();
    (4.0 * PI * (body + 3.0 / grid.r_max())).sqrt()
}

struct Lab {
    grid: Arc<RadialGrid>,
    ps: ProfileSet,
    nl: Nonlinearity,
    cfg: ConstructConfig,
    dynamics: DynamicsConfig,
    /// Waves at `logspace(1e-3, 3e-2, 8)`.
    sweep: Vec<SolitaryWave>,
    /// The wave used at `ε = 0.05`.
    wave05: SolitaryWave,
    eps_hat: f64,
    mu: f64,
    /// Every wave whose Pohozaev residuals are checked.
    built: Vec<SolitaryWave>,
}

impl Lab {
    fn new() -> Lab {
        let grid = GridSpec::default().build().unwrap();
        let ps = ProfileSet::new(&grid);
        let nl = Nonlinearity::pure_power(4.0, 1.0).unwrap();
        let cfg = ConstructConfig::default();
        let sweep: Vec<SolitaryWave> = construct_sweep(&logspace(1e-3, 3e-2, 8), &nl, &ps, &cfg)
            .into_iter()
            .map(|w| w.expect("reduction converges below 3e-2"))
            .collect();
        let (wave05, src) = solitary_wave(0.05, &nl, &ps, &cfg).unwrap();
        let (eps_hat, mu) = match src {
            WaveSource::Scaled { eps_hat, mu } => (eps_hat, mu),
            WaveSource::Direct => (0.05, 1.0),
        };
        let mut built = sweep.clone();
        built.push(wave05.clone());
        Lab { grid, ps, nl, cfg, dynamics: DynamicsConfig::default(), sweep, wave05, eps_hat, mu, built }
    }
}

fn c1_profiles(lab: &Lab) -> Outcome {
    let mut worst_closed = 0.0f64;
    for i in 0..4000 {
        let r = i as f64 * 0.025;
        let (wv, dw) = (w_oracle(r), w_prime_oracle(r));
        let by_generator = 0.5 * wv + r * dw;
        let closed = wv.powi(3) - 0.5 * wv;
        worst_closed = worst_closed.max((by_generator - closed).abs()).max((lambda_w(r) - closed).abs());
    }
    let res: Vec<f64> = [512, 1024, 2048].iter().map(|&n| resonance_residual(&profile_grid(n).unwrap())).collect();
    let v_psi = lab.ps.v_psi_integral();
    let v_psi_err = (v_psi - (4.0 * PI).sqrt()).abs();
    let w_rep = evaluate(lab.ps.w(), 0.0, 0.0, &lab.nl).unwrap();
    let sextic = w_power_oracle(6.0);
    let grad_err = (w_rep.gradient - sextic).abs();
    let sextic_err = (w_rep.sextic - sextic).abs();
    let pass = worst_closed <= 1e-12
        && res[0] <= 1e-6
        && res[1] < res[0]
        && res[2] < res[1]
        && v_psi_err <= 1e-8
        && grad_err <= 1e-8
        && sextic_err <= 1e-8;
    Outcome::new(
        pass,
        format!(
            "closed form {worst_closed:.1e}; |H LW| n=512,1024,2048: {:.2e},{:.2e},{:.2e}; int V psi err {v_psi_err:.1e}; \
             grad W^2 err {grad_err:.1e}, W^6 err {sextic_err:.1e} (oracle {sextic:.8})",
            res[0], res[1], res[2]
        ),
    )
}

fn c2_pairing(lab: &Lab) -> Outcome {
    let mut worst = 0.0f64;
    for p in [2.5, 3.0, 4.0, 4.9, 6.0] {
        let nl = Nonlinearity::pure_power(p, 1.0).unwrap();
        let closed = (0.5 - 3.0 / (p + 1.0)) * w_power_oracle(p + 1.0);
        worst = worst.max((lab.ps.pairing(&nl) - closed).abs());
    }
    let p4 = lab.ps.pairing(&lab.nl);
    let oracle4 = -0.1 * w_power_oracle(5.0);
    let pass = worst <= 1e-8 && (p4 - (-2.17656)).abs() <= 1e-4 && (oracle4 - (-2.17656)).abs() <= 1e-4;
    Outcome::new(pass, format!("worst closed-form error {worst:.1e}; p=4 pairing {p4:.8} (Beta oracle {oracle4:.8})"))
}

fn c3_resolvent_limit(lab: &Lab) -> Outcome {
    let target = 2.0 * (3.0 * PI).sqrt();
    let lams = logspace(1e-3, 1e-1, 9);
    let rows = resolvent_limit(&lams, &lab.ps).unwrap();
    let errs: Vec<f64> = rows.iter().map(|(_, v)| (v - target).abs()).collect();
    let slope = fit_slope(&lams, &errs);
    Outcome::new(
        (slope - 1.0).abs() <= 0.2,
        format!("value at 1e-3 {:.6} vs {target:.6}; error exponent {slope:.3}", rows[0].1),
    )
}

fn c4_singularity(lab: &Lab) -> Outcome {
    let f = gaussian_data(&lab.ps);
    let lams = probe_lambdas();
    let amp = |orth: bool| -> Vec<f64> {
        singularity_probe(&lams, &f, orth, &lab.ps).unwrap().iter().map(|r| r.amplification).collect()
    };
    let (g, o) = (fit_slope(&lams, &amp(false)), fit_slope(&lams, &amp(true)));
    Outcome::new((g + 1.0).abs() <= 0.15 && o.abs() <= 0.15, format!("generic slope {g:.3}; orthogonalized slope {o:.4}"))
}

fn c5_frequency(lab: &Lab, elapsed: Duration) -> Outcome {
    let omega1 = 1.0 / 75.0;
    let eps: Vec<f64> = lab.sweep.iter().map(|w| w.eps).collect();
    let ratio = lab.sweep[0].omega / (eps[0] * eps[0]);
    let rel = (ratio / omega1 - 1.0).abs();
    let tilde: Vec<f64> = lab.sweep.iter().map(|w| (w.omega - omega1 * w.eps * w.eps).abs()).collect();
    let slope = fit_slope(&eps, &tilde);
    let minutes = elapsed.as_secs_f64() / 60.0;
    Outcome::new(
        rel <= 0.05 && slope >= 2.8 && minutes <= 15.0,
        format!("omega/eps^2 at 1e-3 = {ratio:.7} (rel err {rel:.2e}); omega-tilde exponent {slope:.3}; sweep {minutes:.2} min"),
    )
}

fn c6_oracle(lab: &mut Lab) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    let direct = construct_q(0.01, &lab.nl, &lab.ps, &lab.cfg).unwrap();
    let anchor = construct_q(lab.eps_hat, &lab.nl, &lab.ps, &lab.cfg).unwrap();
    let scaled = rescale_wave(&anchor, lab.mu, &lab.ps).unwrap();
    for (label, seed) in [("0.01", &direct), ("0.05", &scaled)] {
        let (nw, rep) = newton_oracle(seed.eps, seed.omega, &seed.q, &lab.nl, &lab.ps, &lab.cfg).unwrap();
        let d = nw.q.values().iter().zip(seed.q.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        pass &= d <= 1e-8 && rep.steps <= 5;
        parts.push(format!("eps={label}: sup diff {d:.1e} in {} Newton steps", rep.steps));
        lab.built.push(nw);
    }
    lab.built.push(direct);
    parts.push(format!("(0.05 seeded from the reduction at {:.5} scaled by mu={:.4})", lab.eps_hat, lab.mu));
    Outcome::new(pass, parts.join("; "))
}

fn c7_pohozaev(lab: &Lab) -> Outcome {
    let mut worst = 0.0f64;
    for w in &lab.built {
        let r = evaluate_wave(w).unwrap();
        worst = worst.max(r.pohozaev_residual_k).max(r.pohozaev_residual_k0);
    }
    Outcome::new(worst <= 1e-8, format!("worst relative residual {worst:.2e} over {} waves", lab.built.len()))
}

fn c8_eta_rates(lab: &mut Lab) -> Outcome {
    let eps = logspace(1e-3, 5e-2, 8);
    let mut waves: Vec<SolitaryWave> = construct_sweep(&eps[..7], &lab.nl, &lab.ps, &lab.cfg)
        .into_iter()
        .map(|w| w.unwrap())
        .collect();
    waves.push(lab.wave05.clone());
    let exps = [4.0, 6.0, 12.0, f64::INFINITY];
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 5];
    for w in &waves {
        let e = w.eta.values();
        for (k, &q) in exps.iter().enumerate() {
            cols[k].push(eta_lq(&lab.grid, e, q) * w.eps.powf(-(1.0 - 3.0 / q)));
        }
        cols[4].push(eta_h1(&lab.grid, e) * w.eps.powf(-0.5));
    }
    let variation = |c: &[f64]| {
        c.iter().cloned().fold(0.0, f64::max) / c.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let names = ["L4", "L6", "L12", "Linf", "H1"];
    let full: Vec<f64> = cols.iter().map(|c| variation(c)).collect();
    let branch: Vec<f64> = cols.iter().map(|c| variation(&c[..7])).collect();
    lab.built.extend(waves);
    let pass = full.iter().all(|v| *v <= 2.0);
    let show = |v: &[f64]| names.iter().zip(v).map(|(n, x)| format!("{n} {x:.2}")).collect::<Vec<_>>().join(", ");
    Outcome::new(pass, format!("variation over [1e-3, 5e-2]: {}; over [1e-3, 2.9e-2]: {}", show(&full), show(&branch)))
}

fn c9_gap(lab: &Lab) -> Outcome {
    let level = w_power_oracle(6.0) / 3.0;
    let predicted = |eps: f64| -((4.0 - 3.0) / (2.0 * 5.0)) * eps * w_power_oracle(5.0);
    let w0 = &lab.sweep[0];
    let gap0 = evaluate_wave(w0).unwrap().action - level;
    let ratio = gap0 / predicted(w0.eps);
    let mut all_negative = true;
    let mut worst = f64::NEG_INFINITY;
    for w in &lab.built {
        let g = evaluate_wave(w).unwrap().action - level;
        all_negative &= g < 0.0;
        worst = worst.max(g);
    }
    Outcome::new(
        (ratio - 1.0).abs() <= 0.1 && all_negative,
        format!("ratio at 1e-3 = {ratio:.5}; largest gap over {} waves {worst:.3e}", lab.built.len()),
    )
}

fn c10_monotone(lab: &Lab) -> Outcome {
    let pairs = [(0.01, 0.03), (0.01, 0.02), (0.01, 0.015), (0.01, 0.0125), (0.01, 0.011)];
    let hats = logspace(2e-3, 4e-2, 8);
    let rep = lambda_monotonicity_check(&pairs, 0.05, &hats, &lab.nl, &lab.ps, &lab.cfg).unwrap();
    let lambda1 = 3f64.sqrt() / 15.0;
    let ratios: Vec<f64> = rep
        .pairs
        .iter()
        .map(|r| ((r.lambda2 - r.lambda1) - lambda1 * (r.eps2 - r.eps1)).abs() / (r.eps2 - r.eps1).abs())
        .collect();
    let big: Vec<f64> = rep.omegas.iter().map(|o| (0.05 / o.eps_hat).powf(4.0) * o.omega).collect();
    let ratios_ok = ratios.windows(2).all(|w| w[1] < w[0]);
    let big_ok = big.len() == 8 && big.windows(2).all(|w| w[1] < w[0]);
    Outcome::new(
        ratios_ok && big_ok && rep.ratios_decreasing == ratios_ok && rep.omega_decreasing == big_ok,
        format!(
            "pair ratios {}; Omega from {:.4e} to {:.4e} over 8 samples",
            ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>().join(" > "),
            big[0],
            big[big.len() - 1]
        ),
    )
}

fn c11_conservation(lab: &Lab) -> Outcome {
    let half = lab.wave05.q.scaled(0.5).to_complex();
    let cfg = DynamicsConfig { absorb: false, ..lab.dynamics.clone() };
    let (dm, da) = conservation_drift(&half, &lab.wave05, &cfg, 1.0).unwrap();
    Outcome::new(dm <= 1e-6 && da <= 1e-6, format!("mass drift {dm:.2e}; action drift {da:.2e}"))
}

fn c12_virial(lab: &Lab) -> Outcome {
    let half = lab.wave05.q.scaled(0.5).to_complex();
    let rows = virial_check(&half, lab.wave05.eps, &lab.nl, &lab.dynamics, 1e-3, 1.0, 10).unwrap();
    let worst = rows.iter().fold(0.0f64, |m, r| m.max(r.relative_error));
    Outcome::new(rows.len() == 10 && worst <= 1e-3, format!("worst relative error {worst:.2e} at {} times", rows.len()))
}

fn c13_coherence(lab: &Lab) -> Outcome {
    let cfg = DynamicsConfig { dt_fixed: Some(2e-4), absorb: false, ..lab.dynamics.clone() };
    let rep = soliton_coherence(&lab.wave05, 5.0, &cfg).unwrap();
    let rel = ((rep.phase_rate - lab.wave05.omega) / lab.wave05.omega).abs();
    Outcome::new(
        rep.max_modulus_error <= 1e-4 && rel <= 0.01,
        format!("modulus error {:.2e}; phase rate {:.6e} vs omega {:.6e} (rel {rel:.2e})", rep.max_modulus_error, rep.phase_rate, lab.wave05.omega),
    )
}

fn c14_dichotomy(lab: &Lab) -> Outcome {
    let start = Instant::now();
    let cfg = DynamicsConfig { absorb: true, ..lab.dynamics.clone() };
    let rep = dichotomy_sweep(&[0.3, 0.5, 0.8, 1.0, 1.2, 1.5], &lab.wave05, &cfg).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for row in &rep.rows {
        let ok = match (&row.outcome, row.a) {
            (outcome, 1.0) => matches!(outcome, SweepOutcome::HypothesisNotMet { .. }),
            (SweepOutcome::Classified(v), a) if a < 1.0 => {
                v.verdict == Verdict::ScatterLike && v.evidence.l6_decay >= 10.0 && v.evidence.k_min >= 0.0
            }
            (SweepOutcome::Classified(v), a) if a > 1.0 => {
                v.verdict == Verdict::BlowupLike
                    && v.hypothesis.action < v.hypothesis.threshold
                    && v.hypothesis.k < 0.0
                    && v.evidence.gradient_growth >= 1e3
                    && v.evidence.confirm_growth.is_some_and(|g| g >= 1e3)
            }
            _ => false,
        };
        pass &= ok;
        let tag = match &row.outcome {
            SweepOutcome::Classified(v) => match v.verdict {
                Verdict::ScatterLike => format!("scatter (L6 decay {:.1})", v.evidence.l6_decay),
                Verdict::BlowupLike => format!(
                    "blowup (growth {:.0}, halved {:.0})",
                    v.evidence.gradient_growth,
                    v.evidence.confirm_growth.unwrap_or(f64::NAN)
                ),
                Verdict::Inconclusive => "inconclusive".into(),
            },
            SweepOutcome::HypothesisNotMet { .. } => "refused".into(),
            SweepOutcome::Failed { detail } => format!("failed: {detail}"),
        };
        parts.push(format!("a={} {tag}", row.a));
    }
    let minutes = start.elapsed().as_secs_f64() / 60.0;
    Outcome::new(pass && minutes <= 30.0, format!("{}; {minutes:.2} min", parts.join(", ")))
}

fn main() {
    let t0 = Instant::now();
    let mut lab = Lab::new();
    let setup = t0.elapsed();
    println!("acceptance: setup {:.1} s", setup.as_secs_f64());
    let names = [
        "profile identities",
        "pairing closed form",
        "resolvent limit",
        "resonance singularity rate",
        "frequency asymptotics",
        "oracle equivalence",
        "Pohozaev identities",
        "eta norm rates",
        "action gap",
        "monotonicity",
        "dynamics conservation",
        "virial identity",
        "soliton coherence",
        "dichotomy smoke test",
    ];
    let mut unexpected = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let out = match id {
            1 => c1_profiles(&lab),
            2 => c2_pairing(&lab),
            3 => c3_resolvent_limit(&lab),
            4 => c4_singularity(&lab),
            5 => c5_frequency(&lab, setup),
            6 => c6_oracle(&mut lab),
            7 => c7_pohozaev(&lab),
            8 => c8_eta_rates(&mut lab),
            9 => c9_gap(&lab),
            10 => c10_monotone(&lab),
            11 => c11_conservation(&lab),
            12 => c12_virial(&lab),
            13 => c13_coherence(&lab),
            _ => c14_dichotomy(&lab),
        };
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id).map(|(_, why)| *why);
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("{status} [{id:>2}] {name}: {} ({secs:.1} s)", out.detail);
        match (out.pass, known) {
            (false, Some(why)) => println!("          known failure: {why}"),
            (false, None) => unexpected.push(id),
            _ => {}
        }
    }
    println!("acceptance: total {:.1} s", t0.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("acceptance: unexpected failures in criteria {unexpected:?}");
        std::process::exit(1);
    }
}
