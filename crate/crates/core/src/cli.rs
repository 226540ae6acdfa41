//! Command-line front end: config resolution, subcommands, artifacts and
//! the run manifest.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::config::{parse_values, RunConfig};
use crate::construct::{solitary_wave, SolitaryWave, WaveSource};
use crate::dynamics::{classify, drifts, dichotomy_sweep, Evolver, Sample, SweepOutcome};
use crate::error::{Error, Result};
use crate::functionals::{evaluate, evaluate_wave};
use crate::profiles::{w, ProfileSet};
use crate::radial::io::{fmt17, read_field_csv, write_complex_csv, write_real_csv};
use crate::radial::{ComplexField, RealField};
use crate::resolvent::{loglog_slope, singularity_probe};
use crate::verify::{probe_csv, resolvent_limit, run_suite, wave_checks, Check, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "critnls", version, about = "Solitary waves and radial dynamics of the perturbed energy-critical NLS")]
pub struct Cli {
    /// TOML config; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output root (overrides CRITNLS_OUT).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (overrides CRITNLS_WORKERS).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct GridArgs {
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub grid_rmax: Option<f64>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct ModelArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<f64>,
    /// Single value, comma list, or `a:b:logN`.
    #[arg(long)]
    pub eps: Option<String>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build Q_ε for one or more ε.
    Construct {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run check suites.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Resolvent limit and amplification of (1 + R₀V)⁻¹.
    ResolventProbe {
        #[arg(long)]
        lambdas: Option<String>,
        /// gaussian, w4 or psi.
        #[arg(long)]
        data: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Evolve initial data and report conserved quantities and a verdict.
    Evolve {
        /// `scale:a` or a field CSV path.
        #[arg(long)]
        init: Option<String>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_enum)]
        absorb: Option<OnOff>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Classify a·Q_ε for a list of amplitudes.
    SweepDichotomy {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated amplitudes.
        #[arg(long)]
        a: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Construct { .. } => "construct",
            Command::Verify { .. } => "verify",
            Command::ResolventProbe { .. } => "resolvent-probe",
            Command::Evolve { .. } => "evolve",
            Command::SweepDichotomy { .. } => "sweep-dichotomy",
        }
    }
}

fn apply_model(cfg: &mut RunConfig, m: &ModelArgs) {
    if let Some(p) = m.p {
        cfg.model.p = p;
    }
    if let Some(s) = m.sign {
        cfg.model.sign = s;
    }
    if let Some(e) = &m.eps {
        cfg.model.eps = e.clone();
    }
}

fn apply_grid(cfg: &mut RunConfig, g: &GridArgs) {
    if let Some(n) = g.grid_n {
        cfg.grid.n = n;
    }
    if let Some(r) = g.grid_rmax {
        cfg.grid.r_max = r;
    }
}

/// Config file, then environment, then flags.
pub fn resolve(cli: &Cli, env: &dyn Fn(&str) -> Option<String>) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply_env(env)?;
    if let Some(o) = &cli.out {
        cfg.run.out = o.clone();
    }
    if let Some(w) = cli.workers {
        cfg.run.workers = w;
    }
    if let Some(s) = cli.seed {
        cfg.run.seed = s;
    }
    match &cli.command {
        Command::Construct { model, grid } => {
            apply_model(&mut cfg, model);
            apply_grid(&mut cfg, grid);
        }
        Command::Verify { suite, model, grid } => {
            if let Some(s) = suite {
                cfg.verify.suite = s.clone();
            }
            apply_model(&mut cfg, model);
            apply_grid(&mut cfg, grid);
        }
        Command::ResolventProbe { lambdas, data, grid } => {
            if let Some(l) = lambdas {
                cfg.probe.lambdas = l.clone();
            }
            if let Some(d) = data {
                cfg.probe.data = d.clone();
            }
            apply_grid(&mut cfg, grid);
        }
        Command::Evolve { init, model, t_end, dt, absorb, grid } => {
            if let Some(i) = init {
                cfg.evolve.init = i.clone();
            }
            if let Some(t) = t_end {
                cfg.evolve.t_end = *t;
            }
            if let Some(d) = dt {
                cfg.dynamics.dt_fixed = Some(*d);
            }
            if let Some(a) = absorb {
                cfg.dynamics.absorb = matches!(a, OnOff::On);
            }
            apply_model(&mut cfg, model);
            apply_grid(&mut cfg, grid);
        }
        Command::SweepDichotomy { model, a, grid } => {
            if let Some(a) = a {
                cfg.sweep.a = parse_values(a)?;
            }
            apply_model(&mut cfg, model);
            apply_grid(&mut cfg, grid);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct ManifestCheck<'a> {
    name: &'a str,
    pass: bool,
    computed: f64,
    expected: f64,
    tolerance: f64,
}

#[derive(Serialize)]
struct Versions {
    critnls: &'static str,
    config_schema: u32,
}

#[derive(Serialize)]
struct Manifest<'a> {
    subcommand: &'a str,
    inputs_sha256: String,
    versions: Versions,
    started_unix: f64,
    finished_unix: f64,
    passed: bool,
    error: Option<String>,
    checks: Vec<ManifestCheck<'a>>,
    outputs: Vec<String>,
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Files and checks produced by one subcommand.
#[derive(Default)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub outputs: Vec<String>,
    pub checks: Vec<Check>,
}

impl Artifacts {
    fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.dir.join(name)
    }

    fn write(&mut self, name: &str, text: &str) -> Result<()> {
        let p = self.path(name);
        std::fs::write(p, text)?;
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
        self.write(name, &text)
    }
}

/// Parses `args`, runs the subcommand and returns the exit code.
pub fn main_with<I, T>(args: I, env: &dyn Fn(&str) -> Option<String>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve(&cli, env) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("critnls: {e}");
            return EXIT_CONFIG;
        }
    };
    match run(&cli.command, &cfg) {
        Ok(art) => {
            let failed: Vec<&str> = art.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            if failed.is_empty() {
                println!("{}: all {} checks passed; outputs in {}", cli.command.name(), art.checks.len(), art.dir.display());
                EXIT_OK
            } else {
                eprintln!("{}: failed checks: {}", cli.command.name(), failed.join(", "));
                EXIT_CHECK_FAILED
            }
        }
        Err(Error::Config(msg)) => {
            eprintln!("critnls: {}", Error::Config(msg));
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("critnls: {e}");
            EXIT_CHECK_FAILED
        }
    }
}

/// Runs a resolved subcommand, writing its config and manifest.
pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Artifacts> {
    let started = unix_now();
    let dir = cfg.run.out.join(cmd.name());
    std::fs::create_dir_all(&dir)?;
    let mut art = Artifacts { dir, ..Default::default() };
    art.write("config.toml", &cfg.to_toml())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let result = pool.install(|| match cmd {
        Command::Construct { .. } => run_construct(cfg, &mut art),
        Command::Verify { .. } => run_verify(cfg, &mut art),
        Command::ResolventProbe { .. } => run_probe(cfg, &mut art),
        Command::Evolve { .. } => run_evolve(cfg, &mut art),
        Command::SweepDichotomy { .. } => run_sweep(cfg, &mut art),
    });
    let error = result.as_ref().err().map(|e| e.to_string());
    let manifest = Manifest {
        subcommand: cmd.name(),
        inputs_sha256: cfg.digest(),
        versions: Versions { critnls: env!("CARGO_PKG_VERSION"), config_schema: 1 },
        started_unix: started,
        finished_unix: unix_now(),
        passed: error.is_none() && art.checks.iter().all(|c| c.pass),
        error,
        checks: art
            .checks
            .iter()
            .map(|c| ManifestCheck {
                name: &c.name,
                pass: c.pass,
                computed: c.computed,
                expected: c.expected,
                tolerance: c.tolerance,
            })
            .collect(),
        outputs: art.outputs.clone(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(art.dir.join("manifest.json"), text)?;
    result.map(|_| art)
}

fn eps_tag(eps: f64) -> String {
    format!("{eps:.6e}")
}

#[derive(Serialize)]
struct WaveJson<'a> {
    eps: f64,
    lambda: f64,
    omega: f64,
    source: String,
    diagnostics: &'a crate::construct::Diagnostics,
    functionals: &'a crate::functionals::FunctionalReport,
}

fn source_label(src: &WaveSource) -> String {
    match src {
        WaveSource::Direct => "direct".into(),
        WaveSource::Scaled { eps_hat, mu } => format!("scaled(eps_hat={eps_hat:e}, mu={mu:e})"),
    }
}

fn run_construct(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    use rayon::prelude::*;
    let nl = cfg.nonlinearity()?;
    let g = cfg.grid.build()?;
    let ps = ProfileSet::new(&g);
    let eps = cfg.eps_values()?;
    let results: Vec<(f64, Result<(SolitaryWave, WaveSource)>)> =
        eps.par_iter().map(|&e| (e, solitary_wave(e, &nl, &ps, &cfg.construct))).collect();
    let mut table = String::from("eps,lambda,omega,omega_over_eps2,omega_tilde,pde_residual,pohozaev_k,pohozaev_k0,source\n");
    for (e, res) in results {
        let tag = eps_tag(e);
        let (wave, src) = match res {
            Ok(v) => v,
            Err(err) => {
                eprintln!("construct ε = {e:e}: {err}");
                art.checks.push(Check::flag(format!("construct[eps={e:e}]"), false));
                continue;
            }
        };
        art.checks.push(Check::flag(format!("construct[eps={e:e}]"), true));
        let rep = evaluate_wave(&wave)?;
        art.checks.extend(wave_checks(&wave, &rep));
        let q = art.path(&format!("q_eps{tag}.csv"));
        write_real_csv(&q, &wave.q)?;
        art.outputs.push(format!("q_eps{tag}.json"));
        let eta = art.path(&format!("eta_eps{tag}.csv"));
        write_real_csv(&eta, &wave.eta)?;
        art.outputs.push(format!("eta_eps{tag}.json"));
        let json = WaveJson {
            eps: e,
            lambda: wave.lambda,
            omega: wave.omega,
            source: source_label(&src),
            diagnostics: &wave.diagnostics,
            functionals: &rep,
        };
        art.write_json(&format!("wave_eps{tag}.diagnostics.json"), &json)?;
        let ratio = if e > 0.0 { wave.omega / (e * e) } else { f64::NAN };
        table.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt17(e),
            fmt17(wave.lambda),
            fmt17(wave.omega),
            fmt17(ratio),
            fmt17(wave.diagnostics.omega_tilde),
            fmt17(wave.diagnostics.pde_residual),
            fmt17(rep.pohozaev_residual_k),
            fmt17(rep.pohozaev_residual_k0),
            source_label(&src)
        ));
    }
    art.write("omega.csv", &table)
}

fn run_verify(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let ctx = cfg.suite_context()?;
    for suite in Suite::parse_list(&cfg.verify.suite)? {
        let rep = run_suite(suite, &ctx)?;
        art.write(&format!("{}_checks.csv", suite.name()), &rep.checks_csv())?;
        for (name, csv) in &rep.tables {
            art.write(&format!("{name}.csv"), csv)?;
        }
        art.checks.extend(rep.checks.into_iter().map(|mut c| {
            c.name = format!("{}.{}", suite.name(), c.name);
            c
        }));
    }
    Ok(())
}

fn probe_data(kind: &str, ps: &ProfileSet) -> Result<RealField> {
    match kind {
        "gaussian" => Ok(crate::verify::gaussian_data(ps)),
        "w4" => Ok(RealField::from_fn(ps.grid(), |r| w(r).powi(4))),
        "psi" => Ok(ps.psi().clone()),
        other => Err(Error::Config(format!("unknown probe data '{other}'"))),
    }
}

fn run_probe(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let g = cfg.grid.build()?;
    let ps = ProfileSet::new(&g);
    let f = probe_data(&cfg.probe.data, &ps)?;
    let lams = parse_values(&cfg.probe.lambdas)?;
    let generic = singularity_probe(&lams, &f, false, &ps)?;
    art.checks.push(Check::abs(
        "probe_slope_generic",
        loglog_slope(&lams, &generic.iter().map(|r| r.amplification).collect::<Vec<_>>()),
        -1.0,
        0.15,
    ));
    let orth = match singularity_probe(&lams, &f, true, &ps) {
        Ok(rows) => {
            art.checks.push(Check::abs(
                "probe_slope_orthogonal",
                loglog_slope(&lams, &rows.iter().map(|r| r.amplification).collect::<Vec<_>>()),
                0.0,
                0.15,
            ));
            rows
        }
        Err(Error::Assumption(msg)) => {
            eprintln!("orthogonal probe skipped: {msg}");
            generic.iter().map(|r| crate::resolvent::ProbeRow { lambda: r.lambda, amplification: f64::NAN }).collect()
        }
        Err(e) => return Err(e),
    };
    art.write("probe.csv", &probe_csv(&generic, &orth))?;
    let target = 2.0 * (3.0 * std::f64::consts::PI).sqrt();
    let mut limit = String::from("lambda,value,error\n");
    for (l, v) in resolvent_limit(&lams, &ps)? {
        limit.push_str(&format!("{},{},{}\n", fmt17(l), fmt17(v), fmt17((v - target).abs())));
    }
    art.write("resolvent_limit.csv", &limit)
}

/// Initial data: `scale:a` multiplies `Q_ε`; anything else is a field CSV.
fn initial_data(spec: &str, wave: &SolitaryWave) -> Result<ComplexField> {
    if let Some(a) = spec.strip_prefix("scale:") {
        let a: f64 = a.trim().parse().map_err(|_| Error::Config(format!("bad amplitude in '{spec}'")))?;
        return Ok(wave.q.scaled(a).to_complex());
    }
    let path = Path::new(spec.strip_prefix("file:").unwrap_or(spec));
    let (r, re, im) = read_field_csv(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let g = wave.grid();
    let im = im.unwrap_or_else(|| vec![0.0; re.len()]);
    let same = r.len() == g.n() && r.iter().zip(g.nodes()).all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0));
    let (re, im) = if same {
        (re, im)
    } else {
        (resample(&r, &re, g.nodes())?, resample(&r, &im, g.nodes())?)
    };
    ComplexField::new(g.clone(), re.into_iter().zip(im).map(|(a, b)| num_complex::Complex64::new(a, b)).collect())
}

/// Piecewise-linear resampling; zero outside the sampled range.
fn resample(r: &[f64], v: &[f64], at: &[f64]) -> Result<Vec<f64>> {
    if r.len() < 2 || r.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("field CSV radii must be increasing".into()));
    }
    Ok(at
        .iter()
        .map(|&x| {
            if x < r[0] {
                v[0]
            } else if x > r[r.len() - 1] {
                0.0
            } else {
                let j = r.partition_point(|&y| y <= x).min(r.len() - 1).max(1);
                let t = (x - r[j - 1]) / (r[j] - r[j - 1]);
                v[j - 1] + t * (v[j] - v[j - 1])
            }
        })
        .collect())
}

#[derive(Serialize)]
struct EvolveJson {
    eps: f64,
    omega: f64,
    threshold: f64,
    action: f64,
    k: f64,
    t_end: f64,
    steps: usize,
    mass_drift: f64,
    action_drift: f64,
    trustworthy: bool,
    verdict: String,
    classification: Option<crate::dynamics::DichotomyVerdict>,
    detail: Option<String>,
}

fn run_evolve(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let nl = cfg.nonlinearity()?;
    let eps = cfg.single_eps()?;
    let g = cfg.grid.build()?;
    let ps = ProfileSet::new(&g);
    let (wave, _) = solitary_wave(eps, &nl, &ps, &cfg.construct)?;
    let u0 = initial_data(&cfg.evolve.init, &wave)?;
    let mut ev = Evolver::new(&g, eps, &nl, &cfg.dynamics)?.with_omega(wave.omega);
    let mut st = ev.start(u0.clone())?;
    let mut series = String::from(Sample::CSV_HEADER);
    series.push('\n');
    series.push_str(&st.initial.csv_row());
    series.push('\n');
    while st.t < cfg.evolve.t_end {
        let dt = ev.propose_dt(&st).min(cfg.evolve.t_end - st.t);
        ev.step_with(&mut st, dt)?;
        if st.steps % cfg.dynamics.sample_every == 0 || st.t >= cfg.evolve.t_end {
            let s = if st.steps % cfg.dynamics.sample_every == 0 {
                *st.history.back().expect("sample recorded")
            } else {
                ev.sample(&st.u, st.t, st.dt)?
            };
            series.push_str(&s.csv_row());
            series.push('\n');
        }
    }
    art.write("timeseries.csv", &series)?;
    let last = ev.sample(&st.u, st.t, st.dt)?;
    let (mass_drift, action_drift) = drifts(&st.initial, &last);
    let fin = art.path("u_final.csv");
    write_complex_csv(&fin, &st.u)?;
    art.outputs.push("u_final.json".into());
    if !cfg.dynamics.absorb {
        art.checks.push(Check::at_most("mass_drift", mass_drift, cfg.dynamics.drift_budget));
        art.checks.push(Check::at_most("action_drift", action_drift, cfg.dynamics.drift_budget));
    }
    let threshold = evaluate(&wave.q, eps, wave.omega, &nl)?.action;
    let rep = evaluate(&u0, eps, wave.omega, &nl)?;
    let cls_cfg = crate::dynamics::DynamicsConfig { absorb: true, dt_fixed: None, ..cfg.dynamics.clone() };
    let (verdict, classification, detail) = match classify(&u0, eps, wave.omega, threshold, &nl, &cls_cfg) {
        Ok(v) => (format!("{:?}", v.verdict), Some(v), None),
        Err(Error::HypothesisNotMet(d)) => ("hypothesis-not-met".to_string(), None, Some(d)),
        Err(Error::Unsupported(d)) => ("unsupported".to_string(), None, Some(d)),
        Err(e) => return Err(e),
    };
    let json = EvolveJson {
        eps,
        omega: wave.omega,
        threshold,
        action: rep.action,
        k: rep.k,
        t_end: st.t,
        steps: st.steps,
        mass_drift,
        action_drift,
        trustworthy: st.trustworthy,
        verdict,
        classification,
        detail,
    };
    art.write_json("verdict.json", &json)
}

fn run_sweep(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    let nl = cfg.nonlinearity()?;
    let eps = cfg.single_eps()?;
    let g = cfg.grid.build()?;
    let ps = ProfileSet::new(&g);
    let (wave, _) = solitary_wave(eps, &nl, &ps, &cfg.construct)?;
    let cls = crate::dynamics::DynamicsConfig { absorb: true, ..cfg.dynamics.clone() };
    let rep = dichotomy_sweep(&cfg.sweep.a, &wave, &cls)?;
    let mut table = String::from("a,action,K,verdict,l6_decay,gradient_growth,confirm_growth,horizon,mass_drift,refinement\n");
    for row in &rep.rows {
        let (verdict, ev) = match &row.outcome {
            SweepOutcome::Classified(v) => (format!("{:?}", v.verdict), Some(&v.evidence)),
            SweepOutcome::HypothesisNotMet { .. } => ("HypothesisNotMet".to_string(), None),
            SweepOutcome::Failed { .. } => ("Failed".to_string(), None),
        };
        let nan = f64::NAN;
        table.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt17(row.a),
            fmt17(row.action),
            fmt17(row.k),
            verdict,
            fmt17(ev.map_or(nan, |e| e.l6_decay)),
            fmt17(ev.map_or(nan, |e| e.gradient_growth)),
            fmt17(ev.and_then(|e| e.confirm_growth).unwrap_or(nan)),
            fmt17(ev.map_or(nan, |e| e.horizon)),
            fmt17(ev.map_or(nan, |e| e.mass_drift)),
            ev.map_or(0, |e| e.refinement)
        ));
        let failed = matches!(row.outcome, SweepOutcome::Failed { .. });
        art.checks.push(Check::flag(format!("classified[a={}]", row.a), !failed));
    }
    art.checks.push(Check::flag("verdicts_monotone", rep.monotone));
    art.write("verdicts.csv", &table)?;
    art.write_json("sweep.json", &rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_resampling() {
        let r = [0.0, 1.0, 3.0];
        let v = [2.0, 4.0, 0.0];
        let out = resample(&r, &v, &[0.0, 0.5, 2.0, 3.0, 5.0]).unwrap();
        assert_eq!(out, vec![2.0, 3.0, 2.0, 0.0, 0.0]);
        assert!(resample(&[0.0, 0.0], &[1.0, 1.0], &[0.5]).is_err());
        assert!(resample(&[1.0], &[1.0], &[0.5]).is_err());
    }

    #[test]
    fn flags_are_applied_per_subcommand() {
        let cli = Cli::try_parse_from([
            "critnls", "--workers", "2", "evolve", "--eps", "0.02", "--dt", "1e-3", "--absorb", "on", "--grid-n", "500",
        ])
        .unwrap();
        let cfg = resolve(&cli, &|_| None).unwrap();
        assert_eq!(cfg.run.workers, 2);
        assert_eq!(cfg.dynamics.dt_fixed, Some(1e-3));
        assert!(cfg.dynamics.absorb);
        assert_eq!(cfg.grid.n, 500);
        let cli = Cli::try_parse_from(["critnls", "sweep-dichotomy", "--a", "0.5,x"]).unwrap();
        assert!(matches!(resolve(&cli, &|_| None), Err(Error::Config(_))));
    }

    #[test]
    fn exit_codes_for_parse_failures() {
        assert_eq!(main_with(["critnls", "construct", "--p"], &|_| None), EXIT_CONFIG);
        assert_eq!(main_with(["critnls", "--version"], &|_| None), EXIT_OK);
        assert_eq!(main_with(["critnls", "verify", "--suite", "none"], &|_| None), EXIT_CONFIG);
    }

    #[test]
    fn tags_are_stable() {
        assert_eq!(eps_tag(0.05), "5.000000e-2");
        assert_eq!(source_label(&WaveSource::Direct), "direct");
    }
}
