use std::path::Path;
use std::process::{Command, Output};

use critnls::config::RunConfig;

const SMALL: [&str; 4] = ["--grid-n", "800", "--grid-rmax", "30000"];

fn critnls(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_critnls"));
    cmd.args(args).env_remove("CRITNLS_OUT").env_remove("CRITNLS_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn construct_writes_artifacts_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let mut args = vec!["--out", out, "construct", "--eps", "0.01,0.02"];
    args.extend(SMALL);
    let o = critnls(&args, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tmp.path().join("construct");
    for f in ["config.toml", "manifest.json", "omega.csv", "q_eps1.000000e-2.csv", "q_eps1.000000e-2.json", "eta_eps2.000000e-2.csv"] {
        assert!(dir.join(f).exists(), "missing {f}");
    }
    let m = manifest(&dir);
    assert_eq!(m["subcommand"], "construct");
    assert_eq!(m["passed"], true);
    assert_eq!(m["versions"]["critnls"], env!("CARGO_PKG_VERSION"));
    let resolved = RunConfig::load(&dir.join("config.toml")).unwrap();
    assert_eq!(m["inputs_sha256"], resolved.digest());
    assert_eq!(resolved.grid.n, 800);
    assert_eq!(resolved.model.eps, "0.01,0.02");
    let checks = m["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(checks.iter().any(|c| c["name"].as_str().unwrap().starts_with("pohozaev_k")));
    let omega = std::fs::read_to_string(dir.join("omega.csv")).unwrap();
    let row = omega.lines().nth(1).unwrap();
    let lambda = row.split(',').nth(1).unwrap();
    let digits = lambda.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
    assert_eq!(digits.len(), 17, "{lambda}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, workers) in [(&a, "1"), (&b, "3")] {
        let mut args = vec!["--out", dir.path().to_str().unwrap(), "--workers", workers, "construct", "--eps", "0.005,0.01,0.02"];
        args.extend(SMALL);
        assert_eq!(code(&critnls(&args, &[])), 0);
    }
    for f in ["omega.csv", "q_eps5.000000e-3.csv", "eta_eps2.000000e-2.csv"] {
        let x = std::fs::read(a.path().join("construct").join(f)).unwrap();
        let y = std::fs::read(b.path().join("construct").join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(code(&critnls(&["--out", out, "verify", "--suite", "everything"], &[])), 2);
    assert_eq!(code(&critnls(&["--out", out, "construct", "--p", "5"], &[])), 2);
    assert_eq!(code(&critnls(&["--out", out, "frobnicate"], &[])), 2);
    assert_eq!(code(&critnls(&["--out", out, "evolve", "--eps", "0.01,0.02"], &[])), 2);
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "[grid]\nnodes = 100\n").unwrap();
    assert_eq!(code(&critnls(&["--config", bad.to_str().unwrap(), "construct"], &[])), 2);
    assert_eq!(code(&critnls(&["--config", "/nonexistent/run.toml", "construct"], &[])), 2);
    assert_eq!(code(&critnls(&["construct"], &[("CRITNLS_WORKERS", "lots")])), 2);
}

#[test]
fn failed_checks_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = critnls(&["--out", out, "resolvent-probe", "--lambdas", "0.02,0.03", "--grid-n", "64", "--grid-rmax", "60"], &[]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&tmp.path().join("resolvent-probe"));
    assert_eq!(m["passed"], false);
}

#[test]
fn flags_override_file_and_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    let file_out = tmp.path().join("from-file");
    std::fs::write(
        &cfg,
        format!("[run]\nout = {:?}\nworkers = 2\n[model]\neps = \"0.02\"\n[grid]\nn = 700\nr_max = 30000.0\n", file_out),
    )
    .unwrap();
    let env_out = tmp.path().join("from-env");
    let flag_out = tmp.path().join("from-flag");
    let c = cfg.to_str().unwrap();

    let o = critnls(&["--config", c, "construct"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = RunConfig::load(&file_out.join("construct/config.toml")).unwrap();
    assert_eq!((r.grid.n, r.run.workers, r.model.eps.as_str()), (700, 2, "0.02"));

    let o = critnls(&["--config", c, "construct"], &[("CRITNLS_OUT", env_out.to_str().unwrap()), ("CRITNLS_WORKERS", "1")]);
    assert_eq!(code(&o), 0);
    let r = RunConfig::load(&env_out.join("construct/config.toml")).unwrap();
    assert_eq!(r.run.workers, 1);
    assert_eq!(r.run.out, env_out);

    let o = critnls(
        &["--config", c, "--out", flag_out.to_str().unwrap(), "--workers", "3", "construct", "--eps", "0.01", "--grid-n", "900"],
        &[("CRITNLS_OUT", env_out.to_str().unwrap()), ("CRITNLS_WORKERS", "1")],
    );
    assert_eq!(code(&o), 0);
    let r = RunConfig::load(&flag_out.join("construct/config.toml")).unwrap();
    assert_eq!((r.grid.n, r.run.workers, r.model.eps.as_str()), (900, 3, "0.01"));
    assert_eq!(r.grid.r_max, 30000.0);
}

#[test]
fn resolved_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let mut args = vec!["--out", first.to_str().unwrap(), "construct", "--eps", "0.015"];
    args.extend(SMALL);
    assert_eq!(code(&critnls(&args, &[])), 0);
    let saved = first.join("construct/config.toml");
    let second = tmp.path().join("second");
    let o = critnls(&["--config", saved.to_str().unwrap(), "--out", second.to_str().unwrap(), "construct"], &[]);
    assert_eq!(code(&o), 0);
    let a = std::fs::read(first.join("construct/q_eps1.500000e-2.csv")).unwrap();
    let b = std::fs::read(second.join("construct/q_eps1.500000e-2.csv")).unwrap();
    assert!(a == b);
    let mut again = RunConfig::load(&second.join("construct/config.toml")).unwrap();
    again.run.out = first.clone();
    assert_eq!(again, RunConfig::load(&saved).unwrap());
}

#[test]
fn evolve_at_the_ground_state_refuses_classification() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let mut args = vec!["--out", out, "evolve", "--eps", "0.02", "--init", "scale:1.0", "--t-end", "0.05"];
    args.extend(SMALL);
    let o = critnls(&args, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tmp.path().join("evolve");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "hypothesis-not-met");
    assert!(v["mass_drift"].as_f64().unwrap() < 1e-8);
    let ts = std::fs::read_to_string(dir.join("timeseries.csv")).unwrap();
    assert_eq!(ts.lines().next().unwrap(), "t,mass,energy,K,virial,supgrad,L6norm");
    assert!(ts.lines().count() >= 2);
    assert!(dir.join("u_final.csv").exists());
}

#[test]
fn evolve_rejects_unreadable_initial_data() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let mut args = vec!["--out", out, "evolve", "--eps", "0.02", "--init", "/nonexistent/field.csv"];
    args.extend(SMALL);
    assert_eq!(code(&critnls(&args, &[])), 2);
    let mut args = vec!["--out", out, "evolve", "--eps", "0.02", "--init", "scale:big"];
    args.extend(SMALL);
    assert_eq!(code(&critnls(&args, &[])), 2);
}
