use std::ffi::{c_char, CStr};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use critnls_ffi::*;

#[test]
fn construct_through_handles() {
    unsafe {
        let mut grid: *mut CritnlsGrid = ptr::null_mut();
        assert_eq!(critnls_grid_new(2000, 3.0e5, 0.0, &mut grid), CritnlsStatus::Ok);
        let n = critnls_grid_len(grid);
        assert_eq!(n, 2000);
        let mut r = vec![0.0; n];
        assert_eq!(critnls_grid_nodes(grid, r.as_mut_ptr(), n), CritnlsStatus::Ok);
        assert!(r.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(critnls_grid_nodes(grid, r.as_mut_ptr(), n - 1), CritnlsStatus::BufferTooSmall);

        let mut wave: *mut CritnlsWave = ptr::null_mut();
        assert_eq!(critnls_wave_construct(grid, 4.0, 1.0, 0.01, &mut wave), CritnlsStatus::Ok);
        let (mut lambda, mut omega, mut scaled) = (0.0, 0.0, true);
        assert_eq!(critnls_wave_scalars(wave, &mut lambda, &mut omega, &mut scaled), CritnlsStatus::Ok);
        assert!(!scaled);
        assert!((omega - lambda * lambda).abs() <= 1e-15 * omega);
        assert!((lambda / 0.01 - 3f64.sqrt() / 15.0).abs() < 0.01);
        let mut q = vec![0.0; n];
        assert_eq!(critnls_wave_profile(wave, q.as_mut_ptr(), n), CritnlsStatus::Ok);
        assert!(q[0] > 0.9 && q[0] < 1.0 && q[n - 1].abs() < 1e-6);
        let (mut s, mut pk, mut pk0) = (0.0, 1.0, 1.0);
        assert_eq!(critnls_wave_action(wave, &mut s, &mut pk, &mut pk0), CritnlsStatus::Ok);
        assert!(s > 0.0 && pk < 1e-8 && pk0 < 1e-8);
        critnls_wave_free(wave);
        critnls_grid_free(grid);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut grid: *mut CritnlsGrid = ptr::null_mut();
        assert_eq!(critnls_grid_new(3, 100.0, 0.0, &mut grid), CritnlsStatus::InvalidArgument);
        assert!(grid.is_null());
        let mut buf = [0 as c_char; 8];
        let full = critnls_last_error(buf.as_mut_ptr(), buf.len());
        assert!(full > 7);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_bytes().len(), 7);

        assert_eq!(critnls_grid_new(400, 500.0, 0.0, &mut grid), CritnlsStatus::Ok);
        let mut wave: *mut CritnlsWave = ptr::null_mut();
        assert_eq!(critnls_wave_construct(grid, 5.0, 1.0, 0.01, &mut wave), CritnlsStatus::InvalidArgument);
        assert!(wave.is_null());
        assert_eq!(critnls_wave_construct(ptr::null(), 4.0, 1.0, 0.01, &mut wave), CritnlsStatus::NullPointer);
        assert_eq!(critnls_wave_scalars(ptr::null(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()), CritnlsStatus::NullPointer);
        critnls_grid_free(grid);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_compiles_as_c() {
    let src = crate_dir().join("tests/c/smoke.c");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(crate_dir().join("include"))
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success()),
        Err(e) => eprintln!("no C compiler available: {e}"),
    }
}

#[test]
fn c_program_links_against_static_library() {
    let target = crate_dir().join("../../target");
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let lib = target.join(profile).join("libcritnls_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}", lib.display());
        return;
    }
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("critnls_smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-O1", "-I"])
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status();
    let Ok(status) = status else {
        eprintln!("no C compiler available");
        return;
    };
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let text = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{text}");
    assert!(text.contains("lambda/eps"), "{text}");
}
