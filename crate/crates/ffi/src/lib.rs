//! C ABI over `critnls`: opaque grid and wave handles, integer status
//! codes, and a per-thread last-error message.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use critnls::construct::{solitary_wave, ConstructConfig, SolitaryWave, WaveSource};
use critnls::functionals::evaluate;
use critnls::profiles::{Nonlinearity, ProfileSet};
use critnls::radial::{make_grid, RadialGrid, Stretch};
use critnls::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CritnlsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoConvergence = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Sampling grid with its cached profiles.
pub struct CritnlsGrid {
    grid: Arc<RadialGrid>,
    profiles: ProfileSet,
}

/// A constructed solitary wave.
pub struct CritnlsWave {
    wave: SolitaryWave,
    scaled: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut v = msg.as_bytes().to_vec();
        v.retain(|b| *b != 0);
        v.push(0);
        *e.borrow_mut() = v;
    });
}

fn status_of(e: &Error) -> CritnlsStatus {
    match e {
        Error::Sizing(_)
        | Error::InvalidExponent(_)
        | Error::NonPositiveLambda(_)
        | Error::Assumption(_)
        | Error::Config(_)
        | Error::Unsupported(_)
        | Error::HypothesisNotMet(_)
        | Error::GridMismatch => CritnlsStatus::InvalidArgument,
        Error::NoConvergence { .. } | Error::BallExit(_) | Error::Divergence(_) => CritnlsStatus::NoConvergence,
        _ => CritnlsStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (CritnlsStatus, String)>) -> CritnlsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CritnlsStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            CritnlsStatus::Panic
        }
    }
}

fn lib<T>(r: critnls::Result<T>) -> Result<T, (CritnlsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (CritnlsStatus, String) {
    (CritnlsStatus::NullPointer, format!("{what} is null"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn critnls_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(c) => c,
        Err(_) => panic!("version string"),
    };
    V.as_ptr()
}

/// Copies the last error of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn critnls_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let n = msg.len().saturating_sub(1);
        if !buf.is_null() && len > 0 {
            let k = n.min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, k);
            *buf.add(k) = 0;
        }
        n
    })
}

/// Builds a sinh-stretched grid `r = scale·sinh(s)`; `scale ≤ 0` selects
/// the default.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn critnls_grid_new(n: usize, r_max: f64, scale: f64, out: *mut *mut CritnlsGrid) -> CritnlsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let stretch = if scale > 0.0 { Stretch::Geometric { scale } } else { Stretch::default() };
        let grid = lib(make_grid(n, r_max, stretch))?;
        let profiles = ProfileSet::new(&grid);
        *out = Box::into_raw(Box::new(CritnlsGrid { grid, profiles }));
        Ok(())
    })
}

/// # Safety
/// `grid` must come from [`critnls_grid_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn critnls_grid_free(grid: *mut CritnlsGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn critnls_grid_len(grid: *const CritnlsGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.grid.n())
}

unsafe fn copy_out(values: &[f64], out: *mut f64, len: usize) -> Result<(), (CritnlsStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    if len < values.len() {
        return Err((CritnlsStatus::BufferTooSmall, format!("need {} values, got room for {len}", values.len())));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

/// Copies the node radii into `out[0..len]`.
///
/// # Safety
/// `grid` must be a live handle; `out` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn critnls_grid_nodes(grid: *const CritnlsGrid, out: *mut f64, len: usize) -> CritnlsStatus {
    guard(|| {
        let g = grid.as_ref().ok_or_else(|| null("grid"))?;
        copy_out(g.grid.nodes(), out, len)
    })
}

/// Constructs `Q_ε` for `f(u) = sign·|u|^{p−1}u` on `grid`.
///
/// # Safety
/// `grid` must be a live handle; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn critnls_wave_construct(
    grid: *const CritnlsGrid,
    p: f64,
    sign: f64,
    eps: f64,
    out: *mut *mut CritnlsWave,
) -> CritnlsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let g = grid.as_ref().ok_or_else(|| null("grid"))?;
        let nl = lib(Nonlinearity::pure_power(p, sign))?;
        let (wave, src) = lib(solitary_wave(eps, &nl, &g.profiles, &ConstructConfig::default()))?;
        let scaled = matches!(src, WaveSource::Scaled { .. });
        *out = Box::into_raw(Box::new(CritnlsWave { wave, scaled }));
        Ok(())
    })
}

/// # Safety
/// `wave` must come from [`critnls_wave_construct`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn critnls_wave_free(wave: *mut CritnlsWave) {
    if !wave.is_null() {
        drop(Box::from_raw(wave));
    }
}

/// Writes `λ`, `ω = λ²` and whether the wave came from the scaling family.
///
/// # Safety
/// `wave` must be a live handle; each output may be null.
#[no_mangle]
pub unsafe extern "C" fn critnls_wave_scalars(
    wave: *const CritnlsWave,
    lambda: *mut f64,
    omega: *mut f64,
    scaled: *mut bool,
) -> CritnlsStatus {
    guard(|| {
        let w = wave.as_ref().ok_or_else(|| null("wave"))?;
        if let Some(l) = lambda.as_mut() {
            *l = w.wave.lambda;
        }
        if let Some(o) = omega.as_mut() {
            *o = w.wave.omega;
        }
        if let Some(s) = scaled.as_mut() {
            *s = w.scaled;
        }
        Ok(())
    })
}

/// Copies `Q` at the grid nodes into `out[0..len]`.
///
/// # Safety
/// `wave` must be a live handle; `out` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn critnls_wave_profile(wave: *const CritnlsWave, out: *mut f64, len: usize) -> CritnlsStatus {
    guard(|| {
        let w = wave.as_ref().ok_or_else(|| null("wave"))?;
        copy_out(w.wave.q.values(), out, len)
    })
}

/// Action `𝒮_{ε,ω}(Q)` and the Pohozaev residuals of the wave.
///
/// # Safety
/// `wave` must be a live handle; each output may be null.
#[no_mangle]
pub unsafe extern "C" fn critnls_wave_action(
    wave: *const CritnlsWave,
    action: *mut f64,
    pohozaev_k: *mut f64,
    pohozaev_k0: *mut f64,
) -> CritnlsStatus {
    guard(|| {
        let w = wave.as_ref().ok_or_else(|| null("wave"))?;
        let r = lib(evaluate(&w.wave.q, w.wave.eps, w.wave.omega, &w.wave.nl))?;
        if let Some(a) = action.as_mut() {
            *a = r.action;
        }
        if let Some(k) = pohozaev_k.as_mut() {
            *k = r.pohozaev_residual_k;
        }
        if let Some(k) = pohozaev_k0.as_mut() {
            *k = r.pohozaev_residual_k0;
        }
        Ok(())
    })
}
