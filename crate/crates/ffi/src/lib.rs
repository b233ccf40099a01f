//! C ABI over `rarewave`.
//!
//! Every function returns an `int32_t` status (`RW_OK` on success) and
//! writes results through out-pointers. Handles are opaque and owned by the
//! caller once returned; release them with the matching `*_free`. The
//! message of the last failure on the calling thread is available from
//! `rw_last_error`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rarewave::energy::{gronwall_verify, GronwallInstance};
use rarewave::gas::PolytropicGas;
use rarewave::harness::{execute, parse_config, RunConfig, RunResult};
use rarewave::riemann::{centered_fan, solve_riemann, RiemannProblem1D, State1D, WaveFan};
use rarewave::Error;

pub const RW_OK: i32 = 0;
pub const RW_ERR_NULL: i32 = 1;
pub const RW_ERR_CONFIG: i32 = 2;
pub const RW_ERR_DOMAIN: i32 = 3;
pub const RW_ERR_NUMERICAL: i32 = 4;
pub const RW_ERR_PRECONDITION: i32 = 5;
pub const RW_ERR_HYPOTHESIS: i32 = 6;
pub const RW_ERR_IO: i32 = 7;
pub const RW_ERR_UTF8: i32 = 8;
pub const RW_ERR_BUFFER: i32 = 9;
pub const RW_ERR_RANGE: i32 = 10;
pub const RW_ERR_PANIC: i32 = 11;

/// Parsed, validated run configuration.
pub struct RwConfig(RunConfig);

/// Result of one run with its analyses.
pub struct RwRun(RunResult);

/// Exact solution of a 1D Riemann problem.
pub struct RwWaveFan(WaveFan);

/// Per-window summary of a run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RwWindowStats {
    pub t: f64,
    pub kappa_over_t: f64,
    pub that1_plus_1: f64,
    pub that2: f64,
    pub chi: f64,
    pub zeta: f64,
    pub eta: f64,
    pub yring: f64,
    pub l_mu_min: f64,
    pub t_wbar_max: f64,
    pub lbar_wbar_max: f64,
    pub y_residual_l1: f64,
    pub z_residual_l1: f64,
    pub l_kappa_residual_l1: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::ConfigLine { .. } | Error::Config(_) => RW_ERR_CONFIG,
        Error::Domain(_) => RW_ERR_DOMAIN,
        Error::Precondition(_) | Error::GridMismatch(_) => RW_ERR_PRECONDITION,
        Error::Hypothesis { .. } => RW_ERR_HYPOTHESIS,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Format { .. } => RW_ERR_IO,
        _ => RW_ERR_NUMERICAL,
    }
}

fn fail(code: i32, msg: String) -> i32 {
    LAST_ERROR.with(|m| *m.borrow_mut() = msg);
    code
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), (i32, String)>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RW_OK,
        Ok(Err((code, msg))) => fail(code, msg),
        Err(_) => fail(RW_ERR_PANIC, "internal panic".into()),
    }
}

fn lib(e: Error) -> (i32, String) {
    (code_of(&e), e.to_string())
}

fn null() -> (i32, String) {
    (RW_ERR_NULL, "null pointer argument".into())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, (i32, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| (RW_ERR_UTF8, "argument is not UTF-8".into()))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), (i32, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

/// Copies `s` with a terminating NUL into `buf` of `len` bytes. `needed`,
/// if not null, receives the required size including the NUL.
unsafe fn copy_out(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), (i32, String)> {
    if !needed.is_null() {
        needed.write(s.len() + 1);
    }
    if buf.is_null() || len < s.len() + 1 {
        return Err((RW_ERR_BUFFER, format!("buffer needs {} bytes", s.len() + 1)));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    buf.add(s.len()).write(0);
    Ok(())
}

/// Copies the last error message of this thread into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable bytes or be null; `needed` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn rw_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> i32 {
    // Reports its own failures by code only, so the message survives a size query.
    let msg = LAST_ERROR.with(|m| m.borrow().clone());
    match copy_out(&msg, buf, len, needed) {
        Ok(()) => RW_OK,
        Err((code, _)) => code,
    }
}

/// Parses configuration text; empty text gives the defaults.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_config_parse(text_: *const c_char, out: *mut *mut RwConfig) -> i32 {
    guard(|| {
        let cfg = parse_config(text(text_)?).map_err(lib)?;
        put(out, Box::into_raw(Box::new(RwConfig(cfg))))
    })
}

/// # Safety
/// `cfg` must come from `rw_config_parse` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rw_config_free(cfg: *mut RwConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Executes a run without writing files.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_run_execute(cfg: *const RwConfig, out: *mut *mut RwRun) -> i32 {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(null)?;
        let res = execute(&cfg.0, None).map_err(lib)?;
        put(out, Box::into_raw(Box::new(RwRun(res))))
    })
}

/// # Safety
/// `run` must come from `rw_run_execute` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rw_run_free(run: *mut RwRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// `L1` error of the final row 0 against the exact fan, and the largest
/// variation across `x2`.
///
/// # Safety
/// `run` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_run_fan_error(run: *const RwRun, l1: *mut f64, x2_variation: *mut f64) -> i32 {
    guard(|| {
        let r = &run.as_ref().ok_or_else(null)?.0;
        put(l1, r.fan_l1_error)?;
        put(x2_variation, r.x2_variation)
    })
}

/// # Safety
/// `run` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_run_window_count(run: *const RwRun, count: *mut usize) -> i32 {
    guard(|| put(count, run.as_ref().ok_or_else(null)?.0.windows.len()))
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_run_window(run: *const RwRun, index: usize, out: *mut RwWindowStats) -> i32 {
    guard(|| {
        let r = &run.as_ref().ok_or_else(null)?.0;
        let w = r.windows.get(index).ok_or((RW_ERR_RANGE, format!("window {index} of {}", r.windows.len())))?;
        put(
            out,
            RwWindowStats {
                t: w.t,
                kappa_over_t: w.kappa_over_t,
                that1_plus_1: w.that1_plus_1,
                that2: w.that2,
                chi: w.chi,
                zeta: w.zeta,
                eta: w.eta,
                yring: w.yring,
                l_mu_min: w.signs.l_mu.0,
                t_wbar_max: w.signs.t_wbar.1,
                lbar_wbar_max: w.signs.lbar_wbar.1,
                y_residual_l1: w.y_residual.l1,
                z_residual_l1: w.z_residual.l1,
                l_kappa_residual_l1: w.l_kappa_residual.l1,
            },
        )
    })
}

/// The energy report as CSV.
///
/// # Safety
/// As for `rw_last_error`, and `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rw_run_energy_csv(run: *const RwRun, buf: *mut c_char, len: usize, needed: *mut usize) -> i32 {
    guard(|| copy_out(&run.as_ref().ok_or_else(null)?.0.energy.to_csv(), buf, len, needed))
}

/// The whole run result as JSON.
///
/// # Safety
/// As for `rw_run_energy_csv`.
#[no_mangle]
pub unsafe extern "C" fn rw_run_json(run: *const RwRun, buf: *mut c_char, len: usize, needed: *mut usize) -> i32 {
    guard(|| {
        let r = &run.as_ref().ok_or_else(null)?.0;
        let s = serde_json::to_string(r).map_err(|e| lib(e.into()))?;
        copy_out(&s, buf, len, needed)
    })
}

/// Solves the Riemann problem with states `(v, c)` on either side.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_riemann_solve(
    gamma: f64,
    k0: f64,
    v_left: f64,
    c_left: f64,
    v_right: f64,
    c_right: f64,
    out: *mut *mut RwWaveFan,
) -> i32 {
    guard(|| {
        let gas = PolytropicGas::new(gamma, k0).map_err(lib)?;
        let fan = solve_riemann(RiemannProblem1D { gas, left: State1D::new(v_left, c_left), right: State1D::new(v_right, c_right) })
            .map_err(lib)?;
        put(out, Box::into_raw(Box::new(RwWaveFan(fan))))
    })
}

/// # Safety
/// `fan` must come from `rw_riemann_solve` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rw_wave_fan_free(fan: *mut RwWaveFan) {
    if !fan.is_null() {
        drop(Box::from_raw(fan));
    }
}

/// State at `x / t = xi`.
///
/// # Safety
/// `fan` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_wave_fan_evaluate(fan: *const RwWaveFan, xi: f64, v: *mut f64, c: *mut f64) -> i32 {
    guard(|| {
        let s = fan.as_ref().ok_or_else(null)?.0.evaluate(xi);
        put(v, s.v)?;
        put(c, s.c)
    })
}

/// # Safety
/// As for `rw_run_energy_csv`, with a live `fan`.
#[no_mangle]
pub unsafe extern "C" fn rw_wave_fan_json(fan: *const RwWaveFan, buf: *mut c_char, len: usize, needed: *mut usize) -> i32 {
    guard(|| {
        let s = serde_json::to_string(&fan.as_ref().ok_or_else(null)?.0).map_err(|e| lib(e.into()))?;
        copy_out(&s, buf, len, needed)
    })
}

/// State of the centered rarefaction fan ending on `(v0, c0)` at `(x, t)`.
///
/// # Safety
/// Out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_centered_fan_state(
    gamma: f64,
    k0: f64,
    v0: f64,
    c0: f64,
    x: f64,
    t: f64,
    v: *mut f64,
    c: *mut f64,
) -> i32 {
    guard(|| {
        let gas = PolytropicGas::new(gamma, k0).map_err(lib)?;
        let s = centered_fan(gas, v0, c0).and_then(|f| f.state(x, t)).map_err(lib)?;
        put(v, s.v)?;
        put(c, s.c)
    })
}

/// Checks a Gronwall instance given as JSON. On success `max_ratio`
/// receives the largest ratio to the conclusion's bound and `pass` whether
/// the conclusion holds. A violated hypothesis returns `RW_ERR_HYPOTHESIS`.
///
/// # Safety
/// `json` must be a NUL-terminated string; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn rw_gronwall_verify(json: *const c_char, max_ratio: *mut f64, pass: *mut bool) -> i32 {
    guard(|| {
        let inst: GronwallInstance =
            serde_json::from_str(text(json)?).map_err(|e| (RW_ERR_CONFIG, format!("bad instance: {e}")))?;
        let v = gronwall_verify(&inst).map_err(lib)?;
        put(max_ratio, v.max_ratio)?;
        put(pass, v.pass)
    })
}
