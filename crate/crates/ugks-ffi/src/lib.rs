//! C ABI over the `ugks` solver.
//!
//! Handles are opaque; every call returns a [`UgksStatus`] and records a
//! human-readable message retrievable with [`ugks_last_error_message`] on the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ugks::bench::{self, metrics, Overrides, Scenario};
use ugks::coeffs::{self, PhysicsConstants, TimestepMode};
use ugks::solver::Solver;
use ugks::Error;

/// Status codes; the numeric values of 2–4 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UgksStatus {
    Ok = 0,
    NullPointer = 1,
    ConfigError = 2,
    SolverFailure = 3,
    InvariantViolation = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque solver handle.
pub struct UgksSolver {
    scenario: Scenario,
    solver: Solver,
}

/// Summary of one time step.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct UgksStepInfo {
    pub dt: f64,
    pub time: f64,
    pub sweeps: u32,
    pub min_rho: f64,
    pub max_residual: f64,
    pub err_ap: f64,
}

/// Interface kernel values at one (Δt, σ, β).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct UgksKernels {
    pub alpha: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub nu: f64,
    pub kappa: f64,
    pub b_over_alpha: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> UgksStatus {
    match e.exit_code() {
        2 => UgksStatus::ConfigError,
        4 => UgksStatus::InvariantViolation,
        _ => UgksStatus::SolverFailure,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (UgksStatus, String)>) -> UgksStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            UgksStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            UgksStatus::Panic
        }
    }
}

fn lift(e: Error) -> (UgksStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (UgksStatus, String) {
    (UgksStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (UgksStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (UgksStatus::ConfigError, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a>(h: *mut UgksSolver) -> Result<&'a mut UgksSolver, (UgksStatus, String)> {
    h.as_mut().ok_or_else(|| null("solver handle"))
}

fn create(ov: Overrides, out: *mut *mut UgksSolver) -> Result<(), (UgksStatus, String)> {
    let scenario = ov.resolve().map_err(lift)?;
    let solver = bench::build_solver(&scenario).map_err(lift)?;
    let h = Box::new(UgksSolver { scenario, solver });
    unsafe { *out = Box::into_raw(h) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ugks_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ugks_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Create a solver for a registered scenario. `preset` may be null ("desk").
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ugks_solver_create(
    scenario: *const c_char,
    preset: *const c_char,
    out: *mut *mut UgksSolver,
) -> UgksStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let ov = Overrides {
            scenario: Some(read_str(scenario, "scenario")?.to_string()),
            preset: if preset.is_null() { None } else { Some(read_str(preset, "preset")?.to_string()) },
            ..Default::default()
        };
        create(ov, out)
    })
}

/// Create a solver from configuration text in the CLI's TOML format.
///
/// # Safety
/// `config` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ugks_solver_create_from_config(config: *const c_char, out: *mut *mut UgksSolver) -> UgksStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let ov = Overrides::from_toml(read_str(config, "config")?).map_err(lift)?;
        create(ov, out)
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `h` must come from a create call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ugks_solver_free(h: *mut UgksSolver) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Grid dimensions.
///
/// # Safety
/// `h` must be a live handle; `nx`, `ny` writable.
#[no_mangle]
pub unsafe extern "C" fn ugks_solver_dims(h: *mut UgksSolver, nx: *mut usize, ny: *mut usize) -> UgksStatus {
    guard(|| {
        let s = handle(h)?;
        if nx.is_null() || ny.is_null() {
            return Err(null("nx/ny"));
        }
        *nx = s.solver.grid.nx;
        *ny = s.solver.grid.ny;
        Ok(())
    })
}

/// Current simulation time.
///
/// # Safety
/// `h` must be a live handle; `t` writable.
#[no_mangle]
pub unsafe extern "C" fn ugks_solver_time(h: *mut UgksSolver, t: *mut f64) -> UgksStatus {
    guard(|| {
        let s = handle(h)?;
        if t.is_null() {
            return Err(null("t"));
        }
        *t = s.solver.time;
        Ok(())
    })
}

/// The scenario's step: its Δt law, capped by the positivity bound when
/// limiting is on.
///
/// # Safety
/// `h` must be a live handle; `dt` writable.
#[no_mangle]
pub unsafe extern "C" fn ugks_solver_nominal_dt(h: *mut UgksSolver, dt: *mut f64) -> UgksStatus {
    guard(|| {
        let s = handle(h)?;
        if dt.is_null() {
            return Err(null("dt"));
        }
        *dt = step_size(s).map_err(lift)?;
        Ok(())
    })
}

fn step_size(s: &UgksSolver) -> ugks::Result<f64> {
    let dt = bench::nominal_dt(&s.scenario, &s.solver);
    if s.scenario.positivity {
        s.solver.max_timestep(TimestepMode::PpStrict, dt)
    } else {
        Ok(dt)
    }
}

fn step(s: &mut UgksSolver, dt: f64) -> ugks::Result<UgksStepInfo> {
    let it = s.solver.advance(dt)?;
    Ok(UgksStepInfo {
        dt,
        time: s.solver.time,
        sweeps: it.sweeps as u32,
        min_rho: it.min_rho,
        max_residual: it.max_residual,
        err_ap: metrics::err_ap(&s.solver.state),
    })
}

/// Advance one step of size `dt`. `info` may be null.
///
/// # Safety
/// `h` must be a live handle; `info` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ugks_solver_step(h: *mut UgksSolver, dt: f64, info: *mut UgksStepInfo) -> UgksStatus {
    guard(|| {
        let s = handle(h)?;
        let r = step(s, dt).map_err(lift)?;
        if !info.is_null() {
            *info = r;
        }
        Ok(())
    })
}

/// Advance with the scenario's step control until `t_end`, landing on it
/// exactly. `info` (may be null) receives the last step.
///
/// # Safety
/// `h` must be a live handle; `info` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ugks_solver_advance_to(h: *mut UgksSolver, t_end: f64, info: *mut UgksStepInfo) -> UgksStatus {
    guard(|| {
        let s = handle(h)?;
        if !t_end.is_finite() {
            return Err((UgksStatus::ConfigError, format!("t_end {t_end} is not finite")));
        }
        let mut last = UgksStepInfo { time: s.solver.time, ..Default::default() };
        while s.solver.time < t_end * (1.0 - 1e-12) {
            let mut dt = step_size(s).map_err(lift)?;
            let remaining = t_end - s.solver.time;
            let hit = dt >= remaining * (1.0 - 1e-10);
            if hit {
                dt = remaining;
            }
            last = step(s, dt).map_err(lift)?;
            if hit {
                s.solver.time = t_end;
                last.time = t_end;
            }
        }
        if !info.is_null() {
            *info = last;
        }
        Ok(())
    })
}

unsafe fn copy_field(h: *mut UgksSolver, buf: *mut f64, len: usize, pick: fn(&Solver) -> &[f64]) -> UgksStatus {
    guard(|| {
        let s = handle(h)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let field = metrics::interior(&s.solver.grid, pick(&s.solver));
        if len < field.len() {
            return Err((UgksStatus::BufferTooSmall, format!("buffer holds {len} values, need {}", field.len())));
        }
        ptr::copy_nonoverlapping(field.as_ptr(), buf, field.len());
        Ok(())
    })
}

/// Copy the radiation energy density ρ, row-major with x fastest, into `buf`
/// (at least nx·ny values).
///
/// # Safety
/// `h` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ugks_solver_copy_rho(h: *mut UgksSolver, buf: *mut f64, len: usize) -> UgksStatus {
    copy_field(h, buf, len, |s| &s.state.rho)
}

/// Copy the material temperature, same layout as [`ugks_solver_copy_rho`].
///
/// # Safety
/// `h` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ugks_solver_copy_temperature(h: *mut UgksSolver, buf: *mut f64, len: usize) -> UgksStatus {
    copy_field(h, buf, len, |s| &s.state.temp)
}

/// Evaluate the interface kernels for constants (a, c, ε).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ugks_kernels(
    dt: f64,
    sigma: f64,
    beta: f64,
    a: f64,
    c: f64,
    eps: f64,
    out: *mut UgksKernels,
) -> UgksStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let k = PhysicsConstants { a, c, eps };
        k.validate().map_err(lift)?;
        if !(dt > 0.0 && sigma >= 0.0 && beta >= 0.0) {
            return Err((UgksStatus::ConfigError, format!("need dt > 0, sigma >= 0, beta >= 0 (got {dt}, {sigma}, {beta})")));
        }
        let co = coeffs::ugks_kernels(dt, sigma, beta, &k);
        *out = UgksKernels {
            alpha: co.alpha,
            b: co.b,
            c: co.cc,
            d: co.d,
            nu: co.nu,
            kappa: co.kappa,
            b_over_alpha: co.b_over_alpha,
        };
        Ok(())
    })
}
