//! C ABI over the `sealink` library.
//!
//! Scenarios live behind an opaque handle created by
//! [`sealink_scenario_new_default`] or [`sealink_scenario_from_config`] and
//! released with [`sealink_scenario_free`]. Every fallible call returns a
//! [`SealinkStatus`]; on failure the message is available from
//! [`sealink_last_error`] on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sealink::analysis::Analyzer;
use sealink::config::parse_config;
use sealink::model::Scenario;
use sealink::montecarlo::{self, Mode, TrialPlan};
use sealink::stats::Estimate;
use sealink::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SealinkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    NumericError = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SealinkMode {
    Distributional = 0,
    Positional = 1,
}

/// Analytic results at one operating point. Probabilities in [0, 1], rates in bit/s.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SealinkTheory {
    pub p_bd: f64,
    pub p_esd: f64,
    pub p_s: f64,
    pub c_bd: f64,
    pub c_esd: f64,
    pub c_s: f64,
}

/// A Monte Carlo estimate with its 95% half-width.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SealinkEstimate {
    pub value: f64,
    pub half_width: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SealinkMcResult {
    pub p_bd: SealinkEstimate,
    pub p_esd: SealinkEstimate,
    pub p_s: SealinkEstimate,
    pub c_bd: SealinkEstimate,
    pub c_esd: SealinkEstimate,
    pub c_s: SealinkEstimate,
    pub n_trials: u64,
}

/// Opaque scenario handle.
pub struct SealinkScenario {
    text: String,
    overrides: Vec<(String, String)>,
    scenario: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> SealinkStatus {
    match e {
        Error::InvalidArgument(_) => SealinkStatus::InvalidArgument,
        Error::Config { .. } | Error::Io { .. } => SealinkStatus::ConfigError,
        Error::Numeric(_) | Error::Domain(_) => SealinkStatus::NumericError,
    }
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), (SealinkStatus, String)>) -> SealinkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SealinkStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SealinkStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SealinkStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SealinkStatus, String) {
    (SealinkStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SealinkStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SealinkStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const SealinkScenario) -> Result<&'a SealinkScenario, (SealinkStatus, String)> {
    p.as_ref().ok_or_else(|| null("scenario"))
}

fn estimate(e: Estimate) -> SealinkEstimate {
    SealinkEstimate {
        value: e.value,
        half_width: e.half_width,
    }
}

/// A scenario with the reference parameter set. Never returns null.
#[no_mangle]
pub extern "C" fn sealink_scenario_new_default() -> *mut SealinkScenario {
    Box::into_raw(Box::new(SealinkScenario {
        text: String::new(),
        overrides: Vec::new(),
        scenario: Scenario::reference(),
    }))
}

/// Parses TOML configuration text. On success `*out` owns a new handle.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sealink_scenario_from_config(toml: *const c_char, out: *mut *mut SealinkScenario) -> SealinkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(toml, "toml")?;
        let cfg = parse_config(text, &[]).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SealinkScenario {
            text: text.to_string(),
            overrides: Vec::new(),
            scenario: cfg.scenario,
        }));
        Ok(())
    })
}

/// Sets one configuration key, e.g. `("scenario.tau", "8 dB")` or `("constellation.n_sats", "500")`.
/// The handle is unchanged if the result does not validate.
///
/// # Safety
/// `scenario` must come from this library; `key` and `value` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn sealink_scenario_set(
    scenario: *mut SealinkScenario,
    key: *const c_char,
    value: *const c_char,
) -> SealinkStatus {
    guard(|| {
        let h = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        let key = read_str(key, "key")?;
        let value = read_str(value, "value")?;
        let mut overrides = h.overrides.clone();
        overrides.push((key.to_string(), value.to_string()));
        let cfg = parse_config(&h.text, &overrides).map_err(lib_err)?;
        h.overrides = overrides;
        h.scenario = cfg.scenario;
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `scenario` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sealink_scenario_free(scenario: *mut SealinkScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Threshold of the scenario in dB.
///
/// # Safety
/// `scenario` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sealink_scenario_tau_db(scenario: *const SealinkScenario, out: *mut f64) -> SealinkStatus {
    guard(|| {
        let h = handle(scenario)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = h.scenario.tau_db();
        Ok(())
    })
}

/// Analytic success probabilities and capacities.
///
/// # Safety
/// `scenario` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sealink_theory(scenario: *const SealinkScenario, out: *mut SealinkTheory) -> SealinkStatus {
    guard(|| {
        let h = handle(scenario)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = Analyzer::new(h.scenario).and_then(|a| a.report()).map_err(lib_err)?;
        *out = SealinkTheory {
            p_bd: r.p_bd,
            p_esd: r.p_esd,
            p_s: r.p_s,
            c_bd: r.c_bd,
            c_esd: r.c_esd,
            c_s: r.c_s,
        };
        Ok(())
    })
}

/// End-to-end success probability only; cheaper than [`sealink_theory`].
///
/// # Safety
/// `scenario` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sealink_p_s(scenario: *const SealinkScenario, out: *mut f64) -> SealinkStatus {
    guard(|| {
        let h = handle(scenario)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = Analyzer::new(h.scenario).and_then(|a| a.p_s()).map_err(lib_err)?;
        Ok(())
    })
}

/// Average rate capacity in bit/s; cheaper than [`sealink_theory`].
///
/// # Safety
/// `scenario` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sealink_capacity(scenario: *const SealinkScenario, out: *mut f64) -> SealinkStatus {
    guard(|| {
        let h = handle(scenario)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = Analyzer::new(h.scenario).and_then(|a| a.c_s()).map_err(lib_err)?;
        Ok(())
    })
}

/// Monte Carlo estimate. Results depend only on `(scenario, mode, n_trials, seed)`.
///
/// # Safety
/// `scenario` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sealink_mc_run(
    scenario: *const SealinkScenario,
    mode: SealinkMode,
    n_trials: u64,
    seed: u64,
    out: *mut SealinkMcResult,
) -> SealinkStatus {
    guard(|| {
        let h = handle(scenario)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let mode = match mode {
            SealinkMode::Distributional => Mode::Distributional,
            SealinkMode::Positional => Mode::Positional,
        };
        let row = TrialPlan::new(mode, n_trials, seed, h.scenario)
            .and_then(|p| montecarlo::run(&p))
            .map_err(lib_err)?;
        *out = SealinkMcResult {
            p_bd: estimate(row.p_bd),
            p_esd: estimate(row.p_esd),
            p_s: estimate(row.p_s),
            c_bd: estimate(row.c_bd),
            c_esd: estimate(row.c_esd),
            c_s: estimate(row.c_s),
            n_trials: row.n_trials,
        };
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL, so
/// a call with `len = 0` sizes the buffer.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null with `len = 0`.
#[no_mangle]
pub unsafe extern "C" fn sealink_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sealink_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
