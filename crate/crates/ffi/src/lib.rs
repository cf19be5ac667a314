//! C ABI for the approachability library.
//!
//! Every function returns an [`FtrlStatus`]; on failure the message is
//! available from [`ftrl_last_error`] on the same thread. Configs and
//! experiments are opaque handles created by [`ftrl_config_from_json`] and
//! [`ftrl_experiment_run`] and released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ftrl_approach::global_cost;
use ftrl_approach::harness::experiment::run_experiment;
use ftrl_approach::harness::output::write_outputs;
use ftrl_approach::harness::{Experiment, ExperimentConfig};
use ftrl_approach::solvers::weighted::min_weighted_lp_norm;
use ftrl_approach::Error;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtrlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Config = 3,
    /// An iterative solver stopped short of its tolerance.
    Solver = 4,
    Unsupported = 5,
    Io = 6,
    /// A run stopped on the oracle slack limit.
    SlackLimit = 7,
    /// A Rust panic was caught at the boundary.
    Internal = 8,
}

impl From<&Error> for FtrlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Input(_) => FtrlStatus::InvalidInput,
            Error::Solver { .. } | Error::Infeasible | Error::Unbounded => FtrlStatus::Solver,
            Error::Capability(_) => FtrlStatus::Unsupported,
            Error::SlackLimit { .. } => FtrlStatus::SlackLimit,
            Error::Config(_) => FtrlStatus::Config,
            Error::Io(_) => FtrlStatus::Io,
        }
    }
}

/// Opaque experiment configuration.
pub struct FtrlConfig(ExperimentConfig);

/// Opaque finished experiment.
pub struct FtrlExperiment(Experiment);

/// Per-seed summary of a finished experiment.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct FtrlRecord {
    pub seed: u64,
    pub final_support: f64,
    pub final_bound: f64,
    pub high_prob_bound: f64,
    pub regret: f64,
    pub slack_mean: f64,
    pub cuts_added: usize,
    /// Nonzero when every bound held on this run.
    pub guarantee_holds: i32,
    /// Nonzero when the run stopped on the slack limit.
    pub aborted: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), (FtrlStatus, String)>) -> FtrlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FtrlStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FtrlStatus::Internal
        }
    }
}

fn lib(e: Error) -> (FtrlStatus, String) {
    ((&e).into(), e.to_string())
}

fn null(what: &str) -> (FtrlStatus, String) {
    (FtrlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (FtrlStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (FtrlStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], (FtrlStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ftrl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ftrl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a JSON experiment config.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftrl_config_from_json(json: *const c_char, out: *mut *mut FtrlConfig) -> FtrlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = ExperimentConfig::from_json(str_arg(json, "json")?).map_err(lib)?;
        *out = Box::into_raw(Box::new(FtrlConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from [`ftrl_config_from_json`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ftrl_config_free(cfg: *mut FtrlConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs every seed of the config. Runs that stop on the slack limit are
/// reported per record, not as a failed call.
///
/// # Safety
/// `cfg` must be a live config handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftrl_experiment_run(cfg: *const FtrlConfig, out: *mut *mut FtrlExperiment) -> FtrlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let exp = run_experiment(&cfg.0).map_err(lib)?;
        *out = Box::into_raw(Box::new(FtrlExperiment(exp)));
        Ok(())
    })
}

/// Number of per-seed records.
///
/// # Safety
/// `exp` must be a live experiment handle or null.
#[no_mangle]
pub unsafe extern "C" fn ftrl_experiment_len(exp: *const FtrlExperiment) -> usize {
    exp.as_ref().map_or(0, |e| e.0.outcomes.len())
}

/// Copies record `i` into `out`.
///
/// # Safety
/// `exp` must be a live experiment handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ftrl_experiment_record(
    exp: *const FtrlExperiment,
    i: usize,
    out: *mut FtrlRecord,
) -> FtrlStatus {
    guard(|| {
        let exp = exp.as_ref().ok_or_else(|| null("exp"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let o = exp.0.outcomes.get(i).ok_or_else(|| {
            (FtrlStatus::InvalidInput, format!("record {i} out of range ({} records)", exp.0.outcomes.len()))
        })?;
        let r = &o.record;
        *out = FtrlRecord {
            seed: r.seed,
            final_support: r.final_support,
            final_bound: r.final_bound,
            high_prob_bound: r.high_prob_bound,
            regret: r.regret,
            slack_mean: r.slack_mean,
            cuts_added: r.cuts_added,
            guarantee_holds: r.guarantee_holds as i32,
            aborted: r.aborted.is_some() as i32,
        };
        Ok(())
    })
}

/// Writes `steps.csv` and `summary.json` into `dir`.
///
/// # Safety
/// `exp` must be a live experiment handle and `dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn ftrl_experiment_write(exp: *const FtrlExperiment, dir: *const c_char) -> FtrlStatus {
    guard(|| {
        let exp = exp.as_ref().ok_or_else(|| null("exp"))?;
        let dir = str_arg(dir, "dir")?;
        write_outputs(Path::new(dir), &exp.0).map_err(lib)?;
        Ok(())
    })
}

/// # Safety
/// `exp` must come from [`ftrl_experiment_run`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ftrl_experiment_free(exp: *mut FtrlExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// `min_{a∈Δ} ‖a ⊙ y‖_p` for `y ≥ 0`; pass `INFINITY` for p = ∞. The
/// minimizing weights go to `weights` (length `n`) when it is not null.
///
/// # Safety
/// `y` must point to `n` reals, `phi` must be valid, and `weights` must be
/// null or point to `n` writable reals.
#[no_mangle]
pub unsafe extern "C" fn ftrl_min_weighted_lp_norm(
    y: *const f64,
    n: usize,
    p: f64,
    phi: *mut f64,
    weights: *mut f64,
) -> FtrlStatus {
    guard(|| {
        let y = slice_arg(y, n, "y")?;
        let phi = phi.as_mut().ok_or_else(|| null("phi"))?;
        let (v, a) = min_weighted_lp_norm(y, p).map_err(lib)?;
        *phi = v;
        if !weights.is_null() {
            std::slice::from_raw_parts_mut(weights, n).copy_from_slice(&a);
        }
        Ok(())
    })
}

/// Distance from `(y, y')` (length `2d`) to the global-cost cone for the
/// ℓp cost, in the matching composite norm.
///
/// # Safety
/// `y` must point to `2d` reals and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ftrl_global_cost_distance(y: *const f64, d: usize, p: f64, out: *mut f64) -> FtrlStatus {
    guard(|| {
        let y = slice_arg(y, 2 * d, "y")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = global_cost::cone_distance(y, p).map_err(lib)?;
        Ok(())
    })
}
