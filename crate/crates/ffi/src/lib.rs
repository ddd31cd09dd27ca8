//! C interface for the bellwave library.
//!
//! The contract lives in `include/bellwave.h`, which is committed and kept
//! in lockstep with this file by a test. Conventions:
//!
//! * Handles (`bw_model`, `bw_trajectory`, `bw_ensemble`) are opaque; free
//!   them with the matching `*_free`, which tolerates null.
//! * Every fallible call returns a [`bw_status`]; out-parameters are only
//!   written on `BW_OK`.
//! * Density matrices cross the boundary as 32 doubles: row-major 4×4,
//!   each entry an interleaved (re, im) pair.
//! * Panics never unwind across the boundary — they surface as
//!   `BW_ERR_PANIC`.

use bellwave::ensemble::{run_ensemble, EnsembleError, EnsembleOptions, EnsembleResult};
use bellwave::lindblad::{evolve, DensityMatrix, LindbladError, StateError};
use bellwave::measures::{concurrence, ClassifyThresholds};
use bellwave::model::{build_model, Parity, WaveguideModel};
use bellwave::qmat::{CMatrix, C64};
use bellwave::trajectories::{simulate_trajectory, Channel, TrajectoryError, TrajectoryRecord, UnravelingMode};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result code for every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(non_camel_case_types, clippy::upper_case_acronyms)]
pub enum bw_status {
    BW_OK = 0,
    BW_ERR_NULL = 1,
    BW_ERR_BAD_PARAM = 2,
    BW_ERR_BAD_STATE = 3,
    BW_ERR_STEP_TOO_LARGE = 4,
    BW_ERR_POSITIVITY_LOST = 5,
    BW_ERR_NUMERIC = 6,
    BW_ERR_EMPTY = 7,
    BW_ERR_OUT_OF_RANGE = 8,
    BW_ERR_PANIC = 9,
}

use bw_status::*;

/// Opaque model handle.
#[allow(non_camel_case_types)]
pub struct bw_model(WaveguideModel);

/// Opaque single-trajectory handle.
#[allow(non_camel_case_types)]
pub struct bw_trajectory(TrajectoryRecord);

/// Opaque ensemble handle.
#[allow(non_camel_case_types)]
pub struct bw_ensemble(EnsembleResult);

fn status_of_trajectory(e: &TrajectoryError) -> bw_status {
    match e {
        TrajectoryError::StepTooLarge { .. } | TrajectoryError::DtTooLarge { .. } => {
            BW_ERR_STEP_TOO_LARGE
        }
        TrajectoryError::PositivityLost { .. } => BW_ERR_POSITIVITY_LOST,
        TrajectoryError::Numeric(_) => BW_ERR_NUMERIC,
        TrajectoryError::State(_) => BW_ERR_BAD_STATE,
    }
}

fn status_of_lindblad(e: &LindbladError) -> bw_status {
    match e {
        LindbladError::StepTooLarge { .. } => BW_ERR_STEP_TOO_LARGE,
        LindbladError::PositivityLost { .. } => BW_ERR_POSITIVITY_LOST,
        LindbladError::State(_) => BW_ERR_BAD_STATE,
        LindbladError::Numeric(_) => BW_ERR_NUMERIC,
    }
}

fn status_of_ensemble(e: &EnsembleError) -> bw_status {
    match e {
        EnsembleError::Trajectory { source, .. } => status_of_trajectory(source),
        EnsembleError::Empty => BW_ERR_EMPTY,
        _ => BW_ERR_NUMERIC,
    }
}

/// Runs `body` with panics converted to `BW_ERR_PANIC`.
fn guarded(body: impl FnOnce() -> bw_status) -> bw_status {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(BW_ERR_PANIC)
}

/// Reads a density matrix from 32 interleaved doubles.
///
/// # Safety
/// `ptr` must point to at least 32 readable doubles.
unsafe fn density_from_raw(ptr: *const f64) -> Result<DensityMatrix, StateError> {
    let raw = std::slice::from_raw_parts(ptr, 32);
    let mut m = CMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            let k = 2 * (4 * i + j);
            m.set(i, j, C64::new(raw[k], raw[k + 1]));
        }
    }
    DensityMatrix::from_matrix(m)
}

/// Writes a density matrix into 32 interleaved doubles.
///
/// # Safety
/// `ptr` must point to at least 32 writable doubles.
unsafe fn density_to_raw(rho: &DensityMatrix, ptr: *mut f64) {
    let out = std::slice::from_raw_parts_mut(ptr, 32);
    for i in 0..4 {
        for j in 0..4 {
            let z = rho.entry(i, j);
            let k = 2 * (4 * i + j);
            out[k] = z.re;
            out[k + 1] = z.im;
        }
    }
}

fn parity_from(code: i32) -> Option<Parity> {
    match code {
        0 => Some(Parity::Even),
        1 => Some(Parity::Odd),
        _ => None,
    }
}

fn unraveling_from(code: i32) -> Option<UnravelingMode> {
    match code {
        0 => Some(UnravelingMode::Jump),
        1 => Some(UnravelingMode::Homodyne),
        _ => None,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static name for a status code ("ok", "null_pointer", ...).
#[no_mangle]
pub extern "C" fn bw_status_name(status: bw_status) -> *const c_char {
    let name: &'static str = match status {
        BW_OK => "ok\0",
        BW_ERR_NULL => "null_pointer\0",
        BW_ERR_BAD_PARAM => "bad_parameter\0",
        BW_ERR_BAD_STATE => "bad_state\0",
        BW_ERR_STEP_TOO_LARGE => "step_too_large\0",
        BW_ERR_POSITIVITY_LOST => "positivity_lost\0",
        BW_ERR_NUMERIC => "numeric_failure\0",
        BW_ERR_EMPTY => "empty_batch\0",
        BW_ERR_OUT_OF_RANGE => "out_of_range\0",
        BW_ERR_PANIC => "panic\0",
    };
    name.as_ptr() as *const c_char
}

/// Builds a model handle. `parity` is 0 (even) or 1 (odd); efficiencies
/// must lie in [0, 1].
///
/// # Safety
/// `out` must be a valid pointer; on `BW_OK` it receives a handle owned by
/// the caller, to be released with `bw_model_free`.
#[no_mangle]
pub unsafe extern "C" fn bw_model_new(
    gamma: f64,
    omega_tilde: f64,
    parity: i32,
    eta_l: f64,
    eta_r: f64,
    out: *mut *mut bw_model,
) -> bw_status {
    guarded(|| {
        if out.is_null() {
            return BW_ERR_NULL;
        }
        let Some(parity) = parity_from(parity) else {
            return BW_ERR_BAD_PARAM;
        };
        match build_model(gamma, omega_tilde, parity, eta_l, eta_r) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(bw_model(model)));
                BW_OK
            }
            Err(_) => BW_ERR_BAD_PARAM,
        }
    })
}

/// Releases a model handle; null is a no-op.
///
/// # Safety
/// `model` must be null or a handle from `bw_model_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_model_free(model: *mut bw_model) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Concurrence of a two-qubit density matrix (32 interleaved doubles).
///
/// # Safety
/// `rho` must point to 32 readable doubles and `out` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn bw_concurrence(rho: *const f64, out: *mut f64) -> bw_status {
    guarded(|| {
        if rho.is_null() || out.is_null() {
            return BW_ERR_NULL;
        }
        let state = match density_from_raw(rho) {
            Ok(s) => s,
            Err(_) => return BW_ERR_BAD_STATE,
        };
        match concurrence(&state) {
            Ok(c) => {
                *out = c;
                BW_OK
            }
            Err(_) => BW_ERR_NUMERIC,
        }
    })
}

/// Solves the unconditioned master equation from `rho0`, writing the
/// concurrence at the `round(t_max/dt) + 1` grid points into
/// `concurrence_out` (capacity `capacity`; the count actually written goes
/// to `written`). Times are in units of `T1 = 1/gamma`.
///
/// # Safety
/// `model` must be a live handle, `rho0` 32 readable doubles,
/// `concurrence_out` writable for `capacity` doubles, `written` writable.
#[no_mangle]
pub unsafe extern "C" fn bw_lindblad_evolve(
    model: *const bw_model,
    rho0: *const f64,
    dt: f64,
    t_max: f64,
    concurrence_out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> bw_status {
    guarded(|| {
        if model.is_null() || rho0.is_null() || concurrence_out.is_null() || written.is_null() {
            return BW_ERR_NULL;
        }
        let state = match density_from_raw(rho0) {
            Ok(s) => s,
            Err(_) => return BW_ERR_BAD_STATE,
        };
        let flow = match evolve(&(*model).0, &state, dt, t_max) {
            Ok(f) => f,
            Err(e) => return status_of_lindblad(&e),
        };
        if flow.len() > capacity {
            return BW_ERR_OUT_OF_RANGE;
        }
        let out = std::slice::from_raw_parts_mut(concurrence_out, flow.len());
        for (slot, (_, rho)) in out.iter_mut().zip(&flow) {
            match concurrence(rho) {
                Ok(c) => *slot = c,
                Err(_) => return BW_ERR_NUMERIC,
            }
        }
        *written = flow.len();
        BW_OK
    })
}

/// Simulates one conditioned trajectory. `mode` is 0 (photon counting) or
/// 1 (homodyne); times in units of `T1`.
///
/// # Safety
/// `model` must be a live handle, `rho0` 32 readable doubles, `out` a valid
/// pointer receiving (on `BW_OK`) a handle for `bw_trajectory_free`.
#[no_mangle]
pub unsafe extern "C" fn bw_trajectory_run(
    model: *const bw_model,
    rho0: *const f64,
    mode: i32,
    dt: f64,
    t_max: f64,
    seed: u64,
    out: *mut *mut bw_trajectory,
) -> bw_status {
    guarded(|| {
        if model.is_null() || rho0.is_null() || out.is_null() {
            return BW_ERR_NULL;
        }
        let Some(mode) = unraveling_from(mode) else {
            return BW_ERR_BAD_PARAM;
        };
        let state = match density_from_raw(rho0) {
            Ok(s) => s,
            Err(_) => return BW_ERR_BAD_STATE,
        };
        match simulate_trajectory(&(*model).0, &state, mode, dt, t_max, seed, true) {
            Ok(record) => {
                *out = Box::into_raw(Box::new(bw_trajectory(record)));
                BW_OK
            }
            Err(e) => status_of_trajectory(&e),
        }
    })
}

/// Releases a trajectory handle; null is a no-op.
///
/// # Safety
/// `traj` must be null or a handle from `bw_trajectory_run` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_trajectory_free(traj: *mut bw_trajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of grid points in the record (0 for null).
///
/// # Safety
/// `traj` must be null or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn bw_trajectory_len(traj: *const bw_trajectory) -> usize {
    if traj.is_null() {
        0
    } else {
        (&(*traj).0).times.len()
    }
}

/// Grid time of point `i`.
///
/// # Safety
/// `traj` must be a live handle, `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn bw_trajectory_time(
    traj: *const bw_trajectory,
    i: usize,
    out: *mut f64,
) -> bw_status {
    guarded(|| {
        if traj.is_null() || out.is_null() {
            return BW_ERR_NULL;
        }
        match (&(*traj).0).times.get(i) {
            Some(t) => {
                *out = *t;
                BW_OK
            }
            None => BW_ERR_OUT_OF_RANGE,
        }
    })
}

/// Concurrence of the conditioned state at grid point `i`.
///
/// # Safety
/// `traj` must be a live handle, `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn bw_trajectory_concurrence(
    traj: *const bw_trajectory,
    i: usize,
    out: *mut f64,
) -> bw_status {
    guarded(|| {
        if traj.is_null() || out.is_null() {
            return BW_ERR_NULL;
        }
        match (&(*traj).0).observables.get(i) {
            Some(obs) => {
                *out = obs.concurrence;
                BW_OK
            }
            None => BW_ERR_OUT_OF_RANGE,
        }
    })
}

/// Conditioned state at grid point `i`, written as 32 interleaved doubles.
///
/// # Safety
/// `traj` must be a live handle, `rho_out` writable for 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn bw_trajectory_state(
    traj: *const bw_trajectory,
    i: usize,
    rho_out: *mut f64,
) -> bw_status {
    guarded(|| {
        if traj.is_null() || rho_out.is_null() {
            return BW_ERR_NULL;
        }
        let states = match &(*traj).0.states {
            Some(s) => s,
            None => return BW_ERR_EMPTY,
        };
        match states.get(i) {
            Some(rho) => {
                density_to_raw(rho, rho_out);
                BW_OK
            }
            None => BW_ERR_OUT_OF_RANGE,
        }
    })
}

/// Number of detector clicks in the record (0 for null or homodyne mode).
///
/// # Safety
/// `traj` must be null or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn bw_trajectory_click_count(traj: *const bw_trajectory) -> usize {
    if traj.is_null() {
        0
    } else {
        (&(*traj).0).clicks.len()
    }
}

/// Click `i`: its grid time and channel (0 left, 1 right).
///
/// # Safety
/// `traj` must be a live handle; `t_out` and `channel_out` writable.
#[no_mangle]
pub unsafe extern "C" fn bw_trajectory_click(
    traj: *const bw_trajectory,
    i: usize,
    t_out: *mut f64,
    channel_out: *mut i32,
) -> bw_status {
    guarded(|| {
        if traj.is_null() || t_out.is_null() || channel_out.is_null() {
            return BW_ERR_NULL;
        }
        match (&(*traj).0).clicks.get(i) {
            Some(click) => {
                *t_out = click.t;
                *channel_out = match click.channel {
                    Channel::Left => 0,
                    Channel::Right => 1,
                };
                BW_OK
            }
            None => BW_ERR_OUT_OF_RANGE,
        }
    })
}

/// Runs `n_trajectories` independent trajectories (seeded from
/// `master_seed`) and aggregates them. `workers = 0` uses all cores; the
/// result is identical for any worker count.
///
/// # Safety
/// `model` must be a live handle, `rho0` 32 readable doubles, `out` a valid
/// pointer receiving (on `BW_OK`) a handle for `bw_ensemble_free`.
#[no_mangle]
pub unsafe extern "C" fn bw_ensemble_run(
    model: *const bw_model,
    rho0: *const f64,
    mode: i32,
    dt: f64,
    t_max: f64,
    n_trajectories: usize,
    master_seed: u64,
    workers: usize,
    out: *mut *mut bw_ensemble,
) -> bw_status {
    guarded(|| {
        if model.is_null() || rho0.is_null() || out.is_null() {
            return BW_ERR_NULL;
        }
        let Some(mode) = unraveling_from(mode) else {
            return BW_ERR_BAD_PARAM;
        };
        let state = match density_from_raw(rho0) {
            Ok(s) => s,
            Err(_) => return BW_ERR_BAD_STATE,
        };
        let options = EnsembleOptions {
            mode,
            dt,
            t_max,
            n_trajectories,
            master_seed,
            workers,
            thresholds: ClassifyThresholds::default(),
            store_states: false,
        };
        match run_ensemble(&(*model).0, &state, &options) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(bw_ensemble(result)));
                BW_OK
            }
            Err(e) => status_of_ensemble(&e),
        }
    })
}

/// Releases an ensemble handle; null is a no-op.
///
/// # Safety
/// `ens` must be null or a handle from `bw_ensemble_run` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bw_ensemble_free(ens: *mut bw_ensemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

/// Number of grid points in the aggregated curves (0 for null).
///
/// # Safety
/// `ens` must be null or a live ensemble handle.
#[no_mangle]
pub unsafe extern "C" fn bw_ensemble_len(ens: *const bw_ensemble) -> usize {
    if ens.is_null() {
        0
    } else {
        (&(*ens).0).times.len()
    }
}

/// Ensemble-mean concurrence at grid point `i`, with its standard error.
///
/// # Safety
/// `ens` must be a live handle; `mean_out` and `stderr_out` writable.
#[no_mangle]
pub unsafe extern "C" fn bw_ensemble_concurrence(
    ens: *const bw_ensemble,
    i: usize,
    mean_out: *mut f64,
    stderr_out: *mut f64,
) -> bw_status {
    guarded(|| {
        if ens.is_null() || mean_out.is_null() || stderr_out.is_null() {
            return BW_ERR_NULL;
        }
        let result = &(*ens).0;
        if i >= result.times.len() {
            return BW_ERR_OUT_OF_RANGE;
        }
        *mean_out = result.mean_concurrence[i];
        *stderr_out = result.stderr_concurrence[i];
        BW_OK
    })
}

/// Fraction of trajectories that settled into the dark Bell state, with a
/// 95% bootstrap interval.
///
/// # Safety
/// `ens` must be a live handle; the three out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn bw_ensemble_dark_fraction(
    ens: *const bw_ensemble,
    fraction_out: *mut f64,
    ci_low_out: *mut f64,
    ci_high_out: *mut f64,
) -> bw_status {
    guarded(|| {
        if ens.is_null() || fraction_out.is_null() || ci_low_out.is_null() || ci_high_out.is_null()
        {
            return BW_ERR_NULL;
        }
        let result = &(*ens).0;
        *fraction_out = result.psi_minus_fraction;
        *ci_low_out = result.psi_minus_ci.0;
        *ci_high_out = result.psi_minus_ci.1;
        BW_OK
    })
}

/// Ensemble-mean conditioned state at grid point `i` (32 interleaved
/// doubles). Unlike single-trajectory states this is generally mixed.
///
/// # Safety
/// `ens` must be a live handle, `rho_out` writable for 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn bw_ensemble_mean_state(
    ens: *const bw_ensemble,
    i: usize,
    rho_out: *mut f64,
) -> bw_status {
    guarded(|| {
        if ens.is_null() || rho_out.is_null() {
            return BW_ERR_NULL;
        }
        let result = &(*ens).0;
        match result.mean_state.get(i) {
            Some(m) => {
                let out = std::slice::from_raw_parts_mut(rho_out, 32);
                for r in 0..4 {
                    for c in 0..4 {
                        let z = m.get(r, c);
                        let k = 2 * (4 * r + c);
                        out[k] = z.re;
                        out[k + 1] = z.im;
                    }
                }
                BW_OK
            }
            None => BW_ERR_OUT_OF_RANGE,
        }
    })
}
