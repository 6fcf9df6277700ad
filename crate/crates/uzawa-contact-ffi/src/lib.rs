//! C ABI for the contact-QP solvers: opaque handles over instances and
//! solve results, status codes instead of Rust errors, caller-owned
//! output buffers. The header `include/uzawa_contact.h` is generated at
//! build time.
//!
//! Ownership: every `*_new`/`*_solve` constructor hands the caller a
//! pointer that must be released with the matching `*_free`. Accessors
//! never take ownership. All functions are safe to call from multiple
//! threads as long as each handle is used from one thread at a time.

use std::ffi::CStr;
use std::os::raw::{c_char, c_int};
use std::ptr;

use uzawa_contact::diagnostics::kkt_residual;
use uzawa_contact::fem::{build_benchmark, paper_spec};
use uzawa_contact::instance;
use uzawa_contact::{ContactQp, Error, Method, SolveResult, SolveStatus, SolverConfig, StepSize};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UcStatus {
    /// Success; for solves, the method converged.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range (mesh sizes, method id, tolerances).
    InvalidArgument = 2,
    /// Instance JSON failed to parse or validate.
    ParseError = 3,
    /// The stiffness matrix is not positive definite.
    NotPositiveDefinite = 4,
    /// The solver hit the iteration cap before converging.
    MaxIterReached = 5,
    /// Any other internal failure.
    InternalError = 6,
}

/// Dual method selector for `uc_solve`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UcMethod {
    Uzawa = 0,
    Accelerated = 1,
    AcceleratedRestart = 2,
}

/// Opaque contact-QP instance.
pub struct UcQp(ContactQp);

/// Opaque solve result.
pub struct UcResult(SolveResult);

fn status_of(err: &Error) -> UcStatus {
    match err {
        Error::Parse(_) => UcStatus::ParseError,
        Error::NotPositiveDefinite { .. } => UcStatus::NotPositiveDefinite,
        Error::InvalidMeshRatio { .. } | Error::DimensionMismatch { .. } => {
            UcStatus::InvalidArgument
        }
        _ => UcStatus::InternalError,
    }
}

fn emit<T>(out: *mut *mut T, value: T) -> UcStatus {
    if out.is_null() {
        return UcStatus::NullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    UcStatus::Ok
}

/// Builds the cantilever benchmark with the published mesh ratio
/// `ny = nx / 3` (`nx` must be a positive multiple of 3) and writes the
/// new handle to `out`.
///
/// # Safety
/// `out` must be null or a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn uc_qp_paper_benchmark(nx: usize, out: *mut *mut UcQp) -> UcStatus {
    match paper_spec(nx).and_then(|spec| build_benchmark(&spec)) {
        Ok(qp) => emit(out, UcQp(qp)),
        Err(e) => status_of(&e),
    }
}

/// Builds the cantilever benchmark on an `nx` by `ny` mesh.
///
/// # Safety
/// `out` must be null or a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn uc_qp_benchmark(nx: usize, ny: usize, out: *mut *mut UcQp) -> UcStatus {
    if nx == 0 || ny == 0 {
        return UcStatus::InvalidArgument;
    }
    let mut spec = match paper_spec(3) {
        Ok(spec) => spec,
        Err(e) => return status_of(&e),
    };
    spec.nx = nx;
    spec.ny = ny;
    match build_benchmark(&spec) {
        Ok(qp) => emit(out, UcQp(qp)),
        Err(e) => status_of(&e),
    }
}

/// Parses an instance from a NUL-terminated JSON document (the same
/// format the CLI exports) and writes the new handle to `out`.
///
/// # Safety
/// `json` must be null or a valid NUL-terminated string; `out` must be
/// null or a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn uc_qp_from_json(json: *const c_char, out: *mut *mut UcQp) -> UcStatus {
    if json.is_null() {
        return UcStatus::NullPointer;
    }
    let text = match unsafe { CStr::from_ptr(json) }.to_str() {
        Ok(t) => t,
        Err(_) => return UcStatus::ParseError,
    };
    match instance::from_json(text) {
        Ok((qp, _meta)) => emit(out, UcQp(qp)),
        Err(e) => status_of(&e),
    }
}

/// Number of free displacement degrees of freedom, or 0 on null.
///
/// # Safety
/// `qp` must be null or a live handle from a `uc_qp_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn uc_qp_dim(qp: *const UcQp) -> usize {
    unsafe { qp.as_ref() }.map_or(0, |qp| qp.0.dim())
}

/// Number of contact constraints, or 0 on null.
///
/// # Safety
/// `qp` must be null or a live handle from a `uc_qp_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn uc_qp_ncon(qp: *const UcQp) -> usize {
    unsafe { qp.as_ref() }.map_or(0, |qp| qp.0.ncon())
}

/// Releases an instance handle. Null is a no-op.
///
/// # Safety
/// `qp` must be null or a live handle from a `uc_qp_*` constructor;
/// the handle must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn uc_qp_free(qp: *mut UcQp) {
    if !qp.is_null() {
        drop(unsafe { Box::from_raw(qp) });
    }
}

/// Runs one solver. `alpha <= 0` selects the automatic step size
/// `lambda_1(K) / sigma_max(N)^2`. On success (or on hitting the
/// iteration cap) a result handle is written to `out`; `MaxIterReached`
/// is reported through the status while the partial result stays
/// available.
///
/// # Safety
/// `qp` must be null or a live instance handle; `out` must be null or a
/// valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn uc_solve(
    qp: *const UcQp,
    method: c_int,
    alpha: f64,
    epsilon: f64,
    max_iter: usize,
    out: *mut *mut UcResult,
) -> UcStatus {
    let Some(qp) = (unsafe { qp.as_ref() }) else {
        return UcStatus::NullPointer;
    };
    let method = match method {
        0 => Method::Uzawa,
        1 => Method::Accelerated,
        2 => Method::AcceleratedRestart,
        _ => return UcStatus::InvalidArgument,
    };
    if epsilon.is_nan() || epsilon <= 0.0 || max_iter == 0 || alpha.is_nan() || alpha == f64::INFINITY {
        return UcStatus::InvalidArgument;
    }
    let cfg = SolverConfig {
        method,
        alpha: if alpha > 0.0 {
            StepSize::Fixed(alpha)
        } else {
            StepSize::Auto
        },
        epsilon,
        max_iter,
        record_history: false,
    };
    match uzawa_contact::solver::solve(&qp.0, &cfg, None) {
        Ok(result) => {
            let status = match result.status {
                SolveStatus::Converged => UcStatus::Ok,
                SolveStatus::MaxIterReached => UcStatus::MaxIterReached,
            };
            let emitted = emit(out, UcResult(result));
            if emitted == UcStatus::Ok {
                status
            } else {
                emitted
            }
        }
        Err(e) => status_of(&e),
    }
}

/// Number of dual updates performed, or 0 on null.
///
/// # Safety
/// `result` must be null or a live handle from `uc_solve`.
#[no_mangle]
pub unsafe extern "C" fn uc_result_iterations(result: *const UcResult) -> usize {
    unsafe { result.as_ref() }.map_or(0, |r| r.0.iterations)
}

/// Step size the solve actually used, or NaN on null.
///
/// # Safety
/// `result` must be null or a live handle from `uc_solve`.
#[no_mangle]
pub unsafe extern "C" fn uc_result_alpha(result: *const UcResult) -> f64 {
    unsafe { result.as_ref() }.map_or(f64::NAN, |r| r.0.alpha)
}

/// 1 when the solve converged, 0 otherwise (including null).
///
/// # Safety
/// `result` must be null or a live handle from `uc_solve`.
#[no_mangle]
pub unsafe extern "C" fn uc_result_converged(result: *const UcResult) -> c_int {
    let converged =
        unsafe { result.as_ref() }.is_some_and(|r| r.0.status == SolveStatus::Converged);
    c_int::from(converged)
}

fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> UcStatus {
    if buf.is_null() {
        return UcStatus::NullPointer;
    }
    if len < src.len() {
        return UcStatus::InvalidArgument;
    }
    unsafe { ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
    UcStatus::Ok
}

/// Copies the displacement vector into `buf` (capacity `len >= dim`).
///
/// # Safety
/// `result` must be null or a live handle from `uc_solve`; `buf` must
/// be null or point to at least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn uc_result_displacements(
    result: *const UcResult,
    buf: *mut f64,
    len: usize,
) -> UcStatus {
    let Some(result) = (unsafe { result.as_ref() }) else {
        return UcStatus::NullPointer;
    };
    copy_out(&result.0.u, buf, len)
}

/// Copies the reaction vector into `buf` (capacity `len >= ncon`).
///
/// # Safety
/// `result` must be null or a live handle from `uc_solve`; `buf` must
/// be null or point to at least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn uc_result_reactions(
    result: *const UcResult,
    buf: *mut f64,
    len: usize,
) -> UcStatus {
    let Some(result) = (unsafe { result.as_ref() }) else {
        return UcStatus::NullPointer;
    };
    copy_out(&result.0.r, buf, len)
}

/// Total KKT residual of the result on its instance, or NaN on error.
///
/// # Safety
/// `qp` and `result` must each be null or live handles.
#[no_mangle]
pub unsafe extern "C" fn uc_result_kkt_total(qp: *const UcQp, result: *const UcResult) -> f64 {
    let (Some(qp), Some(result)) = (unsafe { qp.as_ref() }, unsafe { result.as_ref() }) else {
        return f64::NAN;
    };
    kkt_residual(&qp.0, &result.0.u, &result.0.r).map_or(f64::NAN, |k| k.total)
}

/// Releases a result handle. Null is a no-op.
///
/// # Safety
/// `result` must be null or a live handle from `uc_solve`; the handle
/// must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn uc_result_free(result: *mut UcResult) {
    if !result.is_null() {
        drop(unsafe { Box::from_raw(result) });
    }
}
