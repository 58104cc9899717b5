//! C ABI over the invariant computations, for binding from other languages.
//!
//! Conventions: problems are opaque handles created by `k1inv_problem_parse`
//! and released with `k1inv_problem_free`; every report or error message is
//! a NUL-terminated UTF-8 string allocated by this library and released with
//! `k1inv_string_free`; every entry point returns a status code and never
//! unwinds across the boundary.

use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use k1inv::problem::{parse_problem, ProblemFile};
use k1inv::runner::{run_corpus, run_problem, run_verify, OutputFormat, RunOptions};

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum K1invStatus {
    /// The call succeeded and all cross-checks passed.
    Ok = 0,
    /// The computation ran but a cross-check or exactness verification
    /// failed; the report explains which.
    CheckFailed = 1,
    /// The input could not be parsed or validated.
    InputError = 2,
    /// A required pointer argument was null.
    NullPointer = 3,
    /// An internal panic was caught at the boundary.
    InternalError = 4,
}

/// Report format selector.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum K1invFormat {
    Text = 0,
    Json = 1,
}

impl From<K1invFormat> for OutputFormat {
    fn from(f: K1invFormat) -> Self {
        match f {
            K1invFormat::Text => OutputFormat::Text,
            K1invFormat::Json => OutputFormat::Json,
        }
    }
}

/// Opaque handle to a parsed and fully validated problem.
pub struct K1invProblem {
    inner: ProblemFile,
}

fn export_string(s: String) -> *mut c_char {
    // interior NULs cannot appear in reports; replace defensively anyway
    match CString::new(s) {
        Ok(c) => c.into_raw(),
        Err(_) => ptr::null_mut(),
    }
}

unsafe fn write_out<T>(out: *mut *mut T, value: *mut T) {
    if !out.is_null() {
        *out = value;
    }
}

/// Parse and validate a problem document.
///
/// On success writes a handle to `out` and returns `Ok`. On failure returns
/// `InputError` and, when `error_out` is non-null, writes a message there
/// (release it with `k1inv_string_free`).
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` and `error_out`, when
/// non-null, must be writable.
#[no_mangle]
pub unsafe extern "C" fn k1inv_problem_parse(
    data: *const u8,
    len: usize,
    out: *mut *mut K1invProblem,
    error_out: *mut *mut c_char,
) -> K1invStatus {
    write_out(error_out, ptr::null_mut());
    if data.is_null() || out.is_null() {
        return K1invStatus::NullPointer;
    }
    let bytes = std::slice::from_raw_parts(data, len);
    let result = catch_unwind(AssertUnwindSafe(|| parse_problem(bytes)));
    match result {
        Ok(Ok(problem)) => {
            write_out(out, Box::into_raw(Box::new(K1invProblem { inner: problem })));
            K1invStatus::Ok
        }
        Ok(Err(e)) => {
            write_out(out, ptr::null_mut());
            write_out(error_out, export_string(e.to_string()));
            K1invStatus::InputError
        }
        Err(_) => {
            write_out(out, ptr::null_mut());
            K1invStatus::InternalError
        }
    }
}

/// Release a problem handle. Accepts null.
///
/// # Safety
/// `problem` must be a handle from `k1inv_problem_parse` that has not been
/// freed yet, or null.
#[no_mangle]
pub unsafe extern "C" fn k1inv_problem_free(problem: *mut K1invProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

fn run_to_status(
    outcome: Result<k1inv::runner::RunOutcome, ()>,
    report_out: *mut *mut c_char,
) -> K1invStatus {
    match outcome {
        Ok(run) => {
            unsafe { write_out(report_out, export_string(run.output)) };
            if run.failed {
                K1invStatus::CheckFailed
            } else {
                K1invStatus::Ok
            }
        }
        Err(()) => K1invStatus::InternalError,
    }
}

/// Execute the tasks of a problem and write the rendered report to
/// `report_out`.
///
/// `oracle` forces the brute-force verification paths, mirroring the
/// `oracle` CLI subcommand. Returns `CheckFailed` when any cross-check or
/// exactness verification fails; the report is still written in that case.
///
/// # Safety
/// `problem` must be a live handle from `k1inv_problem_parse`; `report_out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn k1inv_problem_run(
    problem: *const K1invProblem,
    format: K1invFormat,
    oracle: bool,
    report_out: *mut *mut c_char,
) -> K1invStatus {
    if problem.is_null() || report_out.is_null() {
        return K1invStatus::NullPointer;
    }
    write_out(report_out, ptr::null_mut());
    let problem = &(*problem).inner;
    let options = RunOptions {
        format: format.into(),
        oracle,
        modulus_override: None,
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| run_problem(problem, &options)));
    run_to_status(outcome.map_err(|_| ()), report_out)
}

/// Run the exactness suites over every module of a problem.
///
/// # Safety
/// Same contract as `k1inv_problem_run`.
#[no_mangle]
pub unsafe extern "C" fn k1inv_problem_verify(
    problem: *const K1invProblem,
    format: K1invFormat,
    report_out: *mut *mut c_char,
) -> K1invStatus {
    if problem.is_null() || report_out.is_null() {
        return K1invStatus::NullPointer;
    }
    write_out(report_out, ptr::null_mut());
    let problem = &(*problem).inner;
    let outcome = catch_unwind(AssertUnwindSafe(|| run_verify(problem, format.into())));
    run_to_status(outcome.map_err(|_| ()), report_out)
}

/// Run the built-in example corpus and write the rendered report.
///
/// # Safety
/// `report_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn k1inv_corpus(
    format: K1invFormat,
    report_out: *mut *mut c_char,
) -> K1invStatus {
    if report_out.is_null() {
        return K1invStatus::NullPointer;
    }
    write_out(report_out, ptr::null_mut());
    let outcome = catch_unwind(|| run_corpus(format.into(), false));
    run_to_status(outcome.map_err(|_| ()), report_out)
}

/// Release a string returned by this library. Accepts null.
///
/// # Safety
/// `s` must be a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn k1inv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn k1inv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
