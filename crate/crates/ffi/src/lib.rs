//! C ABI over the `paramgrid` engine.
//!
//! Instances and approximation sets cross the boundary as opaque handles.
//! Rationals travel as NUL-terminated strings (`"3/2"`, `"0.25"`, `"7"`).
//! Every fallible function returns a [`PgStatus`]; after a non-zero status,
//! [`pg_last_error`] describes the failure on the calling thread.
//! Strings returned through out-pointers are owned by the caller and must be
//! released with [`pg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use paramgrid::engine::EngineOptions;
use paramgrid::io::parse_instance;
use paramgrid::rational::{fmt_q, parse_q};
use paramgrid::solvers::{BuiltinOracle, KnapsackFptas};
use paramgrid::{ApproximationSet, Error, ParameterVector, ProblemInstance, Q};

/// Status codes. Values 1 to 5 match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgStatus {
    Ok = 0,
    Failure = 1,
    Schema = 2,
    EpsilonOutOfRange = 3,
    GridTooLarge = 4,
    DomainViolation = 5,
    NullArgument = 7,
    InvalidUtf8 = 8,
    Panic = 9,
}

/// A parsed problem instance.
pub struct PgInstance(ProblemInstance);

/// A computed or loaded approximation set.
pub struct PgSet(ApproximationSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Utf8(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn status_of(code: i32) -> PgStatus {
    match code {
        2 => PgStatus::Schema,
        3 => PgStatus::EpsilonOutOfRange,
        4 => PgStatus::GridTooLarge,
        5 => PgStatus::DomainViolation,
        _ => PgStatus::Failure,
    }
}

/// Runs `body`, recording any error or panic as the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> PgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PgStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(e.code())
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            PgStatus::NullArgument
        }
        Ok(Err(Fail::Utf8(what))) => {
            set_error(format!("{what} is not valid UTF-8"));
            PgStatus::InvalidUtf8
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            PgStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8(what))
}

unsafe fn rational(p: *const c_char, what: &'static str) -> Result<Q, Fail> {
    Ok(parse_q(text(p, what)?)?)
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(value);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("NUL bytes removed").into_raw()
}

/// Message for the last failure on this thread, or null after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn pg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn pg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_instance_parse(json: *const c_char, out: *mut *mut PgInstance) -> PgStatus {
    guard(|| {
        let inst = parse_instance(text(json, "json")?)?;
        put(out, Box::into_raw(Box::new(PgInstance(inst))), "out")
    })
}

/// # Safety
/// `inst` must be null or a handle from [`pg_instance_parse`], freed once.
#[no_mangle]
pub unsafe extern "C" fn pg_instance_free(inst: *mut PgInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of parameters `K` of an instance.
///
/// # Safety
/// `inst` must be a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn pg_instance_k(inst: *const PgInstance, out: *mut usize) -> PgStatus {
    guard(|| put(out, handle(inst, "inst")?.0.k(), "out"))
}

/// Builds an approximation set with the instance's built-in solver, or with
/// the knapsack profit-scaling family when `fptas` is non-zero.
/// `threads` of 0 means one thread; `grid_cap` of 0 keeps the default cap.
///
/// # Safety
/// `inst` must be a live handle, `epsilon` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_approximate(
    inst: *const PgInstance,
    epsilon: *const c_char,
    threads: usize,
    grid_cap: u64,
    fptas: i32,
    out: *mut *mut PgSet,
) -> PgStatus {
    guard(|| {
        let inst = &handle(inst, "inst")?.0;
        let eps = rational(epsilon, "epsilon")?;
        let mut options = EngineOptions { threads: threads.max(1), ..EngineOptions::default() };
        if grid_cap > 0 {
            options.grid_cap = grid_cap;
        }
        let set = if fptas != 0 {
            paramgrid::approximate_with_family(inst, &eps, &KnapsackFptas::new(inst)?, &options)?
        } else {
            paramgrid::approximate(inst, &eps, &BuiltinOracle::new(inst), &options)?
        };
        put(out, Box::into_raw(Box::new(PgSet(set))), "out")
    })
}

/// # Safety
/// `set` must be null or a set handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn pg_set_free(set: *mut PgSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Loads a set from the JSON written by [`pg_set_to_json`] or the CLI.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_set_from_json(json: *const c_char, out: *mut *mut PgSet) -> PgStatus {
    guard(|| {
        let set: ApproximationSet = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        put(out, Box::into_raw(Box::new(PgSet(set))), "out")
    })
}

/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_set_to_json(set: *const PgSet, out: *mut *mut c_char) -> PgStatus {
    guard(|| {
        let json = serde_json::to_string(&handle(set, "set")?.0).map_err(Error::from)?;
        put(out, owned(json), "out")
    })
}

/// Number of distinct stored solutions.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_set_solution_count(set: *const PgSet, out: *mut usize) -> PgStatus {
    guard(|| put(out, handle(set, "set")?.0.solutions().len(), "out"))
}

/// Number of grid points, which equals the solver calls made.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_set_grid_size(set: *const PgSet, out: *mut u64) -> PgStatus {
    guard(|| put(out, handle(set, "set")?.0.spec().size() as u64, "out"))
}

/// The approximation factor the set certifies, as a rational string.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_set_guarantee(set: *const PgSet, out: *mut *mut c_char) -> PgStatus {
    guard(|| put(out, owned(fmt_q(&handle(set, "set")?.0.guarantee())), "out"))
}

/// Looks up the stored solution for the parameter vector `lambda`
/// (`len` rational strings). Writes the solution's position in the set and
/// its objective value at `lambda`; either out-pointer may be null.
///
/// # Safety
/// Handles must be live and `lambda` must point to `len` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn pg_query(
    set: *const PgSet,
    inst: *const PgInstance,
    lambda: *const *const c_char,
    len: usize,
    out_solution: *mut usize,
    out_value: *mut *mut c_char,
) -> PgStatus {
    guard(|| {
        let set = &handle(set, "set")?.0;
        let inst = &handle(inst, "inst")?.0;
        if lambda.is_null() && len > 0 {
            return Err(Fail::Null("lambda"));
        }
        let coords = (0..len).map(|i| rational(*lambda.add(i), "lambda entry")).collect::<Result<Vec<_>, _>>()?;
        let lambda = ParameterVector::new(coords);
        let trace = set.locate(inst, &lambda)?;
        let value = inst.evaluate(&set.solutions()[trace.solution], &lambda)?;
        if !out_solution.is_null() {
            out_solution.write(trace.solution);
        }
        if !out_value.is_null() {
            out_value.write(owned(fmt_q(&value)));
        }
        Ok(())
    })
}

/// JSON of the stored solution at position `index`.
///
/// # Safety
/// `set` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_set_solution_json(set: *const PgSet, index: usize, out: *mut *mut c_char) -> PgStatus {
    guard(|| {
        let set = &handle(set, "set")?.0;
        let record = set
            .solutions()
            .get(index)
            .ok_or_else(|| Error::InvalidArgument(format!("solution {index} out of range")))?;
        put(out, owned(serde_json::to_string(record).map_err(Error::from)?), "out")
    })
}
