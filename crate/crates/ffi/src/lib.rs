//! C ABI for `integrality-core`.
//!
//! Objects are opaque handles created by `*_new`/`*_parse` and released with
//! the matching `*_free`. Every fallible call returns an `int32_t` status;
//! on failure a message is available from [`integrality_last_error`] until
//! the next call on the same thread. Strings returned through out-pointers
//! are owned by the caller and released with [`integrality_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use integrality::brackets::{certify_table, BracketTable, QTuple};
use integrality::certify::certify;
use integrality::series::{verify, Identity};
use integrality::speclang::{self, run_spec, RecurrenceSpec};
use integrality::Error;

/// Success.
pub const INTEGRALITY_OK: i32 = 0;
/// A mathematical check failed (identity mismatch, inexact division,
/// non-power-of-2 denominator, critical report).
pub const INTEGRALITY_ERR_MISMATCH: i32 = 1;
/// Malformed spec text, tuple or identity name.
pub const INTEGRALITY_ERR_PARSE: i32 = 2;
/// Argument outside the accepted domain.
pub const INTEGRALITY_ERR_INVALID: i32 = 4;
/// A required pointer was null.
pub const INTEGRALITY_ERR_NULL: i32 = 5;
/// Input string is not UTF-8.
pub const INTEGRALITY_ERR_UTF8: i32 = 6;
/// Internal panic caught at the boundary.
pub const INTEGRALITY_ERR_PANIC: i32 = 7;

/// A parsed recurrence.
pub struct IntegralitySpec {
    inner: RecurrenceSpec,
}

/// A memoized bracket table.
pub struct IntegralityBrackets {
    inner: BracketTable,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Syntax { .. }
            | Error::IndexOutOfRange { .. }
            | Error::UnknownVariable(_)
            | Error::DuplicateVariable(_)
            | Error::Spec(_) => INTEGRALITY_ERR_PARSE,
            Error::InexactDivision { .. }
            | Error::NotTwoAdic { .. }
            | Error::Bracket { .. }
            | Error::IntegralityViolation { .. }
            | Error::OddPowerSurvives { .. } => INTEGRALITY_ERR_MISMATCH,
            _ => INTEGRALITY_ERR_INVALID,
        };
        Fail(code, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<i32, Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(code)) => {
            set_error("");
            code
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            INTEGRALITY_ERR_PANIC
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(INTEGRALITY_ERR_NULL, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(INTEGRALITY_ERR_UTF8, format!("{what} is not UTF-8")))
}

fn check_out<T>(p: *mut T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(INTEGRALITY_ERR_NULL, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(INTEGRALITY_ERR_INVALID, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(INTEGRALITY_ERR_NULL, format!("{what} is null")))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn integrality_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn integrality_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses recurrence text into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn integrality_spec_parse(text: *const c_char, out: *mut *mut IntegralitySpec) -> i32 {
    guard(|| {
        check_out(out, "out")?;
        let text = read_str(text, "text")?;
        let spec = speclang::parse(text)?;
        *out = Box::into_raw(Box::new(IntegralitySpec { inner: spec }));
        Ok(INTEGRALITY_OK)
    })
}

/// # Safety
/// `spec` must come from [`integrality_spec_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn integrality_spec_free(spec: *mut IntegralitySpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Canonical text of the spec.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn integrality_spec_canonical(spec: *const IntegralitySpec, out: *mut *mut c_char) -> i32 {
    guard(|| {
        check_out(out, "out")?;
        let spec = handle(spec, "spec")?;
        write_string(out, spec.inner.canonical())?;
        Ok(INTEGRALITY_OK)
    })
}

/// Terms `0..=n` as a JSON array of polynomial strings.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn integrality_spec_run_json(
    spec: *const IntegralitySpec,
    n: usize,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        check_out(out, "out")?;
        let spec = handle(spec, "spec")?;
        let terms: Vec<String> = run_spec(&spec.inner, n).terms.iter().map(ToString::to_string).collect();
        write_string(out, serde_json::to_string(&terms).expect("strings serialize"))?;
        Ok(INTEGRALITY_OK)
    })
}

/// Integrality report as JSON. Returns [`INTEGRALITY_ERR_MISMATCH`] (with
/// the report still written) when the report is flagged critical.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn integrality_spec_certify_json(
    spec: *const IntegralitySpec,
    n: usize,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        check_out(out, "out")?;
        let spec = handle(spec, "spec")?;
        let report = certify(&spec.inner, n);
        write_string(out, report.to_json())?;
        Ok(if report.critical {
            INTEGRALITY_ERR_MISMATCH
        } else {
            INTEGRALITY_OK
        })
    })
}

/// Checks a named identity to the given order. Returns
/// [`INTEGRALITY_ERR_MISMATCH`] if it fails.
///
/// # Safety
/// `name` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn integrality_verify(name: *const c_char, order: usize) -> i32 {
    guard(|| {
        let name = read_str(name, "name")?;
        let id: Identity = name.parse()?;
        let rec = verify(id, order)?;
        if rec.passed {
            return Ok(INTEGRALITY_OK);
        }
        let detail = match rec.first_mismatch {
            Some(m) => format!(" at index {}: {} != {}", m.index, m.lhs, m.rhs),
            None => String::new(),
        };
        Err(Fail(INTEGRALITY_ERR_MISMATCH, format!("{} fails{detail}", rec.identity)))
    })
}

/// New bracket table for a comma-separated tuple of polynomials in `t`.
/// Non-odd polynomials are rejected unless `permissive` is true.
///
/// # Safety
/// `tuple` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn integrality_brackets_new(
    tuple: *const c_char,
    permissive: bool,
    out: *mut *mut IntegralityBrackets,
) -> i32 {
    guard(|| {
        check_out(out, "out")?;
        let text = read_str(tuple, "tuple")?;
        let q = QTuple::parse(text, permissive)?;
        *out = Box::into_raw(Box::new(IntegralityBrackets {
            inner: BracketTable::new(q),
        }));
        Ok(INTEGRALITY_OK)
    })
}

/// # Safety
/// `table` must come from [`integrality_brackets_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn integrality_brackets_free(table: *mut IntegralityBrackets) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Tuple length `d`.
///
/// # Safety
/// `table` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn integrality_brackets_dim(table: *const IntegralityBrackets) -> usize {
    table.as_ref().map_or(0, |t| t.inner.dim())
}

/// Bracket value at `m[0..len]` as polynomial text in `x1..xd`.
///
/// # Safety
/// `table` must be a live handle not used concurrently; `m` must point to
/// `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn integrality_brackets_get(
    table: *mut IntegralityBrackets,
    m: *const u32,
    len: usize,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        check_out(out, "out")?;
        let table = table
            .as_mut()
            .ok_or_else(|| Fail(INTEGRALITY_ERR_NULL, "table is null".into()))?;
        let m: &[u32] = if len == 0 {
            &[]
        } else if m.is_null() {
            return Err(Fail(INTEGRALITY_ERR_NULL, "m is null".into()));
        } else {
            std::slice::from_raw_parts(m, len)
        };
        let value = table.inner.get(m)?;
        write_string(out, value.to_string())?;
        Ok(INTEGRALITY_OK)
    })
}

/// Builds the table to level `bound` and writes the certification summary
/// as JSON.
///
/// # Safety
/// `table` must be a live handle not used concurrently; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn integrality_brackets_certify_json(
    table: *mut IntegralityBrackets,
    bound: usize,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        check_out(out, "out")?;
        let table = table
            .as_mut()
            .ok_or_else(|| Fail(INTEGRALITY_ERR_NULL, "table is null".into()))?;
        let cert = certify_table(&mut table.inner, bound)?;
        write_string(out, serde_json::to_string_pretty(&cert).expect("serializes"))?;
        Ok(INTEGRALITY_OK)
    })
}
