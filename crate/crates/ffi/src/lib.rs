//! C ABI over `dedekind-core`.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`DkStatus`] and writes its result
//!   through an out-pointer. On failure the out-pointer is left untouched
//!   and [`dk_last_error_message`] describes the error.
//! * Antichains and systems are opaque handles created by this library and
//!   released with their `_free` function. Strings returned by the library
//!   are released with [`dk_string_free`].
//! * Counts cross the boundary as decimal strings, since they may exceed
//!   64 bits.
//! * Panics never unwind into the caller; they surface as
//!   [`DkStatus::DkErrInternal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dedekind_core::engine::{self, ExecOptions, Method};
use dedekind_core::pcoef::{pair_index, p_general};
use dedekind_core::{connector_number, interval_size, Antichain, Error, SystemInstance};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DkStatus {
    DkOk = 0,
    DkErrInternal = 1,
    DkErrInvalid = 2,
    DkErrCapability = 3,
    DkErrConsistency = 4,
    DkErrPrecondition = 5,
    DkErrNullPointer = 6,
    DkErrCheckpoint = 7,
    DkErrInterrupted = 8,
}

/// An antichain over `{1..n}`.
pub struct DkAntichain(Antichain);

/// An equation system under construction: `α` plus the `r(r-1)/2`
/// right-hand sides, set one at a time.
pub struct DkSystem {
    alpha: Antichain,
    r: usize,
    betas: Vec<Option<Antichain>>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DkStatus {
    match e {
        Error::InvalidInput(_) => DkStatus::DkErrInvalid,
        Error::Precondition(_) => DkStatus::DkErrPrecondition,
        Error::Capability { .. } => DkStatus::DkErrCapability,
        Error::Consistency(_) => DkStatus::DkErrConsistency,
        Error::Checkpoint(_) => DkStatus::DkErrCheckpoint,
        Error::Interrupted { .. } => DkStatus::DkErrInterrupted,
        Error::Io(_) => DkStatus::DkErrInternal,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Run `body`, translating errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DkStatus::DkOk,
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            DkStatus::DkErrNullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal error: {msg}"));
            DkStatus::DkErrInternal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Core(Error::InvalidInput(format!("{what} is not UTF-8"))))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed(a: Antichain) -> *mut DkAntichain {
    Box::into_raw(Box::new(DkAntichain(a)))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn dk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse text such as `{12,3}` (sets of digits, `0` for the empty set,
/// `{}` for the empty antichain) over `{1..n}`. With `normalize`, sets
/// contained in other sets are dropped instead of rejected.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_antichain_parse(
    text_in: *const c_char,
    n: u32,
    normalize: bool,
    out: *mut *mut DkAntichain,
) -> DkStatus {
    guard(|| {
        let t = text(text_in, "text")?;
        let a = Antichain::parse(t, n as usize, normalize)?;
        put(out, boxed(a), "out")
    })
}

/// `⊥`, the antichain with no sets.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_antichain_bottom(n: u32, out: *mut *mut DkAntichain) -> DkStatus {
    guard(|| {
        dedekind_core::ElementSet::new(0, n as usize)?;
        put(out, boxed(Antichain::bottom(n as usize)), "out")
    })
}

/// `⊤`, the antichain holding the full set.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_antichain_top(n: u32, out: *mut *mut DkAntichain) -> DkStatus {
    guard(|| {
        dedekind_core::ElementSet::new(0, n as usize)?;
        put(out, boxed(Antichain::top(n as usize)), "out")
    })
}

/// # Safety
/// `a` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dk_antichain_free(a: *mut DkAntichain) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Base-set size of `a`, or 0 for null.
///
/// # Safety
/// `a` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dk_antichain_n(a: *const DkAntichain) -> u32 {
    a.as_ref().map_or(0, |a| a.0.n() as u32)
}

/// Text form of `a`; release with [`dk_string_free`].
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_antichain_to_string(
    a: *const DkAntichain,
    out: *mut *mut c_char,
) -> DkStatus {
    guard(|| {
        let a = deref(a, "a")?;
        put(out, owned_string(a.0.to_string()), "out")
    })
}

/// `a ≤ b`: every set of `a` lies inside a set of `b`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_antichain_le(
    a: *const DkAntichain,
    b: *const DkAntichain,
    out: *mut bool,
) -> DkStatus {
    guard(|| {
        let v = deref(a, "a")?.0.le(&deref(b, "b")?.0)?;
        put(out, v, "out")
    })
}

/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_antichain_join(
    a: *const DkAntichain,
    b: *const DkAntichain,
    out: *mut *mut DkAntichain,
) -> DkStatus {
    guard(|| {
        let v = deref(a, "a")?.0.join(&deref(b, "b")?.0)?;
        put(out, boxed(v), "out")
    })
}

/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_antichain_meet(
    a: *const DkAntichain,
    b: *const DkAntichain,
    out: *mut *mut DkAntichain,
) -> DkStatus {
    guard(|| {
        let v = deref(a, "a")?.0.meet(&deref(b, "b")?.0)?;
        put(out, boxed(v), "out")
    })
}

/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_antichain_dual(
    a: *const DkAntichain,
    out: *mut *mut DkAntichain,
) -> DkStatus {
    guard(|| {
        let v = deref(a, "a")?.0.dual();
        put(out, boxed(v), "out")
    })
}

/// `|[bottom, top]|` as a decimal string; `"0"` when `bottom ≰ top`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_interval_size(
    bottom: *const DkAntichain,
    top: *const DkAntichain,
    out: *mut *mut c_char,
) -> DkStatus {
    guard(|| {
        let v = interval_size(&deref(bottom, "bottom")?.0, &deref(top, "top")?.0)?;
        put(out, owned_string(v.to_string()), "out")
    })
}

/// Number of connected components of `β − α`; requires `α ≤ β`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_connector_number(
    alpha: *const DkAntichain,
    beta: *const DkAntichain,
    out: *mut u32,
) -> DkStatus {
    guard(|| {
        let c = connector_number(&deref(alpha, "alpha")?.0, &deref(beta, "beta")?.0)?;
        put(out, c as u32, "out")
    })
}

/// Start a system in `r` variables with meet `alpha` (copied).
///
/// # Safety
/// `alpha` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_system_new(
    alpha: *const DkAntichain,
    r: u32,
    out: *mut *mut DkSystem,
) -> DkStatus {
    guard(|| {
        let alpha = deref(alpha, "alpha")?.0.clone();
        let r = r as usize;
        if !(2..=dedekind_core::pcoef::MAX_R).contains(&r) {
            return Err(Error::InvalidInput(format!(
                "r = {r} outside 2..={}",
                dedekind_core::pcoef::MAX_R
            ))
            .into());
        }
        let sys = DkSystem {
            alpha,
            r,
            betas: vec![None; r * (r - 1) / 2],
        };
        put(out, Box::into_raw(Box::new(sys)), "out")
    })
}

/// Set the right-hand side of `χ_i ∨ χ_j` (1-based, `i ≠ j`; `beta` is
/// copied).
///
/// # Safety
/// `sys` and `beta` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn dk_system_set_beta(
    sys: *mut DkSystem,
    i: u32,
    j: u32,
    beta: *const DkAntichain,
) -> DkStatus {
    guard(|| {
        let sys = sys.as_mut().ok_or(Failure::Null("sys"))?;
        let beta = deref(beta, "beta")?.0.clone();
        let (i, j) = (i as usize, j as usize);
        if i == j || i == 0 || j == 0 || i > sys.r || j > sys.r {
            return Err(Error::InvalidInput(format!(
                "pair ({i},{j}) invalid for r = {}",
                sys.r
            ))
            .into());
        }
        if beta.n() != sys.alpha.n() {
            return Err(Error::InvalidInput("beta and alpha have different n".into()).into());
        }
        sys.betas[pair_index(sys.r, i, j)] = Some(beta);
        Ok(())
    })
}

/// Number of solutions, as a decimal string. Every pair must have been set.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_system_count(sys: *const DkSystem, out: *mut *mut c_char) -> DkStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let betas = sys
            .betas
            .iter()
            .cloned()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Precondition("some right-hand sides are not set".into()))?;
        let inst = SystemInstance::new(sys.alpha.clone(), betas)?;
        put(out, owned_string(p_general(&inst).to_string()), "out")
    })
}

/// # Safety
/// `sys` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dk_system_free(sys: *mut DkSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Run a computation (`bruteforce`, `nplus2`, `nplus3`, `nplus4`,
/// `wiedemann`) and return its JSON report. `workers = 0` uses every core.
///
/// # Safety
/// `method` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dk_compute(
    method: *const c_char,
    n: u32,
    workers: u32,
    reduce_symmetry: bool,
    out: *mut *mut c_char,
) -> DkStatus {
    guard(|| {
        let method: Method = text(method, "method")?.parse()?;
        let mut opts = ExecOptions::default();
        if workers > 0 {
            opts.workers = workers as usize;
        }
        let report = engine::compute(method, n as usize, reduce_symmetry, &opts)?;
        put(out, owned_string(report.to_json()), "out")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_out_pointer_is_reported() {
        let s = CString::new("{1}").unwrap();
        let st = unsafe { dk_antichain_parse(s.as_ptr(), 2, false, std::ptr::null_mut()) };
        assert_eq!(st, DkStatus::DkErrNullPointer);
        let msg = unsafe { CStr::from_ptr(dk_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("out"));
    }
}
