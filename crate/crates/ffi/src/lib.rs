//! C ABI over `gterm-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json` or
//! `gterm_decide` and released with the matching `*_free`. Every fallible
//! call returns a [`GtermStatus`]; on failure `gterm_last_error` describes
//! the error for the calling thread. Strings returned through `char **`
//! out-parameters are owned by the caller and released with
//! `gterm_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gterm_core::algebra::{Elem, FiniteAlgebra, TermCircuit};
use gterm_core::decide::{self, DecideOptions, DecisionReport, GTermInstance, MethodChoice};
use gterm_core::perm::{PermGroup, Permutation};
use gterm_core::{io, Error};

/// Result codes; the nonzero values match the command-line exit statuses
/// where one exists.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GtermStatus {
    Ok = 0,
    Verification = 1,
    InvalidInput = 2,
    Budget = 3,
    NoMethod = 4,
    NullPointer = 5,
    NoWitness = 6,
    Panic = 7,
}

pub struct GtermAlgebra(FiniteAlgebra);
pub struct GtermGroup(PermGroup);
pub struct GtermReport(DecisionReport);
pub struct GtermCircuit(TermCircuit);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> GtermStatus {
    match e {
        Error::NoWitness => GtermStatus::NoWitness,
        _ => match e.exit_code() {
            1 => GtermStatus::Verification,
            3 => GtermStatus::Budget,
            4 => GtermStatus::NoMethod,
            _ => GtermStatus::InvalidInput,
        },
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (GtermStatus, String)>) -> GtermStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GtermStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GtermStatus::Panic
        }
    }
}

fn core<T>(r: gterm_core::Result<T>) -> Result<T, (GtermStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GtermStatus, String) {
    (GtermStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (GtermStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GtermStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (GtermStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), (GtermStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (GtermStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s).expect("JSON has no NUL").into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn gterm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gterm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gterm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an algebra file's JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gterm_algebra_from_json(
    json: *const c_char,
    out: *mut *mut GtermAlgebra,
) -> GtermStatus {
    guard(|| {
        let alg = core(io::parse_algebra(read_str(json, "json")?))?;
        write_out(out, GtermAlgebra(alg))
    })
}

/// Universe size, or 0 for NULL.
///
/// # Safety
/// `alg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gterm_algebra_size(alg: *const GtermAlgebra) -> usize {
    alg.as_ref().map_or(0, |a| a.0.size())
}

/// # Safety
/// `alg` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gterm_algebra_free(alg: *mut GtermAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Parses a group file's JSON text (1-based cycle notation).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gterm_group_from_json(
    json: *const c_char,
    out: *mut *mut GtermGroup,
) -> GtermStatus {
    guard(|| {
        let g = core(io::parse_group(read_str(json, "json")?))?;
        write_out(out, GtermGroup(g))
    })
}

/// Degree, or 0 for NULL.
///
/// # Safety
/// `group` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gterm_group_degree(group: *const GtermGroup) -> usize {
    group.as_ref().map_or(0, |g| g.0.degree())
}

/// Writes the group order to `out`.
///
/// # Safety
/// `group` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gterm_group_order(
    group: *const GtermGroup,
    out: *mut usize,
) -> GtermStatus {
    guard(|| {
        let g = deref(group, "group")?;
        let order = core(g.0.order())?;
        let out = out.as_mut().ok_or_else(|| null("output pointer"))?;
        *out = order;
        Ok(())
    })
}

/// # Safety
/// `group` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gterm_group_free(group: *mut GtermGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Decides whether `alg` has a `group`-term. `method` is NULL for automatic
/// selection or one of "auto", "regular", "product", "brute",
/// "exhaustive-local"; `tuple_budget` 0 selects the default.
///
/// # Safety
/// Handles must be live; `method` must be NULL or NUL-terminated; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn gterm_decide(
    alg: *const GtermAlgebra,
    group: *const GtermGroup,
    method: *const c_char,
    tuple_budget: usize,
    want_witness: bool,
    out: *mut *mut GtermReport,
) -> GtermStatus {
    guard(|| {
        let alg = deref(alg, "algebra")?;
        let group = deref(group, "group")?;
        let choice: MethodChoice = if method.is_null() {
            MethodChoice::Auto
        } else {
            core(read_str(method, "method")?.parse())?
        };
        let mut opts = DecideOptions {
            want_witness,
            ..DecideOptions::default()
        };
        if tuple_budget > 0 {
            opts.tuple_budget = tuple_budget;
        }
        let inst = core(GTermInstance::new(alg.0.clone(), group.0.clone()))?;
        let report = core(decide::decide(&inst, choice, &opts))?;
        write_out(out, GtermReport(report))
    })
}

/// Whether the decided condition holds; false for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gterm_report_satisfied(report: *const GtermReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.satisfied)
}

/// Name of the deciding method as a static string; NULL for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gterm_report_method(report: *const GtermReport) -> *const c_char {
    let Some(r) = report.as_ref() else {
        return ptr::null();
    };
    let name: &'static CStr = match r.0.method.as_str() {
        "fixpoint" => c"fixpoint",
        "local-global-regular" => c"local-global-regular",
        "local-global-product" => c"local-global-product",
        "nilpotent-reduction" => c"nilpotent-reduction",
        "brute-force" => c"brute-force",
        _ => c"exhaustive-local",
    };
    name.as_ptr()
}

/// The report as JSON, in the command-line report format.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gterm_report_to_json(
    report: *const GtermReport,
    out: *mut *mut c_char,
) -> GtermStatus {
    guard(|| {
        let r = deref(report, "report")?;
        write_string(out, serde_json::to_string(&r.0).expect("serializable"))
    })
}

/// Copies the witness circuit out of a report; `GTERM_STATUS_NO_WITNESS`
/// when it carries none.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gterm_report_witness(
    report: *const GtermReport,
    out: *mut *mut GtermCircuit,
) -> GtermStatus {
    guard(|| {
        let r = deref(report, "report")?;
        let c =
            r.0.witness
                .clone()
                .ok_or((GtermStatus::NoWitness, "report has no witness".to_string()))?;
        write_out(out, GtermCircuit(c))
    })
}

/// # Safety
/// `report` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gterm_report_free(report: *mut GtermReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Parses a circuit file's JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gterm_circuit_from_json(
    json: *const c_char,
    out: *mut *mut GtermCircuit,
) -> GtermStatus {
    guard(|| {
        let c = core(io::parse_circuit(read_str(json, "json")?))?;
        write_out(out, GtermCircuit(c))
    })
}

/// Number of inputs, or 0 for NULL.
///
/// # Safety
/// `circuit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gterm_circuit_inputs(circuit: *const GtermCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.inputs())
}

/// Evaluates `circuit` in `alg` at `args[0..len]`.
///
/// # Safety
/// Handles must be live; `args` must point to `len` readable values; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn gterm_circuit_eval(
    circuit: *const GtermCircuit,
    alg: *const GtermAlgebra,
    args: *const u32,
    len: usize,
    out: *mut u32,
) -> GtermStatus {
    guard(|| {
        let c = deref(circuit, "circuit")?;
        let a = deref(alg, "algebra")?;
        if args.is_null() && len > 0 {
            return Err(null("args"));
        }
        let args: &[Elem] = if len == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(args, len)
        };
        let v = core(c.0.evaluate(&a.0, args))?;
        let out = out.as_mut().ok_or_else(|| null("output pointer"))?;
        *out = v;
        Ok(())
    })
}

/// The circuit as JSON.
///
/// # Safety
/// `circuit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gterm_circuit_to_json(
    circuit: *const GtermCircuit,
    out: *mut *mut c_char,
) -> GtermStatus {
    guard(|| {
        let c = deref(circuit, "circuit")?;
        write_string(out, serde_json::to_string(&c.0).expect("serializable"))
    })
}

/// # Safety
/// `circuit` must be NULL or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gterm_circuit_free(circuit: *mut GtermCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Whether the cyclic condition of `pi` implies that of `rho`; both are
/// 1-based cycle notation on `degree` points.
///
/// # Safety
/// Strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gterm_compare_cyclic(
    pi: *const c_char,
    rho: *const c_char,
    degree: usize,
    out: *mut bool,
) -> GtermStatus {
    guard(|| {
        let pi = core(Permutation::parse_cycles(read_str(pi, "pi")?, degree))?;
        let rho = core(Permutation::parse_cycles(read_str(rho, "rho")?, degree))?;
        let out = out.as_mut().ok_or_else(|| null("output pointer"))?;
        *out = decide::compare_cyclic(&pi, &rho);
        Ok(())
    })
}
