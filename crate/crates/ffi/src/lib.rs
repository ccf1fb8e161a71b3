//! C interface to `qorder`.
//!
//! Every function returns a status code (`QORDER_OK` on success) and writes
//! results through out-pointers. On failure the message is kept per thread
//! and can be read with [`qorder_last_error`]. Panics never cross the
//! boundary; they are reported as `QORDER_ERR_PANIC`.
//!
//! Strings returned by the library must be released with
//! [`qorder_string_free`]; models with [`qorder_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qorder::aging::aging_report;
use qorder::order::Comparator;
use qorder::report;
use qorder::{compare_all, CompareOptions, Error, GridConfig, MethodChoice, Order, QuantileModel, Status};

pub const QORDER_OK: i32 = 0;
pub const QORDER_ERR_NULL_POINTER: i32 = 1;
pub const QORDER_ERR_INVALID_UTF8: i32 = 2;
pub const QORDER_ERR_INVALID_ARGUMENT: i32 = 3;
pub const QORDER_ERR_PARSE: i32 = 4;
pub const QORDER_ERR_MODEL: i32 = 5;
pub const QORDER_ERR_NUMERIC: i32 = 6;
pub const QORDER_ERR_REFUSED: i32 = 7;
pub const QORDER_ERR_IO: i32 = 8;
pub const QORDER_ERR_INCONSISTENT: i32 = 9;
pub const QORDER_ERR_PANIC: i32 = 99;

pub const QORDER_METHOD_THEOREM: i32 = 0;
pub const QORDER_METHOD_THEOREM_ONLY: i32 = 1;
pub const QORDER_METHOD_ORACLE: i32 = 2;
pub const QORDER_METHOD_BOTH: i32 = 3;

pub const QORDER_ORDER_CONVEX: i32 = 0;
pub const QORDER_ORDER_STAR: i32 = 1;
pub const QORDER_ORDER_QMIT: i32 = 2;
pub const QORDER_ORDER_DMRL: i32 = 3;
pub const QORDER_ORDER_PS: i32 = 4;
pub const QORDER_ORDER_NBUE: i32 = 5;

pub const QORDER_STATUS_HOLDS: i32 = 0;
pub const QORDER_STATUS_HOLDS_REVERSED: i32 = 1;
pub const QORDER_STATUS_BOTH_DIRECTIONS_FAIL: i32 = 2;
pub const QORDER_STATUS_EQUIVALENT: i32 = 3;
pub const QORDER_STATUS_INCONCLUSIVE: i32 = 4;

/// Opaque handle to a quantile model.
pub struct QorderModel {
    inner: QuantileModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Failure carried to the boundary: a status code plus a message.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::ProbabilityOutOfRange(_) | Error::InvalidParameter(_) => QORDER_ERR_INVALID_ARGUMENT,
            Error::Syntax { .. } | Error::UnknownFunction { .. } | Error::UnboundParameter(_) | Error::Spec { .. } => {
                QORDER_ERR_PARSE
            }
            Error::ModelIntegrity(_) | Error::NonFiniteMean(_) | Error::NotIncreasing { .. } => QORDER_ERR_MODEL,
            Error::EvalDomain { .. }
            | Error::DivergentIntegral { .. }
            | Error::QuadratureTolerance { .. }
            | Error::TooOscillatory { .. }
            | Error::NonFiniteOnGrid(_) => QORDER_ERR_NUMERIC,
            Error::Hypothesis(_) | Error::Refused(_) => QORDER_ERR_REFUSED,
            Error::Data { .. } | Error::Io(_) => QORDER_ERR_IO,
            Error::MethodDisagreement(_) | Error::Consistency(_) => QORDER_ERR_INCONSISTENT,
        };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QORDER_ERR_NULL_POINTER, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_last_error();
            QORDER_OK
        }
        Ok(Err(Failure(code, msg))) => {
            set_last_error(&msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            QORDER_ERR_PANIC
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(QORDER_ERR_INVALID_UTF8, format!("{what} is not valid UTF-8")))
}

unsafe fn model<'a>(m: *const QorderModel, what: &str) -> Result<&'a QuantileModel, Failure> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn method_from(code: i32) -> Result<MethodChoice, Failure> {
    Ok(match code {
        QORDER_METHOD_THEOREM => MethodChoice::Theorem,
        QORDER_METHOD_THEOREM_ONLY => MethodChoice::TheoremOnly,
        QORDER_METHOD_ORACLE => MethodChoice::Oracle,
        QORDER_METHOD_BOTH => MethodChoice::Both,
        _ => return Err(Failure(QORDER_ERR_INVALID_ARGUMENT, format!("unknown method code {code}"))),
    })
}

fn order_from(code: i32) -> Result<Order, Failure> {
    Ok(match code {
        QORDER_ORDER_CONVEX => Order::Convex,
        QORDER_ORDER_STAR => Order::Star,
        QORDER_ORDER_QMIT => Order::Qmit,
        QORDER_ORDER_DMRL => Order::Dmrl,
        QORDER_ORDER_PS => Order::Ps,
        QORDER_ORDER_NBUE => Order::Nbue,
        _ => return Err(Failure(QORDER_ERR_INVALID_ARGUMENT, format!("unknown order code {code}"))),
    })
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Holds => QORDER_STATUS_HOLDS,
        Status::HoldsReversed => QORDER_STATUS_HOLDS_REVERSED,
        Status::BothDirectionsFail => QORDER_STATUS_BOTH_DIRECTIONS_FAIL,
        Status::Equivalent => QORDER_STATUS_EQUIVALENT,
        Status::Inconclusive => QORDER_STATUS_INCONCLUSIVE,
    }
}

fn grid_from(n: u32) -> Result<GridConfig, Failure> {
    match n {
        0 => Ok(GridConfig::default()),
        1..=15 => Err(Failure(QORDER_ERR_INVALID_ARGUMENT, format!("grid must have at least 16 points, got {n}"))),
        _ => Ok(GridConfig::with_n(n as usize)),
    }
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn qorder_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a model spec such as `tukey:4,1,2.5` or `exp1`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qorder_model_from_spec(spec: *const c_char, out: *mut *mut QorderModel) -> i32 {
    guard(|| {
        let spec = read_str(spec, "spec")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let m = QuantileModel::from_spec(spec)?;
        write_out(out, Box::into_raw(Box::new(QorderModel { inner: m })))
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `m` must come from `qorder_model_from_spec` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qorder_model_free(m: *mut QorderModel) {
    if !m.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(m))));
    }
}

/// # Safety
/// `m` must be a live model and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qorder_model_quantile(m: *const QorderModel, p: f64, out: *mut f64) -> i32 {
    guard(|| {
        let v = model(m, "model")?.quantile(p)?;
        write_out(out, v)
    })
}

/// # Safety
/// `m` must be a live model and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qorder_model_quantile_density(m: *const QorderModel, p: f64, out: *mut f64) -> i32 {
    guard(|| {
        let v = model(m, "model")?.quantile_density(p)?;
        write_out(out, v)
    })
}

/// # Safety
/// `m` must be a live model and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qorder_model_mean(m: *const QorderModel, out: *mut f64) -> i32 {
    guard(|| {
        let v = model(m, "model")?.mean()?;
        write_out(out, v)
    })
}

/// Verdict for a single order. `grid = 0` selects the default size.
///
/// # Safety
/// `x` and `y` must be live models and `status` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qorder_compare_order(
    x: *const QorderModel,
    y: *const QorderModel,
    order: i32,
    method: i32,
    grid: u32,
    status: *mut i32,
) -> i32 {
    guard(|| {
        let (x, y) = (model(x, "x")?, model(y, "y")?);
        let order = order_from(order)?;
        let method = method_from(method)?;
        if status.is_null() {
            return Err(null("status"));
        }
        let grid = grid_from(grid)?;
        let v = if method == MethodChoice::Both {
            compare_all(x, y, &CompareOptions { method, grid })?.get(order).clone()
        } else {
            Comparator::new(x, y, CompareOptions { method, grid })?.verdict(order)?
        };
        write_out(status, status_code(v.status))
    })
}

/// Full comparison report as JSON. Free the string with `qorder_string_free`.
///
/// # Safety
/// `x` and `y` must be live models and `json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qorder_compare_json(
    x: *const QorderModel,
    y: *const QorderModel,
    method: i32,
    grid: u32,
    json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let (x, y) = (model(x, "x")?, model(y, "y")?);
        let method = method_from(method)?;
        if json.is_null() {
            return Err(null("output pointer"));
        }
        let grid = grid_from(grid)?;
        let cmp = compare_all(x, y, &CompareOptions { method, grid })?;
        let mut j = report::header("compare");
        j.push("x", x.to_string().into());
        j.push("y", y.to_string().into());
        j.push("grid", grid.n.into());
        report::comparison_fields(&cmp, &mut j);
        write_out(json, to_c_string(j.render()))
    })
}

/// Aging report of `x` against the unit exponential, as JSON.
///
/// # Safety
/// `x` must be a live model and `json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qorder_aging_json(x: *const QorderModel, grid: u32, json: *mut *mut c_char) -> i32 {
    guard(|| {
        let x = model(x, "x")?;
        if json.is_null() {
            return Err(null("output pointer"));
        }
        let grid = grid_from(grid)?;
        let r = aging_report(x, &grid)?;
        let mut j = report::header("aging");
        j.push("x", x.to_string().into());
        j.push("grid", grid.n.into());
        report::aging_fields(&r, &mut j);
        write_out(json, to_c_string(j.render()))
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qorder_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
