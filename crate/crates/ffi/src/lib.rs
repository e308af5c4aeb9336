//! C ABI over `current_lab`.
//!
//! Objects are opaque handles created by `cl_*_new` functions and released
//! with the matching `cl_*_free`. Every fallible call returns a
//! [`ClStatus`]; on failure a message is available from
//! [`cl_last_error_message`] on the same thread. Strings returned by the
//! library are released with [`cl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use current_lab::cli;
use current_lab::num_complex::Complex64;
use current_lab::periods::{full_periods, reduced_alpha_periods, HyperellipticCurve, PeriodData};
use current_lab::search::{classify_charge, search_rational, ChargeKind, SearchResult};
use current_lab::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClStatus {
    ClOk = 0,
    ClErrNullPointer = 1,
    ClErrInput = 2,
    ClErrDomain = 3,
    ClErrConfig = 4,
    ClErrNumerical = 5,
    ClErrNoSolution = 6,
    ClErrIo = 7,
    ClErrInvalidUtf8 = 8,
    ClErrPanic = 9,
}

/// Classification of a module charge.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClChargeKind {
    ClIntegrableHighest = 0,
    ClIntegrableLowest = 1,
    ClNonintegrable = 2,
}

/// Genus-2 curve `y² = (z² − s²)(z² − t²)(z² − r²)`.
pub struct ClCurve(HyperellipticCurve);

/// Period matrices and `τ` of a curve.
pub struct ClPeriodData(PeriodData);

/// Outcome of a rational-ratio search.
pub struct ClSearchResult(SearchResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> ClStatus {
    match err {
        Error::Input(_) => ClStatus::ClErrInput,
        Error::Domain(_) => ClStatus::ClErrDomain,
        Error::Config(_) => ClStatus::ClErrConfig,
        Error::Numerical(_) => ClStatus::ClErrNumerical,
        Error::NoSolution { .. } => ClStatus::ClErrNoSolution,
        Error::Json(_) => ClStatus::ClErrInput,
        Error::Io(_) => ClStatus::ClErrIo,
    }
}

/// Run `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), ClStatus>) -> ClStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ClStatus::ClOk,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            ClStatus::ClErrPanic
        }
    }
}

fn lift<T>(r: current_lab::Result<T>) -> Result<T, ClStatus> {
    r.map_err(|e| {
        let s = status_of(&e);
        set_error(e.to_string());
        s
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), ClStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(ClStatus::ClErrNullPointer);
    }
    Ok(())
}

fn write_complex(z: &[Complex64], re: *mut f64, im: *mut f64) {
    for (k, v) in z.iter().enumerate() {
        // SAFETY: callers check non-null and the C contract gives `z.len()` slots
        unsafe {
            *re.add(k) = v.re;
            *im.add(k) = v.im;
        }
    }
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library and valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn cl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Create a curve; requires `0 < s < t < r`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn cl_curve_new(s: f64, t: f64, r: f64, out: *mut *mut ClCurve) -> ClStatus {
    guard(|| {
        non_null(out, "out")?;
        let c = lift(HyperellipticCurve::new(s, t, r))?;
        *out = Box::into_raw(Box::new(ClCurve(c)));
        Ok(())
    })
}

/// # Safety
/// `curve` must come from [`cl_curve_new`] and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cl_curve_free(curve: *mut ClCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Periods `(a1, a2, b1, b2)` of `α = z dz / y` in reduced form, written to
/// four-element arrays.
///
/// # Safety
/// `curve` must be a live handle; `re` and `im` must each hold four doubles.
#[no_mangle]
pub unsafe extern "C" fn cl_alpha_periods(curve: *const ClCurve, re: *mut f64, im: *mut f64) -> ClStatus {
    guard(|| {
        non_null(curve, "curve")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let p = lift(reduced_alpha_periods(&(*curve).0))?;
        write_complex(&p.as_array(), re, im);
        Ok(())
    })
}

/// Compute the period data of `curve`.
///
/// # Safety
/// `curve` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn cl_period_data_new(curve: *const ClCurve, out: *mut *mut ClPeriodData) -> ClStatus {
    guard(|| {
        non_null(curve, "curve")?;
        non_null(out, "out")?;
        let pd = lift(full_periods(&(*curve).0))?;
        *out = Box::into_raw(Box::new(ClPeriodData(pd)));
        Ok(())
    })
}

/// # Safety
/// `data` must come from [`cl_period_data_new`] and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cl_period_data_free(data: *mut ClPeriodData) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// `τ` in row-major order, written to four-element arrays.
///
/// # Safety
/// `data` must be a live handle; `re` and `im` must each hold four doubles.
#[no_mangle]
pub unsafe extern "C" fn cl_period_data_tau(data: *const ClPeriodData, re: *mut f64, im: *mut f64) -> ClStatus {
    guard(|| {
        non_null(data, "data")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let t = &(*data).0.tau;
        write_complex(&[t[(0, 0)], t[(0, 1)], t[(1, 0)], t[(1, 1)]], re, im);
        Ok(())
    })
}

/// Ascending eigenvalues of `Im τ`, written to a two-element array.
///
/// # Safety
/// `data` must be a live handle; `out` must hold two doubles.
#[no_mangle]
pub unsafe extern "C" fn cl_period_data_im_tau_eigenvalues(data: *const ClPeriodData, out: *mut f64) -> ClStatus {
    guard(|| {
        non_null(data, "data")?;
        non_null(out, "out")?;
        let e = (*data).0.im_tau_eigenvalues();
        *out = e[0];
        *out.add(1) = e[1];
        Ok(())
    })
}

/// Search `s ∈ (0, t)` with period ratio `p/q`. On `ClErrNoSolution` the
/// attained ratio range is in the last-error message.
///
/// # Safety
/// `out` must be valid writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn cl_search_rational(p: u64, q: u64, t: f64, r: f64, out: *mut *mut ClSearchResult) -> ClStatus {
    guard(|| {
        non_null(out, "out")?;
        let res = lift(search_rational(p, q, t, r))?;
        *out = Box::into_raw(Box::new(ClSearchResult(res)));
        Ok(())
    })
}

/// # Safety
/// `result` must come from [`cl_search_rational`] and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cl_search_result_free(result: *mut ClSearchResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// The branch point `s` found by the search.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_search_result_s(result: *const ClSearchResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    (*result).0.curve.s
}

/// Ratio reached by the search.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_search_result_ratio(result: *const ClSearchResult) -> f64 {
    if result.is_null() {
        return f64::NAN;
    }
    (*result).0.ratio_found
}

/// Scaled `(a1, b2)` periods, written to two-element arrays.
///
/// # Safety
/// `result` must be a live handle; `re` and `im` must each hold two doubles.
#[no_mangle]
pub unsafe extern "C" fn cl_search_result_scaled_periods(result: *const ClSearchResult, re: *mut f64, im: *mut f64) -> ClStatus {
    guard(|| {
        non_null(result, "result")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let (a1, b2) = (*result).0.scaled_periods;
        write_complex(&[a1, b2], re, im);
        Ok(())
    })
}

/// Classify the charge `re + i·im`.
#[no_mangle]
pub extern "C" fn cl_classify_charge(re: f64, im: f64) -> ClChargeKind {
    match classify_charge(Complex64::new(re, im)).class {
        ChargeKind::IntegrableHighest => ClChargeKind::ClIntegrableHighest,
        ChargeKind::IntegrableLowest => ClChargeKind::ClIntegrableLowest,
        ChargeKind::Nonintegrable => ClChargeKind::ClNonintegrable,
    }
}

/// Run a subcommand with command-line style arguments, e.g.
/// `{"periods", "--curve", "1,2,3"}`. Writes the JSON report to
/// `out_json` (release with [`cl_string_free`]; null when the run fails before
/// producing a report) and the process exit code (0 pass, 1 fail, 2 config
/// error) to `out_exit_code`.
///
/// # Safety
/// `argv` must point to `argc` valid NUL-terminated strings; the out
/// pointers must be valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn cl_run(argc: c_int, argv: *const *const c_char, out_exit_code: *mut c_int, out_json: *mut *mut c_char) -> ClStatus {
    guard(|| {
        non_null(out_exit_code, "out_exit_code")?;
        non_null(out_json, "out_json")?;
        if argc < 0 || (argc > 0 && argv.is_null()) {
            set_error("invalid argument vector".into());
            return Err(ClStatus::ClErrNullPointer);
        }
        let mut args = vec!["current-lab".to_string()];
        for k in 0..argc as usize {
            let a = *argv.add(k);
            non_null(a, "argument")?;
            let s = CStr::from_ptr(a).to_str().map_err(|_| {
                set_error(format!("argument {k} is not UTF-8"));
                ClStatus::ClErrInvalidUtf8
            })?;
            args.push(s.to_string());
        }
        let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
        let code = cli::run(args, &mut stdout, &mut stderr);
        *out_exit_code = code;
        if code == cli::EXIT_CONFIG {
            set_error(String::from_utf8_lossy(&stderr).trim().to_string());
        }
        let text = String::from_utf8_lossy(&stdout).trim().to_string();
        *out_json = if text.starts_with('{') {
            CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
        } else {
            ptr::null_mut()
        };
        Ok(())
    })
}
