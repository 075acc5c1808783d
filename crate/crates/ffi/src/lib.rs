//! C interface to the `dequant` library.
//!
//! Every fallible call returns a [`DequantStatus`]; on failure the message is
//! available from [`dequant_last_error`] on the same thread. Objects handed out
//! through `out` pointers are owned by the caller and must be released with the
//! matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dequant::moyal::{dequantise, moyal_bracket, poisson_bracket, star_product};
use dequant::wigner::{observables, wigner_of_state, SpatialGrid, StateVector};
use dequant::{parse_poly, Error, PolySymbol};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DequantStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    DimensionMismatch = 4,
    Precondition = 5,
    Numerical = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DequantBracketKind {
    Star = 0,
    Moyal = 1,
    Poisson = 2,
}

/// Opaque polynomial handle.
pub struct DequantPoly(PolySymbol);

/// Opaque dequantisation report handle.
pub struct DequantReport(dequant::moyal::DequantReport);

/// Phase-space observables of a Wigner function.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DequantObservables {
    pub norm: f64,
    pub mean_q: f64,
    pub mean_p: f64,
    pub purity: f64,
    pub negativity: f64,
    pub min_value: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DequantStatus {
    match e {
        Error::Parse { .. } => DequantStatus::Parse,
        Error::DimensionMismatch { .. } => DequantStatus::DimensionMismatch,
        Error::Precondition(_) | Error::EvenGrid(_) | Error::GridMismatch(_) | Error::Unnormalized(_) => {
            DequantStatus::Precondition
        }
        _ => DequantStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), DequantStatus>) -> DequantStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DequantStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            DequantStatus::Panic
        }
    }
}

fn lift<T>(r: dequant::Result<T>) -> Result<T, DequantStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, DequantStatus> {
    if s.is_null() {
        set_error("null string".into());
        return Err(DequantStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string is not valid UTF-8".into());
        DequantStatus::InvalidUtf8
    })
}

unsafe fn poly<'a>(p: *const DequantPoly) -> Result<&'a PolySymbol, DequantStatus> {
    p.as_ref().map(|p| &p.0).ok_or_else(|| {
        set_error("null polynomial handle".into());
        DequantStatus::NullPointer
    })
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), DequantStatus> {
    if out.is_null() {
        set_error("null output pointer".into());
        return Err(DequantStatus::NullPointer);
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn store_string(out: *mut *mut c_char, s: String) -> Result<(), DequantStatus> {
    if out.is_null() {
        set_error("null output pointer".into());
        return Err(DequantStatus::NullPointer);
    }
    *out = CString::new(s).map_err(|_| DequantStatus::Numerical)?.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dequant_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dequant_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `text` as a polynomial in `dim` degrees of freedom.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dequant_poly_parse(
    text: *const c_char,
    dim: usize,
    out: *mut *mut DequantPoly,
) -> DequantStatus {
    guard(|| {
        let s = c_str(text)?;
        let p = lift(parse_poly(s, dim))?;
        store(out, DequantPoly(p))
    })
}

/// Renders a polynomial in the parser grammar. Free the result with
/// [`dequant_string_free`].
///
/// # Safety
/// `p` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dequant_poly_render(p: *const DequantPoly, out: *mut *mut c_char) -> DequantStatus {
    guard(|| store_string(out, poly(p)?.to_string()))
}

/// # Safety
/// `p` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn dequant_poly_free(p: *mut DequantPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `a` and `b` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dequant_star(
    a: *const DequantPoly,
    b: *const DequantPoly,
    out: *mut *mut DequantPoly,
) -> DequantStatus {
    dequant_bracket(a, b, DequantBracketKind::Star, out)
}

/// Star product, Moyal bracket or Poisson bracket of `a` and `b`.
///
/// # Safety
/// `a` and `b` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dequant_bracket(
    a: *const DequantPoly,
    b: *const DequantPoly,
    kind: DequantBracketKind,
    out: *mut *mut DequantPoly,
) -> DequantStatus {
    guard(|| {
        let (a, b) = (poly(a)?, poly(b)?);
        let r = match kind {
            DequantBracketKind::Star => star_product(a, b),
            DequantBracketKind::Moyal => moyal_bracket(a, b),
            DequantBracketKind::Poisson => poisson_bracket(a, b),
        };
        store(out, DequantPoly(lift(r)?))
    })
}

/// Runs the Grassmann dequantisation pipeline on `h`.
///
/// # Safety
/// `h` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dequant_verify(h: *const DequantPoly, out: *mut *mut DequantReport) -> DequantStatus {
    guard(|| {
        let r = lift(dequantise(poly(h)?))?;
        store(out, DequantReport(r))
    })
}

/// True when the Berezin result equals the classical extended Hamiltonian.
///
/// # Safety
/// `r` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn dequant_report_is_exact(r: *const DequantReport) -> bool {
    r.as_ref().is_some_and(|r| r.0.is_exact())
}

/// Report as a JSON document. Free the result with [`dequant_string_free`].
///
/// # Safety
/// `r` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dequant_report_json(r: *const DequantReport, out: *mut *mut c_char) -> DequantStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| {
            set_error("null report handle".into());
            DequantStatus::NullPointer
        })?;
        store_string(out, r.0.to_json())
    })
}

/// # Safety
/// `r` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn dequant_report_free(r: *mut DequantReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must be a string returned by this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn dequant_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Observables of the Wigner function of a Gaussian state sampled on an odd
/// grid of `n_points` with the square-lattice box length.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dequant_gaussian_observables(
    n_points: usize,
    hbar: f64,
    q0: f64,
    p0: f64,
    sigma_q: f64,
    out: *mut DequantObservables,
) -> DequantStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer".into());
            return Err(DequantStatus::NullPointer);
        }
        let grid = lift(SpatialGrid::square(n_points, hbar))?;
        let psi = lift(StateVector::gaussian(grid, q0, p0, sigma_q))?;
        let o = observables(&lift(wigner_of_state(&psi))?);
        *out = DequantObservables {
            norm: o.norm,
            mean_q: o.mean_q,
            mean_p: o.mean_p,
            purity: o.purity,
            negativity: o.negativity,
            min_value: o.min_value,
        };
        Ok(())
    })
}
