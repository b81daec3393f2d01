//! C interface to `octacover`.
//!
//! Polytopes and translate sets live behind opaque handles. Every function
//! returns an integer status (`OC_OK` on success) and writes results through
//! out-pointers. Rationals cross the boundary as `"p/q"` strings and reports
//! as JSON; strings returned by the library are released with
//! `oc_string_free`. After a failure, `oc_last_error` describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use octacover::coverage::certify_covering;
use octacover::density::{density, theorem_report};
use octacover::io::{read_polytope, read_translates, write_translates};
use octacover::octahedron::{octahedron, parallelohedron_p, TranslateSet};
use octacover::overlap::exact_pair_volume;
use octacover::scalar::{format_rational, parse_rational, rational_to_f64};
use octacover::search::{minimize_density, SearchParams};
use octacover::{Error, Polytope3, Rational, Vec3};

pub const OC_OK: i32 = 0;
pub const OC_ERR_NULL: i32 = 1;
pub const OC_ERR_UTF8: i32 = 2;
pub const OC_ERR_PARSE: i32 = 3;
pub const OC_ERR_DEGENERATE: i32 = 4;
pub const OC_ERR_NOT_COVERING: i32 = 5;
pub const OC_ERR_INVALID: i32 = 6;
pub const OC_ERR_GEOMETRY: i32 = 7;
pub const OC_ERR_PANIC: i32 = 99;

/// A convex polytope with rational vertices.
pub struct OcPolytope(Polytope3);

/// A set of distinct translation vectors for the octahedron |x|+|y|+|z| ≤ 2.
pub struct OcTranslates(TranslateSet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) => OC_ERR_PARSE,
            Error::DegenerateInput | Error::Empty | Error::Unbounded | Error::LowerDimensional { .. } => {
                OC_ERR_DEGENERATE
            }
            Error::NotACovering { .. } | Error::InitialNotCovering | Error::NoOriginTranslate => OC_ERR_NOT_COVERING,
            Error::NonPositiveScale
            | Error::NonPositiveStep
            | Error::InvalidParameter(_)
            | Error::DuplicateTranslate { .. }
            | Error::IndexOutOfRange { .. } => OC_ERR_INVALID,
            _ => OC_ERR_GEOMETRY,
        };
        Failure(code, e.to_string())
    }
}

impl From<octacover::ParseError> for Failure {
    fn from(e: octacover::ParseError) -> Self {
        Failure(OC_ERR_PARSE, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            OC_OK
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            OC_ERR_PANIC
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(OC_ERR_NULL, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(OC_ERR_UTF8, "argument is not UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(OC_ERR_NULL, "null handle".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(OC_ERR_NULL, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    put(out, ptr::null_mut())?;
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(OC_ERR_INVALID, "interior NUL in output".into()))?;
    if out.is_null() {
        return Err(Failure(OC_ERR_NULL, "null output pointer".into()));
    }
    out.write(c.into_raw());
    Ok(())
}

fn vec3(s: &str) -> Result<Vec3, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Failure(OC_ERR_PARSE, format!("expected x,y,z, got {s:?}")));
    }
    Ok(Vec3::new(parse_rational(parts[0])?, parse_rational(parts[1])?, parse_rational(parts[2])?))
}

fn rational(s: &str) -> Result<Rational, Failure> {
    Ok(parse_rational(s)?)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn oc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn oc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The octahedron C₃ = {|x|+|y|+|z| ≤ 2}.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn oc_octahedron(out: *mut *mut OcPolytope) -> i32 {
    guard(|| put_box(out, OcPolytope(octahedron())))
}

/// The parallelepiped P = conv{±8e₁, ±8e₂, ±8e₃, ±(8,8,8)}.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn oc_parallelohedron(out: *mut *mut OcPolytope) -> i32 {
    guard(|| put_box(out, OcPolytope(parallelohedron_p())))
}

/// Hull of `{"vertices": [[x,y,z], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_polytope_from_json(json: *const c_char, out: *mut *mut OcPolytope) -> i32 {
    guard(|| {
        let p = read_polytope(text(json)?)?;
        put_box(out, OcPolytope(p))
    })
}

/// # Safety
/// `p` must come from this library, or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn oc_polytope_free(p: *mut OcPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Exact volume as a `"p/q"` string.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_polytope_volume(p: *const OcPolytope, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let p = handle(p)?;
        put_string(out, format_rational(&p.0.volume()))
    })
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_polytope_vertex_count(p: *const OcPolytope, out: *mut usize) -> i32 {
    guard(|| {
        let p = handle(p)?;
        put(out, p.0.vertices().len())
    })
}

/// Parse `{"translates": [[x,y,z], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_translates_from_json(json: *const c_char, out: *mut *mut OcTranslates) -> i32 {
    guard(|| {
        let x = read_translates(text(json)?)?;
        put_box(out, OcTranslates(x))
    })
}

/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_translates_to_json(x: *const OcTranslates, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let x = handle(x)?;
        put_string(out, write_translates(&x.0))
    })
}

/// # Safety
/// `x` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_translates_len(x: *const OcTranslates, out: *mut usize) -> i32 {
    guard(|| {
        let x = handle(x)?;
        put(out, x.0.len())
    })
}

/// # Safety
/// `x` must come from this library, or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn oc_translates_free(x: *mut OcTranslates) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// vol((C₃+xi) ∩ (C₃+xj)) for points written `"x,y,z"`.
///
/// # Safety
/// `xi`, `xj` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_pair_volume(xi: *const c_char, xj: *const c_char, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let (a, b) = (vec3(text(xi)?)?, vec3(text(xj)?)?);
        put_string(out, format_rational(&exact_pair_volume(&a, &b)))
    })
}

/// Σ vol((C₃+x) ∩ region) / vol(region), exact, plus its float value.
///
/// # Safety
/// Handles must be live; `out` and `out_f64` must be writable
/// (`out_f64` may be null).
#[no_mangle]
pub unsafe extern "C" fn oc_density(
    x: *const OcTranslates,
    region: *const OcPolytope,
    out: *mut *mut c_char,
    out_f64: *mut f64,
) -> i32 {
    guard(|| {
        let (x, region) = (handle(x)?, handle(region)?);
        let theta = density(&x.0, &region.0);
        if !out_f64.is_null() {
            out_f64.write(rational_to_f64(&theta));
        }
        put_string(out, format_rational(&theta))
    })
}

/// Writes 1 to `out` when the translates provably cover `region` at grid
/// step `h` (a rational string), 0 otherwise.
///
/// # Safety
/// Handles must be live; `h` a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oc_certify_covering(
    x: *const OcTranslates,
    region: *const OcPolytope,
    h: *const c_char,
    out: *mut i32,
) -> i32 {
    guard(|| {
        let (x, region, h) = (handle(x)?, handle(region)?, rational(text(h)?)?);
        let cert = certify_covering(&x.0, &region.0, &h)?;
        put(out, cert.is_certified() as i32)
    })
}

/// Full density report for a covering of P as JSON. A non-covering still
/// yields a report with `bound_satisfied` false.
///
/// # Safety
/// `x` must be live; `h` a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oc_theorem_report(x: *const OcTranslates, h: *const c_char, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let (x, h) = (handle(x)?, rational(text(h)?)?);
        let report = theorem_report(&x.0, &h)?;
        let json = serde_json::to_string(&report).map_err(|e| Failure(OC_ERR_GEOMETRY, e.to_string()))?;
        put_string(out, json)
    })
}

/// Anneal from the 9/8 lattice with default parameters and write the best
/// covering found.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oc_search(iterations: usize, seed: u64, out: *mut *mut OcTranslates) -> i32 {
    guard(|| {
        let params = SearchParams {
            iterations,
            seed,
            ..SearchParams::default()
        };
        let trace = minimize_density(&params)?;
        put_box(out, OcTranslates(trace.best))
    })
}
