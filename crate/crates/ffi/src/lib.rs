//! C ABI over `orlicz-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_parse`/`*_from_json`
//! and released by the matching `*_free`. Every fallible call returns an
//! [`OrliczStatus`]; on failure the message is kept per thread and can be read
//! with [`orlicz_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use orlicz_core::config::RunConfig;
use orlicz_core::orlicz::{luxemburg_norm, modular, orlicz_norm_amemiya, SimpleFunction};
use orlicz_core::polytope::Polytope;
use orlicz_core::suites::run_suite;
use orlicz_core::valuation::{psi, XiFunction};
use orlicz_core::young::YoungFunction;
use orlicz_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrliczStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Resolution = 4,
    Geometry = 5,
    Capability = 6,
    Accuracy = 7,
    Optimization = 8,
    Construction = 9,
    Experiment = 10,
    Parse = 11,
    BufferTooSmall = 12,
    Panic = 13,
}

/// A Young function.
pub struct OrliczYoung(YoungFunction);

/// A simple function `Σ αᵢ χ_{Mᵢ}`.
pub struct OrliczSimple(SimpleFunction);

/// A composer `ξ` with `ξ(0) = 0`.
pub struct OrliczXi(XiFunction);

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(OrliczStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Domain(_) => OrliczStatus::Domain,
            Error::Resolution(_) => OrliczStatus::Resolution,
            Error::Geometry(_) => OrliczStatus::Geometry,
            Error::Capability { .. } => OrliczStatus::Capability,
            Error::Accuracy { .. } => OrliczStatus::Accuracy,
            Error::Optimization(_) => OrliczStatus::Optimization,
            Error::Construction(_) => OrliczStatus::Construction,
            Error::Experiment(_) => OrliczStatus::Experiment,
            Error::Parse(_) => OrliczStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(OrliczStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, translating errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OrliczStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OrliczStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            OrliczStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(OrliczStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_slice(out: *mut f64, len: usize, v: &[f64], written: *mut usize) -> Result<(), Failure> {
    if !written.is_null() {
        written.write(v.len());
    }
    if len < v.len() {
        return Err(Failure(OrliczStatus::BufferTooSmall, format!("need {} doubles, got {len}", v.len())));
    }
    if out.is_null() {
        return Err(null("out"));
    }
    ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
    Ok(())
}

/// Byte length of the last error message on this thread, without the terminator; 0 if none.
#[no_mangle]
pub extern "C" fn orlicz_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(0, String::len))
}

/// Copy the last error message into `buf` (NUL-terminated, truncated to `len − 1` bytes).
/// Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn orlicz_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let msg = e.as_deref().unwrap_or("");
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        msg.len()
    })
}

/// Parse a Young function: `power:P[:SCALE]`, `exp[:SCALE]`, `exp_conjugate[:SCALE]` or JSON.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_young_parse(spec: *const c_char, out: *mut *mut OrliczYoung) -> OrliczStatus {
    guard(|| {
        let phi: YoungFunction = text(spec, "spec")?.parse()?;
        write(out, Box::into_raw(Box::new(OrliczYoung(phi))), "out")
    })
}

/// # Safety
/// `phi` must be null or a handle from this library that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn orlicz_young_free(phi: *mut OrliczYoung) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

/// # Safety
/// `phi` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_young_eval(phi: *const OrliczYoung, t: f64, out: *mut f64) -> OrliczStatus {
    guard(|| write(out, handle(phi, "phi")?.0.eval(t)?, "out"))
}

/// # Safety
/// `phi` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_young_inverse(phi: *const OrliczYoung, y: f64, out: *mut f64) -> OrliczStatus {
    guard(|| write(out, handle(phi, "phi")?.0.inverse(y)?, "out"))
}

/// The complementary Young function as a new handle.
///
/// # Safety
/// `phi` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_young_conjugate(phi: *const OrliczYoung, out: *mut *mut OrliczYoung) -> OrliczStatus {
    guard(|| {
        let star = handle(phi, "phi")?.0.conjugate()?.phi_star;
        write(out, Box::into_raw(Box::new(OrliczYoung(star))), "out")
    })
}

/// Parse a simple function from `{"dim": n, "terms": [{"value": a, "region": {...}}, ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_simple_from_json(json: *const c_char, out: *mut *mut OrliczSimple) -> OrliczStatus {
    guard(|| {
        let h: SimpleFunction = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        write(out, Box::into_raw(Box::new(OrliczSimple(h))), "out")
    })
}

/// # Safety
/// `h` must be null or a handle from this library that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn orlicz_simple_free(h: *mut OrliczSimple) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_simple_dim(h: *const OrliczSimple, out: *mut usize) -> OrliczStatus {
    guard(|| write(out, handle(h, "h")?.0.dim(), "out"))
}

/// Modular, Luxemburg norm and Orlicz (Amemiya) norm of `h`. Any output pointer may be null.
///
/// # Safety
/// Handles must be live; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_norms(
    phi: *const OrliczYoung,
    h: *const OrliczSimple,
    modular_out: *mut f64,
    luxemburg_out: *mut f64,
    orlicz_out: *mut f64,
) -> OrliczStatus {
    guard(|| {
        let phi = &handle(phi, "phi")?.0;
        let h = &handle(h, "h")?.0;
        if !modular_out.is_null() {
            modular_out.write(modular(phi, h)?);
        }
        if !luxemburg_out.is_null() {
            luxemburg_out.write(luxemburg_norm(phi, h)?);
        }
        if !orlicz_out.is_null() {
            orlicz_out.write(orlicz_norm_amemiya(phi, h)?);
        }
        Ok(())
    })
}

/// Parse `ξ`: `identity`, `poly:c1,c2,…`, `pow:k`, `signed:FAMILY…`, `tanh:a,b` or JSON.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_xi_parse(spec: *const c_char, out: *mut *mut OrliczXi) -> OrliczStatus {
    guard(|| {
        let xi: XiFunction = text(spec, "spec")?.parse()?;
        write(out, Box::into_raw(Box::new(OrliczXi(xi))), "out")
    })
}

/// # Safety
/// `xi` must be null or a handle from this library that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn orlicz_xi_free(xi: *mut OrliczXi) {
    if !xi.is_null() {
        drop(Box::from_raw(xi));
    }
}

/// `Ψ_ξ(h)` into `out[0..dim]`. `written` (may be null) receives `dim`; a short buffer
/// yields `ORLICZ_STATUS_BUFFER_TOO_SMALL`.
///
/// # Safety
/// Handles must be live; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn orlicz_psi(
    xi: *const OrliczXi,
    h: *const OrliczSimple,
    out: *mut f64,
    len: usize,
    written: *mut usize,
) -> OrliczStatus {
    guard(|| {
        let m = psi(&handle(xi, "xi")?.0, &handle(h, "h")?.0);
        write_slice(out, len, &m.0, written)
    })
}

/// Moment vector `∫_P x dx` of the hull of `count` points stored row-major in `coords`.
///
/// # Safety
/// `coords` must hold `count·dim` doubles; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn orlicz_polytope_moment(
    coords: *const f64,
    count: usize,
    dim: usize,
    out: *mut f64,
    len: usize,
) -> OrliczStatus {
    guard(|| {
        if coords.is_null() {
            return Err(null("coords"));
        }
        let flat = std::slice::from_raw_parts(coords, count * dim);
        let pts: Vec<Vec<f64>> = flat.chunks(dim.max(1)).map(<[f64]>::to_vec).collect();
        let m = Polytope::new(dim, pts)?.moment();
        write_slice(out, len, &m.0, ptr::null_mut())
    })
}

/// Run a verification battery at default scale; `pass` receives 1 or 0.
///
/// # Safety
/// `suite` must be a NUL-terminated string; `pass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn orlicz_verify(suite: *const c_char, seed: u64, pass: *mut i32) -> OrliczStatus {
    guard(|| {
        let cfg = RunConfig {
            seed,
            ..RunConfig::default()
        };
        let rep = run_suite(text(suite, "suite")?, &cfg)?;
        write(pass, rep.pass as i32, "pass")
    })
}
