//! C ABI over `horoboundary`.
//!
//! Every fallible function returns an [`HbStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and
//! can be read with [`hb_last_error_message`]. Handles are opaque and owned
//! by the caller, who releases them with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use horoboundary::gm::{xi_alpha, PolynomialForm};
use horoboundary::pillowcase::hm_solve;
use horoboundary::surface::{classify, SurfaceSignature};
use horoboundary::torus::{self, Foliation, TorusPoint, TorusQd};
use horoboundary::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbStatus {
    Ok = 0,
    InvalidInput = 1,
    NoConvergence = 2,
    NullPointer = 3,
    Panic = 4,
}

/// Point `x + i y` of the upper half-plane.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbPoint {
    pub x: f64,
    pub y: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HbClassification {
    pub iso_visual: bool,
    pub busemann_continuous: bool,
    pub global_section: bool,
    pub sigma_numerator: i64,
    pub sigma_denominator: i64,
    pub dim_lower_bound: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbPillowSolution {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub l: f64,
    pub g: f64,
    pub ext: f64,
    pub invariant_residual: f64,
    pub iterations: u32,
}

/// Unit-area quadratic differential on the torus.
pub struct HbTorusQd(TorusQd);

/// Degree-two fiber polynomial.
pub struct HbXiAlpha(PolynomialForm);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(HbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } => HbStatus::NoConvergence,
            _ => HbStatus::InvalidInput,
        };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(HbStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HbStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HbStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            HbStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn point(p: HbPoint) -> Result<TorusPoint, Failure> {
    Ok(TorusPoint::new(p.x, p.y)?)
}

fn hb_point(p: TorusPoint) -> HbPoint {
    HbPoint { x: p.x, y: p.y }
}

/// Message of the last failed call on this thread, or null.
///
/// The pointer stays valid until the next `hb_*` call on the same thread.
#[no_mangle]
pub extern "C" fn hb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Classify the surface of genus `g` with `b_m` marked and `b_u` unmarked
/// boundary components and `p` punctures.
///
/// # Safety
/// `out` must be null or point to writable memory for one `HbClassification`.
#[no_mangle]
pub unsafe extern "C" fn hb_classify(
    g: u32,
    b_m: u32,
    b_u: u32,
    p: u32,
    out: *mut HbClassification,
) -> HbStatus {
    guard(|| {
        let r = classify(&SurfaceSignature::new(g, b_m, b_u, p));
        let value = HbClassification {
            iso_visual: r.iso_visual,
            busemann_continuous: r.busemann_continuous,
            global_section: r.global_section,
            sigma_numerator: *r.sigma.numer(),
            sigma_denominator: *r.sigma.denom(),
            dim_lower_bound: r.dim_lower_bound,
        };
        write(out, value, "out")
    })
}

/// Teichmüller distance between two marked tori.
///
/// # Safety
/// `out` must be null or point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn hb_torus_distance(a: HbPoint, b: HbPoint, out: *mut f64) -> HbStatus {
    guard(|| write(out, torus::distance(point(a)?, point(b)?), "out"))
}

/// Quadratic differential at `base` with vertical class `(p, q)`.
///
/// # Safety
/// `out` must be null or point to writable storage for one handle pointer.
/// The handle written there must be released with [`hb_torus_qd_free`].
#[no_mangle]
pub unsafe extern "C" fn hb_torus_qd_new(
    base: HbPoint,
    p: f64,
    q: f64,
    out: *mut *mut HbTorusQd,
) -> HbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let qd = torus::make_qd(point(base)?, Foliation::new(p, q)?)?;
        out.write(Box::into_raw(Box::new(HbTorusQd(qd))));
        Ok(())
    })
}

/// # Safety
/// `qd` must be null or a handle from [`hb_torus_qd_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hb_torus_qd_free(qd: *mut HbTorusQd) {
    if !qd.is_null() {
        drop(Box::from_raw(qd));
    }
}

unsafe fn qd_ref<'a>(qd: *const HbTorusQd) -> Result<&'a TorusQd, Failure> {
    qd.as_ref().map(|h| &h.0).ok_or_else(|| null("qd"))
}

/// Point at time `t` on the Teichmüller ray.
///
/// # Safety
/// `qd` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hb_torus_qd_ray(
    qd: *const HbTorusQd,
    t: f64,
    out: *mut HbPoint,
) -> HbStatus {
    guard(|| write(out, hb_point(torus::ray(qd_ref(qd)?, t)), "out"))
}

/// Point at parameter `t` on the horocycle through the base point.
///
/// # Safety
/// `qd` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hb_torus_qd_horocycle(
    qd: *const HbTorusQd,
    t: f64,
    out: *mut HbPoint,
) -> HbStatus {
    guard(|| write(out, hb_point(torus::horocycle(qd_ref(qd)?, t)), "out"))
}

/// Busemann horofunction of the ray evaluated at `x`.
///
/// # Safety
/// `qd` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hb_torus_qd_busemann_xi(
    qd: *const HbTorusQd,
    x: HbPoint,
    out: *mut f64,
) -> HbStatus {
    guard(|| {
        let v = torus::xi_eval(&torus::busemann_gm(qd_ref(qd)?), point(x)?)?;
        write(out, v, "out")
    })
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// Fiber polynomial for `c` blocks and twist parameters `alpha` (length `3c`).
///
/// # Safety
/// `alpha` must point to `alpha_len` readable doubles; `out` must be null or
/// writable. Release the handle with [`hb_xi_alpha_free`].
#[no_mangle]
pub unsafe extern "C" fn hb_xi_alpha_new(
    c: usize,
    alpha: *const f64,
    alpha_len: usize,
    out: *mut *mut HbXiAlpha,
) -> HbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let form = xi_alpha(c, slice(alpha, alpha_len, "alpha")?, None)?;
        out.write(Box::into_raw(Box::new(HbXiAlpha(form))));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`hb_xi_alpha_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hb_xi_alpha_free(h: *mut HbXiAlpha) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hb_xi_alpha_dim(h: *const HbXiAlpha) -> usize {
    h.as_ref().map_or(0, |h| h.0.dim())
}

/// Value at the coordinate vector `x`.
///
/// # Safety
/// `h` must be a live handle, `x` must point to `len` readable doubles and
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hb_xi_alpha_eval(
    h: *const HbXiAlpha,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> HbStatus {
    guard(|| {
        let form = &h.as_ref().ok_or_else(|| null("handle"))?.0;
        if len != form.dim() {
            return Err(Failure(
                HbStatus::InvalidInput,
                format!("expected {} coordinates, got {len}", form.dim()),
            ));
        }
        write(out, form.eval(slice(x, len, "x")?), "out")
    })
}

/// Sum of all coefficients, the value of the square at the all-ones vector.
///
/// # Safety
/// `h` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn hb_xi_alpha_coefficient_sum(
    h: *const HbXiAlpha,
    out: *mut f64,
) -> HbStatus {
    guard(|| {
        let form = &h.as_ref().ok_or_else(|| null("handle"))?.0;
        write(out, form.coefficient_sum(), "out")
    })
}

/// Solve the pillowcase family at `t` in `(0, 1)`.
///
/// # Safety
/// `out` must be null or point to a writable `HbPillowSolution`.
#[no_mangle]
pub unsafe extern "C" fn hb_pillow_solve(t: f64, out: *mut HbPillowSolution) -> HbStatus {
    guard(|| {
        let s = hm_solve(t)?;
        let value = HbPillowSolution {
            t: s.t,
            a: s.a,
            b: s.b,
            l: s.l,
            g: s.g,
            ext: s.ext,
            invariant_residual: s.residuals.invariant_match,
            iterations: u32::try_from(s.iterations).unwrap_or(u32::MAX),
        };
        write(out, value, "out")
    })
}
