//! C ABI over `pmc-core`.
//!
//! Objects cross the boundary as opaque handles created by `pmc_*` constructors
//! and released with the matching `*_free`. Every fallible call returns a
//! [`PmcStatus`]; on failure [`pmc_last_error`] holds a message for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pmc::graphs::{residual_radial, solve_radial, RadialGraph};
use pmc::prescribed::validate_class;
use pmc::rotational::{build_sphere, cmc_sphere_diameter, cylinder_radius, ProfileCurve};
use pmc::{Error, ErrorClass, Kappa, PrescribedFunction};

/// Status codes. The first four match the `pmc` exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmcStatus {
    Ok = 0,
    Usage = 1,
    Precondition = 2,
    Numerical = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    OutOfRange = 6,
    Panic = 7,
}

pub struct PmcPrescription(PrescribedFunction);

pub struct PmcProfile(ProfileCurve);

pub struct PmcRadialGraph {
    graph: RadialGraph,
    kappa: Kappa,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PmcProfileSample {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub sigma: f64,
    pub nu: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PmcRadialSample {
    pub r: f64,
    pub u: f64,
    pub phi: f64,
    pub nu: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PmcClassReport {
    pub in_c1k: bool,
    pub in_c1k_even: bool,
    pub even: bool,
    pub margin: f64,
    pub margin_even: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: PmcStatus, msg: &str) -> PmcStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> PmcStatus {
    let status = match e.class() {
        ErrorClass::Usage => PmcStatus::Usage,
        ErrorClass::Precondition => PmcStatus::Precondition,
        ErrorClass::Numerical => PmcStatus::Numerical,
    };
    fail(status, &e.to_string())
}

fn guard(f: impl FnOnce() -> PmcStatus) -> PmcStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(PmcStatus::Panic, "panic: internal error"))
}

fn kappa(value: c_int) -> Result<Kappa, PmcStatus> {
    Kappa::new(value).map_err(from_error)
}

macro_rules! deref {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(PmcStatus::NullPointer, concat!("null pointer: ", stringify!($p))),
        }
    };
}

macro_rules! out {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(v) => v,
            None => return fail(PmcStatus::NullPointer, concat!("null pointer: ", stringify!($p))),
        }
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pmc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pmc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a JSON prescription descriptor.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmc_prescription_parse(json: *const c_char, out: *mut *mut PmcPrescription) -> PmcStatus {
    guard(|| {
        let out = out!(out);
        *out = ptr::null_mut();
        if json.is_null() {
            return fail(PmcStatus::NullPointer, "null pointer: json");
        }
        let Ok(text) = unsafe { CStr::from_ptr(json) }.to_str() else {
            return fail(PmcStatus::InvalidUtf8, "json is not valid UTF-8");
        };
        match PrescribedFunction::parse(text) {
            Ok(h) => {
                *out = Box::into_raw(Box::new(PmcPrescription(h)));
                PmcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `h` must come from [`pmc_prescription_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pmc_prescription_free(h: *mut PmcPrescription) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// # Safety
/// `h` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pmc_prescription_eval(h: *const PmcPrescription, y: f64, out: *mut f64) -> PmcStatus {
    guard(|| {
        let (h, out) = (deref!(h), out!(out));
        if !(-1.0..=1.0).contains(&y) {
            return fail(PmcStatus::OutOfRange, "y must lie in [-1, 1]");
        }
        *out = h.0.eval(y);
        PmcStatus::Ok
    })
}

/// # Safety
/// `h` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pmc_validate_class(
    h: *const PmcPrescription,
    kappa_value: c_int,
    out: *mut PmcClassReport,
) -> PmcStatus {
    guard(|| {
        let (h, out) = (deref!(h), out!(out));
        let k = tri!(kappa(kappa_value));
        let r = validate_class(&h.0, k);
        *out = PmcClassReport {
            in_c1k: r.in_c1k,
            in_c1k_even: r.in_c1k_even,
            even: r.even,
            margin: r.margin,
            margin_even: r.margin_even,
        };
        PmcStatus::Ok
    })
}

/// # Safety
/// `h` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pmc_cylinder_radius(h: *const PmcPrescription, kappa_value: c_int, out: *mut f64) -> PmcStatus {
    guard(|| {
        let (h, out) = (deref!(h), out!(out));
        let k = tri!(kappa(kappa_value));
        match cylinder_radius(&h.0, k) {
            Ok(rho) => {
                *out = rho;
                PmcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmc_sphere_diameter(h0: f64, kappa_value: c_int, out: *mut f64) -> PmcStatus {
    guard(|| {
        let out = out!(out);
        let k = tri!(kappa(kappa_value));
        match cmc_sphere_diameter(h0, k) {
            Ok(d) => {
                *out = d;
                PmcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Builds the rotational sphere of `h` by shooting from the pole.
///
/// # Safety
/// `h` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pmc_sphere_build(
    h: *const PmcPrescription,
    kappa_value: c_int,
    step: f64,
    out: *mut *mut PmcProfile,
) -> PmcStatus {
    guard(|| {
        let out = out!(out);
        *out = ptr::null_mut();
        let h = deref!(h);
        let k = tri!(kappa(kappa_value));
        match build_sphere(&h.0, k, step) {
            Ok(curve) => {
                *out = Box::into_raw(Box::new(PmcProfile(curve)));
                PmcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `p` must come from [`pmc_sphere_build`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pmc_profile_free(p: *mut PmcProfile) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn pmc_profile_len(p: *const PmcProfile) -> usize {
    unsafe { p.as_ref() }.map_or(0, |p| p.0.samples.len())
}

/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pmc_profile_sample(p: *const PmcProfile, index: usize, out: *mut PmcProfileSample) -> PmcStatus {
    guard(|| {
        let (p, out) = (deref!(p), out!(out));
        let Some(s) = p.0.samples.get(index) else {
            return fail(PmcStatus::OutOfRange, "sample index out of range");
        };
        *out = PmcProfileSample { s: s.s, x: s.x, z: s.z, sigma: s.sigma, nu: s.nu() };
        PmcStatus::Ok
    })
}

/// Equator radius and total height of a profile.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pmc_profile_summary(p: *const PmcProfile, equator: *mut f64, height: *mut f64) -> PmcStatus {
    guard(|| {
        let (p, equator, height) = (deref!(p), out!(equator), out!(height));
        *equator = p.0.equator_radius();
        *height = p.0.height();
        PmcStatus::Ok
    })
}

/// The part of a sphere profile below its equator, as a radial graph.
///
/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pmc_profile_lower_cap(p: *const PmcProfile, out: *mut *mut PmcRadialGraph) -> PmcStatus {
    guard(|| {
        let out = out!(out);
        *out = ptr::null_mut();
        let p = deref!(p);
        match p.0.lower_cap() {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(PmcRadialGraph { graph, kappa: p.0.kappa }));
                PmcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Radial Dirichlet problem with zero boundary value on the disk of radius `radius`.
///
/// # Safety
/// `h` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pmc_solve_radial(
    h: *const PmcPrescription,
    kappa_value: c_int,
    radius: f64,
    step: f64,
    out: *mut *mut PmcRadialGraph,
) -> PmcStatus {
    guard(|| {
        let out = out!(out);
        *out = ptr::null_mut();
        let h = deref!(h);
        let k = tri!(kappa(kappa_value));
        match solve_radial(&h.0, k, radius, step) {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(PmcRadialGraph { graph, kappa: k }));
                PmcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `g` must come from a `pmc_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pmc_radial_free(g: *mut PmcRadialGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn pmc_radial_len(g: *const PmcRadialGraph) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.graph.len())
}

/// # Safety
/// `g` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pmc_radial_sample(g: *const PmcRadialGraph, index: usize, out: *mut PmcRadialSample) -> PmcStatus {
    guard(|| {
        let (g, out) = (deref!(g), out!(out));
        let gr = &g.graph;
        if index >= gr.len() {
            return fail(PmcStatus::OutOfRange, "sample index out of range");
        }
        *out = PmcRadialSample { r: gr.r[index], u: gr.u[index], phi: gr.phi[index], nu: gr.nu[index] };
        PmcStatus::Ok
    })
}

/// Max-norm residual of the graph equation for prescription `h`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pmc_radial_residual(
    g: *const PmcRadialGraph,
    h: *const PmcPrescription,
    out: *mut f64,
) -> PmcStatus {
    guard(|| {
        let (g, h, out) = (deref!(g), deref!(h), out!(out));
        *out = residual_radial(&g.graph, &h.0, g.kappa).max_residual;
        PmcStatus::Ok
    })
}
