//! C ABI over `conveq`.
//!
//! Bodies are opaque handles created by `conveq_body_*` and released with
//! [`conveq_body_free`]. Every fallible function returns a [`ConveqStatus`];
//! on failure a message is available from [`conveq_last_error_message`]
//! until the next call on the same thread. Points are passed as
//! contiguous `double` arrays of length `dim`; point lists as row-major
//! `count × dim` arrays. Functions returning a variable number of points take
//! a capacity (in points) and report the required count through `out_count`,
//! returning `CONVEQ_STATUS_BUFFER_TOO_SMALL` when it does not fit.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use conveq::problem::{self, InstanceFile, RunOptions};
use conveq::{geometry, ConvexBody, Error, Point, Tolerances};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConveqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    NotConverged = 4,
    NotInBody = 5,
    InsideBody = 6,
    UnsoundReduction = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Opaque convex body with its tolerances.
pub struct ConveqBody {
    body: ConvexBody,
    tols: Tolerances,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(ConveqStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch { .. } => ConveqStatus::DimensionMismatch,
            Error::NotConverged { .. } => ConveqStatus::NotConverged,
            Error::NotInBody { .. } => ConveqStatus::NotInBody,
            Error::InsideBody => ConveqStatus::InsideBody,
            Error::UnsoundReduction(_) => ConveqStatus::UnsoundReduction,
            _ => ConveqStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ConveqStatus::NullPointer, format!("`{what}` is null"))
}

fn set_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ConveqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            ConveqStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(Some(format!("internal error: {msg}")));
            ConveqStatus::Panic
        }
    }
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn handle<'a>(body: *const ConveqBody) -> Result<&'a ConveqBody, Failure> {
    body.as_ref().ok_or_else(|| null("body"))
}

unsafe fn point_arg(ptr: *const f64, dim: usize, what: &str) -> Result<Point, Failure> {
    Ok(Point::new(slice(ptr, dim, what)?.to_vec())?)
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_point(out: *mut f64, p: &Point) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out_point"));
    }
    ptr::copy_nonoverlapping(p.coords().as_ptr(), out, p.dim());
    Ok(())
}

unsafe fn write_points(
    points: &[Point],
    out: *mut f64,
    capacity: usize,
    out_count: *mut usize,
) -> Result<(), Failure> {
    write_out(out_count, points.len(), "out_count")?;
    if points.len() > capacity {
        return Err(Failure(
            ConveqStatus::BufferTooSmall,
            format!(
                "{} points do not fit in a buffer of {capacity}",
                points.len()
            ),
        ));
    }
    if points.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null("out_points"));
    }
    let mut cursor = out;
    for p in points {
        ptr::copy_nonoverlapping(p.coords().as_ptr(), cursor, p.dim());
        cursor = cursor.add(p.dim());
    }
    Ok(())
}

fn boxed(body: ConvexBody) -> *mut ConveqBody {
    Box::into_raw(Box::new(ConveqBody {
        body,
        tols: Tolerances::default(),
    }))
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn conveq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn conveq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates `conv` of `count` generators stored row-major in `coords`.
///
/// # Safety
/// `coords` must point to `count * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conveq_body_polytope(
    coords: *const f64,
    count: usize,
    dim: usize,
    out: *mut *mut ConveqBody,
) -> ConveqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if dim == 0 || count == 0 {
            return Err(Failure(
                ConveqStatus::InvalidInput,
                "empty generator list".into(),
            ));
        }
        let len = count
            .checked_mul(dim)
            .ok_or_else(|| Failure(ConveqStatus::InvalidInput, "count * dim overflows".into()))?;
        let flat = slice(coords, len, "coords")?;
        let gens = flat
            .chunks(dim)
            .map(|c| Point::new(c.to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        out.write(boxed(ConvexBody::polytope(gens)?));
        Ok(())
    })
}

/// Creates the closed ball of `radius` around `center`.
///
/// # Safety
/// `center` must point to `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conveq_body_ball(
    center: *const f64,
    dim: usize,
    radius: f64,
    out: *mut *mut ConveqBody,
) -> ConveqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let c = point_arg(center, dim, "center")?;
        out.write(boxed(ConvexBody::ball(c, radius)?));
        Ok(())
    })
}

/// Releases a body. Null is ignored.
///
/// # Safety
/// `body` must come from a `conveq_body_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn conveq_body_free(body: *mut ConveqBody) {
    if !body.is_null() {
        drop(Box::from_raw(body));
    }
}

/// Ambient dimension of the body, or 0 for a null handle.
///
/// # Safety
/// `body` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn conveq_body_dim(body: *const ConveqBody) -> usize {
    body.as_ref().map_or(0, |b| b.body.dim())
}

/// Overrides the feasibility, point and equilibrium tolerances
/// (defaults 1e-8, 1e-12, 1e-9) used by calls on this body.
///
/// # Safety
/// `body` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn conveq_body_set_tolerances(
    body: *mut ConveqBody,
    feas: f64,
    pt: f64,
    eq: f64,
) -> ConveqStatus {
    guard(|| {
        let b = body.as_mut().ok_or_else(|| null("body"))?;
        if [feas, pt, eq].iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Failure(
                ConveqStatus::InvalidInput,
                "tolerances must be finite and non-negative".into(),
            ));
        }
        b.tols = Tolerances {
            feas,
            pt,
            eq,
            max_iter: b.tols.max_iter,
        };
        Ok(())
    })
}

/// Metric projection of `x` onto the body, with the variational
/// certificate `max_{v ∈ S} ⟨v − p, x − p⟩` in `out_residual` (may be null).
///
/// # Safety
/// `x` and `out_point` must hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn conveq_project(
    body: *const ConveqBody,
    x: *const f64,
    dim: usize,
    out_point: *mut f64,
    out_residual: *mut f64,
) -> ConveqStatus {
    guard(|| {
        let b = handle(body)?;
        let r = geometry::project(&b.body, &point_arg(x, dim, "x")?, &b.tols)?;
        write_point(out_point, &r.point)?;
        if !out_residual.is_null() {
            out_residual.write(r.residual);
        }
        Ok(())
    })
}

/// Membership test `dist(x, S) ≤ tol`.
///
/// # Safety
/// `x` must hold `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conveq_contains(
    body: *const ConveqBody,
    x: *const f64,
    dim: usize,
    tol: f64,
    out: *mut bool,
) -> ConveqStatus {
    guard(|| {
        let b = handle(body)?;
        let inside = geometry::contains(&b.body, &point_arg(x, dim, "x")?, tol)?;
        write_out(out, inside, "out")
    })
}

/// Extreme points of a polytope body, in generator order.
///
/// # Safety
/// `out_points` must hold `capacity * dim` doubles (may be null when
/// `capacity` is 0); `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conveq_extreme_points(
    body: *const ConveqBody,
    out_points: *mut f64,
    capacity: usize,
    out_count: *mut usize,
) -> ConveqStatus {
    guard(|| {
        let b = handle(body)?;
        let ext = geometry::extreme_points(&b.body, &b.tols)?;
        write_points(&ext, out_points, capacity, out_count)
    })
}

/// Points of the body farthest from `x`.
///
/// # Safety
/// As [`conveq_extreme_points`]; `x` must hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn conveq_farthest_points(
    body: *const ConveqBody,
    x: *const f64,
    dim: usize,
    out_points: *mut f64,
    capacity: usize,
    out_count: *mut usize,
) -> ConveqStatus {
    guard(|| {
        let b = handle(body)?;
        let far = geometry::farthest_points(&b.body, &point_arg(x, dim, "x")?, &b.tols)?;
        write_points(&far.points, out_points, capacity, out_count)
    })
}

/// Whether `d` lies in the normal cone at `x0`, i.e.
/// `⟨x − x0, d⟩ ≤ tol` for every `x` in the body.
///
/// # Safety
/// `x0` and `d` must hold `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conveq_normal_cone_contains(
    body: *const ConveqBody,
    x0: *const f64,
    d: *const f64,
    dim: usize,
    tol: f64,
    out: *mut bool,
) -> ConveqStatus {
    guard(|| {
        let b = handle(body)?;
        let yes = geometry::normal_cone_contains(
            &b.body,
            &point_arg(x0, dim, "x0")?,
            &point_arg(d, dim, "d")?,
            tol,
        )?;
        write_out(out, yes, "out")
    })
}

/// Boundary point whose translated normal cone contains the exterior point
/// `x`. Fails with `CONVEQ_STATUS_INSIDE_BODY` for points of the body.
///
/// # Safety
/// `x` and `out_point` must hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn conveq_locate_partition_cell(
    body: *const ConveqBody,
    x: *const f64,
    dim: usize,
    out_point: *mut f64,
) -> ConveqStatus {
    guard(|| {
        let b = handle(body)?;
        let base = geometry::locate_partition_cell(&b.body, &point_arg(x, dim, "x")?, &b.tols)?;
        write_point(out_point, &base)
    })
}

unsafe fn run_json(
    json: *const c_char,
    out_report: *mut *mut c_char,
    run: impl FnOnce(&InstanceFile) -> Result<String, Failure>,
) -> ConveqStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out_report.is_null() {
            return Err(null("out_report"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| {
            Failure(
                ConveqStatus::InvalidInput,
                format!("instance is not UTF-8: {e}"),
            )
        })?;
        let file = InstanceFile::parse(text)?;
        let report = CString::new(run(&file)?).expect("JSON has no interior NUL");
        out_report.write(report.into_raw());
        Ok(())
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

/// Runs an instance file (JSON text) and returns the report as JSON. Free
/// the report with [`conveq_string_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string; `out_report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conveq_solve_json(
    json: *const c_char,
    out_report: *mut *mut c_char,
) -> ConveqStatus {
    run_json(json, out_report, |file| {
        Ok(to_json(&problem::execute(file, &RunOptions::default())?))
    })
}

/// Compares the reduced solver with the brute-force oracle for an
/// equilibrium-type instance and returns the comparison as JSON. The call
/// succeeds whether or not the two agree; inspect `"pass"` in the report.
///
/// # Safety
/// As [`conveq_solve_json`].
#[no_mangle]
pub unsafe extern "C" fn conveq_verify_json(
    json: *const c_char,
    out_report: *mut *mut c_char,
) -> ConveqStatus {
    run_json(json, out_report, |file| {
        Ok(to_json(&problem::verify(
            file,
            &RunOptions::default(),
            false,
        )?))
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn conveq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
