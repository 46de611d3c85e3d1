//! C ABI for `tsylv`.
//!
//! Every fallible call returns a [`TsylvStatus`]; on failure the message is
//! kept per thread and can be copied out with [`tsylv_last_error_message`].
//! Handles are opaque, created by `*_new`/`*_read_file`/`tsylv_solve` and
//! released by the matching `*_free`. Matrices cross the boundary as
//! row-major `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tsylv::instance_file::{read_instance, InstanceFile};
use tsylv::solvers::{solve_direct, solve_transformed};
use tsylv::spectra::check_matrix;
use tsylv::transforms::{
    transform_over_canonical, transform_square_oozawa, transform_square_under, transform_under_canonical,
};
use tsylv::{DenseMatrix, Error, ProblemInstance, SolveReport, TransformOptions};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsylvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NonFinite = 4,
    Singular = 5,
    RankDeficient = 6,
    NotReciprocalFree = 7,
    NoConvergence = 8,
    HypothesisViolated = 9,
    Io = 10,
    Parse = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsylvMethod {
    /// Stacked `m^2 x mn` least-squares oracle.
    Direct = 0,
    /// Generalized Sylvester form for `m >= n`.
    Over = 1,
    /// Generalized Sylvester form for `m <= n`.
    Under = 2,
    /// Square Lyapunov form `Y - S Y S^T = C - (S C)^T`.
    Oozawa = 3,
    /// Square Lyapunov form with the `X = Y - A^-1 Y^T B` lift.
    CorUnder = 4,
    /// `Over`, `Under` or `Oozawa` by shape.
    Auto = 5,
}

pub struct TsylvMatrix {
    inner: DenseMatrix,
}

pub struct TsylvInstance {
    inner: ProblemInstance,
}

pub struct TsylvReport {
    inner: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> TsylvStatus {
    match e {
        Error::DimensionMismatch(_) | Error::Shape(_) => TsylvStatus::DimensionMismatch,
        Error::NonFinite { .. } => TsylvStatus::NonFinite,
        Error::SingularMatrix { .. } | Error::SingularA => TsylvStatus::Singular,
        Error::RankDeficient { .. } => TsylvStatus::RankDeficient,
        Error::NotReciprocalFree(_) => TsylvStatus::NotReciprocalFree,
        Error::NoConvergence { .. } => TsylvStatus::NoConvergence,
        Error::InconsistentS { .. } | Error::BadLeftInverse { .. } | Error::GenerationFailed { .. } => {
            TsylvStatus::HypothesisViolated
        }
        Error::Parse { .. } => TsylvStatus::Parse,
        Error::Io(_) => TsylvStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (TsylvStatus, String)>) -> TsylvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            TsylvStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            TsylvStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (TsylvStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TsylvStatus, String) {
    (TsylvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TsylvStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (TsylvStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| (TsylvStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (TsylvStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length
/// excluding the terminator, so a caller can size a second attempt.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tsylv_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn tsylv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a `rows x cols` matrix from `rows * cols` row-major values.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsylv_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut TsylvMatrix,
) -> TsylvStatus {
    guard(|| {
        let len = rows
            .checked_mul(cols)
            .ok_or((TsylvStatus::InvalidArgument, "size overflow".into()))?;
        let values = if len == 0 {
            Vec::new()
        } else if data.is_null() {
            return Err(null("data"));
        } else {
            std::slice::from_raw_parts(data, len).to_vec()
        };
        let inner = DenseMatrix::from_row_major(rows, cols, values).map_err(lib_err)?;
        put(out, TsylvMatrix { inner })
    })
}

/// # Safety
/// `m` must be null or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsylv_matrix_free(m: *mut TsylvMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Row count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsylv_matrix_rows(m: *const TsylvMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.rows())
}

/// Column count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsylv_matrix_cols(m: *const TsylvMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.cols())
}

/// Copies the row-major entries into `out`, which must hold exactly
/// `rows * cols` values (`len` is checked).
///
/// # Safety
/// `m` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tsylv_matrix_copy_data(m: *const TsylvMatrix, out: *mut f64, len: usize) -> TsylvStatus {
    guard(|| {
        let m = deref(m, "matrix")?;
        let src = m.inner.as_slice();
        if len != src.len() {
            return Err((
                TsylvStatus::InvalidArgument,
                format!("buffer holds {len} values, matrix has {}", src.len()),
            ));
        }
        if !src.is_empty() {
            if out.is_null() {
                return Err(null("output buffer"));
            }
            ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
        }
        Ok(())
    })
}

/// Builds an instance from `A (m x n)`, `B (n x m)`, `C (m x m)`. The inputs
/// are copied and stay owned by the caller.
///
/// # Safety
/// `a`, `b`, `c` must be live matrix handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsylv_instance_new(
    a: *const TsylvMatrix,
    b: *const TsylvMatrix,
    c: *const TsylvMatrix,
    out: *mut *mut TsylvInstance,
) -> TsylvStatus {
    guard(|| {
        let (a, b, c) = (deref(a, "A")?, deref(b, "B")?, deref(c, "C")?);
        let inner = ProblemInstance::new(a.inner.clone(), b.inner.clone(), c.inner.clone()).map_err(lib_err)?;
        put(out, TsylvInstance { inner })
    })
}

/// Reads an instance file (`matrix <name> <rows> <cols>` blocks).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsylv_instance_read_file(path: *const c_char, out: *mut *mut TsylvInstance) -> TsylvStatus {
    guard(|| {
        let inner = read_instance(path_arg(path)?).map_err(lib_err)?;
        put(out, TsylvInstance { inner })
    })
}

/// # Safety
/// `inst` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tsylv_instance_write_file(inst: *const TsylvInstance, path: *const c_char) -> TsylvStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        InstanceFile::from_instance(&inst.inner)
            .write(path_arg(path)?)
            .map_err(lib_err)
    })
}

/// Rows of `A`, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsylv_instance_m(inst: *const TsylvInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.m())
}

/// Columns of `A`, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsylv_instance_n(inst: *const TsylvInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.n())
}

/// # Safety
/// `inst` must be null or a handle that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsylv_instance_free(inst: *mut TsylvInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

fn solve_with(inst: &ProblemInstance, method: TsylvMethod, tol: f64, hyp_tol: f64) -> tsylv::Result<SolveReport> {
    let opts = TransformOptions {
        hypothesis_tol: hyp_tol,
        reciprocal_tol: None,
    };
    let method = match method {
        TsylvMethod::Auto => match inst.m().cmp(&inst.n()) {
            std::cmp::Ordering::Greater => TsylvMethod::Over,
            std::cmp::Ordering::Less => TsylvMethod::Under,
            std::cmp::Ordering::Equal => TsylvMethod::Oozawa,
        },
        other => other,
    };
    let form = match method {
        TsylvMethod::Direct => return Ok(solve_direct(inst, tol)),
        TsylvMethod::Over => transform_over_canonical(inst, &opts)?,
        TsylvMethod::Under => transform_under_canonical(inst, &opts)?,
        TsylvMethod::Oozawa => transform_square_oozawa(inst, &opts)?,
        TsylvMethod::CorUnder => transform_square_under(inst, &opts)?,
        TsylvMethod::Auto => unreachable!(),
    };
    solve_transformed(&form, tol)
}

/// Solves `inst` by `method`. `tol` is the relative residual tolerance used
/// for the `consistent` flag and `hyp_tol` the tolerance for the transform
/// hypotheses; pass a non-positive value for either to get the defaults
/// (`1e-8` and `1e-10`). A refused route (for example a spectrum that is not
/// reciprocal free) returns its status and leaves `*out` untouched.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsylv_solve(
    inst: *const TsylvInstance,
    method: TsylvMethod,
    tol: f64,
    hyp_tol: f64,
    out: *mut *mut TsylvReport,
) -> TsylvStatus {
    guard(|| {
        let inst = deref(inst, "instance")?;
        let tol = if tol > 0.0 {
            tol
        } else {
            tsylv::solvers::DEFAULT_SOLVE_TOL
        };
        let hyp_tol = if hyp_tol > 0.0 {
            hyp_tol
        } else {
            tsylv::transforms::DEFAULT_HYPOTHESIS_TOL
        };
        let inner = solve_with(&inst.inner, method, tol, hyp_tol).map_err(lib_err)?;
        put(out, TsylvReport { inner })
    })
}

/// New matrix handle holding the `n x m` solution; free it separately.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsylv_report_x(report: *const TsylvReport, out: *mut *mut TsylvMatrix) -> TsylvStatus {
    guard(|| {
        let r = deref(report, "report")?;
        put(
            out,
            TsylvMatrix {
                inner: r.inner.x.clone(),
            },
        )
    })
}

/// `||A X + X^T B - C||_F`, NaN for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsylv_report_residual(report: *const TsylvReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.residual)
}

/// Reciprocal-free margin of `S`; NaN on the direct route or a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsylv_report_margin(report: *const TsylvReport) -> f64 {
    report.as_ref().and_then(|r| r.inner.margin).unwrap_or(f64::NAN)
}

/// Numerical rank of the system that was solved.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsylv_report_system_rank(report: *const TsylvReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.system_rank)
}

/// Unknown count of the system that was solved; equal to the rank when the
/// solution is unique.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsylv_report_unknowns(report: *const TsylvReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.unknowns)
}

/// Whether the residual is within `tol * (1 + ||A|| + ||B|| + ||C||)`.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsylv_report_consistent(report: *const TsylvReport) -> bool {
    report.as_ref().is_some_and(|r| r.inner.consistent)
}

/// # Safety
/// `report` must be null or a handle that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tsylv_report_free(report: *mut TsylvReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Reciprocal-free test for the eigenvalues of square `s`: writes
/// `min |lambda_i lambda_j - 1|` to `margin` and whether it exceeds the
/// tolerance to `free`. A non-positive `tol` selects
/// `1e-8 (1 + max|lambda|^2)`.
///
/// # Safety
/// `s` must be a live handle; `margin` and `free` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tsylv_reciprocal_check(
    s: *const TsylvMatrix,
    tol: f64,
    margin: *mut f64,
    free: *mut bool,
) -> TsylvStatus {
    guard(|| {
        let s = deref(s, "matrix")?;
        if margin.is_null() || free.is_null() {
            return Err(null("output pointer"));
        }
        let (_, check) = check_matrix(&s.inner, (tol > 0.0).then_some(tol)).map_err(lib_err)?;
        *margin = check.margin();
        *free = check.free;
        Ok(())
    })
}
