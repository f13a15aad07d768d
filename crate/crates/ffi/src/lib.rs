//! C interface to `specbounds`.
//!
//! Matrices and secular problems are opaque handles created by `*_new` and
//! released by `*_free`. Every fallible call returns an [`SbStatus`]; on a
//! non-zero status, [`sb_last_error`] returns a message for the calling
//! thread. Output arrays are caller-allocated with the documented length.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use specbounds::bounds::{
    aggregate_bounds, aggregate_corollary_bounds, thompson_bounds, weighted_window_bounds, BoundInterval, Window,
};
use specbounds::hierarchy::{hierarchy_check, szasz_check};
use specbounds::linalg::{delete_one, eigenvalues};
use specbounds::secular::solve_secular;
use specbounds::{Error, HermitianMatrix, SecularProblem, C64};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotHermitian = 3,
    ConvergenceFailure = 4,
    Degenerate = 5,
    LimitExceeded = 6,
    NotPsd = 7,
    Panic = 99,
}

/// Opaque Hermitian matrix.
pub struct SbMatrix(HermitianMatrix);

/// Opaque secular problem.
pub struct SbSecular(SecularProblem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SbStatus {
    match e {
        Error::NonHermitian { .. } | Error::NonFinite { .. } | Error::NotSquare { .. } => SbStatus::NotHermitian,
        Error::ConvergenceFailure { .. } => SbStatus::ConvergenceFailure,
        Error::DegenerateSpectrum { .. } | Error::DegeneratePoles { .. } | Error::DegenerateTail(_) => {
            SbStatus::Degenerate
        }
        Error::ExplosionGuard { .. } | Error::DimensionTooLarge { .. } => SbStatus::LimitExceeded,
        Error::NotPsd { .. } => SbStatus::NotPsd,
        _ => SbStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guarded(f: impl FnOnce() -> Result<(), Failure>) -> SbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SbStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SbStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            SbStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn write_interval(iv: BoundInterval, lower: *mut f64, upper: *mut f64) -> Result<(), Failure> {
    if lower.is_null() || upper.is_null() {
        return Err(Failure::Null("lower/upper"));
    }
    *lower = iv.lower;
    *upper = iv.upper;
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a matrix from `n*n` row-major real parts and optional imaginary
/// parts (`im` may be null).
///
/// # Safety
/// `re` (and `im` when non-null) must point to `n*n` doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sb_matrix_new(n: usize, re: *const f64, im: *const f64, out: *mut *mut SbMatrix) -> SbStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let len = n
            .checked_mul(n)
            .ok_or(Error::DimensionTooLarge { n, max: usize::MAX })?;
        let re = input(re, len, "re")?;
        let entries: Vec<C64> = if im.is_null() {
            re.iter().map(|&x| C64::new(x, 0.0)).collect()
        } else {
            let im = input(im, len, "im")?;
            re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect()
        };
        let m = HermitianMatrix::new(n, entries)?;
        *out = Box::into_raw(Box::new(SbMatrix(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from [`sb_matrix_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sb_matrix_free(m: *mut SbMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of `m`, or 0 for null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sb_matrix_dim(m: *const SbMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Writes the `n` eigenvalues in non-increasing order.
///
/// # Safety
/// `m` must be a live handle and `out` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn sb_matrix_eigenvalues(m: *const SbMatrix, out: *mut f64) -> SbStatus {
    guarded(|| {
        let a = &deref(m, "matrix")?.0;
        let dst = output(out, a.dim(), "out")?;
        dst.copy_from_slice(eigenvalues(a)?.values());
        Ok(())
    })
}

/// Writes the `n − 1` eigenvalues of the matrix with row and column `k`
/// (1-based) deleted.
///
/// # Safety
/// `m` must be a live handle and `out` must hold `n − 1` doubles.
#[no_mangle]
pub unsafe extern "C" fn sb_matrix_submatrix_eigenvalues(m: *const SbMatrix, k: usize, out: *mut f64) -> SbStatus {
    guarded(|| {
        let a = &deref(m, "matrix")?.0;
        let sub = delete_one(a, k)?;
        let dst = output(out, sub.dim(), "out")?;
        dst.copy_from_slice(eigenvalues(&sub)?.values());
        Ok(())
    })
}

/// Interval for `Σ_k μ_{k,j}` from the spectrum of `m`.
///
/// # Safety
/// `m` must be a live handle; `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sb_thompson_bounds(
    m: *const SbMatrix,
    j: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> SbStatus {
    guarded(|| {
        let l = eigenvalues(&deref(m, "matrix")?.0)?;
        write_interval(thompson_bounds(&l, j)?, lower, upper)
    })
}

/// Interval for `Σ_k Σ_{j=ℓ}^r μ_{k,j}`.
///
/// # Safety
/// As for [`sb_thompson_bounds`].
#[no_mangle]
pub unsafe extern "C" fn sb_aggregate_bounds(
    m: *const SbMatrix,
    ell: usize,
    r: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> SbStatus {
    guarded(|| {
        let l = eigenvalues(&deref(m, "matrix")?.0)?;
        write_interval(aggregate_bounds(&l, Window::new(ell, r, l.len())?)?, lower, upper)
    })
}

/// Second interval for `Σ_k Σ_{j=ℓ}^r μ_{k,j}`, anchored at `λ_1` and `λ_n`.
///
/// # Safety
/// As for [`sb_thompson_bounds`].
#[no_mangle]
pub unsafe extern "C" fn sb_corollary_bounds(
    m: *const SbMatrix,
    ell: usize,
    r: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> SbStatus {
    guarded(|| {
        let l = eigenvalues(&deref(m, "matrix")?.0)?;
        write_interval(
            aggregate_corollary_bounds(&l, Window::new(ell, r, l.len())?)?,
            lower,
            upper,
        )
    })
}

/// Sets `*pass` to 1 when the replicated `X_size` majorizes the replicated
/// `X_k`, else 0.
///
/// # Safety
/// `m` must be a live handle and `pass` writable.
#[no_mangle]
pub unsafe extern "C" fn sb_hierarchy_check(m: *const SbMatrix, k: usize, size: usize, pass: *mut i32) -> SbStatus {
    guarded(|| {
        let rep = hierarchy_check(&deref(m, "matrix")?.0, k, size)?;
        if pass.is_null() {
            return Err(Failure::Null("pass"));
        }
        *pass = rep.verdict as i32;
        Ok(())
    })
}

/// Sets `*pass` to 1 when the minor-product chain holds. Fails with
/// `NotPsd` for indefinite matrices.
///
/// # Safety
/// `m` must be a live handle and `pass` writable.
#[no_mangle]
pub unsafe extern "C" fn sb_szasz_check(m: *const SbMatrix, pass: *mut i32) -> SbStatus {
    guarded(|| {
        let rep = szasz_check(&deref(m, "matrix")?.0)?;
        if pass.is_null() {
            return Err(Failure::Null("pass"));
        }
        *pass = rep.pass as i32;
        Ok(())
    })
}

/// Builds a secular problem from `n` poles and optional weights (null means
/// equal weights). Weights are normalized to sum to one.
///
/// # Safety
/// `poles` (and `weights` when non-null) must point to `n` doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sb_secular_new(
    n: usize,
    poles: *const f64,
    weights: *const f64,
    out: *mut *mut SbSecular,
) -> SbStatus {
    guarded(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let poles = input(poles, n, "poles")?.to_vec();
        let prob = if weights.is_null() {
            SecularProblem::equal_weights(poles)?
        } else {
            SecularProblem::new(poles, input(weights, n, "weights")?.to_vec())?
        };
        *out = Box::into_raw(Box::new(SbSecular(prob)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`sb_secular_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sb_secular_free(p: *mut SbSecular) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes the `n − 1` roots in non-increasing order.
///
/// # Safety
/// `p` must be a live handle and `out` must hold `n − 1` doubles.
#[no_mangle]
pub unsafe extern "C" fn sb_secular_solve(p: *const SbSecular, out: *mut f64) -> SbStatus {
    guarded(|| {
        let prob = &deref(p, "problem")?.0;
        let roots = solve_secular(prob).roots;
        output(out, roots.len(), "out")?.copy_from_slice(&roots);
        Ok(())
    })
}

/// Interval for `μ_ℓ + … + μ_r`.
///
/// # Safety
/// `p` must be a live handle; `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sb_weighted_bounds(
    p: *const SbSecular,
    ell: usize,
    r: usize,
    lower: *mut f64,
    upper: *mut f64,
) -> SbStatus {
    guarded(|| {
        let prob = &deref(p, "problem")?.0;
        write_interval(
            weighted_window_bounds(prob, Window::new(ell, r, prob.len())?)?,
            lower,
            upper,
        )
    })
}
