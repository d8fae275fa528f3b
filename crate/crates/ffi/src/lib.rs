//! C ABI over `edgeworth-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`EwStatus`]; on failure the message is available from
//! [`ew_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use edgeworth_core::bootstrap::empirical_edgeworth;
use edgeworth_core::cramer::{
    eval_cf, failure_prob_bound, ustat_certificate, weak_cramer_scan, CertificateStatus,
    CharFunctionHandle, ScanParams,
};
use edgeworth_core::cumulant::{CumulantSet, MultiIndex};
use edgeworth_core::edgeworth::{
    build_expansion, set_measure, EdgeworthExpansion, MeasureMethod, SetSpec,
};
use edgeworth_core::study::register_builtin_families;
use edgeworth_core::{Dataset, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EwStatus {
    Ok = 0,
    InvalidArgument = 1,
    UnsupportedOrder = 2,
    Standardization = 3,
    Dimension = 4,
    Singularity = 5,
    Io = 6,
    Parse = 7,
    NullPointer = 8,
    Panic = 9,
}

/// Opaque Edgeworth expansion.
pub struct EwExpansion(EdgeworthExpansion);

/// Opaque point cloud in `R^d`.
pub struct EwDataset(Dataset);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> EwStatus {
    match e {
        Error::InvalidArgument(_) => EwStatus::InvalidArgument,
        Error::UnsupportedOrder(_) => EwStatus::UnsupportedOrder,
        Error::Standardization(_) => EwStatus::Standardization,
        Error::Dimension(_) => EwStatus::Dimension,
        Error::Singularity(_) => EwStatus::Singularity,
        Error::Io { .. } => EwStatus::Io,
        Error::Parse(_) => EwStatus::Parse,
    }
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> EwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EwStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            EwStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            EwStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for reads of `len` values.
unsafe fn read<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or a valid, aligned, writable pointer.
unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn string(p: *const c_char, what: &'static str) -> Result<String, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure::Core(Error::invalid(format!("{what} is not UTF-8"))))
}

/// Message of the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ew_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ew_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `n` points of dimension `d` (row-major) into a new dataset.
///
/// # Safety
/// `points` must hold `n*d` doubles; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ew_dataset_new(
    points: *const f64,
    n: usize,
    d: usize,
    out_handle: *mut *mut EwDataset,
) -> EwStatus {
    guard(|| {
        let o = out(out_handle, "out_handle")?;
        let total = n.checked_mul(d).ok_or_else(|| Error::invalid("n*d overflows"))?;
        let data = Dataset::new(d, read(points, total, "points")?.to_vec())?;
        *o = Box::into_raw(Box::new(EwDataset(data)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`ew_dataset_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ew_dataset_free(h: *mut EwDataset) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Builds an expansion from a standardized cumulant table: `count` entries,
/// entry `k` has multi-index `indices[k*d .. k*d+d]` and value `values[k]`.
/// The table must list every index of order 1..=`max_order` exactly once.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out_handle` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_expansion_from_cumulants(
    d: usize,
    max_order: u32,
    indices: *const u32,
    values: *const f64,
    count: usize,
    n: u64,
    s: u32,
    out_handle: *mut *mut EwExpansion,
) -> EwStatus {
    guard(|| {
        let o = out(out_handle, "out_handle")?;
        let total = count.checked_mul(d).ok_or_else(|| Error::invalid("count*d overflows"))?;
        let idx = read(indices, total, "indices")?;
        let vals = read(values, count, "values")?;
        let table = (0..count)
            .map(|k| (MultiIndex::new(idx[k * d..(k + 1) * d].to_vec()), vals[k]))
            .collect();
        let mut c = CumulantSet::new(d, max_order, table)?;
        c.mark_standardized(1e-9);
        *o = Box::into_raw(Box::new(EwExpansion(build_expansion(&c, n, s)?)));
        Ok(())
    })
}

/// Expansion of order `s` at sample size `n` for a built-in family.
///
/// # Safety
/// `family` must be a NUL-terminated string; `out_handle` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_expansion_from_family(
    family: *const c_char,
    n: u64,
    s: u32,
    out_handle: *mut *mut EwExpansion,
) -> EwStatus {
    guard(|| {
        let o = out(out_handle, "out_handle")?;
        let name = string(family, "family")?;
        let reg = register_builtin_families();
        let c = reg.get(&name)?.standardized_cumulants(s)?;
        *o = Box::into_raw(Box::new(EwExpansion(build_expansion(&c, n, s)?)));
        Ok(())
    })
}

/// Expansion built from the standardized empirical cumulants of a dataset.
///
/// # Safety
/// `data` must be a live dataset handle; `out_handle` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_expansion_from_dataset(
    data: *const EwDataset,
    s: u32,
    out_handle: *mut *mut EwExpansion,
) -> EwStatus {
    guard(|| {
        let o = out(out_handle, "out_handle")?;
        let e = empirical_edgeworth(&handle(data, "data")?.0, s)?;
        *o = Box::into_raw(Box::new(EwExpansion(e)));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live expansion handle.
#[no_mangle]
pub unsafe extern "C" fn ew_expansion_free(h: *mut EwExpansion) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `e` live; `x` holds `d` doubles; `value` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_expansion_density(
    e: *const EwExpansion,
    x: *const f64,
    d: usize,
    value: *mut f64,
) -> EwStatus {
    guard(|| {
        let v = out(value, "value")?;
        *v = handle(e, "expansion")?.0.density(read(x, d, "x")?)?;
        Ok(())
    })
}

/// `Q̃((−∞, t])` for a one-dimensional expansion.
///
/// # Safety
/// `e` live; `value` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_expansion_cdf_1d(
    e: *const EwExpansion,
    t: f64,
    value: *mut f64,
) -> EwStatus {
    guard(|| {
        let v = out(value, "value")?;
        *v = handle(e, "expansion")?.0.cdf_1d(t)?;
        Ok(())
    })
}

/// Signed measure of the box `Π [lower_k, upper_k]`; infinite bounds allowed.
///
/// # Safety
/// `e` live; `lower` and `upper` hold `d` doubles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ew_expansion_box_measure(
    e: *const EwExpansion,
    lower: *const f64,
    upper: *const f64,
    d: usize,
    value: *mut f64,
    error: *mut f64,
) -> EwStatus {
    guard(|| {
        let set = SetSpec::Box {
            lower: read(lower, d, "lower")?.to_vec(),
            upper: read(upper, d, "upper")?.to_vec(),
        };
        let m = set_measure(&handle(e, "expansion")?.0, &set, &MeasureMethod::quadrature())?;
        *out(value, "value")? = m.value;
        *out(error, "error")? = m.error;
        Ok(())
    })
}

/// Empirical characteristic function `(1/n) Σ exp(i t·X_j)`.
///
/// # Safety
/// `data` live; `t` holds `d` doubles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ew_empirical_cf(
    data: *const EwDataset,
    t: *const f64,
    d: usize,
    re: *mut f64,
    im: *mut f64,
) -> EwStatus {
    guard(|| {
        let h = CharFunctionHandle::empirical(handle(data, "data")?.0.clone());
        let z = eval_cf(&h, read(t, d, "t")?)?;
        *out(re, "re")? = z.re;
        *out(im, "im")? = z.im;
        Ok(())
    })
}

/// Weak Cramér scan of the empirical measure over `R < ‖t‖ ≤ t_max` on the
/// default grid. Pass `c <= 0` to only report `ĉ`. On return `violated` is
/// 1 when the margin fails and `argmin` (length `d`) holds the minimizer.
///
/// # Safety
/// `data` live; `argmin` holds `d` doubles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ew_weak_cramer_scan(
    data: *const EwDataset,
    b: f64,
    r_inner: f64,
    t_max: f64,
    c: f64,
    c_hat: *mut f64,
    violated: *mut i32,
    argmin: *mut f64,
) -> EwStatus {
    guard(|| {
        let ds = &handle(data, "data")?.0;
        let mut p = ScanParams::new(ds.dim(), b, r_inner, t_max);
        if c > 0.0 {
            p.target_c = Some(c);
        }
        let cert = weak_cramer_scan(&CharFunctionHandle::empirical(ds.clone()), &p)?;
        if argmin.is_null() {
            return Err(Failure::Null("argmin"));
        }
        slice::from_raw_parts_mut(argmin, ds.dim()).copy_from_slice(&cert.argmin);
        *out(c_hat, "c_hat")? = cert.c_hat;
        *out(violated, "violated")? =
            i32::from(matches!(cert.status, CertificateStatus::Violated { .. }));
        Ok(())
    })
}

/// The pairwise statistic `S(t)` and `1 − |φ_emp(t)|` at one frequency.
///
/// # Safety
/// `data` live; `t` holds `d` doubles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn ew_ustat_certificate(
    data: *const EwDataset,
    t: *const f64,
    d: usize,
    b: f64,
    s_value: *mut f64,
    one_minus_abs_cf: *mut f64,
) -> EwStatus {
    guard(|| {
        let r = ustat_certificate(&handle(data, "data")?.0, read(t, d, "t")?, b)?;
        *out(s_value, "s_value")? = r.s_value;
        *out(one_minus_abs_cf, "one_minus_abs_cf")? = r.one_minus_abs_cf;
        Ok(())
    })
}

/// `exp(−c_R² n / 2)`.
///
/// # Safety
/// `value` writable.
#[no_mangle]
pub unsafe extern "C" fn ew_failure_prob_bound(c_r: f64, n: u64, value: *mut f64) -> EwStatus {
    guard(|| {
        *out(value, "value")? = failure_prob_bound(c_r, n)?;
        Ok(())
    })
}
