//! C ABI for the fairkm library.
//!
//! Every entry point returns a [`FairkmStatus`]; on failure a description is
//! available from [`fairkm_last_error_message`] on the same thread. Handles
//! are opaque and owned by the caller, who releases them with the matching
//! `*_free` function. Panics never cross the boundary; they surface as
//! [`FairkmStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fairkm::centers::CenterPositions;
use fairkm::dataset::{compute_radii, load_points, normalize, CsvSchema};
use fairkm::flloyd::{flloyd_run, FlConfig};
use fairkm::metrics::{bound_ratio, cost, Objective};
use fairkm::{Dataset, Error, LsConfig, RadiusBounds, RadiusMode};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FairkmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument is out of range or inconsistent with another.
    InvalidArgument = 2,
    /// The input file could not be read.
    Io = 3,
    /// The input file is not a well-formed numeric table.
    Parse = 4,
    /// The radius constraints need more than k anchors.
    Infeasible = 5,
    /// A caller-provided buffer is too small.
    BufferTooSmall = 6,
    /// An internal panic was caught.
    Panic = 7,
}

/// A set of points in R^d.
pub struct FairkmDataset(Dataset);

/// Per-point fairness radii for a dataset and k.
pub struct FairkmRadii(RadiusBounds);

/// Centers and quality metrics of one solve.
pub struct FairkmResult {
    center_ids: Vec<usize>,
    centers: CenterPositions,
    kmeans_cost: f64,
    kmedian_cost: f64,
    bound_ratio: f64,
    accepted_swaps: usize,
}

/// Solver settings. Obtain defaults from [`fairkm_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FairkmOptions {
    pub k: usize,
    /// Anchor zone scale; must exceed 2.
    pub gamma: f64,
    /// Local-search steps.
    pub iterations: usize,
    pub seed: u64,
    /// Independent local-search runs; the cheapest is kept.
    pub restarts: usize,
    /// Zone-preserving Lloyd rounds after local search (0 disables).
    pub refine_iterations: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> FairkmStatus {
    match e {
        Error::Io { .. } => FairkmStatus::Io,
        Error::Parse { .. } | Error::RaggedRow { .. } | Error::Csv(_) => FairkmStatus::Parse,
        Error::Infeasible { .. } => FairkmStatus::Infeasible,
        _ => FairkmStatus::InvalidArgument,
    }
}

struct Failure(FairkmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FairkmStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FairkmStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FairkmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {msg}"));
            FairkmStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_slot<'a, T>(p: *mut *mut T, what: &str) -> Result<&'a mut *mut T, Failure> {
    let slot = p.as_mut().ok_or_else(|| null(what))?;
    *slot = ptr::null_mut();
    Ok(slot)
}

unsafe fn copy_out<T: Copy>(src: &[T], dst: *mut T, capacity: usize) -> Result<(), Failure> {
    if dst.is_null() {
        return Err(null("output buffer"));
    }
    if capacity < src.len() {
        return Err(Failure(
            FairkmStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Message for the most recent failure on this thread, or null if the last
/// status-returning call succeeded. Valid until the next status-returning
/// call on the same thread.
#[no_mangle]
pub extern "C" fn fairkm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn fairkm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a dataset from `n * d` row-major coordinates (copied).
///
/// # Safety
/// `coords` must point to `n * d` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fairkm_dataset_new(
    coords: *const f64,
    n: usize,
    d: usize,
    out: *mut *mut FairkmDataset,
) -> FairkmStatus {
    guard(|| {
        let slot = out_slot(out, "out")?;
        if coords.is_null() {
            return Err(null("coords"));
        }
        let len = n.checked_mul(d).ok_or_else(|| Failure(FairkmStatus::InvalidArgument, "n * d overflows".into()))?;
        let flat = std::slice::from_raw_parts(coords, len).to_vec();
        let ds = Dataset::from_flat(flat, d)?;
        *slot = Box::into_raw(Box::new(FairkmDataset(ds)));
        Ok(())
    })
}

/// Reads a CSV file. `columns` selects zero-based columns (`ncolumns == 0`
/// reads all); a nonzero `has_header` skips the first row.
///
/// # Safety
/// `path` must be a nul-terminated string; `columns` must hold `ncolumns`
/// values when `ncolumns > 0`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fairkm_dataset_load_csv(
    path: *const c_char,
    columns: *const usize,
    ncolumns: usize,
    has_header: c_int,
    out: *mut *mut FairkmDataset,
) -> FairkmStatus {
    guard(|| {
        let slot = out_slot(out, "out")?;
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(FairkmStatus::InvalidArgument, "path is not valid UTF-8".into()))?;
        let columns = match ncolumns {
            0 => None,
            _ if columns.is_null() => return Err(null("columns")),
            m => Some(std::slice::from_raw_parts(columns, m).to_vec()),
        };
        let ds = load_points(
            path,
            &CsvSchema {
                columns,
                has_header: has_header != 0,
            },
        )?;
        *slot = Box::into_raw(Box::new(FairkmDataset(ds)));
        Ok(())
    })
}

/// Standardizes every dimension to zero mean and unit variance in place.
///
/// # Safety
/// `ds` must be a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn fairkm_dataset_normalize(ds: *mut FairkmDataset) -> FairkmStatus {
    guard(|| {
        let ds = ds.as_mut().ok_or_else(|| null("dataset"))?;
        ds.0 = normalize(&ds.0)?;
        Ok(())
    })
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn fairkm_dataset_len(ds: *const FairkmDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.len())
}

/// Dimension, or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn fairkm_dataset_dim(ds: *const FairkmDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.dim())
}

/// Releases a dataset. Null is ignored.
///
/// # Safety
/// `ds` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fairkm_dataset_free(ds: *mut FairkmDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Computes fairness radii for `k` clusters. `sample_size == 0` uses every
/// point; otherwise radii are ranked against a shared sample drawn with `seed`.
///
/// # Safety
/// `ds` must be a live dataset handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fairkm_radii_compute(
    ds: *const FairkmDataset,
    k: usize,
    sample_size: usize,
    seed: u64,
    out: *mut *mut FairkmRadii,
) -> FairkmStatus {
    guard(|| {
        let slot = out_slot(out, "out")?;
        let ds = deref(ds, "dataset")?;
        let mode = match sample_size {
            0 => RadiusMode::Exact,
            m => RadiusMode::Sampled { sample_size: m, seed },
        };
        let radii = compute_radii(&ds.0, k, mode)?;
        *slot = Box::into_raw(Box::new(FairkmRadii(radii)));
        Ok(())
    })
}

/// Wraps caller-supplied radii, one per point (copied).
///
/// # Safety
/// `values` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fairkm_radii_from_values(
    values: *const f64,
    n: usize,
    out: *mut *mut FairkmRadii,
) -> FairkmStatus {
    guard(|| {
        let slot = out_slot(out, "out")?;
        if values.is_null() {
            return Err(null("values"));
        }
        let radii = RadiusBounds::from_values(std::slice::from_raw_parts(values, n).to_vec())?;
        *slot = Box::into_raw(Box::new(FairkmRadii(radii)));
        Ok(())
    })
}

/// Number of radii, or 0 for a null handle.
///
/// # Safety
/// `radii` must be null or a live radii handle.
#[no_mangle]
pub unsafe extern "C" fn fairkm_radii_len(radii: *const FairkmRadii) -> usize {
    radii.as_ref().map_or(0, |r| r.0.values().len())
}

/// Copies the radii into `buf`, which must hold at least `fairkm_radii_len` values.
///
/// # Safety
/// `radii` must be a live handle; `buf` must have `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fairkm_radii_copy(radii: *const FairkmRadii, buf: *mut f64, capacity: usize) -> FairkmStatus {
    guard(|| copy_out(deref(radii, "radii")?.0.values(), buf, capacity))
}

/// Releases radii. Null is ignored.
///
/// # Safety
/// `radii` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fairkm_radii_free(radii: *mut FairkmRadii) {
    if !radii.is_null() {
        drop(Box::from_raw(radii));
    }
}

/// Default settings for `k` clusters.
#[no_mangle]
pub extern "C" fn fairkm_options_default(k: usize) -> FairkmOptions {
    let ls = LsConfig::new(k);
    FairkmOptions {
        k,
        gamma: ls.gamma,
        iterations: 500,
        seed: ls.seed,
        restarts: ls.restarts,
        refine_iterations: FlConfig::default().iterations,
    }
}

/// Runs fair local search, then optional refinement, and reports the result.
///
/// # Safety
/// `ds` and `radii` must be live handles; `options` must be readable; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn fairkm_solve(
    ds: *const FairkmDataset,
    radii: *const FairkmRadii,
    options: *const FairkmOptions,
    out: *mut *mut FairkmResult,
) -> FairkmStatus {
    guard(|| {
        let slot = out_slot(out, "out")?;
        let ds = &deref(ds, "dataset")?.0;
        let delta = &deref(radii, "radii")?.0;
        let opts = deref(options, "options")?;
        let mut cfg = LsConfig::new(opts.k)
            .with_gamma(opts.gamma)
            .with_iterations(opts.iterations)
            .with_seed(opts.seed);
        cfg.restarts = opts.restarts;
        let ls = fairkm::lspp::run(ds, delta, &cfg)?;
        let fl = FlConfig {
            iterations: opts.refine_iterations,
            ..FlConfig::default()
        };
        let centers = flloyd_run(ds, &ls.solution, &ls.anchors, &fl)?.centers;
        let result = FairkmResult {
            center_ids: ls.solution.centers().to_vec(),
            kmeans_cost: cost(ds, &centers, Objective::KMeans)?,
            kmedian_cost: cost(ds, &centers, Objective::KMedian)?,
            bound_ratio: bound_ratio(ds, delta, &centers)?.ratio,
            accepted_swaps: ls.trace.accepted_swaps(),
            centers,
        };
        *slot = Box::into_raw(Box::new(result));
        Ok(())
    })
}

/// Number of centers, or 0 for a null handle.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn fairkm_result_k(result: *const FairkmResult) -> usize {
    result.as_ref().map_or(0, |r| r.centers.len())
}

/// Dimension of the centers, or 0 for a null handle.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn fairkm_result_dim(result: *const FairkmResult) -> usize {
    result.as_ref().map_or(0, |r| r.centers.dim())
}

/// Copies the final center coordinates (k * d, row-major) into `buf`.
///
/// # Safety
/// `result` must be a live handle; `buf` must have `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fairkm_result_centers(
    result: *const FairkmResult,
    buf: *mut f64,
    capacity: usize,
) -> FairkmStatus {
    guard(|| copy_out(deref(result, "result")?.centers.as_flat(), buf, capacity))
}

/// Copies the point indices chosen by local search (k values) into `buf`.
/// These are the centers before refinement moves them off the data.
///
/// # Safety
/// `result` must be a live handle; `buf` must have `capacity` writable values.
#[no_mangle]
pub unsafe extern "C" fn fairkm_result_center_ids(
    result: *const FairkmResult,
    buf: *mut usize,
    capacity: usize,
) -> FairkmStatus {
    guard(|| copy_out(&deref(result, "result")?.center_ids, buf, capacity))
}

/// Sum of squared distances to the nearest final center; NaN for null.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn fairkm_result_kmeans_cost(result: *const FairkmResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.kmeans_cost)
}

/// Sum of distances to the nearest final center; NaN for null.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn fairkm_result_kmedian_cost(result: *const FairkmResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.kmedian_cost)
}

/// Largest ratio of a point's center distance to its radius; NaN for null.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn fairkm_result_bound_ratio(result: *const FairkmResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.bound_ratio)
}

/// Number of swaps local search accepted, or 0 for null.
///
/// # Safety
/// `result` must be null or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn fairkm_result_accepted_swaps(result: *const FairkmResult) -> usize {
    result.as_ref().map_or(0, |r| r.accepted_swaps)
}

/// Releases a result. Null is ignored.
///
/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fairkm_result_free(result: *mut FairkmResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn message() -> String {
        let p = fairkm_last_error_message();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn panics_become_status_codes() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, FairkmStatus::Panic);
        assert!(message().contains("boom"));
        assert_eq!(guard(|| Ok(())), FairkmStatus::Ok);
        assert!(fairkm_last_error_message().is_null());
    }

    #[test]
    fn error_mapping() {
        assert_eq!(status_of(&Error::Infeasible { anchors: 3, k: 2 }), FairkmStatus::Infeasible);
        assert_eq!(status_of(&Error::Csv("x".into())), FairkmStatus::Parse);
        assert_eq!(status_of(&Error::InvalidK { k: 0, n: 1 }), FairkmStatus::InvalidArgument);
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(fairkm_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
