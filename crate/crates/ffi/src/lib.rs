//! C ABI for entrocat.
//!
//! Datasets and matrices are opaque handles created by `ec_*_load*` /
//! `ec_distance_matrix` and released with the matching `*_free`. Every
//! fallible call returns an [`EcStatus`]; on failure a message is available
//! from [`ec_last_error_message`] on the same thread. Strings returned through
//! `char **` out-parameters are owned by the caller and released with
//! [`ec_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use entrocat::algebra;
use entrocat::entropy;
use entrocat::ingest::{self, CsvSpec, MatrixFormat, NaPolicy};
use entrocat::metric::{self, DistanceMatrix};
use entrocat::model::Dataset;
use entrocat::randgen::Coverage;
use entrocat::report::Report;
use entrocat::Error;

/// Result codes. `EC_STATUS_OK` is zero; everything else is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    UnknownColumn = 4,
    NameCollision = 5,
    EmptyDataset = 6,
    Structural = 7,
    Io = 8,
    InvalidArgument = 9,
    UndefinedRatio = 10,
    OutOfRange = 11,
    Panic = 12,
}

impl From<&Error> for EcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Structural(_) | Error::InvalidWeights(_) => EcStatus::Structural,
            Error::UnknownColumn(_) => EcStatus::UnknownColumn,
            Error::NameCollision(_) => EcStatus::NameCollision,
            Error::EmptyDataset => EcStatus::EmptyDataset,
            Error::UndefinedRatio => EcStatus::UndefinedRatio,
            Error::Parse { .. } | Error::Json(_) => EcStatus::Parse,
            Error::Config(_) | Error::InvalidArgument(_) => EcStatus::InvalidArgument,
            Error::Io(_) => EcStatus::Io,
        }
    }
}

/// Empty-cell handling for CSV loading, passed as a plain integer.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcNaPolicy {
    Keep = 0,
    Drop = 1,
}

/// Opaque dataset handle.
pub struct EcDataset {
    inner: Dataset,
}

/// Opaque distance-matrix handle.
pub struct EcMatrix {
    inner: DistanceMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(EcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(EcStatus::from(&e), e.to_string())
    }
}

fn guard<F>(f: F) -> EcStatus
where
    F: FnOnce() -> Result<(), Fail>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            EcStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(EcStatus::NullPointer, format!("`{what}` is null"))
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            EcStatus::InvalidUtf8,
            format!("`{what}` is not valid UTF-8"),
        )
    })
}

/// # Safety
/// `p` must be null or point to a live handle.
unsafe fn dataset<'a>(p: *const EcDataset) -> Result<&'a Dataset, Fail> {
    p.as_ref().map(|d| &d.inner).ok_or_else(|| null("dataset"))
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(v);
    Ok(())
}

fn owned(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(EcStatus::InvalidArgument, "string contains NUL".into()))
}

fn csv_spec(delimiter: u8, na: u32) -> Result<CsvSpec, Fail> {
    let na_policy = match na {
        x if x == EcNaPolicy::Keep as u32 => NaPolicy::KeepAsCategory,
        x if x == EcNaPolicy::Drop as u32 => NaPolicy::DropRow,
        other => {
            return Err(Fail(
                EcStatus::InvalidArgument,
                format!("unknown NA policy {other}"),
            ))
        }
    };
    if !delimiter.is_ascii() || delimiter == b'"' {
        return Err(Fail(
            EcStatus::InvalidArgument,
            format!("unusable delimiter byte {delimiter}"),
        ));
    }
    Ok(CsvSpec {
        delimiter,
        na_policy,
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a CSV file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_dataset_load_path(
    path: *const c_char,
    delimiter: u8,
    na: u32,
    out: *mut *mut EcDataset,
) -> EcStatus {
    guard(|| {
        let path = text(path, "path")?;
        let d = ingest::load_csv_path(Path::new(path), &csv_spec(delimiter, na)?)?;
        put(out, Box::into_raw(Box::new(EcDataset { inner: d })))
    })
}

/// Parses CSV text.
///
/// # Safety
/// `csv` must be a valid NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_dataset_load_str(
    csv: *const c_char,
    delimiter: u8,
    na: u32,
    out: *mut *mut EcDataset,
) -> EcStatus {
    guard(|| {
        let csv = text(csv, "csv")?;
        let d = ingest::load_csv_str(csv, &csv_spec(delimiter, na)?)?;
        put(out, Box::into_raw(Box::new(EcDataset { inner: d })))
    })
}

/// # Safety
/// `d` must be null or a handle from `ec_dataset_load_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ec_dataset_free(d: *mut EcDataset) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_dataset_row_count(d: *const EcDataset, out: *mut usize) -> EcStatus {
    guard(|| put(out, dataset(d)?.row_count()))
}

/// # Safety
/// `d` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_dataset_column_count(d: *const EcDataset, out: *mut usize) -> EcStatus {
    guard(|| put(out, dataset(d)?.column_count()))
}

/// Name of column `index`; free with [`ec_string_free`].
///
/// # Safety
/// `d` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_dataset_column_name(
    d: *const EcDataset,
    index: usize,
    out: *mut *mut c_char,
) -> EcStatus {
    guard(|| {
        let d = dataset(d)?;
        let v = d.column_at(index).ok_or_else(|| {
            Fail(
                EcStatus::OutOfRange,
                format!("column {index} of {}", d.column_count()),
            )
        })?;
        put(out, owned(v.name().to_string())?)
    })
}

/// Entropy of a column in bits.
///
/// # Safety
/// `d` must be a live handle, `column` a valid string, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_entropy(
    d: *const EcDataset,
    column: *const c_char,
    out: *mut f64,
) -> EcStatus {
    guard(|| {
        let p = dataset(d)?.partition(text(column, "column")?)?;
        put(out, entropy::entropy(&p).value())
    })
}

/// # Safety
/// Pointers as for [`ec_symmetric_uncertainty`].
unsafe fn pair_value<F>(
    d: *const EcDataset,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
    f: F,
) -> EcStatus
where
    F: FnOnce(&entrocat::model::Partition, &entrocat::model::Partition) -> entrocat::Result<f64>,
{
    guard(|| {
        let d = dataset(d)?;
        let pa = d.partition(text(a, "a")?)?;
        let pb = d.partition(text(b, "b")?)?;
        put(out, f(&pa, &pb)?)
    })
}

/// `MI(A|B)` in bits.
///
/// # Safety
/// Pointers as for [`ec_symmetric_uncertainty`].
#[no_mangle]
pub unsafe extern "C" fn ec_mutual_information(
    d: *const EcDataset,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> EcStatus {
    pair_value(d, a, b, out, |x, y| {
        entropy::mutual_information(x, y).map(|v| v.value())
    })
}

/// `SU(A, B)`.
///
/// # Safety
/// `d` must be a live handle, `a` and `b` valid strings, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_symmetric_uncertainty(
    d: *const EcDataset,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> EcStatus {
    pair_value(d, a, b, out, entropy::symmetric_uncertainty)
}

/// `1 - SU(A, B)`.
///
/// # Safety
/// Pointers as for [`ec_symmetric_uncertainty`].
#[no_mangle]
pub unsafe extern "C" fn ec_distance(
    d: *const EcDataset,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> EcStatus {
    pair_value(d, a, b, out, |x, y| {
        entropy::symmetric_uncertainty(x, y).map(|s| 1.0 - s)
    })
}

/// Whether two columns induce the same partition of the rows.
///
/// # Safety
/// Pointers as for [`ec_symmetric_uncertainty`].
#[no_mangle]
pub unsafe extern "C" fn ec_indiscernible(
    d: *const EcDataset,
    a: *const c_char,
    b: *const c_char,
    out: *mut bool,
) -> EcStatus {
    guard(|| {
        let d = dataset(d)?;
        let va = d.column(text(a, "a")?)?;
        let vb = d.column(text(b, "b")?)?;
        put(out, algebra::are_indiscernible(va, vb, d)?)
    })
}

/// Distance matrix over all columns.
///
/// # Safety
/// `d` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_distance_matrix(
    d: *const EcDataset,
    out: *mut *mut EcMatrix,
) -> EcStatus {
    guard(|| {
        let m = metric::distance_matrix(dataset(d)?, None)?;
        put(out, Box::into_raw(Box::new(EcMatrix { inner: m })))
    })
}

/// # Safety
/// `m` must be null or a handle from [`ec_distance_matrix`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ec_matrix_free(m: *mut EcMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_matrix_size(m: *const EcMatrix, out: *mut usize) -> EcStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        put(out, m.inner.len())
    })
}

/// # Safety
/// `m` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_matrix_get(
    m: *const EcMatrix,
    row: usize,
    col: usize,
    out: *mut f64,
) -> EcStatus {
    guard(|| {
        let m = &m.as_ref().ok_or_else(|| null("matrix"))?.inner;
        let v = m.values.get(row).and_then(|r| r.get(col)).ok_or_else(|| {
            Fail(
                EcStatus::OutOfRange,
                format!("({row}, {col}) in {}x{0}", m.len()),
            )
        })?;
        put(out, *v)
    })
}

/// Matrix as `{"names": [...], "values": [[...]]}`; free with [`ec_string_free`].
///
/// # Safety
/// `m` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_matrix_to_json(m: *const EcMatrix, out: *mut *mut c_char) -> EcStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        put(
            out,
            owned(ingest::save_matrix(&m.inner, MatrixFormat::Json))?,
        )
    })
}

/// # Safety
/// `passed` valid for writes; `report` null or valid for writes.
unsafe fn finish_check(r: Report, passed: *mut bool, report: *mut *mut c_char) -> Result<(), Fail> {
    put(passed, r.passed())?;
    if !report.is_null() {
        report.write(owned(r.to_string())?);
    }
    Ok(())
}

/// Similarity and distance axioms over the dataset's columns.
/// `report` may be null; otherwise it receives a text report to free with
/// [`ec_string_free`].
///
/// # Safety
/// `d` must be a live handle, `passed` valid for writes, `report` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ec_check_metric(
    d: *const EcDataset,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> EcStatus {
    guard(|| {
        finish_check(
            metric::check_metric(dataset(d)?, Coverage::default())?,
            passed,
            report,
        )
    })
}

/// Monoid laws and contractivity of the joint.
///
/// # Safety
/// As for [`ec_check_metric`].
#[no_mangle]
pub unsafe extern "C" fn ec_check_monoid(
    d: *const EcDataset,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> EcStatus {
    guard(|| {
        finish_check(
            algebra::check_algebra(dataset(d)?, Coverage::default())?,
            passed,
            report,
        )
    })
}

/// The relative-entropy lemma over column triples.
///
/// # Safety
/// As for [`ec_check_metric`].
#[no_mangle]
pub unsafe extern "C" fn ec_check_lemma2(
    d: *const EcDataset,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> EcStatus {
    guard(|| {
        finish_check(
            entropy::check_lemma2_columns(dataset(d)?, Coverage::default())?,
            passed,
            report,
        )
    })
}
