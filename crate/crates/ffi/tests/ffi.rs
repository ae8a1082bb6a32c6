use std::ffi::{c_char, CStr, CString};
use std::ptr;

use entrocat_ffi::*;

const INTERNSHIP: &str = include_str!("../../core/fixtures/internship.csv");

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ec_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn load(text: &str) -> *mut EcDataset {
    let mut d = ptr::null_mut();
    let csv = c(text);
    let st = unsafe { ec_dataset_load_str(csv.as_ptr(), b',', EcNaPolicy::Keep as u32, &mut d) };
    assert_eq!(st, EcStatus::Ok, "{}", last_error());
    d
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    ec_string_free(s);
    out
}

#[test]
fn su_and_distance() {
    let d = load(INTERNSHIP);
    let (a, b) = (c("Creativity"), c("GotHired"));
    let (mut su, mut dist, mut mi, mut h) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(
            ec_symmetric_uncertainty(d, a.as_ptr(), b.as_ptr(), &mut su),
            EcStatus::Ok
        );
        assert_eq!(
            ec_distance(d, a.as_ptr(), b.as_ptr(), &mut dist),
            EcStatus::Ok
        );
        assert_eq!(
            ec_mutual_information(d, a.as_ptr(), b.as_ptr(), &mut mi),
            EcStatus::Ok
        );
        assert_eq!(ec_entropy(d, b.as_ptr(), &mut h), EcStatus::Ok);
        ec_dataset_free(d);
    }
    assert!((su - 0.462_689_377_553_847_03).abs() < 1e-12);
    assert!((su + dist - 1.0).abs() < 1e-15);
    assert!(mi > 0.0 && h > 0.0);
}

#[test]
fn counts_and_names() {
    let d = load(INTERNSHIP);
    let (mut rows, mut cols) = (0usize, 0usize);
    let mut name = ptr::null_mut();
    unsafe {
        assert_eq!(ec_dataset_row_count(d, &mut rows), EcStatus::Ok);
        assert_eq!(ec_dataset_column_count(d, &mut cols), EcStatus::Ok);
        assert_eq!(ec_dataset_column_name(d, 5, &mut name), EcStatus::Ok);
        assert_eq!(take(name), "GotHired");
        assert_eq!(
            ec_dataset_column_name(d, 6, &mut name),
            EcStatus::OutOfRange
        );
        ec_dataset_free(d);
    }
    assert_eq!((rows, cols), (20, 6));
}

#[test]
fn indiscernible_columns() {
    let d = load("X1,X2\n1,A\n2,B\n1,A\n");
    let (a, b) = (c("X1"), c("X2"));
    let mut same = false;
    unsafe {
        assert_eq!(
            ec_indiscernible(d, a.as_ptr(), b.as_ptr(), &mut same),
            EcStatus::Ok
        );
        ec_dataset_free(d);
    }
    assert!(same);
}

#[test]
fn matrix_handle() {
    let d = load(INTERNSHIP);
    let mut m = ptr::null_mut();
    let (mut n, mut v) = (0usize, -1.0);
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(ec_distance_matrix(d, &mut m), EcStatus::Ok);
        assert_eq!(ec_matrix_size(m, &mut n), EcStatus::Ok);
        assert_eq!(ec_matrix_get(m, 2, 2, &mut v), EcStatus::Ok);
        assert_eq!(v, 0.0);
        assert_eq!(ec_matrix_get(m, 6, 0, &mut v), EcStatus::OutOfRange);
        assert_eq!(ec_matrix_to_json(m, &mut json), EcStatus::Ok);
        let text = take(json);
        assert!(text.contains("\"names\"") && text.contains("\"values\""));
        ec_matrix_free(m);
        ec_dataset_free(d);
    }
    assert_eq!(n, 6);
}

#[test]
fn checks_report() {
    let d = load(INTERNSHIP);
    unsafe {
        for f in [ec_check_metric, ec_check_monoid, ec_check_lemma2] {
            let mut passed = false;
            let mut report = ptr::null_mut();
            assert_eq!(f(d, &mut passed, &mut report), EcStatus::Ok);
            assert!(passed);
            assert!(take(report).contains("[PASS]"));
            assert_eq!(f(d, &mut passed, ptr::null_mut()), EcStatus::Ok);
        }
        ec_dataset_free(d);
    }
}

#[test]
fn triangle_counterexample_fails_metric_check() {
    let d = load("X,Y,Z\na,aa,a\na,ab,b\nb,bb,b\n");
    let mut passed = true;
    unsafe {
        assert_eq!(
            ec_check_metric(d, &mut passed, ptr::null_mut()),
            EcStatus::Ok
        );
        ec_dataset_free(d);
    }
    assert!(!passed);
}

#[test]
fn error_codes_and_messages() {
    let mut d = ptr::null_mut();
    unsafe {
        let bad = c("a,b\n1,2\n3\n");
        assert_eq!(
            ec_dataset_load_str(bad.as_ptr(), b',', 0, &mut d),
            EcStatus::Parse
        );
        assert!(last_error().contains("line 3"));

        let empty = c("a,b\n");
        assert_eq!(
            ec_dataset_load_str(empty.as_ptr(), b',', 0, &mut d),
            EcStatus::EmptyDataset
        );

        let dup = c("a,a\n1,2\n");
        assert_eq!(
            ec_dataset_load_str(dup.as_ptr(), b',', 0, &mut d),
            EcStatus::NameCollision
        );

        let ok = c("a\n1\n");
        assert_eq!(
            ec_dataset_load_str(ok.as_ptr(), b',', 7, &mut d),
            EcStatus::InvalidArgument
        );
        assert_eq!(
            ec_dataset_load_str(ptr::null(), b',', 0, &mut d),
            EcStatus::NullPointer
        );

        let missing = c("/nonexistent/x.csv");
        assert_eq!(
            ec_dataset_load_path(missing.as_ptr(), b',', 0, &mut d),
            EcStatus::Io
        );

        let ds = load(INTERNSHIP);
        let (nope, g) = (c("Nope"), c("GotHired"));
        let mut v = 0.0;
        assert_eq!(
            ec_symmetric_uncertainty(ds, nope.as_ptr(), g.as_ptr(), &mut v),
            EcStatus::UnknownColumn
        );
        assert!(last_error().contains("Nope"));
        assert_eq!(
            ec_symmetric_uncertainty(ds, g.as_ptr(), g.as_ptr(), ptr::null_mut()),
            EcStatus::NullPointer
        );
        assert_eq!(
            ec_entropy(ptr::null(), g.as_ptr(), &mut v),
            EcStatus::NullPointer
        );
        ec_dataset_free(ds);

        let bytes = [0xffu8, 0];
        assert_eq!(
            ec_dataset_load_str(bytes.as_ptr().cast(), b',', 0, &mut d),
            EcStatus::InvalidUtf8
        );
        ec_dataset_free(ptr::null_mut());
        ec_matrix_free(ptr::null_mut());
        ec_string_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ec_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
