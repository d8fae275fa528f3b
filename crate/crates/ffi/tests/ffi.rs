use std::ffi::{CStr, CString};
use std::ptr;

use edgeworth_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ew_last_error()) }.to_string_lossy().into_owned()
}

fn normal_cdf(t: f64) -> f64 {
    edgeworth_core::normal::cdf(t)
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(ew_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn family_expansion_round_trip() {
    let name = CString::new("centered-exponential").unwrap();
    let mut e = ptr::null_mut();
    let st = unsafe { ew_expansion_from_family(name.as_ptr(), 50, 4, &mut e) };
    assert_eq!(st, EwStatus::Ok);
    assert!(!e.is_null());

    let mut cdf = f64::NAN;
    assert_eq!(unsafe { ew_expansion_cdf_1d(e, 0.3, &mut cdf) }, EwStatus::Ok);
    assert!(cdf > 0.0 && cdf < 1.0);
    assert!((cdf - normal_cdf(0.3)).abs() < 0.1);

    let (lo, hi) = ([f64::NEG_INFINITY], [0.3]);
    let (mut v, mut err) = (f64::NAN, f64::NAN);
    let st = unsafe { ew_expansion_box_measure(e, lo.as_ptr(), hi.as_ptr(), 1, &mut v, &mut err) };
    assert_eq!(st, EwStatus::Ok);
    assert!((v - cdf).abs() < 1e-10, "{v} vs {cdf}");

    let x = [0.0];
    let mut dens = f64::NAN;
    assert_eq!(unsafe { ew_expansion_density(e, x.as_ptr(), 1, &mut dens) }, EwStatus::Ok);
    assert!(dens > 0.0);

    let x2 = [0.0, 0.0];
    assert_eq!(unsafe { ew_expansion_density(e, x2.as_ptr(), 2, &mut dens) }, EwStatus::Dimension);
    assert!(!last_error().is_empty());
    unsafe { ew_expansion_free(e) };
}

#[test]
fn cumulant_table_matches_gaussian_at_zero_skew() {
    let idx: [u32; 3] = [1, 2, 3];
    let vals = [0.0, 1.0, 0.0];
    let mut e = ptr::null_mut();
    let st = unsafe {
        ew_expansion_from_cumulants(1, 3, idx.as_ptr(), vals.as_ptr(), 3, 10, 3, &mut e)
    };
    assert_eq!(st, EwStatus::Ok, "{}", last_error());
    let mut v = 0.0;
    unsafe { ew_expansion_cdf_1d(e, 1.0, &mut v) };
    assert!((v - normal_cdf(1.0)).abs() < 1e-14);
    unsafe { ew_expansion_free(e) };

    let st = unsafe {
        ew_expansion_from_cumulants(1, 3, idx.as_ptr(), vals.as_ptr(), 3, 10, 7, &mut e)
    };
    assert_eq!(st, EwStatus::UnsupportedOrder);
}

#[test]
fn null_and_unknown_inputs_are_reported() {
    let mut e = ptr::null_mut();
    assert_eq!(
        unsafe { ew_expansion_from_family(ptr::null(), 10, 3, &mut e) },
        EwStatus::NullPointer
    );
    assert!(last_error().contains("family"));
    let name = CString::new("no-such-family").unwrap();
    assert_eq!(
        unsafe { ew_expansion_from_family(name.as_ptr(), 10, 3, &mut e) },
        EwStatus::InvalidArgument
    );
    assert_eq!(unsafe { ew_failure_prob_bound(0.1, 10, ptr::null_mut()) }, EwStatus::NullPointer);
    unsafe {
        ew_expansion_free(ptr::null_mut());
        ew_dataset_free(ptr::null_mut());
    }
}

#[test]
fn dataset_cf_and_scan() {
    // Symmetric Bernoulli on {0, 1}: |φ(2π)| = 1, so the margin fails.
    let pts: Vec<f64> = (0..200).map(|i| (i % 2) as f64).collect();
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { ew_dataset_new(pts.as_ptr(), 200, 1, &mut ds) }, EwStatus::Ok);

    let t = [std::f64::consts::PI];
    let (mut re, mut im) = (f64::NAN, f64::NAN);
    assert_eq!(unsafe { ew_empirical_cf(ds, t.as_ptr(), 1, &mut re, &mut im) }, EwStatus::Ok);
    assert!(re.abs() < 1e-12 && im.abs() < 1e-12);

    let (mut c_hat, mut violated, mut argmin) = (f64::NAN, -1, [f64::NAN]);
    let st = unsafe {
        ew_weak_cramer_scan(ds, 0.5, 1.0, 10.0, 0.01, &mut c_hat, &mut violated, argmin.as_mut_ptr())
    };
    assert_eq!(st, EwStatus::Ok, "{}", last_error());
    assert_eq!(violated, 1);
    assert!(c_hat <= 1e-9);
    let k = argmin[0].abs() / (2.0 * std::f64::consts::PI);
    assert!((k - k.round()).abs() < 1e-6);

    let (mut sv, mut gap) = (f64::NAN, f64::NAN);
    let st = unsafe { ew_ustat_certificate(ds, t.as_ptr(), 1, 0.5, &mut sv, &mut gap) };
    assert_eq!(st, EwStatus::Ok);
    assert!((gap - 1.0).abs() < 1e-12);
    assert!(sv.is_finite());

    let mut e = ptr::null_mut();
    assert_eq!(unsafe { ew_expansion_from_dataset(ds, 3, &mut e) }, EwStatus::Ok);
    unsafe {
        ew_expansion_free(e);
        ew_dataset_free(ds);
    }
}

#[test]
fn dataset_rejects_bad_shape() {
    let mut ds = ptr::null_mut();
    assert_eq!(unsafe { ew_dataset_new(ptr::null(), 3, 1, &mut ds) }, EwStatus::NullPointer);
    let pts = [1.0];
    assert_ne!(unsafe { ew_dataset_new(pts.as_ptr(), 1, 0, &mut ds) }, EwStatus::Ok);
}

#[test]
fn failure_bound_matches_formula() {
    let mut v = 0.0;
    assert_eq!(unsafe { ew_failure_prob_bound(0.2, 100, &mut v) }, EwStatus::Ok);
    assert!((v / (-2.0f64).exp() - 1.0).abs() < 1e-14);
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/edgeworth.h");
    for f in [
        "ew_last_error",
        "ew_version",
        "ew_dataset_new",
        "ew_dataset_free",
        "ew_expansion_from_cumulants",
        "ew_expansion_from_family",
        "ew_expansion_from_dataset",
        "ew_expansion_free",
        "ew_expansion_density",
        "ew_expansion_cdf_1d",
        "ew_expansion_box_measure",
        "ew_empirical_cf",
        "ew_weak_cramer_scan",
        "ew_ustat_certificate",
        "ew_failure_prob_bound",
        "EW_STATUS_NULL_POINTER",
        "typedef struct EwExpansion EwExpansion",
    ] {
        assert!(header.contains(f), "header lacks {f}");
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/edgeworth.h");
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .output()
    else {
        eprintln!("no C compiler; skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
