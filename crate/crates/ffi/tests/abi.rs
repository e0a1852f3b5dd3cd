use std::ffi::{c_char, CStr, CString};
use std::ptr;

use integrality_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { integrality_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(integrality_last_error()) }.to_str().unwrap().to_owned()
}

const U_REC1: &str = "ring b, c; seq u; rec: n*u[n] = 2*(2*n-1)*(n*(n-1)-b)*u[n-1] - 4*c*(n-1)*u[n-2];";

fn parse(text: &str) -> (i32, *mut IntegralitySpec) {
    let c = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    let code = unsafe { integrality_spec_parse(c.as_ptr(), &mut h) };
    (code, h)
}

#[test]
fn spec_round_trip_and_run() {
    let (code, h) = parse(U_REC1);
    assert_eq!(code, INTEGRALITY_OK);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { integrality_spec_canonical(h, &mut s) }, INTEGRALITY_OK);
    let canonical = take(s);
    assert!(canonical.starts_with("ring b, c;\nseq u;\n"), "{canonical}");

    assert_eq!(unsafe { integrality_spec_run_json(h, 2, &mut s) }, INTEGRALITY_OK);
    let terms: Vec<String> = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(terms, vec!["1", "-2*b", "6*b^2 - 12*b - 2*c"]);
    unsafe { integrality_spec_free(h) };
}

#[test]
fn certify_report_through_the_boundary() {
    let (_, h) = parse(U_REC1);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { integrality_spec_certify_json(h, 20, &mut s) }, INTEGRALITY_OK);
    let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(report["theorem2_applicable"], true);
    assert_eq!(report["flags"]["in_z"], true);
    unsafe { integrality_spec_free(h) };
}

#[test]
fn parse_errors_set_code_and_message() {
    let (code, h) = parse("ring;");
    assert_eq!(code, INTEGRALITY_ERR_PARSE);
    assert!(h.is_null());
    assert!(last_error().starts_with("1:5"), "{}", last_error());
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { integrality_spec_parse(ptr::null(), &mut out) }, INTEGRALITY_ERR_NULL);
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { integrality_spec_parse(bad.as_ptr() as *const c_char, &mut out) },
        INTEGRALITY_ERR_UTF8
    );
}

#[test]
fn verify_codes() {
    let id3 = CString::new("id3").unwrap();
    assert_eq!(unsafe { integrality_verify(id3.as_ptr(), 12) }, INTEGRALITY_OK);
    assert_eq!(last_error(), "");
    let bogus = CString::new("bogus").unwrap();
    assert_eq!(unsafe { integrality_verify(bogus.as_ptr(), 12) }, INTEGRALITY_ERR_PARSE);
}

#[test]
fn bracket_handles() {
    let tuple = CString::new("t, t").unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { integrality_brackets_new(tuple.as_ptr(), false, &mut t) }, INTEGRALITY_OK);
    assert_eq!(unsafe { integrality_brackets_dim(t) }, 2);
    let m = [1u32, 1];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { integrality_brackets_get(t, m.as_ptr(), 2, &mut s) }, INTEGRALITY_OK);
    assert_eq!(take(s), "3/4");
    assert_eq!(
        unsafe { integrality_brackets_get(t, m.as_ptr(), 1, &mut s) },
        INTEGRALITY_ERR_INVALID
    );
    assert_eq!(unsafe { integrality_brackets_certify_json(t, 4, &mut s) }, INTEGRALITY_OK);
    let cert: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(cert["all_two_adic"], true);
    unsafe { integrality_brackets_free(t) };
}

#[test]
fn non_odd_tuples() {
    let tuple = CString::new("t^2, t").unwrap();
    let mut t = ptr::null_mut();
    assert_ne!(unsafe { integrality_brackets_new(tuple.as_ptr(), false, &mut t) }, INTEGRALITY_OK);
    assert_eq!(unsafe { integrality_brackets_new(tuple.as_ptr(), true, &mut t) }, INTEGRALITY_OK);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { integrality_brackets_certify_json(t, 3, &mut s) }, INTEGRALITY_ERR_MISMATCH);
    assert!(s.is_null());
    assert!(last_error().contains("[1, 1]"), "{}", last_error());
    unsafe { integrality_brackets_free(t) };
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/integrality.h");
    for name in [
        "integrality_last_error",
        "integrality_string_free",
        "integrality_spec_parse",
        "integrality_spec_free",
        "integrality_spec_canonical",
        "integrality_spec_run_json",
        "integrality_spec_certify_json",
        "integrality_verify",
        "integrality_brackets_new",
        "integrality_brackets_free",
        "integrality_brackets_dim",
        "integrality_brackets_get",
        "integrality_brackets_certify_json",
        "typedef struct IntegralitySpec IntegralitySpec",
        "#define INTEGRALITY_ERR_PARSE 2",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
