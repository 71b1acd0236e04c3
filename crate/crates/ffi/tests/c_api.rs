use std::ffi::CString;
use std::ptr;

use orlicz_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    let n = unsafe { orlicz_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert_eq!(n, orlicz_last_error_length());
    unsafe { std::ffi::CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn young(spec: &str) -> *mut OrliczYoung {
    let s = CString::new(spec).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { orlicz_young_parse(s.as_ptr(), &mut out) }, OrliczStatus::Ok);
    out
}

#[test]
fn young_round_trip() {
    let phi = young("power:2");
    let mut v = 0.0;
    unsafe {
        assert_eq!(orlicz_young_eval(phi, 3.0, &mut v), OrliczStatus::Ok);
        assert_eq!(v, 4.5);
        let mut star = ptr::null_mut();
        assert_eq!(orlicz_young_conjugate(phi, &mut star), OrliczStatus::Ok);
        assert_eq!(orlicz_young_eval(star, 3.0, &mut v), OrliczStatus::Ok);
        assert_eq!(v, 4.5);
        assert_eq!(orlicz_young_inverse(phi, 4.5, &mut v), OrliczStatus::Ok);
        // bisection to a relative bracket of 1e-12
        assert!((v - 3.0).abs() <= 3.0 * 1e-12, "{v}");
        orlicz_young_free(star);
        orlicz_young_free(phi);
    }
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new("power:0.5").unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { orlicz_young_parse(bad.as_ptr(), &mut out) };
    assert_eq!(st, OrliczStatus::Domain);
    assert!(out.is_null());
    assert!(last_error().contains("domain"), "{}", last_error());

    let st = unsafe { orlicz_young_eval(ptr::null(), 1.0, ptr::null_mut()) };
    assert_eq!(st, OrliczStatus::NullPointer);

    let junk = CString::new("{not json").unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { orlicz_simple_from_json(junk.as_ptr(), &mut h) }, OrliczStatus::Parse);
}

#[test]
fn last_error_is_per_thread() {
    let bad = CString::new("nope").unwrap();
    let mut out = ptr::null_mut();
    unsafe { orlicz_young_parse(bad.as_ptr(), &mut out) };
    assert!(orlicz_last_error_length() > 0);
    std::thread::spawn(|| assert_eq!(orlicz_last_error_length(), 0)).join().unwrap();
}

#[test]
fn norms_and_psi_of_disk_indicator() {
    let json = CString::new(r#"{"dim":2,"terms":[{"value":1.0,"region":{"dim":2,"parts":[{"kind":"ball","radius":1.0}]}}]}"#).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { orlicz_simple_from_json(json.as_ptr(), &mut h) }, OrliczStatus::Ok);
    let phi = young("power:2");
    let (mut m, mut lux, mut orl) = (0.0, 0.0, 0.0);
    assert_eq!(unsafe { orlicz_norms(phi, h, &mut m, &mut lux, &mut orl) }, OrliczStatus::Ok);
    let pi = std::f64::consts::PI;
    assert!((m - pi / 3.0).abs() < 1e-14);
    assert!((orl - (4.0 * pi / 3.0).sqrt()).abs() < 1e-9);
    assert!(lux <= orl && orl <= 2.0 * lux);

    let xi_s = CString::new("identity").unwrap();
    let mut xi = ptr::null_mut();
    assert_eq!(unsafe { orlicz_xi_parse(xi_s.as_ptr(), &mut xi) }, OrliczStatus::Ok);
    let mut small = [0.0; 1];
    let mut written = 0;
    let st = unsafe { orlicz_psi(xi, h, small.as_mut_ptr(), small.len(), &mut written) };
    assert_eq!((st, written), (OrliczStatus::BufferTooSmall, 2));
    let mut buf = [1.0; 2];
    assert_eq!(unsafe { orlicz_psi(xi, h, buf.as_mut_ptr(), 2, &mut written) }, OrliczStatus::Ok);
    assert!(buf.iter().all(|x| x.abs() < 1e-15));
    unsafe {
        orlicz_xi_free(xi);
        orlicz_simple_free(h);
        orlicz_young_free(phi);
    }
}

#[test]
fn triangle_moment() {
    let coords = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0];
    let mut m = [0.0; 2];
    assert_eq!(unsafe { orlicz_polytope_moment(coords.as_ptr(), 3, 2, m.as_mut_ptr(), 2) }, OrliczStatus::Ok);
    assert!(m.iter().all(|x| (x - 1.0 / 6.0).abs() < 1e-15));
}

#[test]
fn verify_runs_a_battery() {
    let s = CString::new("lemma8").unwrap();
    let mut pass = -1;
    assert_eq!(unsafe { orlicz_verify(s.as_ptr(), 7, &mut pass) }, OrliczStatus::Ok);
    assert_eq!(pass, 1);
    let s = CString::new("nope").unwrap();
    assert_eq!(unsafe { orlicz_verify(s.as_ptr(), 7, &mut pass) }, OrliczStatus::Parse);
}

#[test]
fn header_declares_every_export() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/orlicz.h")).unwrap();
    let src = std::fs::read_to_string(format!("{dir}/src/lib.rs")).unwrap();
    let names: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(names.len() >= 14);
    for name in names {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct OrliczYoung OrliczYoung;"));
}
