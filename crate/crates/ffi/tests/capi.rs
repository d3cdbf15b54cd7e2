use std::ffi::{c_char, CStr};
use std::ptr;

use frenet_tower_ffi::*;

fn c(s: &str) -> std::ffi::CString {
    std::ffi::CString::new(s).unwrap()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    ft_string_free(p);
    s
}

unsafe fn helix(h: f64) -> *mut FtCurve {
    let mut profile = ptr::null_mut();
    assert_eq!(ft_profile_parse(c("1").as_ptr(), c("0.5").as_ptr(), &mut profile), FtStatus::Ok);
    let mut curve = ptr::null_mut();
    let st = ft_integrate(profile, ptr::null(), ptr::null(), 0.0, 12.0, h, 1e-9, &mut curve);
    assert_eq!(st, FtStatus::Ok);
    ft_profile_free(profile);
    curve
}

#[test]
fn profile_parse_and_eval() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(ft_profile_parse(c("2*s").as_ptr(), c("cos(s)").as_ptr(), &mut p), FtStatus::Ok);
        let (mut k, mut t) = (0.0, 0.0);
        assert_eq!(ft_profile_eval(p, 0.5, &mut k, &mut t), FtStatus::Ok);
        assert_eq!(k, 1.0);
        assert!((t - 0.5f64.cos()).abs() < 1e-15);
        ft_profile_free(p);
    }
}

#[test]
fn errors_carry_code_and_message() {
    unsafe {
        let mut p = ptr::null_mut();
        let st = ft_profile_parse(c("foo(s)").as_ptr(), c("0").as_ptr(), &mut p);
        assert_eq!(st, FtStatus::UnknownIdentifier);
        assert!(p.is_null());
        assert_eq!(ft_last_error_code(), FtStatus::UnknownIdentifier);
        let msg = CStr::from_ptr(ft_last_error_message()).to_str().unwrap();
        assert!(msg.starts_with("UNKNOWN_IDENTIFIER"), "{msg}");

        assert_eq!(ft_profile_parse(ptr::null(), c("0").as_ptr(), &mut p), FtStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(ft_profile_parse(bad.as_ptr().cast(), c("0").as_ptr(), &mut p), FtStatus::InvalidUtf8);

        let mut k = 0.0;
        assert_eq!(ft_profile_eval(ptr::null(), 0.0, &mut k, &mut k), FtStatus::NullPointer);

        let mut q = ptr::null_mut();
        assert_eq!(ft_profile_parse(c("1").as_ptr(), c("0").as_ptr(), &mut q), FtStatus::Ok);
        assert_eq!(ft_last_error_code(), FtStatus::Ok);
        assert!(ft_last_error_message().is_null());
        ft_profile_free(q);
    }
}

#[test]
fn free_accepts_null() {
    unsafe {
        ft_profile_free(ptr::null_mut());
        ft_curve_free(ptr::null_mut());
        ft_tower_free(ptr::null_mut());
        ft_report_free(ptr::null_mut());
        ft_string_free(ptr::null_mut());
        assert_eq!(ft_curve_len(ptr::null()), 0);
        assert_eq!(ft_tower_levels(ptr::null()), 0);
        assert_eq!(ft_report_nk_level(ptr::null()), -1);
    }
}

#[test]
fn integrate_samples_and_csv() {
    unsafe {
        let curve = helix(0.01);
        assert_eq!(ft_curve_len(curve), 1201);
        let mut smp = std::mem::zeroed::<FtSample>();
        assert_eq!(ft_curve_sample(curve, 0, &mut smp), FtStatus::Ok);
        assert_eq!(smp.point, FtVec3 { x: 0.0, y: 0.0, z: 0.0 });
        assert_eq!(smp.frame.t, FtVec3 { x: 1.0, y: 0.0, z: 0.0 });
        assert_eq!(smp.kappa, 1.0);
        assert_eq!(ft_curve_sample(curve, 1201, &mut smp), FtStatus::OutOfRange);

        let mut csv = ptr::null_mut();
        assert_eq!(ft_curve_to_csv(curve, true, &mut csv), FtStatus::Ok);
        let text = take_string(csv);
        assert!(text.starts_with("s,x,y,z,tx,"));
        assert_eq!(text.lines().count(), 1202);
        ft_curve_free(curve);
    }
}

#[test]
fn estimate_from_points() {
    unsafe {
        let pts: Vec<FtVec3> = (0..400)
            .map(|i| {
                let t = i as f64 * 0.02;
                FtVec3 { x: t.cos(), y: t.sin(), z: 0.5 * t }
            })
            .collect();
        let mut curve = ptr::null_mut();
        assert_eq!(ft_estimate(pts.as_ptr(), pts.len(), false, 1e-9, &mut curve), FtStatus::Ok);
        let mut smp = std::mem::zeroed::<FtSample>();
        let n = ft_curve_len(curve);
        assert_eq!(ft_curve_sample(curve, n / 2, &mut smp), FtStatus::Ok);
        assert!((smp.kappa - 0.8).abs() < 1e-3, "{}", smp.kappa);
        assert!((smp.tau - 0.4).abs() < 1e-3, "{}", smp.tau);
        ft_curve_free(curve);

        assert_eq!(ft_estimate(pts.as_ptr(), 3, false, 1e-9, &mut curve), FtStatus::InsufficientSamples);
    }
}

#[test]
fn tower_and_detection() {
    unsafe {
        let curve = helix(0.01);
        let tols = ft_tolerances_default();
        let mut tower = ptr::null_mut();
        assert_eq!(ft_tower_build(curve, -1, tols, &mut tower), FtStatus::InvalidArgument);
        assert_eq!(ft_tower_build(curve, 1, tols, &mut tower), FtStatus::Ok);
        assert_eq!(ft_tower_levels(tower), 2);
        let mut level = ptr::null_mut();
        assert_eq!(ft_tower_level_curve(tower, 5, &mut level), FtStatus::OutOfRange);
        assert_eq!(ft_tower_level_curve(tower, 1, &mut level), FtStatus::Ok);
        let mut smp = std::mem::zeroed::<FtSample>();
        ft_curve_sample(level, 600, &mut smp);
        assert!((smp.kappa - 1.25f64.sqrt()).abs() < 1e-9);
        ft_curve_free(level);

        let mut report = ptr::null_mut();
        assert_eq!(ft_detect_nk_slant(tower, tols, &mut report), FtStatus::Ok);
        assert_eq!(ft_report_nk_level(report), 0);
        let (mut theta, mut axis) = (0.0, FtVec3 { x: 0.0, y: 0.0, z: 0.0 });
        assert_eq!(ft_report_axis(report, &mut theta, &mut axis), FtStatus::Ok);
        assert!((theta - std::f64::consts::FRAC_PI_2).abs() < 1e-6, "{theta}");
        assert!((axis.z.abs() - 2.0 / 5f64.sqrt()).abs() < 1e-6);
        ft_report_free(report);

        assert_eq!(ft_detect_nk_constant_precession(tower, tols, &mut report), FtStatus::Ok);
        let (mut omega, mut mu) = (0.0, 1.0);
        assert_eq!(ft_report_precession(report, &mut omega, &mut mu), FtStatus::Ok);
        assert!((omega - 1.25f64.sqrt()).abs() < 1e-6);
        assert!(mu.abs() < 1e-6);
        ft_report_free(report);
        ft_tower_free(tower);

        assert_eq!(ft_classify_basic(curve, tols, &mut report), FtStatus::Ok);
        let mut json = ptr::null_mut();
        assert_eq!(ft_report_to_json(report, &mut json), FtStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        let labels = v["labels"].as_array().unwrap();
        assert!(labels.iter().any(|l| l == "HELIX"));
        ft_report_free(report);
        ft_curve_free(curve);
    }
}

#[test]
fn generated_precession_is_detected() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(ft_profile_precession(2.0, 3.0, 0.7, 0.0, 2.0, &mut p), FtStatus::Ok);
        let mut curve = ptr::null_mut();
        let st = ft_integrate(p, ptr::null(), ptr::null(), 0.05, 0.8, 0.001, 1e-9, &mut curve);
        assert_eq!(st, FtStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(ft_classify(curve, 2, ft_tolerances_default(), &mut report), FtStatus::Ok);
        let (mut omega, mut mu) = (0.0, 0.0);
        assert_eq!(ft_report_precession(report, &mut omega, &mut mu), FtStatus::Ok);
        assert!((omega - 2.0).abs() < 1e-4, "{omega}");
        assert!((mu.abs() - 3.0).abs() < 1e-3, "{mu}");
        ft_report_free(report);
        ft_curve_free(curve);
        ft_profile_free(p);
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include").join("frenet_tower.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["ft_profile_parse", "ft_tower_build", "ft_report_to_json", "FT_STATUS_NK_SLANT_ONLY"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"frenet_tower.h\"\n\
         int main(void) {\n\
           FtProfile *p = 0; FtCurve *c = 0; FtTower *t = 0; FtReport *r = 0;\n\
           FtTolerances tol = ft_tolerances_default();\n\
           if (ft_profile_parse(\"1\", \"0.5\", &p) != FT_STATUS_OK) return 1;\n\
           ft_integrate(p, 0, 0, 0.0, 1.0, 0.01, 1e-9, &c);\n\
           ft_tower_build(c, 1, tol, &t);\n\
           ft_detect_nk_slant(t, tol, &r);\n\
           ft_report_free(r); ft_tower_free(t); ft_curve_free(c); ft_profile_free(p);\n\
           return 0;\n\
         }\n",
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler; syntax check skipped"),
    }
}
