//! C ABI for `frenet-tower`.
//!
//! Objects cross the boundary as opaque handles created by `ft_*` functions
//! and released with the matching `*_free`. Every fallible call returns an
//! [`FtStatus`]; on failure the message is available from
//! [`ft_last_error_message`] on the same thread. Strings returned through
//! out-parameters are owned by the caller and released with
//! [`ft_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use frenet_tower::cli::classify_curve;
use frenet_tower::io::write_curve_csv;
use frenet_tower::{
    build_tower, classify_basic, detect_nk_constant_precession, detect_nk_slant, estimate_frame_curvatures,
    generate_precession_profile, integrate_frenet, parse_profile, ClassificationReport, CurvatureProfile,
    DirectionTower, Error, FramedCurve, FrenetFrame, Tolerances, Vec3,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Panic = 3,
    NonFinite = 10,
    InvalidArgument = 11,
    SigmaUndefined = 12,
    AxisUndefined = 13,
    FrameCollapse = 14,
    ProfileEvalError = 15,
    NegativeCurvature = 16,
    InsufficientSamples = 17,
    NotRegular = 18,
    LevelUnavailable = 19,
    Unclassifiable = 20,
    NotNkSlant = 21,
    NkSlantOnly = 22,
    SyntaxError = 23,
    UnknownIdentifier = 24,
    ArityMismatch = 25,
    FormatError = 26,
    IoError = 27,
    OutOfRange = 28,
}

impl From<&Error> for FtStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NonFinite(_) => FtStatus::NonFinite,
            Error::InvalidArgument(_) => FtStatus::InvalidArgument,
            Error::SigmaUndefined { .. } => FtStatus::SigmaUndefined,
            Error::AxisUndefined => FtStatus::AxisUndefined,
            Error::FrameCollapse { .. } => FtStatus::FrameCollapse,
            Error::ProfileEval { .. } => FtStatus::ProfileEvalError,
            Error::NegativeCurvature { .. } => FtStatus::NegativeCurvature,
            Error::InsufficientSamples { .. } => FtStatus::InsufficientSamples,
            Error::NotRegular(_) => FtStatus::NotRegular,
            Error::LevelUnavailable { .. } => FtStatus::LevelUnavailable,
            Error::Unclassifiable(_) => FtStatus::Unclassifiable,
            Error::NotNkSlant { .. } => FtStatus::NotNkSlant,
            Error::NkSlantOnly { .. } => FtStatus::NkSlantOnly,
            Error::Syntax(_) => FtStatus::SyntaxError,
            Error::UnknownIdentifier { .. } => FtStatus::UnknownIdentifier,
            Error::ArityMismatch { .. } => FtStatus::ArityMismatch,
            Error::Format(_) => FtStatus::FormatError,
            Error::Io(_) => FtStatus::IoError,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtVec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<FtVec3> for Vec3 {
    fn from(v: FtVec3) -> Vec3 {
        Vec3::new(v.x, v.y, v.z)
    }
}

impl From<Vec3> for FtVec3 {
    fn from(v: Vec3) -> FtVec3 {
        FtVec3 { x: v.x, y: v.y, z: v.z }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtFrame {
    pub t: FtVec3,
    pub n: FtVec3,
    pub b: FtVec3,
}

impl From<FtFrame> for FrenetFrame {
    fn from(f: FtFrame) -> FrenetFrame {
        FrenetFrame { t: f.t.into(), n: f.n.into(), b: f.b.into() }
    }
}

impl From<FrenetFrame> for FtFrame {
    fn from(f: FrenetFrame) -> FtFrame {
        FtFrame { t: f.t.into(), n: f.n.into(), b: f.b.into() }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtTolerances {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub kappa_floor: f64,
}

impl From<FtTolerances> for Tolerances {
    fn from(t: FtTolerances) -> Tolerances {
        Tolerances { rel_tol: t.rel_tol, abs_floor: t.abs_floor, kappa_floor: t.kappa_floor }
    }
}

/// One sample of a framed curve. `sigma` is NaN where undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtSample {
    pub s: f64,
    pub point: FtVec3,
    pub frame: FtFrame,
    pub kappa: f64,
    pub tau: f64,
    pub sigma: f64,
    pub degenerate: bool,
}

pub struct FtProfile(CurvatureProfile);
pub struct FtCurve(FramedCurve);
pub struct FtTower(DirectionTower);
pub struct FtReport(ClassificationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<(FtStatus, CString)>> = const { RefCell::new(None) };
}

fn set_error(status: FtStatus, message: String) -> FtStatus {
    let msg = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some((status, msg)));
    status
}

fn guard(f: impl FnOnce() -> Result<(), FtStatus>) -> FtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FtStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => set_error(FtStatus::Panic, "internal panic".into()),
    }
}

fn fail(e: Error) -> FtStatus {
    let status = FtStatus::from(&e);
    set_error(status, format!("{}: {e}", e.code()))
}

fn null(what: &str) -> FtStatus {
    set_error(FtStatus::NullPointer, format!("null pointer: {what}"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, FtStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| set_error(FtStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, FtStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), FtStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), FtStatus> {
    let c = CString::new(s).map_err(|_| set_error(FtStatus::FormatError, "string contains NUL".into()))?;
    put(out, c.into_raw(), "out")
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ft_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Status of the last failed call on this thread, or `Ok`.
#[no_mangle]
pub extern "C" fn ft_last_error_code() -> FtStatus {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(FtStatus::Ok, |(s, _)| *s))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next `ft_*` call on this thread.
#[no_mangle]
pub extern "C" fn ft_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |(_, m)| m.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ft_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn ft_tolerances_default() -> FtTolerances {
    let t = Tolerances::default();
    FtTolerances { rel_tol: t.rel_tol, abs_floor: t.abs_floor, kappa_floor: t.kappa_floor }
}

/// # Safety
/// `kappa` and `tau` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_profile_parse(
    kappa: *const c_char,
    tau: *const c_char,
    out: *mut *mut FtProfile,
) -> FtStatus {
    guard(|| {
        let p = parse_profile(str_arg(kappa, "kappa")?, str_arg(tau, "tau")?).map_err(fail)?;
        put(out, Box::into_raw(Box::new(FtProfile(p))), "out")
    })
}

/// Profile κ = ω sin(μs+φ), τ = ω cos(μs+φ) on [s_min, s_max].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_profile_precession(
    omega: f64,
    mu: f64,
    phase: f64,
    s_min: f64,
    s_max: f64,
    out: *mut *mut FtProfile,
) -> FtStatus {
    guard(|| {
        let p = generate_precession_profile(omega, mu, phase, (s_min, s_max)).map_err(fail)?;
        put(out, Box::into_raw(Box::new(FtProfile(p))), "out")
    })
}

/// # Safety
/// `profile` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_profile_eval(
    profile: *const FtProfile,
    s: f64,
    out_kappa: *mut f64,
    out_tau: *mut f64,
) -> FtStatus {
    guard(|| {
        let p = handle(profile, "profile")?;
        let smp = p.0.eval(s, 0.0).map_err(fail)?;
        put(out_kappa, smp.kappa, "out_kappa")?;
        put(out_tau, smp.tau, "out_tau")
    })
}

/// # Safety
/// `profile` must come from `ft_profile_*` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ft_profile_free(profile: *mut FtProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Integrates the Frenet system over [s0, s1] with step h. NULL
/// `init_point` / `init_frame` mean the origin and the standard basis.
///
/// # Safety
/// Pointers must be NULL or valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_integrate(
    profile: *const FtProfile,
    init_point: *const FtVec3,
    init_frame: *const FtFrame,
    s0: f64,
    s1: f64,
    h: f64,
    kappa_floor: f64,
    out: *mut *mut FtCurve,
) -> FtStatus {
    guard(|| {
        let p = handle(profile, "profile")?;
        let point = init_point.as_ref().map_or(Vec3::ZERO, |v| (*v).into());
        let frame = init_frame.as_ref().map_or(FrenetFrame::IDENTITY, |f| (*f).into());
        let c = integrate_frenet(&p.0, point, frame, s0, s1, h, kappa_floor).map_err(fail)?;
        put(out, Box::into_raw(Box::new(FtCurve(c))), "out")
    })
}

/// Frame and curvatures estimated from `n` point samples.
///
/// # Safety
/// `points` must point to `n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_estimate(
    points: *const FtVec3,
    n: usize,
    closed: bool,
    kappa_floor: f64,
    out: *mut *mut FtCurve,
) -> FtStatus {
    guard(|| {
        if points.is_null() {
            return Err(null("points"));
        }
        let pts: Vec<Vec3> = std::slice::from_raw_parts(points, n).iter().map(|p| (*p).into()).collect();
        let c = estimate_frame_curvatures(&pts, closed, kappa_floor).map_err(fail)?;
        put(out, Box::into_raw(Box::new(FtCurve(c))), "out")
    })
}

/// Number of samples, 0 for NULL.
///
/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ft_curve_len(curve: *const FtCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_curve_sample(curve: *const FtCurve, index: usize, out: *mut FtSample) -> FtStatus {
    guard(|| {
        let c = &handle(curve, "curve")?.0;
        if index >= c.len() {
            return Err(set_error(FtStatus::OutOfRange, format!("sample {index} of {}", c.len())));
        }
        let smp = FtSample {
            s: c.s(index),
            point: c.points[index].into(),
            frame: c.frames[index].into(),
            kappa: c.kappa[index],
            tau: c.tau[index],
            sigma: c.sigma[index],
            degenerate: c.degenerate[index],
        };
        put(out, smp, "out")
    })
}

/// Curve CSV text; release with `ft_string_free`.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_curve_to_csv(curve: *const FtCurve, with_frames: bool, out: *mut *mut c_char) -> FtStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        put_string(out, write_curve_csv(&c.0, with_frames))
    })
}

/// # Safety
/// `curve` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ft_curve_free(curve: *mut FtCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Builds levels 0..=depth from a copy of `curve`; stops early (without
/// error) at an unavailable level.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_tower_build(
    curve: *const FtCurve,
    depth: i32,
    tols: FtTolerances,
    out: *mut *mut FtTower,
) -> FtStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let depth =
            usize::try_from(depth).map_err(|_| fail(Error::InvalidArgument(format!("negative depth {depth}"))))?;
        let t = build_tower(c.0.clone(), depth, &tols.into()).map_err(fail)?;
        put(out, Box::into_raw(Box::new(FtTower(t))), "out")
    })
}

/// Number of built levels (depth + 1), 0 for NULL.
///
/// # Safety
/// `tower` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ft_tower_levels(tower: *const FtTower) -> usize {
    tower.as_ref().map_or(0, |t| t.0.levels.len())
}

/// Copy of level `k`'s curve.
///
/// # Safety
/// `tower` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_tower_level_curve(tower: *const FtTower, k: usize, out: *mut *mut FtCurve) -> FtStatus {
    guard(|| {
        let t = handle(tower, "tower")?;
        let level =
            t.0.levels
                .get(k)
                .ok_or_else(|| set_error(FtStatus::OutOfRange, format!("level {k} of {}", t.0.levels.len())))?;
        put(out, Box::into_raw(Box::new(FtCurve(level.curve.clone()))), "out")
    })
}

/// # Safety
/// `tower` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ft_tower_free(tower: *mut FtTower) {
    if !tower.is_null() {
        drop(Box::from_raw(tower));
    }
}

unsafe fn report_out(r: frenet_tower::Result<ClassificationReport>, out: *mut *mut FtReport) -> Result<(), FtStatus> {
    let r = r.map_err(fail)?;
    put(out, Box::into_raw(Box::new(FtReport(r))), "out")
}

/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_classify_basic(
    curve: *const FtCurve,
    tols: FtTolerances,
    out: *mut *mut FtReport,
) -> FtStatus {
    guard(|| report_out(classify_basic(&handle(curve, "curve")?.0, &tols.into()), out))
}

/// Tower to `depth`, then N_k-slant and constant precession detection, as
/// the `classify` command does.
///
/// # Safety
/// `curve` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_classify(
    curve: *const FtCurve,
    depth: i32,
    tols: FtTolerances,
    out: *mut *mut FtReport,
) -> FtStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let depth =
            usize::try_from(depth).map_err(|_| fail(Error::InvalidArgument(format!("negative depth {depth}"))))?;
        report_out(classify_curve(c.0.clone(), depth, &tols.into()), out)
    })
}

/// # Safety
/// `tower` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_detect_nk_slant(
    tower: *const FtTower,
    tols: FtTolerances,
    out: *mut *mut FtReport,
) -> FtStatus {
    guard(|| report_out(detect_nk_slant(&handle(tower, "tower")?.0, &tols.into()), out))
}

/// # Safety
/// `tower` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_detect_nk_constant_precession(
    tower: *const FtTower,
    tols: FtTolerances,
    out: *mut *mut FtReport,
) -> FtStatus {
    guard(|| report_out(detect_nk_constant_precession(&handle(tower, "tower")?.0, &tols.into()), out))
}

/// Detected level, or -1 when the report has none.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ft_report_nk_level(report: *const FtReport) -> i32 {
    report.as_ref().and_then(|r| r.0.nk_level).map_or(-1, |k| k as i32)
}

/// Writes θ and the unit axis; `OutOfRange` when the report has no axis.
///
/// # Safety
/// `report` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_report_axis(
    report: *const FtReport,
    out_theta: *mut f64,
    out_axis: *mut FtVec3,
) -> FtStatus {
    guard(|| {
        let r = &handle(report, "report")?.0;
        match (r.theta, r.axis) {
            (Some(theta), Some(axis)) => {
                put(out_theta, theta, "out_theta")?;
                put(out_axis, axis.into(), "out_axis")
            }
            _ => Err(set_error(FtStatus::OutOfRange, "report has no axis".into())),
        }
    })
}

/// Writes ω and μ; `OutOfRange` when the report carries no precession data.
///
/// # Safety
/// `report` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_report_precession(
    report: *const FtReport,
    out_omega: *mut f64,
    out_mu: *mut f64,
) -> FtStatus {
    guard(|| {
        let r = &handle(report, "report")?.0;
        match (r.omega, r.mu) {
            (Some(w), Some(m)) => {
                put(out_omega, w, "out_omega")?;
                put(out_mu, m, "out_mu")
            }
            _ => Err(set_error(FtStatus::OutOfRange, "report has no precession data".into())),
        }
    })
}

/// Report as JSON; release with `ft_string_free`.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_report_to_json(report: *const FtReport, out: *mut *mut c_char) -> FtStatus {
    guard(|| {
        let r = handle(report, "report")?;
        let json = serde_json::to_string(&r.0).map_err(|e| set_error(FtStatus::FormatError, e.to_string()))?;
        put_string(out, json)
    })
}

/// # Safety
/// `report` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ft_report_free(report: *mut FtReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_error_code() {
        assert_eq!(FtStatus::from(&Error::AxisUndefined), FtStatus::AxisUndefined);
        assert_eq!(FtStatus::from(&Error::NotNkSlant { depth: 1 }), FtStatus::NotNkSlant);
    }

    #[test]
    fn version_is_terminated() {
        let v = unsafe { CStr::from_ptr(ft_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn error_message_is_thread_local() {
        let mut out = ptr::null_mut();
        let st = unsafe { ft_profile_parse(c"sin(".as_ptr(), c"0".as_ptr(), &mut out) };
        assert_eq!(st, FtStatus::SyntaxError);
        std::thread::spawn(|| assert!(ft_last_error_message().is_null())).join().unwrap();
        assert!(!ft_last_error_message().is_null());
    }
}
