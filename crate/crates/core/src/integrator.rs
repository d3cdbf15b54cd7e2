//! Reconstruction of a curve from its curvature and torsion by integrating
//! the Frenet system, plus the third-order local canonical form.

use crate::coverage::{self, Op};
use crate::curve::FramedCurve;
use crate::error::{Error, Result};
use crate::geometry::{geodesic_curvature, orthonormalize, FrenetFrame, Vec3};
use crate::profile::CurvatureProfile;

/// Tolerance on the orthonormality of a caller-supplied initial frame.
const INIT_FRAME_TOL: f64 = 1e-9;

/// Number of intervals for covering `[s0, s1]` with step `h`. When the span
/// is not a whole number of steps the step shrinks to the next count up.
pub fn grid_intervals(s0: f64, s1: f64, h: f64) -> Result<(usize, f64)> {
    if !(s0.is_finite() && s1.is_finite() && h.is_finite()) {
        return Err(Error::NonFinite("grid bounds"));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    if !(s1 > s0) {
        return Err(Error::InvalidArgument(format!("need s1 > s0, got [{s0}, {s1}]")));
    }
    let span = s1 - s0;
    let exact = span / h;
    let rounded = exact.round();
    let n = if (rounded * h - span).abs() <= 1e-9 * span { rounded } else { exact.ceil() };
    let n = n.max(1.0) as usize;
    Ok((n, span / n as f64))
}

#[derive(Clone, Copy)]
struct State {
    x: Vec3,
    t: Vec3,
    n: Vec3,
    b: Vec3,
}

impl State {
    fn rate(&self, kappa: f64, tau: f64) -> State {
        State { x: self.t, t: self.n * kappa, n: self.t * (-kappa) + self.b * tau, b: self.n * (-tau) }
    }

    fn advanced(&self, d: &State, dt: f64) -> State {
        State { x: self.x + d.x * dt, t: self.t + d.t * dt, n: self.n + d.n * dt, b: self.b + d.b * dt }
    }
}

/// Integrates T′ = κN, N′ = −κT + τB, B′ = −τN, x′ = T with classical
/// fourth-order Runge–Kutta on a uniform grid over `[s0, s1]`, restoring
/// orthonormality after every step.
pub fn integrate_frenet(
    profile: &CurvatureProfile,
    init_point: Vec3,
    init_frame: FrenetFrame,
    s0: f64,
    s1: f64,
    h: f64,
    kappa_floor: f64,
) -> Result<FramedCurve> {
    coverage::record(Op::IntegrateFrenet);
    let (steps, h) = grid_intervals(s0, s1, h)?;
    if !profile.contains(s0) || !profile.contains(s1) {
        return Err(Error::InvalidArgument(format!(
            "[{s0}, {s1}] is not inside the profile domain [{}, {}]",
            profile.domain.0, profile.domain.1
        )));
    }
    init_point.ensure_finite("initial point")?;
    if !init_frame.is_valid(INIT_FRAME_TOL) {
        return Err(Error::InvalidArgument(format!(
            "initial frame is not orthonormal (error {:e})",
            init_frame.orthonormality_error()
        )));
    }
    let s_at = |i: usize| s0 + i as f64 * h;
    let n = steps + 1;
    // the last grid point can overshoot s1 by rounding
    let clamp = |s: f64| s.min(s1);
    profile.validate_nonnegative((0..n).map(|i| clamp(s_at(i))))?;

    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        samples.push(profile.eval(clamp(s_at(i)), kappa_floor)?);
    }

    let mut points = Vec::with_capacity(n);
    let mut frames = Vec::with_capacity(n);
    let mut state = State { x: init_point, t: init_frame.t, n: init_frame.n, b: init_frame.b };
    points.push(state.x);
    frames.push(init_frame);
    for i in 0..steps {
        let mid = profile.eval(s_at(i) + 0.5 * h, kappa_floor)?;
        let (a, b) = (&samples[i], &samples[i + 1]);
        let k1 = state.rate(a.kappa, a.tau);
        let k2 = state.advanced(&k1, 0.5 * h).rate(mid.kappa, mid.tau);
        let k3 = state.advanced(&k2, 0.5 * h).rate(mid.kappa, mid.tau);
        let k4 = state.advanced(&k3, h).rate(b.kappa, b.tau);
        let mut next = state;
        let w = h / 6.0;
        next.x += (k1.x + k2.x * 2.0 + k3.x * 2.0 + k4.x) * w;
        next.t += (k1.t + k2.t * 2.0 + k3.t * 2.0 + k4.t) * w;
        next.n += (k1.n + k2.n * 2.0 + k3.n * 2.0 + k4.n) * w;
        next.b += (k1.b + k2.b * 2.0 + k3.b * 2.0 + k4.b) * w;
        let frame = orthonormalize(FrenetFrame { t: next.t, n: next.n, b: next.b })?;
        state = State { x: next.x, t: frame.t, n: frame.n, b: frame.b };
        points.push(state.x);
        frames.push(frame);
    }

    let mut sigma = Vec::with_capacity(n);
    let mut degenerate = Vec::with_capacity(n);
    for smp in &samples {
        degenerate.push(smp.degenerate);
        sigma.push(geodesic_curvature(smp).unwrap_or(f64::NAN));
    }
    Ok(FramedCurve {
        s0,
        h,
        points,
        frames,
        kappa: samples.iter().map(|c| c.kappa).collect(),
        tau: samples.iter().map(|c| c.tau).collect(),
        sigma,
        degenerate,
    })
}

/// Third-order canonical expansion about a point:
/// γ(0) + (s − κ²s³/6) T + (κs²/2 + κ′s³/6) N + (κτs³/6) B.
pub fn taylor_local(
    init_point: Vec3,
    init_frame: &FrenetFrame,
    kappa0: f64,
    dkappa0: f64,
    tau0: f64,
    s: f64,
) -> Result<Vec3> {
    coverage::record(Op::TaylorLocal);
    let s2 = s * s;
    let s3 = s2 * s;
    let p = init_point
        + init_frame.t * (s - s3 * kappa0 * kappa0 / 6.0)
        + init_frame.n * (s2 * kappa0 / 2.0 + s3 * dkappa0 / 6.0)
        + init_frame.b * (s3 * kappa0 * tau0 / 6.0);
    p.ensure_finite("taylor_local")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::parse_profile;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn grid_adjusts_step_to_cover_span() {
        assert_eq!(grid_intervals(0.0, 1.0, 0.25).unwrap(), (4, 0.25));
        let (n, h) = grid_intervals(0.0, TAU, 1e-3).unwrap();
        assert_eq!(n, 6284);
        assert!((h * n as f64 - TAU).abs() < 1e-12);
        assert_eq!(grid_intervals(1.0, 0.0, 0.1).unwrap_err().code(), "INVALID_ARGUMENT");
        assert_eq!(grid_intervals(0.0, 1.0, 0.0).unwrap_err().code(), "INVALID_ARGUMENT");
    }

    #[test]
    fn unit_circle() {
        let p = parse_profile("1", "0").unwrap();
        let c = integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, 0.0, TAU, 1e-3, 1e-9).unwrap();
        // starting at the origin heading +x with N = +y, the centre is (0, 1, 0)
        let centre = Vec3::new(0.0, 1.0, 0.0);
        let worst = c.points.iter().map(|q| ((*q - centre).norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "radius deviation {worst:e}");
        assert!(c.points.last().unwrap().norm() < 1e-8);
        assert!(c.points.iter().all(|q| q.z.abs() < 1e-14));
        c.validate(1e-9).unwrap();
    }

    #[test]
    fn straight_line() {
        let p = parse_profile("0", "0").unwrap();
        let c = integrate_frenet(&p, Vec3::new(1.0, 2.0, 3.0), FrenetFrame::IDENTITY, 0.0, 5.0, 1e-3, 1e-9).unwrap();
        for (i, q) in c.points.iter().enumerate() {
            let expected = Vec3::new(1.0 + c.s(i), 2.0, 3.0);
            assert!((*q - expected).norm() < 1e-10);
        }
        assert!(c.degenerate.iter().all(|&d| d));
        assert!(c.sigma.iter().all(|s| s.is_nan()));
    }

    #[test]
    fn frames_stay_orthonormal() {
        let p = parse_profile("2+sin(3*s)", "cos(s)*s").unwrap();
        let c = integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, 0.0, 10.0, 1e-3, 1e-9).unwrap();
        let drift = c.frames.iter().map(|f| f.orthonormality_error()).fold(0.0, f64::max);
        assert!(drift < 1e-9, "{drift:e}");
    }

    #[test]
    fn rejects_negative_curvature_and_bad_frames() {
        let p = parse_profile("sin(s)", "0").unwrap();
        let err = integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, 0.0, 2.0 * PI - 0.5, 0.01, 1e-9);
        assert_eq!(err.unwrap_err().code(), "NEGATIVE_CURVATURE");
        let bad = FrenetFrame { t: Vec3::X, n: Vec3::X, b: Vec3::Z };
        let err = integrate_frenet(&p, Vec3::ZERO, bad, 0.0, 1.0, 0.01, 1e-9);
        assert_eq!(err.unwrap_err().code(), "INVALID_ARGUMENT");
    }

    #[test]
    fn evaluation_error_propagates() {
        let p = parse_profile("1", "log(s)").unwrap();
        let err = integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, -1.0, 1.0, 0.1, 1e-9).unwrap_err();
        assert_eq!(err.code(), "PROFILE_EVAL_ERROR");
    }

    #[test]
    fn taylor_at_origin_and_small_offset() {
        let f = FrenetFrame::IDENTITY;
        assert_eq!(taylor_local(Vec3::new(1.0, 2.0, 3.0), &f, 0.7, 0.2, 0.3, 0.0).unwrap(), Vec3::new(1.0, 2.0, 3.0));
        let p = taylor_local(Vec3::ZERO, &f, 1.0, 0.0, 0.0, 0.1).unwrap();
        assert!((p - Vec3::new(0.1 - 1e-3 / 6.0, 5e-3, 0.0)).max_abs() < 1e-17);
    }
}
