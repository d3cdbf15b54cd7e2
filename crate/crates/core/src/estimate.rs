//! Frames and curvatures estimated from raw point samples.

use crate::coverage::{self, Op};
use crate::curve::FramedCurve;
use crate::error::{Error, Result};
use crate::geometry::{geodesic_curvature, CurvatureSample, FrenetFrame, Vec3};
use crate::numeric::{gauss_legendre, CubicSpline, Differentiator};

pub const MIN_ESTIMATE_SAMPLES: usize = 7;

/// Ghost points borrowed from the other end when resampling a closed curve.
const CLOSED_PAD: usize = 8;

/// Points resampled at uniform arclength.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub points: Vec<Vec3>,
    /// Effective spacing; `target_h` adjusted so the end points are kept.
    pub step: f64,
    /// Arclength of the interpolating spline.
    pub length: f64,
}

struct SpaceSpline {
    axes: [CubicSpline; 3],
}

impl SpaceSpline {
    fn new(t: &[f64], points: &[Vec3]) -> Result<Self> {
        let col = |k: usize| points.iter().map(|p| p[k]).collect::<Vec<_>>();
        Ok(SpaceSpline {
            axes: [CubicSpline::new(t, &col(0))?, CubicSpline::new(t, &col(1))?, CubicSpline::new(t, &col(2))?],
        })
    }

    fn eval_in(&self, seg: usize, x: f64) -> (Vec3, Vec3) {
        let [(x0, dx), (y0, dy), (z0, dz)] = [0, 1, 2].map(|k| self.axes[k].eval_in(seg, x));
        (Vec3::new(x0, y0, z0), Vec3::new(dx, dy, dz))
    }

    fn speed(&self, seg: usize, x: f64) -> f64 {
        self.eval_in(seg, x).1.norm()
    }

    fn arc(&self, seg: usize, a: f64, b: f64) -> f64 {
        gauss_legendre(a, b, |x| self.speed(seg, x))
    }

    /// Parameter inside segment `seg` at which the arclength from the
    /// segment start reaches `target`.
    fn invert_arc(&self, seg: usize, target: f64, seg_len: f64) -> f64 {
        let t = self.axes[0].knots();
        let (lo0, hi0) = (t[seg], t[seg + 1]);
        let (mut lo, mut hi) = (lo0, hi0);
        let mut x = lo0 + (hi0 - lo0) * (target / seg_len).clamp(0.0, 1.0);
        for _ in 0..50 {
            let f = self.arc(seg, lo0, x) - target;
            if f.abs() <= 1e-15 * seg_len.max(1e-300) {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let speed = self.speed(seg, x);
            let newton = x - f / speed;
            x = if speed > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        x
    }
}

fn check_distinct(points: &[Vec3]) -> Result<()> {
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::NonFinite(if p.x.is_nan() { "point sample (NaN)" } else { "point sample" }));
    }
    for (i, w) in points.windows(2).enumerate() {
        if (w[1] - w[0]).norm() == 0.0 {
            return Err(Error::NotRegular(format!("samples {i} and {} coincide", i + 1)));
        }
    }
    Ok(())
}

/// Resamples a polyline at uniform arclength.
///
/// The points are interpolated by a cubic spline in the cumulative chord
/// length; the spline's own arclength (Gauss–Legendre per segment) is then
/// inverted on a uniform grid. The step is `target_h` adjusted to a whole
/// number of intervals, so both end points are preserved.
pub fn arclength_reparametrize(points: &[Vec3], target_h: f64) -> Result<Resampled> {
    resample(points, target_h, false)
}

pub(crate) fn resample(points: &[Vec3], target_h: f64, closed: bool) -> Result<Resampled> {
    coverage::record(Op::ArclengthReparametrize);
    if points.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: points.len() });
    }
    if !(target_h > 0.0) || !target_h.is_finite() {
        return Err(Error::InvalidArgument(format!("resampling step must be positive, got {target_h}")));
    }
    check_distinct(points)?;

    let (work, first, last) = if closed {
        let n = points.len();
        let pad = CLOSED_PAD.min(n - 1);
        let mut w: Vec<Vec3> = points[n - pad..].to_vec();
        w.extend_from_slice(points);
        w.push(points[0]);
        w.extend_from_slice(&points[1..=pad]);
        (w, pad, pad + n)
    } else {
        (points.to_vec(), 0, points.len() - 1)
    };
    if closed && (points[0] - points[points.len() - 1]).norm() == 0.0 {
        return Err(Error::NotRegular("closed input repeats its first point".into()));
    }

    let mut t = Vec::with_capacity(work.len());
    t.push(0.0);
    for w in work.windows(2) {
        t.push(t[t.len() - 1] + (w[1] - w[0]).norm());
    }
    let spline = SpaceSpline::new(&t, &work)?;

    let seg_len: Vec<f64> = (first..last).map(|i| spline.arc(i, t[i], t[i + 1])).collect();
    let mut cum = vec![0.0];
    for l in &seg_len {
        cum.push(cum[cum.len() - 1] + l);
    }
    let length = cum[cum.len() - 1];
    if !(length > 0.0) {
        return Err(Error::NotRegular("zero-length curve".into()));
    }
    let intervals = (length / target_h).round().max(1.0) as usize;
    let step = length / intervals as f64;
    let count = if closed { intervals } else { intervals + 1 };

    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let target = j as f64 * step;
        if !closed && j == intervals {
            out.push(work[last]);
            continue;
        }
        let k = cum.partition_point(|&c| c <= target).clamp(1, seg_len.len()) - 1;
        let seg = first + k;
        let x = spline.invert_arc(seg, target - cum[k], seg_len[k]);
        out.push(spline.eval_in(seg, x).0);
    }
    Ok(Resampled { points: out, step, length })
}

/// Frame and curvatures from point samples.
///
/// The points are resampled at uniform arclength (spacing equal to the mean
/// chord), differentiated with five-point stencils, and
/// κ = ‖γ′×γ″‖/‖γ′‖³, τ = det(γ′,γ″,γ‴)/‖γ′×γ″‖². Samples with
/// ‖γ′×γ″‖ below `kappa_floor` are degenerate; their normal is carried over
/// from the nearest earlier sample. σ uses five-point derivatives of the
/// estimated κ and τ.
pub fn estimate_frame_curvatures(points: &[Vec3], closed: bool, kappa_floor: f64) -> Result<FramedCurve> {
    coverage::record(Op::EstimateFrameCurvatures);
    if points.len() < MIN_ESTIMATE_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_ESTIMATE_SAMPLES, got: points.len() });
    }
    check_distinct(points)?;
    let mut pts = points;
    if closed && (pts[0] - pts[pts.len() - 1]).norm() <= 1e-12 * (pts[1] - pts[0]).norm() {
        pts = &pts[..pts.len() - 1];
    }
    let chord: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum::<f64>()
        + if closed { (pts[0] - pts[pts.len() - 1]).norm() } else { 0.0 };
    let intervals = if closed { pts.len() } else { pts.len() - 1 };
    let resampled = resample(pts, chord / intervals as f64, closed)?;
    let h = resampled.step;
    let p = resampled.points;
    if p.len() < MIN_ESTIMATE_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_ESTIMATE_SAMPLES, got: p.len() });
    }

    let diff = Differentiator::new(h, closed);
    let d1 = diff.apply(&p, 1);
    let d2 = diff.apply(&p, 2);
    let d3 = diff.apply(&p, 3);

    let n = p.len();
    let mut frames = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    let mut tau = Vec::with_capacity(n);
    let mut degenerate = Vec::with_capacity(n);
    let mut last_normal: Option<Vec3> = None;
    for i in 0..n {
        let speed = d1[i].norm();
        let c = d1[i].cross(d2[i]);
        let cn = c.norm();
        let t = d1[i] / speed;
        let deg = !(cn >= kappa_floor);
        let (k, tor) = if deg { (cn / speed.powi(3), 0.0) } else { (cn / speed.powi(3), c.dot(d3[i]) / (cn * cn)) };
        let normal_guess = if deg { last_normal.unwrap_or_else(|| any_perpendicular(t)) } else { d2[i] };
        let frame = FrenetFrame::from_tangent_normal(t, normal_guess)
            .or_else(|_| FrenetFrame::from_tangent_normal(t, any_perpendicular(t)))?;
        if !deg {
            last_normal = Some(frame.n);
        }
        frames.push(frame);
        kappa.push(k);
        tau.push(tor);
        degenerate.push(deg);
    }
    // fill normals of leading degenerate samples from the first good one
    if let Some(first_good) = degenerate.iter().position(|d| !d) {
        for i in 0..first_good {
            if let Ok(f) = FrenetFrame::from_tangent_normal(frames[i].t, frames[first_good].n) {
                frames[i] = f;
            }
        }
    }

    let dk = diff.apply(&kappa, 1);
    let dt = diff.apply(&tau, 1);
    let sigma = (0..n)
        .map(|i| {
            let smp = CurvatureSample::new(i as f64 * h, kappa[i], tau[i], dk[i], dt[i], kappa_floor);
            if degenerate[i] {
                f64::NAN
            } else {
                geodesic_curvature(&smp).unwrap_or(f64::NAN)
            }
        })
        .collect();

    Ok(FramedCurve { s0: 0.0, h, points: p, frames, kappa, tau, sigma, degenerate })
}

fn any_perpendicular(t: Vec3) -> Vec3 {
    let axis = if t.x.abs() <= t.y.abs() && t.x.abs() <= t.z.abs() {
        Vec3::X
    } else if t.y.abs() <= t.z.abs() {
        Vec3::Y
    } else {
        Vec3::Z
    };
    t.cross(axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn polyline_length(p: &[Vec3]) -> f64 {
        p.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    fn helix_point(s: f64) -> Vec3 {
        // radius 1/2, pitch making it unit speed: (½cos t, ½sin t, −t/2) with t = √2 s
        let t = std::f64::consts::SQRT_2 * s;
        Vec3::new(0.5 * t.cos(), 0.5 * t.sin(), -0.5 * t)
    }

    #[test]
    fn unit_speed_input_is_a_fixed_point() {
        let h = 1e-2;
        let pts: Vec<Vec3> = (0..400).map(|i| helix_point(i as f64 * h)).collect();
        let r = arclength_reparametrize(&pts, h).unwrap();
        assert_eq!(r.points.len(), pts.len());
        let worst = r.points.iter().zip(&pts).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "{worst:e}");
    }

    #[test]
    fn stretched_line_becomes_uniform() {
        let pts: Vec<Vec3> = (0..50)
            .map(|i| {
                let u = i as f64 / 49.0;
                Vec3::new(1.0, 2.0, 3.0) + Vec3::new(2.0, -1.0, 0.5) * (u * u)
            })
            .collect();
        let r = arclength_reparametrize(&pts, 0.05).unwrap();
        for w in r.points.windows(2) {
            assert!(((w[1] - w[0]).norm() - r.step).abs() < 1e-8);
        }
        assert!((r.length - Vec3::new(2.0, -1.0, 0.5).norm()).abs() < 1e-12);
    }

    #[test]
    fn nonuniform_circle_keeps_radius() {
        let pts: Vec<Vec3> = (0..500)
            .map(|i| {
                let u = i as f64 / 499.0;
                let a = 1.8 * PI * (u + 0.15 * (TAU * u).sin() / TAU);
                Vec3::new(a.cos(), a.sin(), 0.0)
            })
            .collect();
        let r = arclength_reparametrize(&pts, 0.01).unwrap();
        let worst = r.points.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst:e}");
        assert!((r.length - 1.8 * PI).abs() < 1e-6);
    }

    #[test]
    fn total_length_preserved() {
        let h = 1e-3;
        let pts: Vec<Vec3> = (0..3000).map(|i| helix_point(i as f64 * h)).collect();
        let r = arclength_reparametrize(&pts, h).unwrap();
        let (a, b) = (polyline_length(&pts), polyline_length(&r.points));
        assert!((a - b).abs() / a < 1e-6);
    }

    #[test]
    fn resample_rejects_degenerate_input() {
        assert_eq!(arclength_reparametrize(&[Vec3::X], 0.1).unwrap_err().code(), "INSUFFICIENT_SAMPLES");
        assert_eq!(arclength_reparametrize(&[Vec3::X, Vec3::X], 0.1).unwrap_err().code(), "NOT_REGULAR");
    }

    #[test]
    fn sampled_helix_curvatures() {
        // (½cos t, ½sin t, −t/2): a = ½, b = −½ gives κ = a/(a²+b²) = 1, τ = b/(a²+b²) = −1
        let n = 2000;
        let pts: Vec<Vec3> = (0..n)
            .map(|i| {
                let t = 4.0 * PI * i as f64 / (n - 1) as f64;
                Vec3::new(0.5 * t.cos(), 0.5 * t.sin(), -0.5 * t)
            })
            .collect();
        let c = estimate_frame_curvatures(&pts, false, 1e-9).unwrap();
        let inner = FramedCurve::interior(0..c.len(), 0.9);
        for i in inner {
            assert!((c.kappa[i] - 1.0).abs() < 1e-4, "kappa {} at {i}", c.kappa[i]);
            assert!((c.tau[i] + 1.0).abs() < 1e-4, "tau {} at {i}", c.tau[i]);
            assert!((c.frames[i].t.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn collinear_samples_are_degenerate() {
        let pts: Vec<Vec3> = (0..50).map(|i| Vec3::X * (i as f64 * 0.1)).collect();
        let c = estimate_frame_curvatures(&pts, false, 1e-9).unwrap();
        assert!(c.degenerate.iter().all(|&d| d));
        assert!(c.kappa.iter().all(|k| k.abs() < 1e-10));
        assert!(c.frames.iter().all(|f| f.is_valid(1e-12)));
    }

    #[test]
    fn closed_circle() {
        let n = 360;
        let pts: Vec<Vec3> = (0..n)
            .map(|i| {
                let a = TAU * i as f64 / n as f64;
                Vec3::new(2.0 * a.cos(), 2.0 * a.sin(), 1.0)
            })
            .collect();
        let c = estimate_frame_curvatures(&pts, true, 1e-9).unwrap();
        assert_eq!(c.len(), n);
        for i in 0..n {
            assert!((c.kappa[i] - 0.5).abs() < 1e-6, "kappa {} at {i}", c.kappa[i]);
            assert!(c.tau[i].abs() < 1e-6);
        }
    }

    #[test]
    fn estimate_errors() {
        let few: Vec<Vec3> = (0..6).map(|i| Vec3::X * i as f64).collect();
        assert_eq!(estimate_frame_curvatures(&few, false, 1e-9).unwrap_err().code(), "INSUFFICIENT_SAMPLES");
        let mut rep: Vec<Vec3> = (0..10).map(|i| Vec3::X * i as f64).collect();
        rep[5] = rep[4];
        assert_eq!(estimate_frame_curvatures(&rep, false, 1e-9).unwrap_err().code(), "NOT_REGULAR");
    }
}
