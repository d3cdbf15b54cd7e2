//! Towers of principal direction curves.
//!
//! Level 0 is the main curve. Level k+1 is the integral curve of the
//! principal normal of level k, sharing the main curve's arclength grid:
//!
//! ```text
//! T_{k+1} = N_k
//! N_{k+1} = (−κ_k T_k + τ_k B_k) / ω_k        ω_k = √(κ_k² + τ_k²)
//! B_{k+1} = T_{k+1} × N_{k+1} = W_k / ω_k
//! κ_{k+1} = ω_k,   τ_{k+1} = σ_k ω_k
//! ```

use std::ops::Range;

use serde::Serialize;

use crate::coverage::{self, Op};
use crate::curve::{longest_run, FramedCurve};
use crate::error::{Error, Result};
use crate::estimate::estimate_frame_curvatures;
use crate::geometry::{darboux_vector, geodesic_curvature, CurvatureSample, FrenetFrame, Vec3};
use crate::numeric::{cumulative_simpson, Differentiator};
use crate::tolerances::{Tolerances, INTERIOR_FRACTION};

/// Shortest usable stretch, in samples, from which a next level is built.
pub const MIN_LEVEL_SAMPLES: usize = 11;

/// Agreement required between the recursive frame and the frame estimated
/// from the integrated points.
pub const CROSS_CHECK_TOL: f64 = 1e-4;

/// Result of re-deriving a level's frame and curvatures from its points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheck {
    pub max_frame_deviation: f64,
    pub max_kappa_deviation: f64,
    pub max_tau_deviation: f64,
    pub samples_compared: usize,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowerLevel {
    pub k: usize,
    /// Full-grid curve. Outside `valid` the samples are marked degenerate and
    /// hold the nearest valid frame and point.
    pub curve: FramedCurve,
    /// ‖W_k‖ per sample.
    pub omega: Vec<f64>,
    /// W_k = τ_k T_k + κ_k B_k per sample.
    pub darboux: Vec<Vec3>,
    /// Sample range on which this level is defined.
    pub valid: Range<usize>,
    pub cross_check: Option<CrossCheck>,
}

impl TowerLevel {
    /// Wraps a main curve as level 0.
    pub fn main(curve: FramedCurve) -> Result<TowerLevel> {
        let n = curve.len();
        let mut darboux = Vec::with_capacity(n);
        for i in 0..n {
            darboux.push(darboux_vector(&curve.frames[i], curve.kappa[i].max(0.0), curve.tau[i])?);
        }
        Ok(TowerLevel {
            k: 0,
            omega: (0..n).map(|i| curve.omega(i)).collect(),
            darboux,
            valid: 0..n,
            curve,
            cross_check: None,
        })
    }

    pub fn sigma(&self) -> &[f64] {
        &self.curve.sigma
    }

    /// Longest run inside `valid` where N, σ and the Darboux direction are
    /// all defined.
    pub fn usable_run(&self, kappa_floor: f64) -> Option<Range<usize>> {
        let v = self.valid.clone();
        longest_run(v.len(), |j| {
            let i = v.start + j;
            self.curve.is_usable(i) && self.omega[i] >= kappa_floor
        })
        .map(|r| v.start + r.start..v.start + r.end)
    }

    /// Unit Darboux vector W̄_k at sample `i`.
    pub fn unit_darboux(&self, i: usize) -> Option<Vec3> {
        self.darboux[i].normalized()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowerStop {
    pub level: usize,
    pub code: &'static str,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionTower {
    pub levels: Vec<TowerLevel>,
    pub requested_depth: usize,
    /// Why construction stopped before `requested_depth`, if it did.
    pub stopped: Option<TowerStop>,
    pub warnings: Vec<String>,
}

impl DirectionTower {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn main(&self) -> &TowerLevel {
        &self.levels[0]
    }
}

fn unavailable(level: usize, reason: impl Into<String>) -> Error {
    Error::LevelUnavailable { level, reason: reason.into() }
}

/// Builds level k+1 from level k.
///
/// Frames and curvatures follow the recursion in the module docs; points are
/// the running Simpson integral of N_k, starting at the origin at the first
/// usable sample. The new level's σ differentiates its κ and τ with
/// five-point stencils. As an independent check the frame and curvatures
/// are re-estimated from the integrated points.
///
/// A planar level (τ ≡ 0 within `abs_floor`) ends the tower.
pub fn principal_direction_step(level: &TowerLevel, tols: &Tolerances) -> Result<TowerLevel> {
    coverage::record(Op::PrincipalDirectionStep);
    let next_k = level.k + 1;
    let run = level
        .usable_run(tols.kappa_floor)
        .ok_or_else(|| unavailable(next_k, format!("level {} has no non-degenerate samples", level.k)))?;
    if run.len() < MIN_LEVEL_SAMPLES {
        return Err(unavailable(
            next_k,
            format!("usable interval of level {} spans {} samples, need {MIN_LEVEL_SAMPLES}", level.k, run.len()),
        ));
    }
    let max_tau = run.clone().map(|i| level.curve.tau[i].abs()).fold(0.0, f64::max);
    if max_tau <= tols.abs_floor {
        return Err(unavailable(next_k, format!("level {} is planar (max |τ| = {max_tau:e})", level.k)));
    }

    let src = &level.curve;
    let n = src.len();
    let h = src.h;
    let m = run.len();

    let mut frames = Vec::with_capacity(m);
    let mut kappa = Vec::with_capacity(m);
    let mut tau = Vec::with_capacity(m);
    for i in run.clone() {
        let f = &src.frames[i];
        let w = level.omega[i];
        let t = f.n;
        let normal = (f.t * (-src.kappa[i]) + f.b * src.tau[i]) / w;
        frames.push(FrenetFrame::from_tangent_normal(t, normal)?);
        kappa.push(w);
        tau.push(src.sigma[i] * w);
    }
    let normals: Vec<Vec3> = run.clone().map(|i| src.frames[i].n).collect();
    let points = cumulative_simpson(&normals, h);

    let diff = Differentiator::new(h, false);
    let dk = diff.apply(&kappa, 1);
    let dt = diff.apply(&tau, 1);
    let mut sigma = Vec::with_capacity(m);
    let mut degenerate = Vec::with_capacity(m);
    for j in 0..m {
        let smp = CurvatureSample::new(src.s(run.start + j), kappa[j], tau[j], dk[j], dt[j], tols.kappa_floor);
        degenerate.push(smp.degenerate);
        sigma.push(if smp.degenerate { f64::NAN } else { geodesic_curvature(&smp).unwrap_or(f64::NAN) });
    }

    let cross_check = cross_check(&points, &frames, &kappa, &tau, tols.kappa_floor);

    // spread onto the full grid
    let hold = |j: isize| j.clamp(0, m as isize - 1) as usize;
    let mut curve = FramedCurve {
        s0: src.s0,
        h,
        points: Vec::with_capacity(n),
        frames: Vec::with_capacity(n),
        kappa: vec![0.0; n],
        tau: vec![0.0; n],
        sigma: vec![f64::NAN; n],
        degenerate: vec![true; n],
    };
    for i in 0..n {
        let j = hold(i as isize - run.start as isize);
        curve.points.push(points[j]);
        curve.frames.push(frames[j]);
    }
    for j in 0..m {
        let i = run.start + j;
        curve.kappa[i] = kappa[j];
        curve.tau[i] = tau[j];
        curve.sigma[i] = sigma[j];
        curve.degenerate[i] = degenerate[j];
    }
    let mut darboux = Vec::with_capacity(n);
    for i in 0..n {
        darboux.push(darboux_vector(&curve.frames[i], curve.kappa[i], curve.tau[i])?);
    }
    Ok(TowerLevel {
        k: next_k,
        omega: (0..n).map(|i| curve.omega(i)).collect(),
        darboux,
        valid: run,
        curve,
        cross_check: Some(cross_check),
    })
}

fn cross_check(points: &[Vec3], frames: &[FrenetFrame], kappa: &[f64], tau: &[f64], kappa_floor: f64) -> CrossCheck {
    let failed = CrossCheck {
        max_frame_deviation: f64::INFINITY,
        max_kappa_deviation: f64::INFINITY,
        max_tau_deviation: f64::INFINITY,
        samples_compared: 0,
        agrees: false,
    };
    let Ok(est) = estimate_frame_curvatures(points, false, kappa_floor) else {
        return failed;
    };
    let len = est.len().min(points.len());
    let inner = FramedCurve::interior(0..len, INTERIOR_FRACTION);
    let mut frame_dev: f64 = 0.0;
    let mut kappa_dev: f64 = 0.0;
    let mut tau_dev: f64 = 0.0;
    let mut compared = 0;
    for j in inner {
        if est.degenerate[j] {
            continue;
        }
        let (a, b) = (&frames[j], &est.frames[j]);
        frame_dev = frame_dev.max((a.t - b.t).max_abs()).max((a.n - b.n).max_abs()).max((a.b - b.b).max_abs());
        let scale = kappa[j].hypot(tau[j]).max(1.0);
        kappa_dev = kappa_dev.max((kappa[j] - est.kappa[j]).abs() / scale);
        tau_dev = tau_dev.max((tau[j] - est.tau[j]).abs() / scale);
        compared += 1;
    }
    if compared == 0 {
        return failed;
    }
    CrossCheck {
        max_frame_deviation: frame_dev,
        max_kappa_deviation: kappa_dev,
        max_tau_deviation: tau_dev,
        samples_compared: compared,
        agrees: frame_dev.max(kappa_dev).max(tau_dev) <= CROSS_CHECK_TOL,
    }
}

/// Level 0 = `main`, then up to `depth` principal direction steps. An
/// unavailable level ends the tower early; the reason is kept in
/// [`DirectionTower::stopped`].
pub fn build_tower(main: FramedCurve, depth: usize, tols: &Tolerances) -> Result<DirectionTower> {
    coverage::record(Op::BuildTower);
    let mut levels = vec![TowerLevel::main(main)?];
    let mut stopped = None;
    let mut warnings = Vec::new();
    for _ in 0..depth {
        match principal_direction_step(levels.last().unwrap(), tols) {
            Ok(level) => {
                if let Some(cc) = &level.cross_check {
                    if !cc.agrees {
                        warnings.push(format!(
                            "level {}: estimated frame disagrees with recursion (frame {:.2e}, kappa {:.2e}, tau {:.2e})",
                            level.k, cc.max_frame_deviation, cc.max_kappa_deviation, cc.max_tau_deviation
                        ));
                    }
                }
                levels.push(level);
            }
            Err(e @ Error::LevelUnavailable { .. }) => {
                let Error::LevelUnavailable { level, reason } = &e else { unreachable!() };
                stopped = Some(TowerStop { level: *level, code: e.code(), reason: reason.clone() });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(DirectionTower { levels, requested_depth: depth, stopped, warnings })
}

/// Ratio τ/κ of the tangent indicatrix T_k(s), treated as a general
/// (non-unit-speed) space curve and differentiated numerically. NaN outside
/// the usable run or where the indicatrix is degenerate.
pub fn tangent_indicatrix_ratio(level: &TowerLevel, kappa_floor: f64) -> Vec<f64> {
    coverage::record(Op::TangentIndicatrixRatio);
    let n = level.curve.len();
    let mut out = vec![f64::NAN; n];
    let Some(run) = level.usable_run(kappa_floor) else {
        return out;
    };
    if run.len() < 5 {
        return out;
    }
    let tangents: Vec<Vec3> = run.clone().map(|i| level.curve.frames[i].t).collect();
    let diff = Differentiator::new(level.curve.h, false);
    let d1 = diff.apply(&tangents, 1);
    let d2 = diff.apply(&tangents, 2);
    let d3 = diff.apply(&tangents, 3);
    for (j, i) in run.enumerate() {
        let c = d1[j].cross(d2[j]);
        let cn = c.norm();
        if cn < kappa_floor {
            continue;
        }
        let kappa_t = cn / d1[j].norm().powi(3);
        let tau_t = c.dot(d3[j]) / (cn * cn);
        out[i] = tau_t / kappa_t;
    }
    out
}

/// Largest deviation, over the interior of the usable run, between the
/// differentiated frame and its Darboux form: ‖T′ − W×T‖, ‖N′ − W×N‖,
/// ‖B′ − W×B‖ in the max norm. NaN when the run is too short.
pub fn darboux_residual(level: &TowerLevel, kappa_floor: f64) -> f64 {
    let Some(run) = level.usable_run(kappa_floor) else {
        return f64::NAN;
    };
    if run.len() < MIN_LEVEL_SAMPLES {
        return f64::NAN;
    }
    let c = &level.curve;
    let diff = Differentiator::new(c.h, false);
    let column = |pick: fn(&FrenetFrame) -> Vec3| -> Vec<Vec3> { run.clone().map(|i| pick(&c.frames[i])).collect() };
    let dt = diff.apply(&column(|f| f.t), 1);
    let dn = diff.apply(&column(|f| f.n), 1);
    let db = diff.apply(&column(|f| f.b), 1);
    let mut worst: f64 = 0.0;
    for j in FramedCurve::interior(0..run.len(), INTERIOR_FRACTION) {
        let i = run.start + j;
        let (f, w) = (&c.frames[i], level.darboux[i]);
        worst = worst
            .max((dt[j] - w.cross(f.t)).max_abs())
            .max((dn[j] - w.cross(f.n)).max_abs())
            .max((db[j] - w.cross(f.b)).max_abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::integrate_frenet;
    use crate::profile::parse_profile;

    fn curve(kappa: &str, tau: &str, s0: f64, s1: f64, h: f64) -> FramedCurve {
        let p = parse_profile(kappa, tau).unwrap();
        integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, s0, s1, h, 1e-9).unwrap()
    }

    #[test]
    fn depth_zero_is_main_only() {
        let c = curve("1", "0.5", 0.0, 1.0, 1e-2);
        let t = build_tower(c.clone(), 0, &Tolerances::default()).unwrap();
        assert_eq!(t.levels.len(), 1);
        assert_eq!(t.levels[0].curve, c);
        assert!(t.stopped.is_none());
    }

    #[test]
    fn helix_next_level_is_planar_with_constant_curvature() {
        let c = curve("0.6", "0.8", 0.0, 6.0, 1e-3);
        let t = build_tower(c, 1, &Tolerances::default()).unwrap();
        let l1 = &t.levels[1];
        for i in l1.valid.clone() {
            assert!((l1.curve.kappa[i] - 1.0).abs() < 1e-12);
            assert!(l1.curve.tau[i].abs() < 1e-12);
        }
        assert!(l1.cross_check.unwrap().agrees, "{:?}", l1.cross_check);
    }

    #[test]
    fn helix_tower_stops_after_planar_level() {
        let c = curve("1", "-1", 0.0, 4.0, 1e-3);
        let t = build_tower(c, 5, &Tolerances::default()).unwrap();
        assert_eq!(t.levels.len(), 2);
        let stop = t.stopped.unwrap();
        assert_eq!((stop.level, stop.code), (2, "LEVEL_UNAVAILABLE"));
    }

    #[test]
    fn line_has_no_next_level() {
        let c = curve("0", "0", 0.0, 1.0, 1e-2);
        let t = build_tower(c, 2, &Tolerances::default()).unwrap();
        assert_eq!(t.levels.len(), 1);
        assert_eq!(t.stopped.unwrap().level, 1);
    }

    #[test]
    fn grids_are_shared_bitwise() {
        let c = curve("sin(s)*cos(sin(s))", "sin(s)*sin(sin(s))", 0.2, 2.9, 1e-3);
        let t = build_tower(c, 2, &Tolerances::default()).unwrap();
        let g0 = t.levels[0].curve.s_grid();
        for l in &t.levels {
            assert_eq!(
                l.curve.s_grid().iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
                g0.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn level_starts_at_origin_and_tangent_is_previous_normal() {
        let c = curve("2+cos(s)", "s", 0.0, 3.0, 1e-3);
        let t = build_tower(c, 1, &Tolerances::default()).unwrap();
        let (l0, l1) = (&t.levels[0], &t.levels[1]);
        assert_eq!(l1.curve.points[l1.valid.start], Vec3::ZERO);
        for i in l1.valid.clone() {
            assert!((l1.curve.frames[i].t - l0.curve.frames[i].n).max_abs() < 1e-12);
        }
    }

    #[test]
    fn darboux_identities_hold_on_every_level() {
        let c = curve("sin(s)*cos(sin(s))", "sin(s)*sin(sin(s))", 0.2, 2.9, 1e-3);
        let t = build_tower(c, 2, &Tolerances::default()).unwrap();
        for l in &t.levels {
            assert!(darboux_residual(l, 1e-9) < 1e-6, "level {}", l.k);
        }
    }

    #[test]
    fn indicatrix_ratio_of_helix_is_zero() {
        let c = curve("1", "-1", 0.0, 3.0, 1e-3);
        let l = TowerLevel::main(c).unwrap();
        let r = tangent_indicatrix_ratio(&l, 1e-9);
        for i in FramedCurve::interior(0..r.len(), 0.9) {
            assert!(r[i].abs() < 1e-6, "{}", r[i]);
        }
    }
}
