//! The worked example: κ = sin s·cos(sin s), τ = sin s·sin(sin s) on
//! [0.2, π − 0.2], whose first principal direction curve is a curve of
//! constant precession (κ₁ = sin s, τ₁ = cos s) and whose second is the
//! helix κ₂ = 1, τ₂ = −1.
//!
//! [`run_example1`] rebuilds everything numerically and compares it with the
//! closed forms, one [`FixtureRow`] per quantity.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::align::{kabsch, RigidMotion};
use crate::classify::{
    axis_class_distance, classify_basic, detect_nk_constant_precession, generate_precession_profile, line_angle,
    ClassificationReport, Label,
};
use crate::coverage::{self, Op};
use crate::curve::FramedCurve;
use crate::error::Result;
use crate::estimate::{arclength_reparametrize, estimate_frame_curvatures};
use crate::geometry::{FrenetFrame, Vec3};
use crate::integrator::{integrate_frenet, taylor_local};
use crate::numeric::fit_line;
use crate::profile::parse_profile;
use crate::tolerances::{Tolerances, INTERIOR_FRACTION};
use crate::tower::{build_tower, darboux_residual, tangent_indicatrix_ratio, DirectionTower, TowerStop};

pub const KAPPA_SRC: &str = "sin(s)*cos(sin(s))";
pub const TAU_SRC: &str = "sin(s)*sin(sin(s))";
pub const S0: f64 = 0.2;
pub const S1: f64 = PI - 0.2;

/// Closed forms of the example.
pub mod closed_form {
    use super::*;

    const P: f64 = SQRT_2 + 1.0;
    const M: f64 = SQRT_2 - 1.0;

    /// γ₁(s).
    pub fn gamma1(s: f64) -> Vec3 {
        let d = 2.0 * SQRT_2;
        Vec3::new(
            P * P / d * (M * s).sin() - M * M / d * (P * s).sin(),
            -P * P / d * (M * s).cos() + M * M / d * (P * s).cos(),
            s.sin() / SQRT_2,
        )
    }

    pub fn t1(s: f64) -> Vec3 {
        let d = 2.0 * SQRT_2;
        Vec3::new(
            P / d * (M * s).cos() - M / d * (P * s).cos(),
            P / d * (M * s).sin() - M / d * (P * s).sin(),
            s.cos() / SQRT_2,
        )
    }

    /// N₁ as printed, with third component +1/√2.
    pub fn n1_printed(s: f64) -> Vec3 {
        Vec3::new((SQRT_2 * s).cos() / SQRT_2, (SQRT_2 * s).sin() / SQRT_2, FRAC_1_SQRT_2)
    }

    pub fn b1(s: f64) -> Vec3 {
        let r = SQRT_2 * s;
        Vec3::new(
            -r.sin() * s.cos() + r.cos() * s.sin() / SQRT_2,
            r.cos() * s.cos() + r.sin() * s.sin() / SQRT_2,
            s.sin() / SQRT_2,
        )
    }

    pub fn w1(s: f64) -> Vec3 {
        Vec3::new((SQRT_2 * s).cos() / SQRT_2, (SQRT_2 * s).sin() / SQRT_2, FRAC_1_SQRT_2)
    }

    /// γ₂(s) as printed; equal to ∫N₁ up to a rigid motion.
    pub fn gamma2(s: f64) -> Vec3 {
        Vec3::new(0.5 * (SQRT_2 * s).sin(), 0.5 * (SQRT_2 * s).cos(), s / SQRT_2)
    }

    /// Level-1 frame with N₁ = B₁ × T₁ taken from the printed T₁ and B₁.
    pub fn level1_frame(s: f64) -> FrenetFrame {
        let (t, b) = (t1(s), b1(s));
        FrenetFrame { t, n: b.cross(t), b }
    }

    /// Main-curve frame whose principal direction frame is `level1_frame`:
    /// N = T₁, T = (−κ N₁ + τ B₁)/ω, B = (τ N₁ + κ B₁)/ω.
    pub fn main_frame(s: f64) -> FrenetFrame {
        let f1 = level1_frame(s);
        let kappa = s.sin() * s.sin().cos();
        let tau = s.sin() * s.sin().sin();
        let w = kappa.hypot(tau);
        FrenetFrame { t: (f1.n * -kappa + f1.b * tau) / w, n: f1.t, b: (f1.n * tau + f1.b * kappa) / w }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Example1Config {
    pub h: f64,
    pub tols: Tolerances,
    pub seed: u64,
}

impl Default for Example1Config {
    fn default() -> Self {
        Example1Config { h: 1e-3, tols: Tolerances::default(), seed: 2024 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureRow {
    pub name: String,
    pub expected: String,
    pub measured: String,
    pub error: f64,
    pub tol: f64,
    pub pass: bool,
}

fn row(name: &str, expected: impl Into<String>, measured: impl Into<String>, error: f64, tol: f64) -> FixtureRow {
    FixtureRow {
        name: name.into(),
        expected: expected.into(),
        measured: measured.into(),
        error,
        tol,
        pass: error <= tol,
    }
}

fn show(v: Vec3) -> String {
    format!("({:.9}, {:.9}, {:.9})", v.x, v.y, v.z)
}

#[derive(Debug, Clone, Serialize)]
pub struct Example1Report {
    pub config: Example1Config,
    pub rows: Vec<FixtureRow>,
    pub warnings: Vec<String>,
    /// Public operations exercised while the pipeline ran.
    pub operations: Vec<&'static str>,
    pub precession: ClassificationReport,
    pub level2: ClassificationReport,
    pub tower_stop: Option<TowerStop>,
    #[serde(skip)]
    pub tower: DirectionTower,
}

impl Example1Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&FixtureRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

fn max_over(r: std::ops::Range<usize>, f: impl Fn(usize) -> f64) -> f64 {
    r.map(f).fold(0.0, f64::max)
}

/// Fitted log-log slope of |taylor_local − integrate_frenet| on the main
/// profile about s = π/2, over offsets in [1e-3, 1e-1].
pub fn taylor_slope(tols: &Tolerances) -> Result<(f64, Vec<(f64, f64)>)> {
    let profile = parse_profile(KAPPA_SRC, TAU_SRC)?;
    let base = FRAC_PI_2;
    let h = 1e-5;
    let reference =
        integrate_frenet(&profile, Vec3::ZERO, FrenetFrame::IDENTITY, base, base + 0.1, h, tols.kappa_floor)?;
    let at0 = profile.eval(base, tols.kappa_floor)?;
    let mut pairs = Vec::new();
    for j in 0..=8 {
        let target = 10f64.powf(-3.0 + 2.0 * j as f64 / 8.0);
        let i = (target / reference.h).round() as usize;
        let ds = reference.s(i) - base;
        let approx = taylor_local(Vec3::ZERO, &FrenetFrame::IDENTITY, at0.kappa, at0.dkappa, at0.tau, ds)?;
        pairs.push((ds, (approx - reference.points[i]).norm()));
    }
    let lx: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    Ok((fit_line(&lx, &ly).0, pairs))
}

/// Scalars compared between a curve and its rigidly moved copy.
fn rigid_scalars(r: &ClassificationReport) -> Vec<f64> {
    [r.theta, r.omega, r.mu, r.frequency].iter().map(|v| v.unwrap_or(f64::NAN)).collect()
}

/// Classifies `points` before and after `motion`; returns (label agreement,
/// largest scalar difference, axis angle after rotating back).
pub fn rigid_motion_discrepancy(points: &[Vec3], motion: &RigidMotion, tols: &Tolerances) -> Result<(bool, f64, f64)> {
    let moved: Vec<Vec3> = points.iter().map(|p| motion.apply(*p)).collect();
    let a = estimate_frame_curvatures(points, false, tols.kappa_floor)?;
    let b = estimate_frame_curvatures(&moved, false, tols.kappa_floor)?;
    let ra = classify_basic(&a, tols)?;
    let rb = classify_basic(&b, tols)?;
    let mut worst: f64 = 0.0;
    for (x, y) in rigid_scalars(&ra).into_iter().zip(rigid_scalars(&rb)) {
        if x.is_nan() != y.is_nan() {
            worst = f64::INFINITY;
        } else if !x.is_nan() {
            worst = worst.max((x - y).abs());
        }
    }
    let inner = FramedCurve::interior(0..a.len().min(b.len()), INTERIOR_FRACTION);
    for i in inner {
        worst = worst
            .max((a.kappa[i] - b.kappa[i]).abs())
            .max((a.tau[i] - b.tau[i]).abs())
            .max((a.sigma[i] - b.sigma[i]).abs());
    }
    let axis = match (ra.axis, rb.axis) {
        (Some(u), Some(v)) => motion.rotate(u).angle_to(v),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    };
    Ok((ra.labels == rb.labels, worst, axis))
}

/// Runs the whole example and compares every quantity with its closed form.
pub fn run_example1(config: &Example1Config) -> Result<Example1Report> {
    let tols = &config.tols;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();

    let profile = parse_profile(KAPPA_SRC, TAU_SRC)?;
    let main = integrate_frenet(&profile, Vec3::ZERO, closed_form::main_frame(S0), S0, S1, config.h, tols.kappa_floor)?;
    let drift = main.frames.iter().map(|f| f.orthonormality_error()).fold(0.0, f64::max);
    rows.push(row("main frame drift", "< 1e-9", format!("{drift:.3e}"), drift, 1e-9));

    let tower = build_tower(main, 2, tols)?;
    warnings.extend(tower.warnings.iter().cloned());
    if tower.levels.len() < 3 {
        let stop = tower.stopped.as_ref().map_or(String::new(), |s| s.reason.clone());
        return Err(crate::Error::LevelUnavailable { level: tower.levels.len(), reason: stop });
    }
    let (l0, l1, l2) = (&tower.levels[0], &tower.levels[1], &tower.levels[2]);
    let inner1 = FramedCurve::interior(l1.valid.clone(), INTERIOR_FRACTION);
    let inner2 = FramedCurve::interior(l2.valid.clone(), INTERIOR_FRACTION);
    let c1 = &l1.curve;
    let c2 = &l2.curve;

    let e = max_over(inner1.clone(), |i| (c1.kappa[i] - c1.s(i).sin()).abs());
    rows.push(row("kappa_1", "sin s", format!("max dev {e:.3e}"), e, 1e-5));
    let e = max_over(inner1.clone(), |i| (c1.tau[i] - c1.s(i).cos()).abs());
    rows.push(row("tau_1", "cos s", format!("max dev {e:.3e}"), e, 1e-4));
    let e = max_over(inner1.clone(), |i| (c1.sigma[i] + 1.0).abs());
    rows.push(row("sigma_1", "-1", format!("max dev {e:.3e}"), e, 1e-4));
    let e = max_over(inner2.clone(), |i| (c2.kappa[i] - 1.0).abs());
    rows.push(row("kappa_2", "1", format!("max dev {e:.3e}"), e, 1e-4));
    let e = max_over(inner2.clone(), |i| (c2.tau[i] + 1.0).abs());
    rows.push(row("tau_2", "-1", format!("max dev {e:.3e}"), e, 1e-4));

    // printed N₁ against the pipeline's N₁
    let n3 = inner1.clone().map(|i| c1.frames[i].n.z).sum::<f64>() / inner1.len() as f64;
    let e = (n3 + FRAC_1_SQRT_2).abs();
    rows.push(row("N_1 third component", "-1/sqrt 2", format!("{n3:.10}"), e, 1e-6));
    let printed = closed_form::n1_printed(S0);
    let printed_dot = printed.dot(closed_form::w1(S0));
    if (printed.z - n3).abs() > 1e-6 {
        warnings.push(format!(
            "printed N_1 third component +1/sqrt 2 is inconsistent: it gives <W_1, N_1> = {printed_dot:.6} instead of 0 and \
             an axis other than (0,0,-1); the pipeline finds n_3 = {n3:.10}"
        ));
    }
    let e = max_over(inner1.clone(), |i| (l1.darboux[i] - closed_form::w1(c1.s(i))).max_abs());
    rows.push(row("W_1", "(cos(sqrt2 s), sin(sqrt2 s), 1)/sqrt2", format!("max dev {e:.3e}"), e, 1e-6));
    let e = max_over(inner1.clone(), |i| {
        let s = c1.s(i);
        let f = closed_form::level1_frame(s);
        (c1.frames[i].t - f.t).max_abs().max((c1.frames[i].b - f.b).max_abs())
    });
    rows.push(row("T_1, B_1", "closed form", format!("max dev {e:.3e}"), e, 1e-6));

    // γ₁ up to translation
    let start = l1.valid.start;
    let offset = closed_form::gamma1(c1.s(start)) - c1.points[start];
    let e = max_over(l1.valid.clone(), |i| (c1.points[i] + offset - closed_form::gamma1(c1.s(i))).norm());
    rows.push(row("gamma_1 = int N", "closed form + const", format!("max dev {e:.3e}"), e, 1e-6));

    // γ₁ straight from its own curvatures
    let generated = generate_precession_profile(1.0, 1.0, 0.0, (S0, S1))?;
    let e = max_over(inner1.clone(), |i| {
        let smp = generated.eval(c1.s(i), tols.kappa_floor).unwrap();
        (smp.kappa - c1.kappa[i]).abs().max((smp.tau - c1.tau[i]).abs())
    });
    rows.push(row("generator(1, 1, 0)", "kappa_1, tau_1", format!("max dev {e:.3e}"), e, 1e-5));
    let direct = integrate_frenet(
        &generated,
        closed_form::gamma1(S0),
        closed_form::level1_frame(S0),
        S0,
        S1,
        config.h,
        tols.kappa_floor,
    )?;
    let e = max_over(0..direct.len(), |i| (direct.points[i] - closed_form::gamma1(direct.s(i))).norm());
    rows.push(row("gamma_1 from kappa_1, tau_1", "closed form", format!("max dev {e:.3e}"), e, 1e-6));

    // γ₂ up to a rigid motion
    let span = l2.valid.clone();
    let ours: Vec<Vec3> = span.clone().map(|i| c2.points[i]).collect();
    let theirs: Vec<Vec3> = span.clone().map(|i| closed_form::gamma2(c2.s(i))).collect();
    let (motion, rms) = kabsch(&ours, &theirs)?;
    rows.push(row("gamma_2 = int N_1", "closed form mod rigid motion", format!("rms {rms:.3e}"), rms, 1e-6));
    if motion.angle() > 1e-6 {
        warnings.push(format!(
            "printed gamma_2 differs from the integral of N_1 by a rotation of {:.6} rad",
            motion.angle()
        ));
    }
    let resampled = arclength_reparametrize(&ours, c2.h)?;
    let length = c2.s(span.end - 1) - c2.s(span.start);
    let e = (resampled.length - length).abs() / length;
    rows.push(row("gamma_2 arclength", "shared with main curve", format!("rel dev {e:.3e}"), e, 1e-6));

    // axes, ω, μ
    let report = detect_nk_constant_precession(&tower, tols)?;
    warnings.extend(report.warnings.iter().cloned());
    let (theta, axis) = (report.theta.unwrap_or(f64::NAN), report.axis.unwrap_or(Vec3::ZERO));
    let e = axis_class_distance(axis, theta, Vec3::new(0.0, 0.0, -1.0), -PI / 4.0);
    rows.push(row("N_1-slant axis, theta", "(0,0,-1), -pi/4", format!("{} , {theta:.9}", show(axis)), e, 1e-3));
    let k = report.nk_level.map_or(f64::INFINITY, |k| (k as f64 - 1.0).abs());
    rows.push(row("nk_level", "1", format!("{:?}", report.nk_level), k, 0.0));
    let spread = report.test("n_dot_axis").map_or(f64::INFINITY, |t| t.spread);
    rows.push(row("<N_1, u> spread", "0", format!("{spread:.3e}"), spread, 1e-4));
    let omega = report.omega.unwrap_or(f64::NAN);
    rows.push(row("omega", "1", format!("{omega:.12}"), (omega - 1.0).abs(), 1e-5));
    let mu = report.mu.unwrap_or(f64::NAN);
    rows.push(row("mu = tau_1'/kappa_1", "-1", format!("{mu:.9}"), (mu + 1.0).abs(), 1e-3));
    let mu_spread = report.test("mu").map_or(f64::INFINITY, |t| t.spread);
    rows.push(row("mu spread", "0", format!("{mu_spread:.3e}"), mu_spread, 1e-3));
    let pa = report.precession_axis.unwrap_or(Vec3::ZERO);
    rows.push(row("W_1 + mu N_1", "(0,0,sqrt 2)", show(pa), (pa - Vec3::new(0.0, 0.0, SQRT_2)).max_abs(), 1e-3));
    let pspread = report.check("precession_axis_spread").map_or(f64::INFINITY, |c| c.value);
    rows.push(row("W_1 + mu N_1 spread", "0", format!("{pspread:.3e}"), pspread, 1e-3));
    let e = line_angle(pa, axis);
    rows.push(row("precession axis line", "line of N_1-slant axis", format!("{e:.3e} rad"), e, 1e-3));

    let slice2 = c2.slice(l2.valid.clone());
    let level2 = classify_basic(&slice2, tols)?;
    let helix = if level2.has(Label::Helix) { 0.0 } else { 1.0 };
    rows.push(row(
        "level 2 label",
        "HELIX",
        level2.labels.iter().map(|l| l.name()).collect::<Vec<_>>().join(","),
        helix,
        0.0,
    ));
    let a2 = level2.axis.unwrap_or(Vec3::ZERO);
    let e = line_angle(a2, Vec3::Z);
    rows.push(row("level 2 axis", "line (0,0,1)", show(a2), e, 1e-3));
    let q2 = report.qualifying_levels.iter().find(|q| q.k == 2);
    let e = q2.map_or(f64::INFINITY, |q| q.axis.angle_to(Vec3::Z));
    rows.push(row("N_2-slant axis", "(0,0,1)", q2.map_or("-".into(), |q| show(q.axis)), e, 1e-3));

    // tangent indicatrices
    let r1 = tangent_indicatrix_ratio(l1, tols.kappa_floor);
    let e = max_over(inner1.clone(), |i| (r1[i] + 1.0).abs());
    rows.push(row("indicatrix tau/kappa, level 1", "-1", format!("max dev {e:.3e}"), e, 1e-3));
    let r0 = tangent_indicatrix_ratio(l0, tols.kappa_floor);
    let inner0 = FramedCurve::interior(l0.valid.clone(), INTERIOR_FRACTION);
    let e = max_over(inner0, |i| {
        let s = l0.curve.s(i);
        (r0[i] - s.cos() / s.sin()).abs()
    });
    rows.push(row("indicatrix tau/kappa, level 0", "cot s", format!("max dev {e:.3e}"), e, 1e-3));

    // Darboux identities on every level
    let e = tower.levels.iter().map(|l| darboux_residual(l, tols.kappa_floor)).fold(0.0, f64::max);
    rows.push(row("W x (T,N,B) = (T,N,B)'", "all levels", format!("max dev {e:.3e}"), e, 1e-4));

    let (slope, _) = taylor_slope(tols)?;
    rows.push(row("Taylor remainder slope", ">= 3.7", format!("{slope:.4}"), (3.7 - slope).max(0.0), 0.0));

    // rigid motion on point samples of γ₁
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let motion = RigidMotion::random(&mut rng);
    let stride = ((1e-2 / c1.h).round() as usize).max(1);
    let samples: Vec<Vec3> = l1.valid.clone().step_by(stride).map(|i| c1.points[i]).collect();
    let (same_labels, scalar, angle) = rigid_motion_discrepancy(&samples, &motion, tols)?;
    let e = if same_labels { scalar.max(angle) } else { f64::INFINITY };
    rows.push(row("rigid motion invariance", "labels equal, scalars within 1e-6", format!("{e:.3e}"), e, 1e-6));

    let operations = coverage::snapshot().into_iter().map(Op::name).collect();
    Ok(Example1Report {
        config: *config,
        rows,
        warnings,
        operations,
        precession: report,
        level2,
        tower_stop: tower.stopped.clone(),
        tower,
    })
}
