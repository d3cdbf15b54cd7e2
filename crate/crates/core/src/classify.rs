//! Constancy testing and the decision procedures for lines, circles,
//! helices, slant helices and curves of constant precession, at level 0 or
//! at any level of a direction tower.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Range;

use serde::Serialize;

use crate::coverage::{self, Op};
use crate::curve::FramedCurve;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{helix_axis_tangent, slant_axis, Vec3};
use crate::numeric::{fit_line, Differentiator};
use crate::profile::CurvatureProfile;
use crate::tolerances::{Tolerances, INTERIOR_FRACTION};
use crate::tower::{DirectionTower, TowerLevel};

/// Fewest interior samples a constancy test accepts.
pub const MIN_CONSTANCY_SAMPLES: usize = 10;

/// Tolerance of the geometric post-checks (axis spread, component identities,
/// sinusoid residual, μ cross-check).
pub const CHECK_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    Line,
    Planar,
    Circle,
    Helix,
    SlantHelix,
    ConstantPrecession,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Line => "LINE",
            Label::Planar => "PLANAR",
            Label::Circle => "CIRCLE",
            Label::Helix => "HELIX",
            Label::SlantHelix => "SLANT_HELIX",
            Label::ConstantPrecession => "CONSTANT_PRECESSION",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstancyTest {
    pub name: String,
    pub mean: f64,
    /// max − min over the interior samples.
    pub spread: f64,
    /// max(rel_tol·|mean|, abs_floor).
    pub tol: f64,
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub samples: usize,
    pub verdict: bool,
}

impl ConstancyTest {
    fn named(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Constant and equal to zero.
    pub fn is_zero(&self) -> bool {
        self.verdict && self.mean.abs() <= self.abs_floor
    }
}

/// Tests whether the middle 90% of `values` is constant: spread at most
/// max(rel_tol·|mean|, abs_floor).
pub fn constancy(values: &[f64], rel_tol: f64, abs_floor: f64) -> Result<ConstancyTest> {
    coverage::record(Op::Constancy);
    if !(rel_tol >= 0.0 && abs_floor >= 0.0) {
        return Err(Error::InvalidArgument("tolerances must be non-negative".into()));
    }
    let inner = &values[FramedCurve::interior(0..values.len(), INTERIOR_FRACTION)];
    if inner.len() < MIN_CONSTANCY_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_CONSTANCY_SAMPLES, got: inner.len() });
    }
    if inner.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("constancy sample"));
    }
    let mean = inner.iter().sum::<f64>() / inner.len() as f64;
    let (lo, hi) = inner.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let spread = hi - lo;
    let tol = (rel_tol * mean.abs()).max(abs_floor);
    Ok(ConstancyTest {
        name: String::new(),
        mean,
        spread,
        tol,
        rel_tol,
        abs_floor,
        samples: inner.len(),
        verdict: spread <= tol,
    })
}

/// A measured quantity against a fixed bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, value: f64, tol: f64) -> Check {
        Check { name: name.into(), value, tol, pass: value <= tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualifyingLevel {
    pub k: usize,
    pub theta: f64,
    pub axis: Vec3,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub k: usize,
    pub valid_interval: Option<[f64; 2]>,
    pub labels: Vec<Label>,
    pub sigma: Option<ConstancyTest>,
    pub omega: Option<ConstancyTest>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ClassificationReport {
    pub labels: Vec<Label>,
    pub nk_level: Option<usize>,
    pub theta: Option<f64>,
    pub axis: Option<Vec3>,
    pub omega: Option<f64>,
    pub mu: Option<f64>,
    /// Frequency of the fitted sinusoid κ = ω sin(f s + φ), τ = ω cos(f s + φ).
    pub frequency: Option<f64>,
    pub phase: Option<f64>,
    /// W_k + μ N_k, averaged.
    pub precession_axis: Option<Vec3>,
    pub radius: Option<f64>,
    /// τ/κ for helices.
    pub ratio: Option<f64>,
    pub tests: Vec<ConstancyTest>,
    pub checks: Vec<Check>,
    pub valid_interval: Option<[f64; 2]>,
    pub qualifying_levels: Vec<QualifyingLevel>,
    pub levels: Vec<LevelSummary>,
    pub warnings: Vec<String>,
}

impl ClassificationReport {
    pub fn has(&self, label: Label) -> bool {
        self.labels.contains(&label)
    }

    fn set_labels(&mut self, set: BTreeSet<Label>) {
        self.labels = set.into_iter().collect();
    }

    pub fn test(&self, name: &str) -> Option<&ConstancyTest> {
        self.tests.iter().find(|t| t.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Angle between the lines spanned by `a` and `b`, in [0, π/2].
pub fn line_angle(a: Vec3, b: Vec3) -> f64 {
    let t = a.angle_to(b);
    t.min(PI - t)
}

/// Distance between two (axis, θ) pairs modulo the simultaneous flip
/// (u, θ) ~ (−u, −θ): the larger of the axis angle and the θ difference for
/// the better-matching representative.
pub fn axis_class_distance(u1: Vec3, theta1: f64, u2: Vec3, theta2: f64) -> f64 {
    let same = u1.angle_to(u2).max((theta1 - theta2).abs());
    let flipped = u1.angle_to(-u2).max((theta1 + theta2).abs());
    same.min(flipped)
}

fn interval(curve: &FramedCurve, r: &Range<usize>) -> [f64; 2] {
    [curve.s(r.start), curve.s(r.end - 1)]
}

fn mean_vec(v: impl Iterator<Item = Vec3>) -> Vec3 {
    let mut n = 0usize;
    let sum = v.fold(Vec3::ZERO, |a, b| {
        n += 1;
        a + b
    });
    sum / n.max(1) as f64
}

/// Helix data on `run`: θ = atan2(κ, τ) so u = cos θ T + sin θ B = W̄.
fn helix_axis(curve: &FramedCurve, run: &Range<usize>) -> Result<(f64, Vec3, f64)> {
    let inner = FramedCurve::interior(run.clone(), INTERIOR_FRACTION);
    let m = inner.len() as f64;
    let kbar = inner.clone().map(|i| curve.kappa[i]).sum::<f64>() / m;
    let tbar = inner.clone().map(|i| curve.tau[i]).sum::<f64>() / m;
    let theta = kbar.atan2(tbar);
    let mut axes = Vec::with_capacity(inner.len());
    for i in inner {
        axes.push(helix_axis_tangent(&curve.frames[i], theta)?);
    }
    let u = mean_vec(axes.iter().copied()).normalized().ok_or(Error::AxisUndefined)?;
    let spread = axes.iter().map(|a| a.angle_to(u)).fold(0.0, f64::max);
    Ok((theta, u, spread))
}

/// Slant helix axis from constant σ̄: cot θ = σ̄ with θ ∈ (−π/2, π/2], so
/// that ⟨N, u⟩ = cos θ ≥ 0.
fn canonical_theta(sigma: f64) -> f64 {
    let t = 1f64.atan2(sigma);
    if t > FRAC_PI_2 {
        t - PI
    } else {
        t
    }
}

struct SlantAxis {
    theta: f64,
    axis: Vec3,
    n_dot: ConstancyTest,
    w_dot: ConstancyTest,
    axis_spread: f64,
    t_identity: f64,
    b_identity: f64,
}

fn slant_axis_on(level: &TowerLevel, run: &Range<usize>, sigma_mean: f64, tols: &Tolerances) -> Result<SlantAxis> {
    let c = &level.curve;
    let theta0 = canonical_theta(sigma_mean);
    let inner = FramedCurve::interior(run.clone(), INTERIOR_FRACTION);
    let mut axes = Vec::with_capacity(inner.len());
    for i in inner.clone() {
        axes.push(slant_axis(&c.frames[i], c.kappa[i], c.tau[i], theta0)?);
    }
    let u = mean_vec(axes.iter().copied()).normalized().ok_or(Error::AxisUndefined)?;
    let axis_spread = axes.iter().map(|a| a.angle_to(u)).fold(0.0, f64::max);

    let unit_w: Vec<Vec3> = run.clone().map(|i| level.unit_darboux(i).unwrap_or(Vec3::ZERO)).collect();
    let n_dot: Vec<f64> = run.clone().map(|i| c.frames[i].n.dot(u)).collect();
    let w_dot: Vec<f64> = unit_w.iter().map(|w| w.dot(u)).collect();
    let n_test = constancy(&n_dot, tols.rel_tol, tols.abs_floor)?.named("n_dot_axis");
    let w_test = constancy(&w_dot, tols.rel_tol, tols.abs_floor)?.named("unit_darboux_dot_axis");
    let theta = w_test.mean.atan2(n_test.mean);

    // ⟨T,u⟩ = sin θ·τ/ω and ⟨B,u⟩ = sin θ·κ/ω
    let (mut t_id, mut b_id) = (0.0f64, 0.0f64);
    for i in inner {
        let w = level.omega[i];
        let f = &c.frames[i];
        t_id = t_id.max((f.t.dot(u) - theta.sin() * c.tau[i] / w).abs());
        b_id = b_id.max((f.b.dot(u) - theta.sin() * c.kappa[i] / w).abs());
    }
    Ok(SlantAxis { theta, axis: u, n_dot: n_test, w_dot: w_test, axis_spread, t_identity: t_id, b_identity: b_id })
}

struct Precession {
    omega: ConstancyTest,
    mu: Option<ConstancyTest>,
    mu_cross: f64,
    axis: Vec3,
    axis_spread: f64,
    frequency: f64,
    phase: f64,
    residual: f64,
}

fn precession_on(level: &TowerLevel, run: &Range<usize>, tols: &Tolerances) -> Result<Precession> {
    let c = &level.curve;
    let omega = constancy(&level.omega[run.clone()], tols.rel_tol, tols.abs_floor)?.named("omega");
    let kappa = &c.kappa[run.clone()];
    let tau = &c.tau[run.clone()];
    let diff = Differentiator::new(c.h, false);
    let dk = diff.apply(kappa, 1);
    let dt = diff.apply(tau, 1);
    let mu_pts: Vec<f64> = (0..kappa.len()).map(|j| dt[j] / kappa[j]).collect();
    let mu = constancy(&mu_pts, tols.rel_tol, tols.abs_floor).ok().map(|t| t.named("mu"));
    let mu_bar = mu.as_ref().map_or(f64::NAN, |t| t.mean);

    let inner = FramedCurve::interior(0..kappa.len(), INTERIOR_FRACTION);
    let mut mu_cross: f64 = 0.0;
    for j in inner.clone() {
        if tau[j].abs() >= CHECK_TOL * omega.mean {
            mu_cross = mu_cross.max((-dk[j] / tau[j] - mu_pts[j]).abs());
        }
    }

    let axes: Vec<Vec3> =
        inner.clone().map(|j| level.darboux[run.start + j] + c.frames[run.start + j].n * mu_bar).collect();
    let axis = mean_vec(axes.iter().copied());
    let axis_spread = axes.iter().map(|a| (*a - axis).norm()).fold(0.0, f64::max) / axis.norm();

    // ψ = atan2(κ, τ), unwrapped, is linear in s with slope f
    let mut psi: Vec<f64> = Vec::with_capacity(kappa.len());
    for j in 0..kappa.len() {
        let raw = kappa[j].atan2(tau[j]);
        let v: f64 = match psi.last() {
            Some(&prev) => raw + ((prev - raw) / (2.0 * PI)).round() * 2.0 * PI,
            None => raw,
        };
        psi.push(v);
    }
    let s: Vec<f64> = run.clone().map(|i| c.s(i)).collect();
    let (frequency, phase) = fit_line(&s[inner.clone()], &psi[inner.clone()]);
    let w = omega.mean;
    let residual = inner
        .map(|j| {
            let a = frequency * s[j] + phase;
            (kappa[j] - w * a.sin()).abs().max((tau[j] - w * a.cos()).abs())
        })
        .fold(0.0, f64::max)
        / w;
    Ok(Precession { omega, mu, mu_cross, axis, axis_spread, frequency, phase, residual })
}

/// Labels a single curve by cases: line, planar (circle), helix, slant
/// helix, constant precession. Labels stack: a helix is also a slant helix
/// (σ = 0) and, having constant ω, a curve of constant precession with μ = 0.
pub fn classify_basic(curve: &FramedCurve, tols: &Tolerances) -> Result<ClassificationReport> {
    coverage::record(Op::ClassifyBasic);
    let mut report = ClassificationReport::default();
    let mut labels = BTreeSet::new();

    let kappa_zero = constancy(&curve.kappa, tols.rel_tol, tols.abs_floor)?.named("kappa");
    if kappa_zero.is_zero() {
        labels.insert(Label::Line);
        report.valid_interval = Some(interval(curve, &(0..curve.len())));
        report.tests.push(kappa_zero);
        report.set_labels(labels);
        return Ok(report);
    }
    let run = curve
        .longest_usable_run()
        .ok_or_else(|| Error::Unclassifiable("no sample with defined normal and geodesic curvature".into()))?;
    let level = TowerLevel::main(curve.slice(run.clone()))?;
    let run = 0..run.len();
    let c = &level.curve;
    report.valid_interval = Some(interval(c, &run));

    let kappa = constancy(&c.kappa[run.clone()], tols.rel_tol, tols.abs_floor)?.named("kappa");
    let tau = constancy(&c.tau[run.clone()], tols.rel_tol, tols.abs_floor)?.named("tau");
    let planar = tau.is_zero();
    let circle = planar && kappa.verdict;
    report.tests.push(kappa.clone());
    report.tests.push(tau);
    if planar {
        labels.insert(Label::Planar);
        if circle {
            labels.insert(Label::Circle);
            report.radius = Some(1.0 / kappa.mean);
        }
        report.set_labels(labels);
        return Ok(report);
    }

    let ratio: Vec<f64> = run.clone().map(|i| c.tau[i] / c.kappa[i]).collect();
    let ratio = constancy(&ratio, tols.rel_tol, tols.abs_floor)?.named("tau_over_kappa");
    let sigma = constancy(&c.sigma[run.clone()], tols.rel_tol, tols.abs_floor)?.named("sigma");
    let helix = ratio.verdict;
    if helix {
        labels.insert(Label::Helix);
        let (theta, axis, spread) = helix_axis(c, &run)?;
        report.theta = Some(theta);
        report.axis = Some(axis);
        report.ratio = Some(ratio.mean);
        report.checks.push(Check::new("axis_angle_spread", spread, CHECK_TOL));
    }
    report.tests.push(ratio);
    let slant = sigma.verdict;
    let sigma_mean = sigma.mean;
    report.tests.push(sigma);
    if slant {
        labels.insert(Label::SlantHelix);
        let sa = slant_axis_on(&level, &run, sigma_mean, tols)?;
        if !helix {
            report.theta = Some(sa.theta);
            report.axis = Some(sa.axis);
            report.checks.push(Check::new("axis_angle_spread", sa.axis_spread, CHECK_TOL));
        }
        report.tests.push(sa.n_dot);
        let p = precession_on(&level, &run, tols)?;
        if p.omega.verdict {
            labels.insert(Label::ConstantPrecession);
            report.omega = Some(p.omega.mean);
            report.mu = p.mu.as_ref().map(|t| t.mean);
            report.frequency = Some(p.frequency);
            report.phase = Some(p.phase);
            report.precession_axis = Some(p.axis);
        }
        report.tests.push(p.omega);
    }
    report.set_labels(labels);
    Ok(report)
}

fn level_labels(level: &TowerLevel, tols: &Tolerances) -> (Vec<Label>, Option<String>) {
    let slice = level.curve.slice(level.valid.clone());
    match classify_basic(&slice, tols) {
        Ok(r) => (r.labels, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    }
}

/// Finds the smallest tower level k whose σ_k is constant, recovers the
/// axis of that level, and lists every qualifying level.
pub fn detect_nk_slant(tower: &DirectionTower, tols: &Tolerances) -> Result<ClassificationReport> {
    coverage::record(Op::DetectNkSlant);
    let mut report = ClassificationReport::default();
    report.warnings.extend(tower.warnings.iter().cloned());
    let mut first: Option<(usize, Range<usize>, SlantAxis, ConstancyTest)> = None;
    for level in &tower.levels {
        let (labels, note) = level_labels(level, tols);
        let mut summary = LevelSummary { k: level.k, valid_interval: None, labels, sigma: None, omega: None, note };
        let Some(run) = level.usable_run(tols.kappa_floor) else {
            summary.note.get_or_insert_with(|| "no usable samples".into());
            report.levels.push(summary);
            continue;
        };
        summary.valid_interval = Some(interval(&level.curve, &run));
        let sigma = match constancy(&level.curve.sigma[run.clone()], tols.rel_tol, tols.abs_floor) {
            Ok(t) => t.named("sigma"),
            Err(e) => {
                summary.note = Some(e.to_string());
                report.levels.push(summary);
                continue;
            }
        };
        summary.omega =
            constancy(&level.omega[run.clone()], tols.rel_tol, tols.abs_floor).ok().map(|t| t.named("omega"));
        summary.sigma = Some(sigma.clone());
        if sigma.verdict {
            let sa = slant_axis_on(level, &run, sigma.mean, tols)?;
            report.qualifying_levels.push(QualifyingLevel {
                k: level.k,
                theta: sa.theta,
                axis: sa.axis,
                sigma: sigma.mean,
            });
            if first.is_none() {
                first = Some((level.k, run, sa, sigma));
            }
        }
        report.levels.push(summary);
    }
    let Some((k, run, sa, sigma)) = first else {
        return Err(Error::NotNkSlant { depth: tower.depth() });
    };
    let level = &tower.levels[k];
    let mut labels: BTreeSet<Label> = report.levels[k].labels.iter().copied().collect();
    labels.insert(Label::SlantHelix);
    report.set_labels(labels);
    report.nk_level = Some(k);
    report.theta = Some(sa.theta);
    report.axis = Some(sa.axis);
    report.valid_interval = Some(interval(&level.curve, &run));
    report.tests.push(sigma);
    report.tests.push(sa.n_dot);
    report.tests.push(sa.w_dot);
    report.checks.push(Check::new("axis_angle_spread", sa.axis_spread, CHECK_TOL));
    report.checks.push(Check::new("tangent_component_identity", sa.t_identity, CHECK_TOL));
    report.checks.push(Check::new("binormal_component_identity", sa.b_identity, CHECK_TOL));
    for c in report.checks.iter().filter(|c| !c.pass) {
        report.warnings.push(format!("level {k}: {} = {:.3e} exceeds {:.0e}", c.name, c.value, c.tol));
    }
    for t in report.tests.iter().filter(|t| !t.verdict) {
        report.warnings.push(format!("level {k}: {} is not constant (spread {:.3e})", t.name, t.spread));
    }
    Ok(report)
}

/// Extends [`detect_nk_slant`]: at the detected level, requires constant
/// ω = ‖W_k‖ and recovers μ with τ_k′ = μ κ_k, κ_k′ = −μ τ_k, the fixed
/// vector W_k + μ N_k, and the sinusoid κ_k = ω sin(f s + φ),
/// τ_k = ω cos(f s + φ) (so f = −μ).
pub fn detect_nk_constant_precession(tower: &DirectionTower, tols: &Tolerances) -> Result<ClassificationReport> {
    coverage::record(Op::DetectNkConstantPrecession);
    let mut report = detect_nk_slant(tower, tols)?;
    let k = report.nk_level.expect("slant report carries its level");
    let level = &tower.levels[k];
    let run = level.usable_run(tols.kappa_floor).expect("qualifying level has usable samples");
    let p = precession_on(level, &run, tols)?;
    let mu_ok = p.mu.as_ref().is_some_and(|t| t.verdict);
    if !p.omega.verdict || !mu_ok {
        return Err(Error::NkSlantOnly { level: k });
    }
    let mu = p.mu.unwrap();
    report.omega = Some(p.omega.mean);
    report.mu = Some(mu.mean);
    report.frequency = Some(p.frequency);
    report.phase = Some(p.phase);
    report.precession_axis = Some(p.axis);
    report.tests.push(p.omega);
    report.tests.push(mu);
    let checks = [
        Check::new("mu_cross_check", p.mu_cross, CHECK_TOL),
        Check::new("precession_axis_spread", p.axis_spread, CHECK_TOL),
        Check::new("sinusoid_residual", p.residual, CHECK_TOL),
    ];
    for c in checks {
        if !c.pass {
            report.warnings.push(format!("level {k}: {} = {:.3e} exceeds {:.0e}", c.name, c.value, c.tol));
        }
        report.checks.push(c);
    }
    let mut labels: BTreeSet<Label> = report.labels.iter().copied().collect();
    labels.insert(Label::ConstantPrecession);
    report.set_labels(labels);
    Ok(report)
}

/// κ(s) = ω sin(μ s + φ), τ(s) = ω cos(μ s + φ) on `domain`.
pub fn generate_precession_profile(omega: f64, mu: f64, phase: f64, domain: (f64, f64)) -> Result<CurvatureProfile> {
    coverage::record(Op::GeneratePrecessionProfile);
    if !(omega.is_finite() && mu.is_finite() && phase.is_finite()) {
        return Err(Error::NonFinite("precession parameters"));
    }
    if omega <= 0.0 {
        return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    if mu == 0.0 {
        return Err(Error::InvalidArgument("mu must be non-zero".into()));
    }
    let arg = format!("({mu})*s+({phase})");
    let kappa = Expr::parse(&format!("({omega})*sin({arg})"))?;
    let tau = Expr::parse(&format!("({omega})*cos({arg})"))?;
    CurvatureProfile::analytic(kappa, tau).with_domain(domain.0, domain.1)
}

/// First stretch s ≥ 0 on which sin(μ s + φ) > 0, shrunk by `trim` at each
/// end (or to its middle 80% when that is shorter).
pub fn positive_stretch(mu: f64, phase: f64, trim: f64) -> (f64, f64) {
    let period = 2.0 * PI / mu.abs();
    let len = PI / mu.abs();
    // zeros of sin(μs+φ) where it starts increasing (μ > 0) or decreasing (μ < 0)
    let start = if mu > 0.0 { -phase / mu } else { (PI - phase) / mu };
    let a = start.rem_euclid(period);
    let b = a + len;
    let cut = trim.min(0.1 * len);
    (a + cut, b - cut)
}
