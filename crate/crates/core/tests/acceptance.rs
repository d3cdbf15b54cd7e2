//! Acceptance criteria 1 to 12. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, TAU};
use std::ops::Range;
use std::process::ExitCode;
use std::time::Instant;

use frenet_tower::align::RigidMotion;
use frenet_tower::classify::{axis_class_distance, line_angle, positive_stretch};
use frenet_tower::cli::classify_curve;
use frenet_tower::example1::{
    closed_form, rigid_motion_discrepancy, run_example1, Example1Config, KAPPA_SRC, S0, S1, TAU_SRC,
};
use frenet_tower::tolerances::INTERIOR_FRACTION;
use frenet_tower::{
    build_tower, classify_basic, detect_nk_constant_precession, detect_nk_slant, estimate_frame_curvatures,
    generate_precession_profile, integrate_frenet, parse_profile, taylor_local, DirectionTower, FramedCurve,
    FrenetFrame, Label, Tolerances, TowerLevel, Vec3,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-3;
const BUDGET_SECS: f64 = 5.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn inner(r: Range<usize>) -> Range<usize> {
    FramedCurve::interior(r, INTERIOR_FRACTION)
}

fn max_dev(r: Range<usize>, f: impl Fn(usize) -> f64) -> f64 {
    r.map(f).fold(0.0, f64::max)
}

fn spread(v: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    hi - lo
}

/// Central difference of `v` at interior sample `i`.
fn diff(v: &[f64], h: f64, i: usize) -> f64 {
    (v[i + 1] - v[i - 1]) / (2.0 * h)
}

fn diff_vec(v: &[Vec3], h: f64, i: usize) -> Vec3 {
    (v[i + 1] - v[i - 1]) / (2.0 * h)
}

type Criterion = fn(&Fixture) -> Outcome;

struct Fixture {
    tower: DirectionTower,
    tols: Tolerances,
    seconds: f64,
}

impl Fixture {
    fn level(&self, k: usize) -> &TowerLevel {
        &self.tower.levels[k]
    }
}

fn fixture() -> Fixture {
    let tols = Tolerances::default();
    let start = Instant::now();
    let profile = parse_profile(KAPPA_SRC, TAU_SRC).unwrap();
    let main =
        integrate_frenet(&profile, Vec3::ZERO, closed_form::main_frame(S0), S0, S1, H, tols.kappa_floor).unwrap();
    let tower = build_tower(main, 2, &tols).unwrap();
    Fixture { tower, tols, seconds: start.elapsed().as_secs_f64() }
}

fn c1(fx: &Fixture) -> Outcome {
    let l = fx.level(1);
    let c = &l.curve;
    let ek = max_dev(inner(l.valid.clone()), |i| (c.kappa[i] - c.s(i).sin()).abs());
    let et = max_dev(inner(l.valid.clone()), |i| (c.tau[i] - c.s(i).cos()).abs());
    outcome(ek < 1e-5 && et < 1e-4, format!("max|kappa_1 - sin s| = {ek:.2e}, max|tau_1 - cos s| = {et:.2e}"))
}

fn c2(fx: &Fixture) -> Outcome {
    let l = fx.level(1);
    let r = inner(l.valid.clone());
    let dev = max_dev(r.clone(), |i| (l.curve.sigma[i] + 1.0).abs());
    let sp = spread(r.map(|i| l.curve.sigma[i]));
    outcome(dev < 1e-4 && sp < 1e-4, format!("max|sigma_1 + 1| = {dev:.2e}, spread = {sp:.2e}"))
}

fn c3(fx: &Fixture) -> Outcome {
    let l = fx.level(2);
    let c = &l.curve;
    let ek = max_dev(inner(l.valid.clone()), |i| (c.kappa[i] - 1.0).abs());
    let et = max_dev(inner(l.valid.clone()), |i| (c.tau[i] + 1.0).abs());
    outcome(ek < 1e-4 && et < 1e-4, format!("max|kappa_2 - 1| = {ek:.2e}, max|tau_2 + 1| = {et:.2e}"))
}

fn c4(fx: &Fixture) -> Outcome {
    let r = match detect_nk_slant(&fx.tower, &fx.tols) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let (Some(u), Some(theta)) = (r.axis, r.theta) else {
        return outcome(false, "no axis".into());
    };
    let ang = axis_class_distance(u, theta, Vec3::new(0.0, 0.0, -1.0), -FRAC_PI_4);
    let l = fx.level(1);
    let sp = spread(inner(l.valid.clone()).map(|i| l.curve.frames[i].n.dot(u)));
    let pass = r.nk_level == Some(1) && ang < 1e-3 && sp < 1e-4;
    outcome(
        pass,
        format!(
            "k = {:?}, u = {u:?}, theta = {theta:.9}, angular error {ang:.2e}, <N_1,u> spread {sp:.2e}",
            r.nk_level
        ),
    )
}

fn c5(fx: &Fixture) -> Outcome {
    let r = match detect_nk_constant_precession(&fx.tower, &fx.tols) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let omega = r.omega.unwrap_or(f64::NAN);
    let l = fx.level(1);
    let c = &l.curve;
    let rng = inner(l.valid.clone());
    let mu: Vec<f64> = rng.clone().map(|i| diff(&c.tau, c.h, i) / c.kappa[i]).collect();
    let mu_dev = mu.iter().map(|m| (m + 1.0).abs()).fold(0.0, f64::max);
    let mu_bar = mu.iter().sum::<f64>() / mu.len() as f64;
    let axes: Vec<Vec3> = rng.map(|i| l.darboux[i] + c.frames[i].n * mu_bar).collect();
    let ax_sp = axes.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
    let line = line_angle(axes[axes.len() / 2], Vec3::new(0.0, 0.0, 1.0));
    let pass = (omega - 1.0).abs() < 1e-5 && mu_dev < 1e-3 && ax_sp < 1e-3 && line < 1e-3;
    outcome(
        pass,
        format!(
            "omega = {omega:.9}, max|mu + 1| = {mu_dev:.2e}, axis step spread {ax_sp:.2e}, line error {line:.2e}, labels {:?}",
            r.labels
        ),
    )
}

fn c6(fx: &Fixture) -> Outcome {
    let l = fx.level(2);
    let c = l.curve.slice(l.valid.clone());
    let r = match classify_basic(&c, &fx.tols) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let ang = r.axis.map_or(f64::INFINITY, |u| line_angle(u, Vec3::new(0.0, 0.0, 1.0)));
    // independent: W̄₂ is constant and on the z line
    let w_ang = max_dev(inner(l.valid.clone()), |i| line_angle(l.darboux[i], Vec3::new(0.0, 0.0, 1.0)));
    let pass = r.has(Label::Helix) && ang < 1e-3 && w_ang < 1e-3;
    outcome(pass, format!("labels {:?}, axis angle {ang:.2e}, max W_2 angle {w_ang:.2e}", r.labels))
}

fn endpoint_error(h: f64) -> f64 {
    let p = parse_profile("1", "0").unwrap();
    let c = integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, 0.0, TAU, h, 1e-9).unwrap();
    c.points.last().unwrap().norm()
}

fn c7(_: &Fixture) -> Outcome {
    let gap = endpoint_error(H);
    let p = parse_profile("1", "0").unwrap();
    let c = integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, 0.0, TAU, H, 1e-9).unwrap();
    let circle = max_dev(0..c.len(), |i| (c.points[i] - Vec3::new(c.s(i).sin(), 1.0 - c.s(i).cos(), 0.0)).norm());
    let coarse = TAU / 16.0;
    let ratio = endpoint_error(coarse) / endpoint_error(coarse / 2.0);
    let pass = gap < 1e-8 && (14.0..=18.0).contains(&ratio);
    outcome(pass, format!("endpoint gap {gap:.2e}, max dev from circle {circle:.2e}, error ratio h/(h/2) = {ratio:.3}"))
}

fn c8(fx: &Fixture) -> Outcome {
    let profile = parse_profile(KAPPA_SRC, TAU_SRC).unwrap();
    let base = FRAC_PI_2;
    let reference =
        integrate_frenet(&profile, Vec3::ZERO, FrenetFrame::IDENTITY, base, base + 0.1, 1e-5, fx.tols.kappa_floor)
            .unwrap();
    // κ(π/2) = cos 1, κ′(π/2) = 0, τ(π/2) = sin 1
    let (k0, dk0, t0) = (1f64.cos(), 0.0, 1f64.sin());
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    let mut oracle_gap: f64 = 0.0;
    for j in 0..=8 {
        let target = 10f64.powf(-3.0 + 2.0 * j as f64 / 8.0);
        let i = (target / reference.h).round() as usize;
        let s = reference.s(i) - base;
        let approx = taylor_local(Vec3::ZERO, &FrenetFrame::IDENTITY, k0, dk0, t0, s).unwrap();
        let hand = Vec3::new(
            s - k0 * k0 * s.powi(3) / 6.0,
            k0 * s * s / 2.0 + dk0 * s.powi(3) / 6.0,
            k0 * t0 * s.powi(3) / 6.0,
        );
        oracle_gap = oracle_gap.max((approx - hand).norm());
        lx.push(s.ln());
        ly.push((approx - reference.points[i]).norm().ln());
    }
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    outcome(
        slope >= 3.7 && oracle_gap < 1e-15,
        format!("log-log slope {slope:.4}, expansion vs hand formula {oracle_gap:.1e}"),
    )
}

fn c9(fx: &Fixture) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut per_level = Vec::new();
    for l in &fx.tower.levels {
        let c = &l.curve;
        let r = inner(l.valid.clone());
        let t: Vec<Vec3> = c.frames.iter().map(|f| f.t).collect();
        let n: Vec<Vec3> = c.frames.iter().map(|f| f.n).collect();
        let b: Vec<Vec3> = c.frames.iter().map(|f| f.b).collect();
        let e = max_dev(r, |i| {
            let w = l.darboux[i];
            let f = &c.frames[i];
            (w.cross(f.t) - diff_vec(&t, c.h, i))
                .max_abs()
                .max((w.cross(f.n) - diff_vec(&n, c.h, i)).max_abs())
                .max((w.cross(f.b) - diff_vec(&b, c.h, i)).max_abs())
        });
        per_level.push(format!("{e:.1e}"));
        worst = worst.max(e);
    }
    let main = &fx.level(0).curve;
    let gram = max_dev(0..main.len(), |i| {
        let f = &main.frames[i];
        let v = [f.t, f.n, f.b];
        let mut g: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let id = if a == b { 1.0 } else { 0.0 };
                g = g.max((v[a].dot(v[b]) - id).abs());
            }
        }
        g
    });
    outcome(
        worst < 1e-4 && gram < 1e-9,
        format!("Darboux residual per level [{}], Gram drift {gram:.1e}", per_level.join(", ")),
    )
}

fn c10(fx: &Fixture) -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, t, a, b) in
        [("1+0.3*sin(s)", "0.5+0.2*cos(2*s)", 0.0, 6.0), (KAPPA_SRC, TAU_SRC, S0, S1), ("2", "exp(-s)", 0.0, 3.0)]
    {
        let p = parse_profile(k, t).unwrap();
        let c = integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, a, b, H, fx.tols.kappa_floor).unwrap();
        let est = estimate_frame_curvatures(&c.points, false, fx.tols.kappa_floor).unwrap();
        let e = max_dev(inner(0..est.len()), |i| {
            let scale = c.kappa[i].abs().max(c.tau[i].abs());
            (est.kappa[i] - c.kappa[i]).abs().max((est.tau[i] - c.tau[i]).abs()) / scale
        });
        worst = worst.max(e);
    }
    let (omega, mu, phase) = (2.0, 3.0, 0.7);
    let (a, b) = positive_stretch(mu, phase, 0.2);
    let g = generate_precession_profile(omega, mu, phase, (a, b))
        .and_then(|p| integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, a, b, H, fx.tols.kappa_floor))
        .and_then(|c| classify_curve(c, 2, &fx.tols));
    let (ew, ef) = match g {
        Ok(r) => ((r.omega.unwrap_or(f64::NAN) - omega).abs(), (r.frequency.unwrap_or(f64::NAN) - mu).abs()),
        Err(e) => return outcome(false, e.to_string()),
    };
    let pass = worst < 1e-4 && ew < 1e-4 && ef < 1e-4;
    outcome(pass, format!("estimate rel error {worst:.2e}; generator omega error {ew:.2e}, frequency error {ef:.2e}"))
}

fn c11(fx: &Fixture) -> Outcome {
    let l = fx.level(1);
    let stride = (1e-2 / H).round() as usize;
    let gamma1: Vec<Vec3> = l.valid.clone().step_by(stride).map(|i| l.curve.points[i]).collect();
    let helix: Vec<Vec3> = (0..600)
        .map(|i| {
            let t = i as f64 * 0.01;
            Vec3::new(2.0 * t.cos(), 2.0 * t.sin(), t)
        })
        .collect();
    let mut worst: f64 = 0.0;
    let mut labels_ok = true;
    for seed in 1..=4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let motion = RigidMotion::random(&mut rng);
        for pts in [&gamma1, &helix] {
            match rigid_motion_discrepancy(pts, &motion, &fx.tols) {
                Ok((same, scalar, angle)) => {
                    labels_ok &= same;
                    worst = worst.max(scalar).max(angle);
                }
                Err(e) => return outcome(false, e.to_string()),
            }
        }
    }
    outcome(labels_ok && worst < 1e-6, format!("8 cases, labels equal: {labels_ok}, max scalar change {worst:.2e}"))
}

fn c12(fx: &Fixture) -> Outcome {
    let l = fx.level(1);
    let r = inner(l.valid.clone());
    let n3 = r.clone().map(|i| l.curve.frames[i].n.z).sum::<f64>() / r.len() as f64;
    let s = 1.0;
    let printed = closed_form::n1_printed(s).z;
    let report = match run_example1(&Example1Config::default()) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let warned = report.warnings.iter().any(|w| w.contains("N_1 third component"));
    let pass = (n3 + FRAC_1_SQRT_2).abs() < 1e-6 && (printed - FRAC_1_SQRT_2).abs() < 1e-15 && warned && c4(fx).pass;
    outcome(pass, format!("computed n_3 = {n3:.9} (printed {printed:.9}), warning present: {warned}"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let fx = fixture();
    let criteria: [(&str, Criterion); 12] = [
        ("level-1 curvatures", c1),
        ("level-1 geodesic curvature", c2),
        ("level-2 curvatures", c3),
        ("N_1-slant axis", c4),
        ("N_1-constant precession", c5),
        ("N_2 level helix", c6),
        ("reconstruction fidelity", c7),
        ("Taylor consistency", c8),
        ("Darboux identities", c9),
        ("estimate/integrate round trip", c10),
        ("rigid-motion invariance", c11),
        ("N_1 sign resolution", c12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f(&fx);
        let secs = t.elapsed().as_secs_f64();
        let pass = o.pass && secs < BUDGET_SECS;
        if !pass {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {} [{secs:.2}s]", if pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    let tower_ok = fx.seconds < BUDGET_SECS;
    println!(
        "tower build {:.2}s, total {:.2}s{}",
        fx.seconds,
        start.elapsed().as_secs_f64(),
        if tower_ok { "" } else { " (over budget)" }
    );
    if failed == 0 && tower_ok {
        println!("acceptance: 12/12 passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} failed", failed);
        ExitCode::FAILURE
    }
}
