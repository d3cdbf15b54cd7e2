//! Command-line front end.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{
    classify_basic, detect_nk_constant_precession, detect_nk_slant, generate_precession_profile, positive_stretch,
    ClassificationReport,
};
use crate::coverage::{self, Op};
use crate::curve::FramedCurve;
use crate::error::{Error, Result};
use crate::estimate::estimate_frame_curvatures;
use crate::example1::{run_example1, Example1Config, Example1Report};
use crate::geometry::{FrenetFrame, Vec3, DEFAULT_KAPPA_FLOOR};
use crate::integrator::integrate_frenet;
use crate::io::{parse_points, parse_profile_table, read_to_string, write_curve_csv, CurveTable};
use crate::profile::{parse_profile, CurvatureProfile, Interpolation};
use crate::tolerances::Tolerances;
use crate::tower::{build_tower, DirectionTower};

pub const NO_COLOR_ENV: &str = "FRENET_TOWER_NO_COLOR";

#[derive(Debug, Parser)]
#[command(
    name = "frenet-tower",
    version,
    about = "Frenet frames, principal direction towers and slant helix detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value_t = 1e-3)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub abs_floor: f64,
    #[arg(long, default_value_t = DEFAULT_KAPPA_FLOOR)]
    pub kappa_floor: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (or directory for `tower`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

impl Common {
    fn tols(&self) -> Result<Tolerances> {
        let t = Tolerances { rel_tol: self.rel_tol, abs_floor: self.abs_floor, kappa_floor: self.kappa_floor };
        if !(t.rel_tol >= 0.0 && t.abs_floor >= 0.0 && t.kappa_floor >= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be non-negative".into()));
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, Args)]
pub struct Grid {
    #[arg(long, allow_negative_numbers = true)]
    pub s0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s1: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
}

impl Grid {
    fn bounds(&self, default: (f64, f64)) -> Result<(f64, f64, f64)> {
        let (s0, s1) = (self.s0.unwrap_or(default.0), self.s1.unwrap_or(default.1));
        if !(s1 > s0) {
            return Err(Error::InvalidArgument(format!("need s1 > s0, got [{s0}, {s1}]")));
        }
        if !(self.step > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {}", self.step)));
        }
        Ok((s0, s1, self.step))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Interp {
    Linear,
    Cubic,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    /// κ(s) expression.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// τ(s) expression.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// CSV with columns s, kappa, tau.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Interp::Cubic)]
    pub interp: Interp,
}

impl ProfileArgs {
    fn given(&self) -> bool {
        self.kappa.is_some() || self.tau.is_some() || self.table.is_some()
    }

    fn load(&self) -> Result<CurvatureProfile> {
        match (&self.kappa, &self.tau, &self.table) {
            (Some(k), Some(t), None) => parse_profile(k, t),
            (None, None, Some(path)) => {
                let interp = match self.interp {
                    Interp::Linear => Interpolation::Linear,
                    Interp::Cubic => Interpolation::MonotoneCubic,
                };
                parse_profile_table(&read_to_string(path)?, interp)
            }
            _ => Err(Error::InvalidArgument("give either --kappa and --tau, or --table".into())),
        }
    }

    /// Default grid: the table's range, or the example interval.
    fn default_bounds(&self, profile: &CurvatureProfile) -> (f64, f64) {
        if profile.domain.0.is_finite() {
            profile.domain
        } else {
            (0.2, PI - 0.2)
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CurveInput {
    /// Curve CSV (with frame columns) or point samples with x, y, z columns.
    #[arg(long, conflicts_with_all = ["kappa", "tau", "table"])]
    pub input: Option<PathBuf>,
    /// Treat point samples as a closed curve.
    #[arg(long)]
    pub closed: bool,
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[command(flatten)]
    pub grid: Grid,
}

impl CurveInput {
    fn load(&self, tols: &Tolerances) -> Result<FramedCurve> {
        match &self.input {
            Some(path) => load_curve(path, self.closed, tols.kappa_floor),
            None if self.profile.given() => {
                let profile = self.profile.load()?;
                let (s0, s1, h) = self.grid.bounds(self.profile.default_bounds(&profile))?;
                integrate_frenet(&profile, Vec3::ZERO, FrenetFrame::IDENTITY, s0, s1, h, tols.kappa_floor)
            }
            None => Err(Error::InvalidArgument("give --input or a profile".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the Frenet equations for a profile.
    Reconstruct {
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate frame and curvatures from point samples.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        closed: bool,
        /// Classification report; defaults to the output path with `.report.json`.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Build the principal direction tower and write one CSV per level.
    Tower {
        #[command(flatten)]
        input: CurveInput,
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        depth: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Detect N_k-slant helices and N_k-constant precession.
    Classify {
        #[command(flatten)]
        input: CurveInput,
        #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
        depth: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Curve of constant precession κ = ω sin(μs+φ), τ = ω cos(μs+φ).
    Generate {
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phase: f64,
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        common: Common,
    },
    /// Run the worked example and print the fixture table.
    Example1 {
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
}

/// Reads a curve CSV with frame columns, or estimates a frame from bare
/// point samples.
pub fn load_curve(path: &Path, closed: bool, kappa_floor: f64) -> Result<FramedCurve> {
    let text = read_to_string(path)?;
    if let Ok(table) = CurveTable::parse(&text) {
        if table.framed.is_some() {
            return table.to_curve(kappa_floor);
        }
        return estimate_frame_curvatures(&table.points, closed, kappa_floor);
    }
    estimate_frame_curvatures(&parse_points(&text)?, closed, kappa_floor)
}

fn depth_arg(depth: i64) -> Result<usize> {
    usize::try_from(depth).map_err(|_| Error::InvalidArgument(format!("depth must be non-negative, got {depth}")))
}

#[derive(Serialize)]
struct Metadata {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
}

fn metadata(command: &'static str) -> Metadata {
    Metadata { tool: "frenet-tower", version: env!("CARGO_PKG_VERSION"), command }
}

#[derive(Serialize)]
struct ReportFile<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    metadata: Metadata,
}

fn to_json<T: Serialize>(body: &T, command: &'static str) -> String {
    let mut s = serde_json::to_string_pretty(&ReportFile { body, metadata: metadata(command) }).expect("serializable");
    s.push('\n');
    s
}

/// Files written so far; removed again if the command fails.
#[derive(Default)]
struct Outputs {
    written: Vec<PathBuf>,
    dirs: Vec<PathBuf>,
}

impl Outputs {
    fn write(&mut self, path: &Path, content: &str) -> Result<()> {
        std::fs::write(path, content).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn mkdir(&mut self, dir: &Path) -> Result<()> {
        if !dir.exists() {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            self.dirs.push(dir.to_path_buf());
        }
        Ok(())
    }

    fn emit(&mut self, target: Option<&Path>, content: &str, stdout: &mut dyn Write) -> Result<()> {
        match target {
            Some(p) => self.write(p, content),
            None => stdout.write_all(content.as_bytes()).map_err(Error::from),
        }
    }

    fn discard(self) {
        for p in self.written.iter().rev() {
            let _ = std::fs::remove_file(p);
        }
        for d in self.dirs.iter().rev() {
            let _ = std::fs::remove_dir(d);
        }
    }
}

fn curve_output(curve: &FramedCurve, format: Option<Format>) -> String {
    match format.unwrap_or(Format::Csv) {
        Format::Csv => write_curve_csv(curve, true),
        Format::Json => {
            let mut s = serde_json::to_string(curve).expect("serializable");
            s.push('\n');
            s
        }
    }
}

#[derive(Serialize)]
struct LevelInfo {
    k: usize,
    valid_interval: [f64; 2],
    samples: usize,
    cross_check: Option<crate::tower::CrossCheck>,
    file: String,
}

#[derive(Serialize)]
struct TowerSummary<'a> {
    requested_depth: usize,
    levels: Vec<LevelInfo>,
    stopped: &'a Option<crate::tower::TowerStop>,
    warnings: &'a [String],
}

fn tower_summary(tower: &DirectionTower) -> TowerSummary<'_> {
    TowerSummary {
        requested_depth: tower.requested_depth,
        levels: tower
            .levels
            .iter()
            .map(|l| LevelInfo {
                k: l.k,
                valid_interval: [l.curve.s(l.valid.start), l.curve.s(l.valid.end - 1)],
                samples: l.valid.len(),
                cross_check: l.cross_check,
                file: format!("level_{}.csv", l.k),
            })
            .collect(),
        stopped: &tower.stopped,
        warnings: &tower.warnings,
    }
}

fn write_tower(tower: &DirectionTower, dir: &Path, out: &mut Outputs) -> Result<()> {
    out.mkdir(dir)?;
    for l in &tower.levels {
        out.write(&dir.join(format!("level_{}.csv", l.k)), &write_curve_csv(&l.curve, true))?;
    }
    out.write(&dir.join("tower.json"), &to_json(&tower_summary(tower), "tower"))
}

/// N_k classification of a curve, falling back to the level-0 report when
/// no level qualifies.
pub fn classify_curve(curve: FramedCurve, depth: usize, tols: &Tolerances) -> Result<ClassificationReport> {
    let basic = classify_basic(&curve, tols)?;
    let tower = build_tower(curve, depth, tols)?;
    match detect_nk_constant_precession(&tower, tols) {
        Ok(r) => Ok(r),
        Err(Error::NkSlantOnly { level }) => {
            let mut r = detect_nk_slant(&tower, tols)?;
            r.warnings.push(format!("level {level} is a slant helix but its Darboux vector has varying length"));
            Ok(r)
        }
        Err(Error::NotNkSlant { depth }) => {
            let mut r = basic;
            r.warnings.extend(tower.warnings.iter().cloned());
            r.warnings.push(format!("no level up to depth {depth} is a slant helix"));
            if let Some(stop) = &tower.stopped {
                r.warnings.push(format!("tower stopped at level {}: {}", stop.level, stop.reason));
            }
            Ok(r)
        }
        Err(e) => Err(e),
    }
}

fn color_enabled() -> bool {
    std::env::var_os(NO_COLOR_ENV).is_none()
}

/// Plain-text fixture table.
pub fn render_table(report: &Example1Report, color: bool) -> String {
    let paint = |pass: bool| -> String {
        let word = if pass { "PASS" } else { "FAIL" };
        if !color {
            word.to_string()
        } else if pass {
            format!("\x1b[32m{word}\x1b[0m")
        } else {
            format!("\x1b[31m{word}\x1b[0m")
        }
    };
    let mut out = String::new();
    let w = report.rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(4).max(4);
    let e = report.rows.iter().map(|r| r.expected.chars().count()).max().unwrap_or(8).max(8);
    out.push_str(&format!("{:<w$}  {:<e$}  {:>10}  {:>7}  result  measured\n", "row", "expected", "error", "tol"));
    for r in &report.rows {
        out.push_str(&format!(
            "{:<w$}  {:<e$}  {:>10.3e}  {:>7.0e}  {}    {}\n",
            r.name,
            r.expected,
            r.error,
            r.tol,
            paint(r.pass),
            r.measured
        ));
    }
    for warning in &report.warnings {
        out.push_str(&format!("warning: {warning}\n"));
    }
    let missing: Vec<&str> = Op::ALL.iter().map(|o| o.name()).filter(|n| !report.operations.contains(n)).collect();
    out.push_str(&format!("operations exercised: {}/{}", Op::ALL.len() - missing.len(), Op::ALL.len()));
    if !missing.is_empty() {
        out.push_str(&format!(" (missing: {})", missing.join(", ")));
    }
    out.push('\n');
    let passed = report.rows.iter().filter(|r| r.pass).count();
    out.push_str(&format!("{passed}/{} rows pass\n", report.rows.len()));
    out
}

/// Runs one command; returns the process exit status. Files written before
/// an error are removed.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    coverage::reset();
    coverage::record(Op::Run);
    let mut outputs = Outputs::default();
    match execute(cli, stdout, &mut outputs) {
        Ok(code) => Ok(code),
        Err(e) => {
            outputs.discard();
            Err(e)
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, out: &mut Outputs) -> Result<i32> {
    match &cli.command {
        Command::Reconstruct { profile, grid, common } => {
            let tols = common.tols()?;
            let p = profile.load()?;
            let (s0, s1, h) = grid.bounds(profile.default_bounds(&p))?;
            let curve = integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, s0, s1, h, tols.kappa_floor)?;
            out.emit(common.out.as_deref(), &curve_output(&curve, common.format), stdout)?;
        }
        Command::Analyze { input, closed, report, common } => {
            let tols = common.tols()?;
            let pts = parse_points(&read_to_string(input)?)?;
            let curve = estimate_frame_curvatures(&pts, *closed, tols.kappa_floor)?;
            let classification = classify_basic(&curve, &tols)?;
            let report_path = report.clone().or_else(|| common.out.as_ref().map(|p| p.with_extension("report.json")));
            out.emit(common.out.as_deref(), &curve_output(&curve, common.format), stdout)?;
            if let Some(p) = report_path {
                out.write(&p, &to_json(&classification, "analyze"))?;
            }
        }
        Command::Tower { input, depth, common } => {
            let tols = common.tols()?;
            let depth = depth_arg(*depth)?;
            let curve = input.load(&tols)?;
            let tower = build_tower(curve, depth, &tols)?;
            match &common.out {
                Some(dir) => write_tower(&tower, dir, out)?,
                None => out.emit(None, &to_json(&tower_summary(&tower), "tower"), stdout)?,
            }
        }
        Command::Classify { input, depth, common } => {
            let tols = common.tols()?;
            let depth = depth_arg(*depth)?;
            let curve = input.load(&tols)?;
            let report = classify_curve(curve, depth, &tols)?;
            out.emit(common.out.as_deref(), &to_json(&report, "classify"), stdout)?;
        }
        Command::Generate { omega, mu, phase, grid, common } => {
            let tols = common.tols()?;
            if *mu == 0.0 || !mu.is_finite() {
                return Err(Error::InvalidArgument("mu must be non-zero".into()));
            }
            let (s0, s1, h) = grid.bounds(positive_stretch(*mu, *phase, 0.2))?;
            let p = generate_precession_profile(*omega, *mu, *phase, (s0, s1))?;
            let curve = integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, s0, s1, h, tols.kappa_floor)?;
            out.emit(common.out.as_deref(), &curve_output(&curve, common.format), stdout)?;
        }
        Command::Example1 { step, common } => {
            let config = Example1Config { h: *step, tols: common.tols()?, seed: common.seed };
            let report = run_example1(&config)?;
            if let Some(dir) = &common.out {
                write_tower(&report.tower, dir, out)?;
                out.write(&dir.join("example1.json"), &to_json(&report, "example1"))?;
            }
            let text = match common.format {
                Some(Format::Json) => to_json(&report, "example1"),
                _ => render_table(&report, color_enabled()),
            };
            stdout.write_all(text.as_bytes())?;
            return Ok(if report.all_pass() { 0 } else { 1 });
        }
    }
    Ok(0)
}

/// Machine-readable error document.
pub fn error_json(err: &Error) -> String {
    serde_json::json!({ "error": { "code": err.code(), "message": err.to_string() } }).to_string()
}
