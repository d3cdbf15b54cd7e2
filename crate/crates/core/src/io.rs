//! Curve and point CSV files.
//!
//! Curve files carry the header `s,x,y,z` optionally followed by
//! `tx,ty,tz,nx,ny,nz,bx,by,bz,kappa,tau,sigma`. Numbers are written with 17
//! significant digits so that write → read → write is byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use crate::curve::FramedCurve;
use crate::error::{Error, Result};
use crate::geometry::{FrenetFrame, Vec3};
use crate::profile::{CurvatureProfile, Interpolation};

const POINT_COLUMNS: [&str; 4] = ["s", "x", "y", "z"];
const FRAME_COLUMNS: [&str; 12] = ["tx", "ty", "tz", "nx", "ny", "nz", "bx", "by", "bz", "kappa", "tau", "sigma"];

/// Relative tolerance on grid uniformity when reading a curve file.
const GRID_TOL: f64 = 1e-12;

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column data of a curve file, kept verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub s: Vec<f64>,
    pub points: Vec<Vec3>,
    /// Frames with κ, τ, σ, when present.
    pub framed: Option<Vec<(FrenetFrame, [f64; 3])>>,
}

impl CurveTable {
    pub fn from_curve(curve: &FramedCurve, with_frames: bool) -> CurveTable {
        let framed = with_frames.then(|| {
            (0..curve.len()).map(|i| (curve.frames[i], [curve.kappa[i], curve.tau[i], curve.sigma[i]])).collect()
        });
        CurveTable { s: curve.s_grid(), points: curve.points.clone(), framed }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&POINT_COLUMNS.join(","));
        if self.framed.is_some() {
            out.push(',');
            out.push_str(&FRAME_COLUMNS.join(","));
        }
        out.push('\n');
        for i in 0..self.s.len() {
            let p = self.points[i];
            let mut row = vec![self.s[i], p.x, p.y, p.z];
            if let Some(fr) = &self.framed {
                let (f, [k, t, sg]) = fr[i];
                row.extend([f.t.x, f.t.y, f.t.z, f.n.x, f.n.y, f.n.z, f.b.x, f.b.y, f.b.z, k, t, sg]);
            }
            let line: Vec<String> = row.into_iter().map(fmt_num).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn parse(text: &str) -> Result<CurveTable> {
        let rows = parse_rows(text)?;
        let framed_header: Vec<&str> = POINT_COLUMNS.iter().chain(FRAME_COLUMNS.iter()).copied().collect();
        let with_frames = if rows.header == POINT_COLUMNS {
            false
        } else if rows.header == framed_header {
            true
        } else {
            return Err(Error::Format(format!("unexpected curve header '{}'", rows.header.join(","))));
        };
        let mut table = CurveTable { s: Vec::new(), points: Vec::new(), framed: with_frames.then(Vec::new) };
        for r in &rows.values {
            table.s.push(r[0]);
            table.points.push(Vec3::new(r[1], r[2], r[3]));
            if let Some(fr) = &mut table.framed {
                let v = |j: usize| Vec3::new(r[j], r[j + 1], r[j + 2]);
                fr.push((FrenetFrame { t: v(4), n: v(7), b: v(10) }, [r[13], r[14], r[15]]));
            }
        }
        Ok(table)
    }

    /// Rebuilds a framed curve; requires frame columns and a uniform grid.
    pub fn to_curve(&self, kappa_floor: f64) -> Result<FramedCurve> {
        let framed = self.framed.as_ref().ok_or_else(|| Error::Format("curve file has no frame columns".into()))?;
        let n = self.s.len();
        if n < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: n });
        }
        let s0 = self.s[0];
        let h = (self.s[n - 1] - s0) / (n - 1) as f64;
        if !(h > 0.0) {
            return Err(Error::Format("s column must increase".into()));
        }
        let span = self.s[n - 1] - s0;
        for (i, &s) in self.s.iter().enumerate() {
            if (s - (s0 + i as f64 * h)).abs() > GRID_TOL * span.max(s0.abs()).max(1.0) {
                return Err(Error::Format(format!("s grid is not uniform at row {}", i + 2)));
            }
        }
        let curve = FramedCurve {
            s0,
            h,
            points: self.points.clone(),
            frames: framed.iter().map(|f| f.0).collect(),
            kappa: framed.iter().map(|f| f.1[0]).collect(),
            tau: framed.iter().map(|f| f.1[1]).collect(),
            sigma: framed.iter().map(|f| f.1[2]).collect(),
            degenerate: framed.iter().map(|f| !(f.1[0] >= kappa_floor) || f.1[2].is_nan()).collect(),
        };
        Ok(curve)
    }
}

pub fn write_curve_csv(curve: &FramedCurve, with_frames: bool) -> String {
    CurveTable::from_curve(curve, with_frames).to_csv()
}

struct Rows {
    header: Vec<String>,
    values: Vec<Vec<f64>>,
}

fn parse_rows(text: &str) -> Result<Rows> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r')).filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Format("empty file".into()))?
        .split(',')
        .map(|c| c.trim().to_string())
        .collect();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(Error::Format(format!("row {} has {} fields, expected {}", i + 2, cells.len(), header.len())));
        }
        let row = cells
            .iter()
            .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Format(format!("row {}: bad number '{c}'", i + 2))))
            .collect::<Result<Vec<f64>>>()?;
        values.push(row);
    }
    Ok(Rows { header, values })
}

fn column(rows: &Rows, name: &str) -> Result<usize> {
    rows.header.iter().position(|h| h == name).ok_or_else(|| Error::Format(format!("missing column '{name}'")))
}

/// Point samples from any CSV with `x`, `y`, `z` columns.
pub fn parse_points(text: &str) -> Result<Vec<Vec3>> {
    let rows = parse_rows(text)?;
    let (x, y, z) = (column(&rows, "x")?, column(&rows, "y")?, column(&rows, "z")?);
    let pts: Vec<Vec3> = rows.values.iter().map(|r| Vec3::new(r[x], r[y], r[z])).collect();
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("point sample"));
    }
    Ok(pts)
}

/// Tabulated profile from a CSV with `s`, `kappa`, `tau` columns.
pub fn parse_profile_table(text: &str, interpolation: Interpolation) -> Result<CurvatureProfile> {
    let rows = parse_rows(text)?;
    let (s, k, t) = (column(&rows, "s")?, column(&rows, "kappa")?, column(&rows, "tau")?);
    CurvatureProfile::table(
        rows.values.iter().map(|r| r[s]).collect(),
        rows.values.iter().map(|r| r[k]).collect(),
        rows.values.iter().map(|r| r[t]).collect(),
        interpolation,
    )
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::integrate_frenet;
    use crate::profile::parse_profile;

    fn sample() -> FramedCurve {
        let p = parse_profile("1+0.3*sin(s)", "0.2*s").unwrap();
        integrate_frenet(&p, Vec3::ZERO, FrenetFrame::IDENTITY, 0.1, 1.3, 0.01, 1e-9).unwrap()
    }

    #[test]
    fn header_and_format() {
        let csv = write_curve_csv(&sample(), true);
        let first = csv.lines().next().unwrap();
        assert_eq!(first, "s,x,y,z,tx,ty,tz,nx,ny,nz,bx,by,bz,kappa,tau,sigma");
        assert!(!csv.contains('\r'));
        assert!(csv.lines().nth(1).unwrap().starts_with("1.0000000000000001e-1,"));
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let csv = write_curve_csv(&sample(), true);
        let again = CurveTable::parse(&csv).unwrap().to_csv();
        assert_eq!(csv, again);
        let short = write_curve_csv(&sample(), false);
        assert_eq!(short, CurveTable::parse(&short).unwrap().to_csv());
    }

    #[test]
    fn nan_sigma_survives() {
        let mut c = sample();
        c.sigma[3] = f64::NAN;
        let csv = write_curve_csv(&c, true);
        let back = CurveTable::parse(&csv).unwrap().to_curve(1e-9).unwrap();
        assert!(back.sigma[3].is_nan());
        assert!(back.degenerate[3]);
        assert_eq!(back.kappa, c.kappa);
    }

    #[test]
    fn curve_rebuilds() {
        let c = sample();
        let back = CurveTable::parse(&write_curve_csv(&c, true)).unwrap().to_curve(1e-9).unwrap();
        assert_eq!(back.points, c.points);
        assert_eq!(back.frames, c.frames);
        assert!((back.h - c.h).abs() < 1e-15);
    }

    #[test]
    fn points_by_column_name() {
        let pts = parse_points("z,x,y\n3,1,2\n6,4,5\n").unwrap();
        assert_eq!(pts, vec![Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 5.0, 6.0)]);
        assert_eq!(parse_points("x,y\n1,2\n").unwrap_err().code(), "FORMAT_ERROR");
        assert_eq!(parse_points("x,y,z\n1,2\n").unwrap_err().code(), "FORMAT_ERROR");
    }

    #[test]
    fn profile_table() {
        let p = parse_profile_table("s,kappa,tau\n0,1,0\n1,2,1\n2,3,2\n", Interpolation::Linear).unwrap();
        let smp = p.eval(1.5, 1e-9).unwrap();
        assert!((smp.kappa - 2.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_header() {
        assert_eq!(CurveTable::parse("a,b\n1,2\n").unwrap_err().code(), "FORMAT_ERROR");
    }
}
