//! Curvature/torsion profiles κ(s), τ(s): analytic expressions or
//! tabulated rows.

use crate::coverage::{self, Op};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::CurvatureSample;
use crate::numeric::MonotoneCubic;

/// Negative curvature down to this magnitude is rounding noise at a root
/// and is clamped to zero.
const NEGATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    Linear,
    #[default]
    MonotoneCubic,
}

#[derive(Debug, Clone)]
pub enum ProfileSource {
    Analytic { kappa: Expr, tau: Expr },
    Table(TableProfile),
}

#[derive(Debug, Clone)]
pub struct TableProfile {
    pub s: Vec<f64>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub interpolation: Interpolation,
    kappa_fit: MonotoneCubic,
    tau_fit: MonotoneCubic,
}

impl TableProfile {
    fn eval(&self, s: f64) -> (f64, f64, f64, f64) {
        match self.interpolation {
            Interpolation::MonotoneCubic => {
                let (k, dk) = self.kappa_fit.eval(s);
                let (t, dt) = self.tau_fit.eval(s);
                (k, t, dk, dt)
            }
            Interpolation::Linear => {
                let n = self.s.len();
                let i = match self.s.partition_point(|&x| x <= s) {
                    0 => 0,
                    p if p >= n => n - 2,
                    p => p - 1,
                };
                let h = self.s[i + 1] - self.s[i];
                let u = (s - self.s[i]) / h;
                let dk = (self.kappa[i + 1] - self.kappa[i]) / h;
                let dt = (self.tau[i + 1] - self.tau[i]) / h;
                (self.kappa[i] + u * h * dk, self.tau[i] + u * h * dt, dk, dt)
            }
        }
    }
}

/// κ(s), τ(s) on a closed domain.
#[derive(Debug, Clone)]
pub struct CurvatureProfile {
    pub source: ProfileSource,
    pub domain: (f64, f64),
}

/// Parses a pair of profile expressions into an analytic profile defined on
/// the whole real line; see [`crate::expr`] for the grammar.
pub fn parse_profile(kappa_src: &str, tau_src: &str) -> Result<CurvatureProfile> {
    coverage::record(Op::ParseProfile);
    if kappa_src.trim().is_empty() || tau_src.trim().is_empty() {
        return Err(Error::InvalidArgument("empty profile expression".into()));
    }
    Ok(CurvatureProfile::analytic(Expr::parse(kappa_src)?, Expr::parse(tau_src)?))
}

impl CurvatureProfile {
    pub fn analytic(kappa: Expr, tau: Expr) -> Self {
        CurvatureProfile { source: ProfileSource::Analytic { kappa, tau }, domain: (f64::NEG_INFINITY, f64::INFINITY) }
    }

    /// Tabulated profile; rows must be strictly increasing in `s`.
    pub fn table(s: Vec<f64>, kappa: Vec<f64>, tau: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        if s.len() != kappa.len() || s.len() != tau.len() {
            return Err(Error::Format("table columns differ in length".into()));
        }
        if s.len() < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: s.len() });
        }
        if s.iter().chain(&kappa).chain(&tau).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("profile table"));
        }
        if let Some(w) = s.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::Format(format!("table s values not strictly increasing at s = {}", w[1])));
        }
        let bad: Vec<f64> = s.iter().zip(&kappa).filter(|(_, k)| **k < 0.0).map(|(s, _)| *s).collect();
        if !bad.is_empty() {
            return Err(Error::NegativeCurvature { locations: bad });
        }
        let domain = (s[0], s[s.len() - 1]);
        let kappa_fit = MonotoneCubic::new(&s, &kappa);
        let tau_fit = MonotoneCubic::new(&s, &tau);
        Ok(CurvatureProfile {
            source: ProfileSource::Table(TableProfile { s, kappa, tau, interpolation, kappa_fit, tau_fit }),
            domain,
        })
    }

    pub fn with_domain(mut self, s_min: f64, s_max: f64) -> Result<Self> {
        if !(s_max > s_min) {
            return Err(Error::InvalidArgument(format!("empty domain [{s_min}, {s_max}]")));
        }
        if let ProfileSource::Table(t) = &self.source {
            if s_min < t.s[0] || s_max > t.s[t.s.len() - 1] {
                return Err(Error::InvalidArgument("domain exceeds table range".into()));
            }
        }
        self.domain = (s_min, s_max);
        Ok(self)
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.domain.0 && s <= self.domain.1
    }

    /// κ, τ and their arclength derivatives at `s`.
    pub fn eval(&self, s: f64, kappa_floor: f64) -> Result<CurvatureSample> {
        if !self.contains(s) {
            return Err(Error::ProfileEval { s, reason: "outside profile domain".into() });
        }
        let (k, t, dk, dt) = match &self.source {
            ProfileSource::Analytic { kappa, tau } => {
                let k = kappa.eval_dual(s);
                let t = tau.eval_dual(s);
                (k.v, t.v, k.d, t.d)
            }
            ProfileSource::Table(table) => table.eval(s),
        };
        if !(k.is_finite() && t.is_finite() && dk.is_finite() && dt.is_finite()) {
            return Err(Error::ProfileEval { s, reason: "non-finite curvature, torsion or derivative".into() });
        }
        let k = if (-NEGATIVE_SLACK..0.0).contains(&k) { 0.0 } else { k };
        Ok(CurvatureSample::new(s, k, t, dk, dt, kappa_floor))
    }

    /// Checks κ ≥ 0 at every point of the given grid and reports every
    /// offending location.
    pub fn validate_nonnegative(&self, grid: impl IntoIterator<Item = f64>) -> Result<()> {
        let mut bad = Vec::new();
        for s in grid {
            if self.eval(s, 0.0)?.kappa < 0.0 {
                bad.push(s);
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::NegativeCurvature { locations: bad })
        }
    }

    /// Source text of the two expressions, for analytic profiles.
    pub fn expressions(&self) -> Option<(String, String)> {
        match &self.source {
            ProfileSource::Analytic { kappa, tau } => Some((kappa.to_string(), tau.to_string())),
            ProfileSource::Table(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_profile() {
        let p = parse_profile("1", "0").unwrap();
        let smp = p.eval(0.5, 1e-9).unwrap();
        assert_eq!((smp.kappa, smp.tau, smp.dkappa, smp.dtau), (1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn empty_source_rejected() {
        assert_eq!(parse_profile(" ", "0").unwrap_err().code(), "INVALID_ARGUMENT");
    }

    #[test]
    fn domain_is_enforced() {
        let p = parse_profile("s", "1").unwrap().with_domain(0.0, 1.0).unwrap();
        assert_eq!(p.eval(1.5, 1e-9).unwrap_err().code(), "PROFILE_EVAL_ERROR");
    }

    #[test]
    fn evaluation_failure_reports_location() {
        let p = parse_profile("log(s)", "0").unwrap();
        match p.eval(-1.0, 1e-9).unwrap_err() {
            Error::ProfileEval { s, .. } => assert_eq!(s, -1.0),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn negative_curvature_locations() {
        let p = parse_profile("s", "0").unwrap();
        match p.validate_nonnegative([-0.5, 0.0, 0.5, -0.25]).unwrap_err() {
            Error::NegativeCurvature { locations } => assert_eq!(locations, vec![-0.5, -0.25]),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn table_requires_increasing_rows() {
        let err = CurvatureProfile::table(vec![0.0, 1.0, 1.0], vec![1.0; 3], vec![0.0; 3], Interpolation::Linear);
        assert_eq!(err.unwrap_err().code(), "FORMAT_ERROR");
    }

    #[test]
    fn table_profile_interpolates_smoothly() {
        let s: Vec<f64> = (0..=200).map(|i| 0.2 + i as f64 * 0.0137).collect();
        let k: Vec<f64> = s.iter().map(|x| x.sin()).collect();
        let t: Vec<f64> = s.iter().map(|x| x.cos()).collect();
        let p = CurvatureProfile::table(s, k, t, Interpolation::MonotoneCubic).unwrap();
        for &x in &[0.5, 1.2, 2.0] {
            let smp = p.eval(x, 1e-9).unwrap();
            assert!((smp.kappa - x.sin()).abs() < 1e-6);
            assert!((smp.dtau + x.sin()).abs() < 1e-3);
        }
    }
}
