use serde::{Deserialize, Serialize};

use crate::geometry::DEFAULT_KAPPA_FLOOR;

/// Numerical thresholds for deciding that a sampled quantity "is constant"
/// and that a curvature is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed spread relative to |mean|.
    pub rel_tol: f64,
    /// Spread always accepted, and the magnitude below which a mean is zero.
    pub abs_floor: f64,
    /// Curvature below which N and σ are undefined.
    pub kappa_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rel_tol: 1e-3, abs_floor: 1e-6, kappa_floor: DEFAULT_KAPPA_FLOOR }
    }
}

/// Fraction of a valid interval treated as interior.
pub const INTERIOR_FRACTION: f64 = 0.9;
