//! Frenet-frame toolkit: reconstruct space curves from curvature and
//! torsion, build towers of principal direction curves, and classify
//! helices, slant helices and curves of constant precession at any level
//! of the tower.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod align;
pub mod classify;
pub mod cli;
pub mod coverage;
pub mod curve;
pub mod error;
pub mod estimate;
pub mod example1;
pub mod expr;
pub mod geometry;
pub mod integrator;
pub mod io;
pub mod numeric;
pub mod profile;
pub mod tolerances;
pub mod tower;

pub use align::{kabsch, RigidMotion};
pub use classify::{
    classify_basic, constancy, detect_nk_constant_precession, detect_nk_slant, generate_precession_profile,
    ClassificationReport, ConstancyTest, Label,
};
pub use curve::FramedCurve;
pub use error::{Error, Result};
pub use estimate::{arclength_reparametrize, estimate_frame_curvatures, Resampled};
pub use expr::Expr;
pub use geometry::{
    darboux_vector, geodesic_curvature, helix_axis_tangent, orthonormalize, slant_axis, CurvatureSample, FrenetFrame,
    Vec3, DEFAULT_KAPPA_FLOOR,
};
pub use integrator::{integrate_frenet, taylor_local};
pub use profile::{parse_profile, CurvatureProfile, Interpolation};
pub use tolerances::Tolerances;
pub use tower::{build_tower, principal_direction_step, tangent_indicatrix_ratio, DirectionTower, TowerLevel};
