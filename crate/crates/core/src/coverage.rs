//! Per-thread record of which public operations ran.
//!
//! The `example1` pipeline resets the record, runs, and reports the set it
//! touched so tests can check that every operation was exercised.

use std::cell::RefCell;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    DarbouxVector,
    GeodesicCurvature,
    HelixAxisTangent,
    SlantAxis,
    Orthonormalize,
    IntegrateFrenet,
    TaylorLocal,
    EstimateFrameCurvatures,
    ArclengthReparametrize,
    PrincipalDirectionStep,
    BuildTower,
    TangentIndicatrixRatio,
    Constancy,
    ClassifyBasic,
    DetectNkSlant,
    DetectNkConstantPrecession,
    GeneratePrecessionProfile,
    ParseProfile,
    Run,
}

impl Op {
    pub const ALL: [Op; 19] = [
        Op::DarbouxVector,
        Op::GeodesicCurvature,
        Op::HelixAxisTangent,
        Op::SlantAxis,
        Op::Orthonormalize,
        Op::IntegrateFrenet,
        Op::TaylorLocal,
        Op::EstimateFrameCurvatures,
        Op::ArclengthReparametrize,
        Op::PrincipalDirectionStep,
        Op::BuildTower,
        Op::TangentIndicatrixRatio,
        Op::Constancy,
        Op::ClassifyBasic,
        Op::DetectNkSlant,
        Op::DetectNkConstantPrecession,
        Op::GeneratePrecessionProfile,
        Op::ParseProfile,
        Op::Run,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::DarbouxVector => "darboux_vector",
            Op::GeodesicCurvature => "geodesic_curvature",
            Op::HelixAxisTangent => "helix_axis_tangent",
            Op::SlantAxis => "slant_axis",
            Op::Orthonormalize => "orthonormalize",
            Op::IntegrateFrenet => "integrate_frenet",
            Op::TaylorLocal => "taylor_local",
            Op::EstimateFrameCurvatures => "estimate_frame_curvatures",
            Op::ArclengthReparametrize => "arclength_reparametrize",
            Op::PrincipalDirectionStep => "principal_direction_step",
            Op::BuildTower => "build_tower",
            Op::TangentIndicatrixRatio => "tangent_indicatrix_ratio",
            Op::Constancy => "constancy",
            Op::ClassifyBasic => "classify_basic",
            Op::DetectNkSlant => "detect_nk_slant",
            Op::DetectNkConstantPrecession => "detect_nk_constant_precession",
            Op::GeneratePrecessionProfile => "generate_precession_profile",
            Op::ParseProfile => "parse_profile",
            Op::Run => "run",
        }
    }
}

thread_local! {
    static SEEN: RefCell<BTreeSet<Op>> = const { RefCell::new(BTreeSet::new()) };
}

pub(crate) fn record(op: Op) {
    SEEN.with(|s| {
        s.borrow_mut().insert(op);
    });
}

pub fn reset() {
    SEEN.with(|s| s.borrow_mut().clear());
}

pub fn snapshot() -> BTreeSet<Op> {
    SEEN.with(|s| s.borrow().clone())
}
