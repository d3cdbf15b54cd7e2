//! Vectors, Frenet frames and the pointwise quantities built from them:
//! Darboux vector, geodesic curvature of the principal normal, and the
//! axes of helices and slant helices.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::coverage::{self, Op};
use crate::error::{Error, Result};

/// Curvature below which the principal normal is treated as undefined.
pub const DEFAULT_KAPPA_FLOOR: f64 = 1e-9;

/// Sine of the T/N angle below which [`orthonormalize`] refuses the frame.
const COLLAPSE_CONDITION: f64 = 1e-8;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Unit vector in the same direction, or `None` for a zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Angle in radians between two nonzero vectors, computed with atan2 so
    /// it stays accurate near 0 and π.
    pub fn angle_to(self, o: Vec3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }

    pub(crate) fn ensure_finite(self, what: &'static str) -> Result<Vec3> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite(what))
        }
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for nalgebra::Vector3<f64> {
    fn from(v: Vec3) -> Self {
        nalgebra::Vector3::new(v.x, v.y, v.z)
    }
}

impl From<nalgebra::Vector3<f64>> for Vec3 {
    fn from(v: nalgebra::Vector3<f64>) -> Self {
        Vec3::new(v.x, v.y, v.z)
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    #[inline]
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, k: f64) -> Vec3 {
        Vec3::new(self.x / k, self.y / k, self.z / k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Moving frame (T, N, B) at one sample.
///
/// Fields are public so perturbed or hand-built triples can be fed to
/// [`orthonormalize`]; the constructors always return a right-handed
/// orthonormal frame.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrenetFrame {
    pub t: Vec3,
    pub n: Vec3,
    pub b: Vec3,
}

impl Default for FrenetFrame {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl FrenetFrame {
    pub const IDENTITY: FrenetFrame = FrenetFrame { t: Vec3::X, n: Vec3::Y, b: Vec3::Z };

    /// Builds a frame from a tangent and an approximate normal; B is
    /// recomputed as T × N.
    pub fn from_tangent_normal(t: Vec3, n: Vec3) -> Result<FrenetFrame> {
        orthonormalize(FrenetFrame { t, n, b: t.cross(n) })
    }

    /// Largest deviation of the Gram matrix of (T, N, B) from the identity,
    /// combined with the handedness residual ‖B − T×N‖∞.
    pub fn orthonormality_error(&self) -> f64 {
        let v = [self.t, self.n, self.b];
        let mut err: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((v[i].dot(v[j]) - target).abs());
            }
        }
        err.max((self.b - self.t.cross(self.n)).max_abs())
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.t.is_finite() && self.n.is_finite() && self.b.is_finite() && self.orthonormality_error() <= tol
    }

    /// Coordinates of `v` in this frame.
    pub fn components(&self, v: Vec3) -> Vec3 {
        Vec3::new(v.dot(self.t), v.dot(self.n), v.dot(self.b))
    }

    /// The world vector with frame coordinates `c`.
    pub fn compose(&self, c: Vec3) -> Vec3 {
        self.t * c.x + self.n * c.y + self.b * c.z
    }
}

/// Curvature data at one arclength sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub s: f64,
    pub kappa: f64,
    pub tau: f64,
    pub dkappa: f64,
    pub dtau: f64,
    /// Set when `kappa` is below the curvature floor; N is undefined there.
    pub degenerate: bool,
}

impl CurvatureSample {
    pub fn new(s: f64, kappa: f64, tau: f64, dkappa: f64, dtau: f64, kappa_floor: f64) -> Self {
        CurvatureSample { s, kappa, tau, dkappa, dtau, degenerate: !(kappa >= kappa_floor) }
    }

    /// Every field multiplied by `c`; the degeneracy flag is kept.
    pub fn scaled(&self, c: f64) -> Self {
        CurvatureSample {
            s: self.s,
            kappa: self.kappa * c,
            tau: self.tau * c,
            dkappa: self.dkappa * c,
            dtau: self.dtau * c,
            degenerate: self.degenerate,
        }
    }
}

/// W = τT + κB.
pub fn darboux_vector(frame: &FrenetFrame, kappa: f64, tau: f64) -> Result<Vec3> {
    coverage::record(Op::DarbouxVector);
    if !kappa.is_finite() || !tau.is_finite() {
        return Err(Error::NonFinite("darboux_vector curvature"));
    }
    if kappa < 0.0 {
        return Err(Error::InvalidArgument(format!("negative curvature {kappa}")));
    }
    (frame.t * tau + frame.b * kappa).ensure_finite("darboux_vector frame")
}

/// Geodesic curvature of the principal normal indicatrix,
/// σ = (κτ′ − κ′τ) / (κ² + τ²)^{3/2}.
///
/// The numerator is the expanded form of κ²(τ/κ)′, so the result stays
/// finite as κ approaches the floor. The sign is kept.
pub fn geodesic_curvature(sample: &CurvatureSample) -> Result<f64> {
    coverage::record(Op::GeodesicCurvature);
    let CurvatureSample { s, kappa, tau, dkappa, dtau, degenerate } = *sample;
    if degenerate {
        return Err(Error::SigmaUndefined { s, kappa });
    }
    let w2 = kappa * kappa + tau * tau;
    if !(w2 > 0.0) {
        return Err(Error::SigmaUndefined { s, kappa });
    }
    let sigma = (dtau * kappa - dkappa * tau) / (w2 * w2.sqrt());
    if sigma.is_finite() {
        Ok(sigma)
    } else {
        Err(Error::NonFinite("geodesic_curvature"))
    }
}

/// Axis of a general helix: u = cos θ T + sin θ B.
pub fn helix_axis_tangent(frame: &FrenetFrame, theta: f64) -> Result<Vec3> {
    coverage::record(Op::HelixAxisTangent);
    if !theta.is_finite() {
        return Err(Error::NonFinite("helix_axis_tangent angle"));
    }
    let (sin, cos) = theta.sin_cos();
    (frame.t * cos + frame.b * sin).ensure_finite("helix_axis_tangent frame")
}

/// Axis of a slant helix: u = sin θ W̄ + cos θ N with W̄ the unit Darboux
/// vector.
pub fn slant_axis(frame: &FrenetFrame, kappa: f64, tau: f64, theta: f64) -> Result<Vec3> {
    coverage::record(Op::SlantAxis);
    if !theta.is_finite() {
        return Err(Error::NonFinite("slant_axis angle"));
    }
    let w = darboux_vector(frame, kappa, tau)?;
    let omega = kappa.hypot(tau);
    if omega < DEFAULT_KAPPA_FLOOR {
        return Err(Error::AxisUndefined);
    }
    let (sin, cos) = theta.sin_cos();
    Ok(w * (sin / omega) + frame.n * cos)
}

/// Modified Gram–Schmidt on (T, N) followed by B = T × N.
///
/// The incoming B only has to be finite; it is always replaced, so a
/// left-handed input comes back right-handed.
pub fn orthonormalize(frame: FrenetFrame) -> Result<FrenetFrame> {
    coverage::record(Op::Orthonormalize);
    let FrenetFrame { t, n, b } = frame;
    if !(t.is_finite() && n.is_finite() && b.is_finite()) {
        return Err(Error::NonFinite("orthonormalize"));
    }
    let t_len = t.norm();
    let n_len = n.norm();
    if t_len < COLLAPSE_CONDITION || n_len < COLLAPSE_CONDITION {
        return Err(Error::FrameCollapse { condition: t_len.min(n_len) });
    }
    let t = t / t_len;
    let n_perp = n - t * n.dot(t);
    let condition = n_perp.norm() / n_len;
    if condition < COLLAPSE_CONDITION {
        return Err(Error::FrameCollapse { condition });
    }
    let n = n_perp / n_perp.norm();
    // a second projection pass removes the residual left by cancellation
    let n = n - t * n.dot(t);
    let n = n / n.norm();
    Ok(FrenetFrame { t, n, b: t.cross(n) })
}
