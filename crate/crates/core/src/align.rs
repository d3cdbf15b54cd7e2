//! Rigid motions and least-squares point-set alignment.

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// x ↦ R x + t with R a proper rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RigidMotion {
    pub rotation: [[f64; 3]; 3],
    pub translation: Vec3,
}

impl RigidMotion {
    pub const IDENTITY: RigidMotion =
        RigidMotion { rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], translation: Vec3::ZERO };

    fn matrix(&self) -> Matrix3<f64> {
        let r = &self.rotation;
        Matrix3::new(r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2])
    }

    fn from_parts(m: &Matrix3<f64>, translation: Vec3) -> RigidMotion {
        let mut rotation = [[0.0; 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[(i, j)];
            }
        }
        RigidMotion { rotation, translation }
    }

    /// Uniformly distributed rotation with a translation in [-10, 10]³.
    pub fn random<R: Rng>(rng: &mut R) -> RigidMotion {
        let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let tau = std::f64::consts::TAU;
        let q = nalgebra::Quaternion::new(
            u1.sqrt() * (tau * u3).cos(),
            (1.0 - u1).sqrt() * (tau * u2).sin(),
            (1.0 - u1).sqrt() * (tau * u2).cos(),
            u1.sqrt() * (tau * u3).sin(),
        );
        let rot = UnitQuaternion::from_quaternion(q).to_rotation_matrix();
        let t = Vec3::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        RigidMotion::from_parts(rot.matrix(), t)
    }

    pub fn rotate(&self, v: Vec3) -> Vec3 {
        (self.matrix() * Vector3::from(v)).into()
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.rotate(p) + self.translation
    }

    /// Rotation angle of R in radians.
    pub fn angle(&self) -> f64 {
        Rotation3::from_matrix_unchecked(self.matrix()).angle()
    }
}

/// Least-squares rigid motion taking `src` onto `dst` (Kabsch), and the RMS
/// residual after alignment.
pub fn kabsch(src: &[Vec3], dst: &[Vec3]) -> Result<(RigidMotion, f64)> {
    if src.len() != dst.len() {
        return Err(Error::InvalidArgument("point sets differ in length".into()));
    }
    if src.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: src.len() });
    }
    let n = src.len() as f64;
    let centroid = |pts: &[Vec3]| pts.iter().fold(Vec3::ZERO, |a, &p| a + p) / n;
    let (cs, cd) = (centroid(src), centroid(dst));
    let mut h = Matrix3::zeros();
    for (a, b) in src.iter().zip(dst) {
        h += Vector3::from(*a - cs) * Vector3::from(*b - cd).transpose();
    }
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let d = (vt.transpose() * u.transpose()).determinant().signum();
    let fix = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d));
    let r = vt.transpose() * fix * u.transpose();
    let t = cd - Vec3::from(r * Vector3::from(cs));
    let motion = RigidMotion::from_parts(&r, t);
    let sq: f64 = src.iter().zip(dst).map(|(a, b)| (motion.apply(*a) - *b).norm_squared()).sum();
    Ok((motion, (sq / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_known_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = RigidMotion::random(&mut rng);
        let src: Vec<Vec3> = (0..50)
            .map(|i| {
                let s = i as f64 * 0.1;
                Vec3::new(s.cos(), s.sin(), 0.3 * s)
            })
            .collect();
        let dst: Vec<Vec3> = src.iter().map(|p| m.apply(*p)).collect();
        let (fit, rms) = kabsch(&src, &dst).unwrap();
        assert!(rms < 1e-12);
        for i in 0..3 {
            for j in 0..3 {
                assert!((fit.rotation[i][j] - m.rotation[i][j]).abs() < 1e-12);
            }
        }
        assert!((fit.translation - m.translation).max_abs() < 1e-11);
    }

    #[test]
    fn random_motion_is_proper() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let m = RigidMotion::random(&mut rng);
            let det = m.matrix().determinant();
            assert!((det - 1.0).abs() < 1e-12);
            let v = Vec3::new(0.3, -1.0, 2.0);
            assert!((m.rotate(v).norm() - v.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_is_not_returned() {
        let src: Vec<Vec3> = (0..10).map(|i| Vec3::new(i as f64, (i * i) as f64 * 0.1, (i as f64).sin())).collect();
        let dst: Vec<Vec3> = src.iter().map(|p| Vec3::new(p.x, p.y, -p.z)).collect();
        let (fit, rms) = kabsch(&src, &dst).unwrap();
        assert!((fit.matrix().determinant() - 1.0).abs() < 1e-12);
        assert!(rms > 1e-3);
    }
}
