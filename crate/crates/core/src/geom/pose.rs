use nalgebra::{Point3, UnitQuaternion, Vector3};

/// A rigid motion: rotate, then translate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vector3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Pose::identity()
    }
}

impl Pose {
    pub fn identity() -> Pose {
        Pose { rotation: UnitQuaternion::identity(), translation: Vector3::zeros() }
    }

    pub fn at(x: f64, y: f64, z: f64) -> Pose {
        Pose { rotation: UnitQuaternion::identity(), translation: Vector3::new(x, y, z) }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Pose {
        Pose { rotation, translation }
    }

    /// `self` after `other`: `(self * other)(x) = self(other(x))`.
    pub fn then_apply(&self, other: &Pose) -> Pose {
        Pose { rotation: self.rotation * other.rotation, translation: self.rotation * other.translation + self.translation }
    }

    pub fn inverse(&self) -> Pose {
        let r = self.rotation.inverse();
        Pose { rotation: r, translation: -(r * self.translation) }
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        self.rotation * p + self.translation
    }

    /// Linear in translation, spherical in rotation; `s` in `[0, 1]`.
    pub fn interpolate(&self, other: &Pose, s: f64) -> Pose {
        let rotation = self.rotation.try_slerp(&other.rotation, s, 1e-12).unwrap_or(if s < 0.5 { self.rotation } else { other.rotation });
        Pose { rotation, translation: self.translation.lerp(&other.translation, s) }
    }

    /// Translation distance plus rotation angle.
    pub fn distance(&self, other: &Pose) -> f64 {
        (self.translation - other.translation).norm() + self.rotation.angle_to(&other.rotation)
    }

    pub fn approx_eq(&self, other: &Pose, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// Quaternion components `(qx, qy, qz, qw)`.
    pub fn quat(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.i, q.j, q.k, q.w]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn inverse_cancels() {
        let p = Pose::new(UnitQuaternion::from_euler_angles(0.3, -0.2, 1.1), Vector3::new(1.0, 2.0, 3.0));
        assert!(p.then_apply(&p.inverse()).approx_eq(&Pose::identity(), 1e-12));
        assert!((p.rotation.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn interpolation_hits_midpoint() {
        let a = Pose::at(0.0, 0.0, 0.0);
        let b = Pose::new(UnitQuaternion::from_euler_angles(0.0, 0.0, FRAC_PI_2), Vector3::new(2.0, 4.0, 0.0));
        let m = a.interpolate(&b, 0.5);
        assert!((m.translation - Vector3::new(1.0, 2.0, 0.0)).norm() < 1e-12);
        assert!((m.rotation.angle() - FRAC_PI_2 / 2.0).abs() < 1e-12);
        assert!(a.interpolate(&b, 1.0).approx_eq(&b, 1e-12));
    }
}
