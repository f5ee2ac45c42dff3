use crate::{Mat3, Vec3};

/// `hat(v) w = v × w`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

/// Rodrigues exponential `exp(hat(w))`.
pub fn exp_so3(w: &Vec3) -> Mat3 {
    let theta2 = w.norm_squared();
    let k = hat(w);
    let (a, b) = if theta2 < 1e-8 {
        // Taylor terms of sinθ/θ and (1 − cosθ)/θ²
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Mat3::identity() + k * a + k * k * b
}

/// Below this `1 + u·w` the two directions are treated as antipodal.
const ANTIPODAL: f64 = 1e-3;

/// A rotation `R` with `R u = w`.
///
/// The base solution is the minimal rotation about `u × w`; `theta` then
/// post-composes a rotation about `w`, sweeping the circle of all solutions.
/// For (nearly) antipodal pairs the base is a half-turn about the coordinate
/// axis least aligned with `u`, projected orthogonal to `u`, followed by the
/// minimal rotation from `−u` to `w`.
pub fn rotation_aligning(u: &Vec3, w: &Vec3, theta: f64) -> Mat3 {
    let base = if 1.0 + u.dot(w) < ANTIPODAL {
        let i = u.iamin();
        let mut axis = -u * u[i];
        axis[i] += 1.0;
        let axis = axis.normalize();
        let half_turn = axis * axis.transpose() * 2.0 - Mat3::identity();
        minimal_rotation(&-u, w) * half_turn
    } else {
        minimal_rotation(u, w)
    };
    exp_so3(&(w * theta)) * base
}

/// `I + [v]× + [v]×²/(1 + c)` with `v = u × w`, `c = u·w`; needs `c > −1`.
fn minimal_rotation(u: &Vec3, w: &Vec3) -> Mat3 {
    let k = hat(&u.cross(w));
    // 1 + c = |u + w|²/2 without cancellation
    let one_plus_c = 0.5 * (u + w).norm_squared();
    Mat3::identity() + k + k * k / one_plus_c
}

/// Gram–Schmidt on the columns, with the third column flipped if needed so
/// that the determinant is `+1`.
pub fn orthonormalize(a: &Mat3) -> Mat3 {
    let c0 = a.column(0).normalize();
    let c1 = a.column(1) - c0 * c0.dot(&a.column(1));
    let c1 = c1.normalize();
    let mut c2 = a.column(2) - c0 * c0.dot(&a.column(2)) - c1 * c1.dot(&a.column(2));
    c2.normalize_mut();
    if c0.cross(&c1).dot(&c2) < 0.0 {
        c2 = -c2;
    }
    Mat3::from_columns(&[c0, c1, c2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit() -> impl Strategy<Value = Vec3> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(a, b, c)| a * a + b * b + c * c > 1e-4)
            .prop_map(|(a, b, c)| Vec3::new(a, b, c).normalize())
    }

    fn assert_so3(r: &Mat3, tol: f64) {
        assert!((r.transpose() * r - Mat3::identity()).norm() <= tol);
        assert!((r.determinant() - 1.0).abs() <= tol);
    }

    #[test]
    fn hat_examples() {
        assert_eq!(hat(&Vec3::zeros()), Mat3::zeros());
        assert_eq!(hat(&Vec3::x()) * Vec3::y(), Vec3::z());
        let v = Vec3::new(0.3, -1.2, 2.5);
        assert_eq!(hat(&v) * v, Vec3::zeros());
        assert_eq!(hat(&v).transpose(), -hat(&v));
    }

    #[test]
    fn exp_matches_axis_angle() {
        let r = exp_so3(&(Vec3::z() * (PI / 2.0)));
        assert!((r * Vec3::x() - Vec3::y()).norm() < 1e-15);
        let small = Vec3::new(1e-5, -2e-5, 3e-6);
        assert!((exp_so3(&small) - (Mat3::identity() + hat(&small))).norm() < 1e-9);
        assert_so3(&exp_so3(&Vec3::new(1.0, 2.0, -0.5)), 1e-14);
    }

    #[test]
    fn aligning_examples() {
        assert_eq!(
            rotation_aligning(&Vec3::z(), &Vec3::z(), 0.0),
            Mat3::identity()
        );
        let r = rotation_aligning(&Vec3::z(), &-Vec3::z(), 0.0);
        let half_turn_x = Mat3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0);
        assert!((r - half_turn_x).norm() < 1e-15);
        assert!((r * Vec3::z() + Vec3::z()).norm() < 1e-15);
    }

    #[test]
    fn nearly_antipodal_pairs_stay_accurate() {
        let u = Vec3::new(0.0, 1e-9, 1.0).normalize();
        let w = -Vec3::z();
        let r = rotation_aligning(&u, &w, 0.3);
        assert!((r * u - w).norm() < 1e-12);
        assert_so3(&r, 1e-12);
    }

    #[test]
    fn orthonormalize_preserves_direction() {
        let a = exp_so3(&Vec3::new(0.2, 0.5, -1.0));
        let scaled = a * (1.0 + 1e-6);
        let q = orthonormalize(&scaled);
        assert_so3(&q, 1e-14);
        assert!((q - a).norm() < 1e-6);
        let mut reflected = a;
        reflected.set_column(2, &-a.column(2));
        assert!((orthonormalize(&reflected) - a).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn aligning_is_a_rotation_taking_u_to_w(u in unit(), w in unit(), theta in -7.0..7.0f64) {
            let r = rotation_aligning(&u, &w, theta);
            prop_assert!((r * u - w).norm() <= 1e-12);
            prop_assert!((r.transpose() * r - Mat3::identity()).norm() <= 1e-12);
            prop_assert!((r.determinant() - 1.0).abs() <= 1e-12);
            let r2 = rotation_aligning(&u, &w, theta + 2.0 * PI);
            prop_assert!((r - r2).norm() <= 1e-12);
        }

        #[test]
        fn hat_is_cross_product(v in unit(), w in unit()) {
            prop_assert!((hat(&v) * w - v.cross(&w)).norm() <= 1e-15);
        }
    }
}
