//! The rolling system on the horizontal plane, reduced by horizontal
//! rotations and translations.
//!
//! With `n_H = −k` the world drops out: `n_M = −A⁻¹k` and the dynamics close
//! on `(s, Ω)`:
//!
//! ```text
//! L_M ṡ = Ω × n_M,
//! Ĩ Ω̇ = (Ĩ Ω) × Ω + m s × (ṡ × Ω − g n_M),
//! E = ½ Ωᵀ Ĩ Ω + m g n_M · s.
//! ```
//!
//! In body-chart coordinates the first equation reads `L ẏ = Bᵀ Ω` with the
//! second fundamental form `L` and `B = hat(n_M) ∂s/∂y`.

use std::ops::{Add, Mul, Sub};

use crate::body::RigidBody;
use crate::full::{make_full_state, regular_inverse, solve_spd3, FieldOptions, FullState, Scene};
use crate::geometry::{hat, singular_values2};
use crate::{ChartRole, Error, Result, Vec2, Vec3};

/// `(y, Ω)`: body contact coordinates and body-frame angular velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedState {
    pub y: Vec2,
    pub omega: Vec3,
}

impl ReducedState {
    pub fn retract(&self, delta: &ReducedTangent) -> ReducedState {
        ReducedState {
            y: self.y + delta.dy,
            omega: self.omega + delta.domega,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedTangent {
    pub dy: Vec2,
    pub domega: Vec3,
}

impl Add for ReducedTangent {
    type Output = ReducedTangent;
    fn add(self, o: ReducedTangent) -> ReducedTangent {
        ReducedTangent {
            dy: self.dy + o.dy,
            domega: self.domega + o.domega,
        }
    }
}

impl Sub for ReducedTangent {
    type Output = ReducedTangent;
    fn sub(self, o: ReducedTangent) -> ReducedTangent {
        ReducedTangent {
            dy: self.dy - o.dy,
            domega: self.domega - o.domega,
        }
    }
}

impl Mul<f64> for ReducedTangent {
    type Output = ReducedTangent;
    fn mul(self, k: f64) -> ReducedTangent {
        ReducedTangent {
            dy: self.dy * k,
            domega: self.domega * k,
        }
    }
}

fn check_domain(body: &RigidBody, state: &ReducedState) -> Result<()> {
    if !(state
        .y
        .iter()
        .chain(state.omega.iter())
        .all(|v| v.is_finite()))
    {
        return Err(Error::InvalidParameter(
            "state has non-finite entries".into(),
        ));
    }
    if !body.surface().contains(&state.y) {
        return Err(Error::ChartBoundary {
            role: ChartRole::Body,
            y1: state.y[0],
            y2: state.y[1],
        });
    }
    Ok(())
}

fn angular_acceleration(
    body: &RigidBody,
    s: &Vec3,
    n: &Vec3,
    s_dot: &Vec3,
    omega: &Vec3,
    gravity: f64,
) -> Result<Vec3> {
    let inertia = body.augmented_inertia(s);
    let torque =
        (inertia * omega).cross(omega) + s.cross(&(s_dot.cross(omega) - n * gravity)) * body.mass();
    solve_spd3(&inertia, &torque)
}

/// Intrinsic form: `ṡ` solved in the body tangent frame from the Weingarten map.
pub fn vector_field_reduced(body: &RigidBody, state: &ReducedState) -> Result<ReducedTangent> {
    vector_field_reduced_with(body, state, &FieldOptions::default())
}

pub fn vector_field_reduced_with(
    body: &RigidBody,
    state: &ReducedState,
    options: &FieldOptions,
) -> Result<ReducedTangent> {
    check_domain(body, state)?;
    let geo = body.surface().local_geometry(&state.y)?;
    let n = geo.normal();
    let e = geo.frame.basis();
    let shape = e.transpose() * geo.weingarten * e;
    let scale = singular_values2(&shape).0;
    let shape_inv = regular_inverse(&shape, scale, options.lambda_cond_max)
        .map_err(|cond| Error::SingularShapeOperator { cond })?;
    let c = shape_inv * geo.frame.components(&state.omega.cross(&n));
    let s_dot = geo.frame.ambient(&c);
    let gravity = if options.negate_gravity_torque {
        -body.gravity()
    } else {
        body.gravity()
    };
    let domega = angular_acceleration(body, &geo.point, &n, &s_dot, &state.omega, gravity)?;
    Ok(ReducedTangent {
        dy: geo.frame.chart_velocity(&c),
        domega,
    })
}

/// Coordinate form: `L ẏ = Bᵀ Ω` and
/// `Ĩ Ω̇ + m hat(s) hat(Ω) (∂s/∂y) ẏ = (Ĩ Ω) × Ω + m g n × s`.
pub fn vector_field_reduced_coords(
    body: &RigidBody,
    state: &ReducedState,
) -> Result<ReducedTangent> {
    check_domain(body, state)?;
    let chart = body.surface();
    let y = &state.y;
    let omega = &state.omega;
    let n = chart.normal(y)?;
    let j = chart.jacobian(y);
    let second = chart.second_form(y)?;
    let det = second.determinant();
    let norm2 = second.norm_squared();
    if !(det.abs() >= 1e-12 * norm2) || norm2 == 0.0 {
        let (smax, smin) = singular_values2(&second);
        return Err(Error::SingularShapeOperator { cond: smax / smin });
    }
    let b = hat(&n) * j;
    let dy = second.try_inverse().ok_or(Error::SingularShapeOperator {
        cond: f64::INFINITY,
    })? * (b.transpose() * omega);

    let s = chart.eval(y);
    let m = body.mass();
    let inertia = body.augmented_inertia(&s);
    let rhs = (inertia * omega).cross(omega) + n.cross(&s) * (m * body.gravity())
        - hat(&s) * hat(omega) * (j * dy) * m;
    Ok(ReducedTangent {
        dy,
        domega: solve_spd3(&inertia, &rhs)?,
    })
}

/// `½ Ωᵀ Ĩ Ω + m g n_M · s`.
pub fn energy_reduced(body: &RigidBody, state: &ReducedState) -> Result<f64> {
    let s = body.surface().eval(&state.y);
    let n = body.surface().normal(&state.y)?;
    let kinetic = 0.5 * state.omega.dot(&(body.augmented_inertia(&s) * state.omega));
    Ok(kinetic + body.mass() * body.gravity() * n.dot(&s))
}

/// Quotient map `(A, s, x, Ω) ↦ (s, Ω)`.
pub fn project_full_to_reduced(scene: &Scene, state: &FullState) -> Result<ReducedState> {
    if !scene.is_planar() {
        return Err(Error::NotPlanarScene);
    }
    Ok(ReducedState {
        y: state.y_body,
        omega: state.omega,
    })
}

/// A representative of the fiber over `state`: the contact point placed at
/// `x0` on the plane and the body turned by `theta` about the vertical.
pub fn embed_reduced_in_full(
    scene: &Scene,
    state: &ReducedState,
    theta: f64,
    x0: Vec2,
) -> Result<FullState> {
    if !scene.is_planar() {
        return Err(Error::NotPlanarScene);
    }
    make_full_state(scene, state.y, x0, theta, state.omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::full::{energy_full, vector_field_full};
    use crate::geometry::{exp_so3, Orientation, SurfaceChart};
    use crate::Mat3;
    use std::f64::consts::FRAC_PI_2;

    fn ellipsoid_body() -> RigidBody {
        let surface = SurfaceChart::ellipsoid(0.5, 0.7, 1.0, Orientation::Positive).unwrap();
        let inertia = Mat3::new(0.4, 0.02, -0.01, 0.02, 0.35, 0.03, -0.01, 0.03, 0.2);
        RigidBody::new(1.3, inertia, surface, 9.81).unwrap()
    }

    fn unit_ball() -> RigidBody {
        let surface = SurfaceChart::sphere(1.0, Orientation::Positive).unwrap();
        RigidBody::new(1.0, Mat3::identity() * 0.4, surface, 9.81).unwrap()
    }

    fn state() -> ReducedState {
        ReducedState {
            y: Vec2::new(1.2, -0.5),
            omega: Vec3::new(0.9, 0.3, -1.4),
        }
    }

    #[test]
    fn zero_angular_velocity() {
        let body = ellipsoid_body();
        let st = ReducedState {
            omega: Vec3::zeros(),
            ..state()
        };
        let s = body.surface().eval(&st.y);
        let n = body.surface().normal(&st.y).unwrap();
        let want = body.augmented_inertia(&s).try_inverse().unwrap()
            * (s.cross(&n) * (-body.mass() * body.gravity()));
        for t in [
            vector_field_reduced(&body, &st).unwrap(),
            vector_field_reduced_coords(&body, &st).unwrap(),
        ] {
            assert_eq!(t.dy, Vec2::zeros());
            assert!((t.domega - want).norm() < 1e-12);
        }
    }

    #[test]
    fn ball_spinning_about_its_normal_is_steady() {
        let body = unit_ball();
        let y = Vec2::new(0.8, 2.0);
        let n = body.surface().normal(&y).unwrap();
        let st = ReducedState { y, omega: n * 2.5 };
        let t = vector_field_reduced(&body, &st).unwrap();
        assert!(t.dy.norm() < 1e-14);
        assert!(t.domega.norm() < 1e-13);
    }

    #[test]
    fn sphere_coordinate_form_uses_minus_metric() {
        let body = unit_ball();
        let st = state();
        let chart = body.surface();
        let g = chart.first_form(&st.y).unwrap();
        let b = hat(&chart.normal(&st.y).unwrap()) * chart.jacobian(&st.y);
        let want = -g.try_inverse().unwrap() * b.transpose() * st.omega;
        let t = vector_field_reduced_coords(&body, &st).unwrap();
        assert!((t.dy - want).norm() < 1e-12);
    }

    #[test]
    fn intrinsic_and_coordinate_forms_agree() {
        let body = ellipsoid_body();
        let a = vector_field_reduced(&body, &state()).unwrap();
        let b = vector_field_reduced_coords(&body, &state()).unwrap();
        assert!((a.dy - b.dy).norm() < 1e-10);
        assert!((a.domega - b.domega).norm() < 1e-10);
    }

    #[test]
    fn reduced_energy_examples() {
        let r = 1.7;
        let surface = SurfaceChart::sphere(r, Orientation::Positive).unwrap();
        let body = RigidBody::new(2.0, Mat3::identity(), surface, 9.81).unwrap();
        let st = ReducedState {
            y: Vec2::new(1.0, 1.0),
            omega: Vec3::zeros(),
        };
        let e = energy_reduced(&body, &st).unwrap();
        assert!((e - 2.0 * 9.81 * r).abs() < 1e-12);

        // s ⟂ n at the flank of a paraboloid's vertex-centered chart: s = 0 at the vertex
        let flat = SurfaceChart::paraboloid(1.0, Orientation::Positive).unwrap();
        let body = RigidBody::new(2.0, Mat3::identity(), flat, 9.81).unwrap();
        let vertex = ReducedState {
            y: Vec2::zeros(),
            omega: Vec3::zeros(),
        };
        assert_eq!(energy_reduced(&body, &vertex).unwrap(), 0.0);
    }

    fn planar(body: RigidBody) -> Scene {
        Scene::new(body, SurfaceChart::plane(Orientation::Negative))
    }

    #[test]
    fn embedding_round_trips_and_matches_energy() {
        let scene = planar(ellipsoid_body());
        let st = state();
        let full = embed_reduced_in_full(&scene, &st, 0.7, Vec2::new(3.0, -1.0)).unwrap();
        assert_eq!(project_full_to_reduced(&scene, &full).unwrap(), st);
        let e_full = energy_full(&scene, &full);
        let e_red = energy_reduced(&scene.body, &st).unwrap();
        assert!((e_full - e_red).abs() < 1e-12);
    }

    #[test]
    fn symmetry_related_states_share_a_projection() {
        let scene = planar(ellipsoid_body());
        let st = state();
        let a = embed_reduced_in_full(&scene, &st, 0.2, Vec2::new(0.0, 0.0)).unwrap();
        let b = embed_reduced_in_full(&scene, &st, -1.3, Vec2::new(4.0, 2.5)).unwrap();
        // (B, b) with B = A_b A_a⁻¹ fixes k and carries x_a to x_b
        let rot = b.rotation * a.rotation.transpose();
        assert!((rot * Vec3::z() - Vec3::z()).norm() < 1e-12);
        let angle = rot[(1, 0)].atan2(rot[(0, 0)]);
        assert!((rot - exp_so3(&(Vec3::z() * angle))).norm() < 1e-12);
        let xa = scene.world.eval(&a.y_world);
        let xb = scene.world.eval(&b.y_world);
        let shift = xb - rot * xa;
        assert!(shift[2].abs() < 1e-15);
        assert_eq!(
            project_full_to_reduced(&scene, &a).unwrap(),
            project_full_to_reduced(&scene, &b).unwrap()
        );
    }

    #[test]
    fn full_field_projects_to_reduced_field() {
        let scene = planar(ellipsoid_body());
        let st = state();
        let want = vector_field_reduced(&scene.body, &st).unwrap();
        for (theta, x0) in [(0.0, Vec2::zeros()), (2.1, Vec2::new(-5.0, 7.0))] {
            let full = embed_reduced_in_full(&scene, &st, theta, x0).unwrap();
            let t = vector_field_full(&scene, &full).unwrap();
            assert!((t.dy_body - want.dy).norm() < 1e-9);
            assert!((t.domega - want.domega).norm() < 1e-9);
        }
    }

    #[test]
    fn non_planar_scenes_are_rejected() {
        let scene = Scene::new(
            ellipsoid_body(),
            SurfaceChart::sphere(2.0, Orientation::Negative).unwrap(),
        );
        let st = state();
        assert_eq!(
            embed_reduced_in_full(&scene, &st, 0.0, Vec2::zeros()),
            Err(Error::NotPlanarScene)
        );
        let upside_down = Scene::new(ellipsoid_body(), SurfaceChart::plane(Orientation::Positive));
        assert!(!upside_down.is_planar());
    }

    #[test]
    fn flat_body_point_is_singular() {
        let flat = SurfaceChart::plane(Orientation::Positive);
        let body = RigidBody::new(1.0, Mat3::identity(), flat, 9.81).unwrap();
        let st = ReducedState {
            y: Vec2::new(0.1, 0.2),
            omega: Vec3::new(1.0, 0.0, 0.0),
        };
        assert!(matches!(
            vector_field_reduced(&body, &st),
            Err(Error::SingularShapeOperator { .. })
        ));
        assert!(matches!(
            vector_field_reduced_coords(&body, &st),
            Err(Error::SingularShapeOperator { .. })
        ));
        let ball = unit_ball();
        let off = ReducedState {
            y: Vec2::new(FRAC_PI_2, 7.0),
            omega: Vec3::zeros(),
        };
        assert!(matches!(
            vector_field_reduced(&ball, &off),
            Err(Error::ChartBoundary { .. })
        ));
    }
}
