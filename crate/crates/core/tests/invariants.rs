//! Cross-module properties of the rolling vector fields, checked against
//! finite-difference oracles at random regular states.

use proptest::prelude::*;
use rollsim_core::full::{
    energy_full, make_full_state, tangent_membership_residual, vector_field_full, FullState, Scene,
};
use rollsim_core::geometry::exp_so3;
use rollsim_core::reduced::{
    embed_reduced_in_full, energy_reduced, project_full_to_reduced, vector_field_reduced,
    vector_field_reduced_coords, ReducedState,
};
use rollsim_core::{Mat3, Orientation, RigidBody, SurfaceChart, Vec2, Vec3};

const FD_STEP: f64 = 1e-6;

fn sphere_body() -> RigidBody {
    let surface = SurfaceChart::sphere(0.6, Orientation::Positive).unwrap();
    RigidBody::with_principal_moments(2.0, Vec3::new(0.30, 0.25, 0.20), surface, 9.81).unwrap()
}

fn ellipsoid_body() -> RigidBody {
    let surface = SurfaceChart::ellipsoid(0.5, 0.7, 1.0, Orientation::Positive).unwrap();
    let inertia = Mat3::new(0.40, 0.02, -0.01, 0.02, 0.35, 0.03, -0.01, 0.03, 0.20);
    RigidBody::new(1.3, inertia, surface, 9.81).unwrap()
}

fn scene(body_kind: usize, world_kind: usize) -> Scene {
    let body = if body_kind == 0 {
        sphere_body()
    } else {
        ellipsoid_body()
    };
    let world = if world_kind == 0 {
        SurfaceChart::plane(Orientation::Negative)
    } else {
        SurfaceChart::sphere(3.0, Orientation::Negative).unwrap()
    };
    Scene::new(body, world)
}

/// Central difference of the energy along the curve generated by the field.
fn energy_rate_full(scene: &Scene, state: &FullState) -> (f64, f64) {
    let d = vector_field_full(scene, state).unwrap();
    let along = |t: f64| FullState {
        rotation: state.rotation * exp_so3(&(d.omega_frame * t)),
        y_body: state.y_body + d.dy_body * t,
        y_world: state.y_world + d.dy_world * t,
        omega: state.omega + d.domega * t,
    };
    let e = energy_full(scene, state);
    let rate = (energy_full(scene, &along(FD_STEP)) - energy_full(scene, &along(-FD_STEP)))
        / (2.0 * FD_STEP);
    (rate, e)
}

fn omega() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-3.0..3.0f64).prop_map(Vec3::from)
}

fn body_coords() -> impl Strategy<Value = Vec2> {
    (0.2..2.94f64, -3.1..3.1f64).prop_map(|(a, b)| Vec2::new(a, b))
}

prop_compose! {
    fn full_case()(
        body_kind in 0..2usize,
        world_kind in 0..2usize,
        y_body in body_coords(),
        y_plane in prop::array::uniform2(-5.0..5.0f64),
        y_sphere in body_coords(),
        theta in -3.2..3.2f64,
        omega in omega(),
    ) -> (Scene, FullState) {
        let scene = scene(body_kind, world_kind);
        let y_world = if world_kind == 0 { Vec2::from(y_plane) } else { y_sphere };
        let state = make_full_state(&scene, y_body, y_world, theta, omega).unwrap();
        (scene, state)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn full_field_conserves_energy((scene, state) in full_case()) {
        let (rate, e) = energy_rate_full(&scene, &state);
        prop_assert!(rate.abs() <= 1e-6 * (1.0 + e.abs()), "dE/dt = {rate:e}, E = {e}");
    }

    #[test]
    fn full_field_is_tangent_to_the_constraint((scene, state) in full_case()) {
        let d = vector_field_full(&scene, &state).unwrap();
        let r = tangent_membership_residual(&scene, &state, &d).unwrap();
        prop_assert!(r <= 1e-10 * (1.0 + state.omega.norm()), "residual {r:e}");
    }

    #[test]
    fn reduced_field_conserves_energy(y in body_coords(), omega in omega()) {
        let body = ellipsoid_body();
        let state = ReducedState { y, omega };
        let d = vector_field_reduced(&body, &state).unwrap();
        let e = |t: f64| energy_reduced(&body, &ReducedState { y: y + d.dy * t, omega: omega + d.domega * t }).unwrap();
        let rate = (e(FD_STEP) - e(-FD_STEP)) / (2.0 * FD_STEP);
        prop_assert!(rate.abs() <= 1e-6 * (1.0 + e(0.0).abs()), "dE/dt = {rate:e}");
    }

    #[test]
    fn intrinsic_and_coordinate_forms_agree(y in body_coords(), omega in omega()) {
        let body = ellipsoid_body();
        let state = ReducedState { y, omega };
        let a = vector_field_reduced(&body, &state).unwrap();
        let b = vector_field_reduced_coords(&body, &state).unwrap();
        let scale = 1.0 + a.dy.norm() + a.domega.norm();
        prop_assert!((a.dy - b.dy).norm() <= 1e-10 * scale);
        prop_assert!((a.domega - b.domega).norm() <= 1e-10 * scale);
    }

    #[test]
    fn reduction_commutes_with_the_flow(
        body_kind in 0..2usize,
        y in body_coords(),
        omega in omega(),
        theta in -3.2..3.2f64,
        x0 in prop::array::uniform2(-5.0..5.0f64),
    ) {
        let scene = scene(body_kind, 0);
        let reduced = ReducedState { y, omega };
        let full = embed_reduced_in_full(&scene, &reduced, theta, Vec2::from(x0)).unwrap();
        prop_assert_eq!(project_full_to_reduced(&scene, &full).unwrap(), reduced);
        let df = vector_field_full(&scene, &full).unwrap();
        let dr = vector_field_reduced(&scene.body, &reduced).unwrap();
        let scale = 1.0 + dr.dy.norm() + dr.domega.norm();
        prop_assert!((df.dy_body - dr.dy).norm() <= 1e-9 * scale);
        prop_assert!((df.domega - dr.domega).norm() <= 1e-9 * scale);
        prop_assert!((energy_full(&scene, &full) - energy_reduced(&scene.body, &reduced).unwrap()).abs()
            <= 1e-9 * scale);
    }

    #[test]
    fn projected_dynamics_ignore_the_fiber(
        y in body_coords(),
        omega in omega(),
        theta in prop::array::uniform2(-3.2..3.2f64),
        x0 in prop::array::uniform2(-5.0..5.0f64),
    ) {
        let scene = scene(1, 0);
        let reduced = ReducedState { y, omega };
        let a = embed_reduced_in_full(&scene, &reduced, theta[0], Vec2::zeros()).unwrap();
        let b = embed_reduced_in_full(&scene, &reduced, theta[1], Vec2::from(x0)).unwrap();
        let da = vector_field_full(&scene, &a).unwrap();
        let db = vector_field_full(&scene, &b).unwrap();
        let scale = 1.0 + da.dy_body.norm() + da.domega.norm();
        prop_assert!((da.dy_body - db.dy_body).norm() <= 1e-9 * scale);
        prop_assert!((da.domega - db.domega).norm() <= 1e-9 * scale);
    }
}

#[test]
fn negated_gravity_torque_breaks_energy_conservation() {
    use rollsim_core::full::{vector_field_full_with, FieldOptions};
    let scene = scene(1, 0);
    let state = make_full_state(
        &scene,
        Vec2::new(1.0, 0.4),
        Vec2::zeros(),
        0.0,
        Vec3::new(1.0, -0.5, 0.3),
    )
    .unwrap();
    let options = FieldOptions {
        negate_gravity_torque: true,
        ..FieldOptions::default()
    };
    let d = vector_field_full_with(&scene, &state, &options).unwrap();
    let along = |t: f64| FullState {
        rotation: state.rotation * exp_so3(&(d.omega_frame * t)),
        y_body: state.y_body + d.dy_body * t,
        y_world: state.y_world + d.dy_world * t,
        omega: state.omega + d.domega * t,
    };
    let rate = (energy_full(&scene, &along(FD_STEP)) - energy_full(&scene, &along(-FD_STEP)))
        / (2.0 * FD_STEP);
    assert!(rate.abs() > 1e-3, "dE/dt = {rate:e}");
}
