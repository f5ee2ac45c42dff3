//! Integrated trajectories against closed-form motions.

use rollsim_core::full::{make_full_state, FullState, Scene};
use rollsim_core::integrate::{integrate, FullSystem, ReducedSystem};
use rollsim_core::reduced::ReducedState;
use rollsim_core::{IntegratorConfig, Mat3, Orientation, RigidBody, SurfaceChart, Vec2, Vec3};
use std::f64::consts::FRAC_PI_2;

fn ball_on_plane(r: f64) -> Scene {
    let m = 1.5;
    let surface = SurfaceChart::sphere(r, Orientation::Positive).unwrap();
    let body = RigidBody::new(m, Mat3::identity() * (0.4 * m * r * r), surface, 9.81).unwrap();
    Scene::new(body, SurfaceChart::plane(Orientation::Negative))
}

#[test]
fn uniform_ball_rolls_along_a_straight_line_at_constant_speed() {
    let r = 0.5;
    let scene = ball_on_plane(r);
    let omega = Vec3::new(0.4, -0.3, 1.2);
    let s0 = make_full_state(&scene, Vec2::new(1.1, 0.3), Vec2::zeros(), 0.7, omega).unwrap();
    let cfg = IntegratorConfig {
        h: 1e-3,
        t_final: 2.0,
        sample_stride: 100,
        ..IntegratorConfig::default()
    };
    let traj = integrate(&FullSystem::new(&scene, cfg.field_options()), s0, &cfg).unwrap();

    // world angular velocity is constant; the contact moves with the center, at ω × (r k)
    let w = s0.rotation * omega;
    let v = w.cross(&Vec3::z()) * r;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let expected = Vec2::new(v[0], v[1]) * *t;
        assert!(
            (s.y_world - expected).norm() < 1e-10,
            "t = {t}: {:?}",
            s.y_world
        );
        assert!((s.omega - omega).norm() < 1e-12);
        assert!((s.rotation * s.omega - w).norm() < 1e-10);
    }
    assert!(traj.relative_energy_drift() < 1e-12);
}

#[test]
fn reduced_and_full_runs_stay_together() {
    let surface = SurfaceChart::ellipsoid(0.5, 0.7, 1.0, Orientation::Positive).unwrap();
    let body =
        RigidBody::with_principal_moments(1.3, Vec3::new(0.4, 0.35, 0.2), surface, 9.81).unwrap();
    let scene = Scene::new(body.clone(), SurfaceChart::plane(Orientation::Negative));
    let reduced0 = ReducedState {
        y: Vec2::new(1.3, 0.4),
        omega: Vec3::new(0.5, -1.0, 0.8),
    };
    let full0 = make_full_state(
        &scene,
        reduced0.y,
        Vec2::new(0.3, -0.2),
        0.9,
        reduced0.omega,
    )
    .unwrap();
    let cfg = IntegratorConfig {
        h: 1e-3,
        t_final: 1.0,
        sample_stride: 50,
        ..IntegratorConfig::default()
    };
    let full = integrate(&FullSystem::new(&scene, cfg.field_options()), full0, &cfg).unwrap();
    let reduced = integrate(
        &ReducedSystem::new(&body, cfg.field_options()),
        reduced0,
        &cfg,
    )
    .unwrap();
    assert_eq!(full.len(), reduced.len());
    for (f, r) in full.states.iter().zip(&reduced.states) {
        assert!((f.y_body - r.y).norm() < 1e-9);
        assert!((f.omega - r.omega).norm() < 1e-9);
    }
    for (ef, er) in full.energy.iter().zip(&reduced.energy) {
        assert!((ef - er).abs() < 1e-9);
    }
}

#[test]
fn projected_runs_keep_the_constraints() {
    let surface = SurfaceChart::ellipsoid(0.4, 0.5, 0.6, Orientation::Positive).unwrap();
    let body =
        RigidBody::with_principal_moments(1.0, Vec3::new(0.1, 0.08, 0.06), surface, 9.81).unwrap();
    let scene = Scene::new(
        body,
        SurfaceChart::sphere(2.0, Orientation::Negative).unwrap(),
    );
    let s0: FullState = make_full_state(
        &scene,
        Vec2::new(1.0, 0.5),
        Vec2::new(FRAC_PI_2 - 0.6, 0.2),
        0.3,
        Vec3::new(1.0, -0.5, 0.2),
    )
    .unwrap();
    let cfg = IntegratorConfig {
        h: 2e-3,
        t_final: 1.0,
        sample_stride: 25,
        ..IntegratorConfig::default()
    };
    let traj = integrate(&FullSystem::new(&scene, cfg.field_options()), s0, &cfg).unwrap();
    assert!(traj.so3_residual.iter().all(|&r| r <= 1e-10));
    assert!(traj.contact_residual.iter().all(|&r| r <= 1e-10));
    assert!(traj.relative_energy_drift() < 1e-8);
}
