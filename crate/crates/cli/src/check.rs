//! The `check` command: seeded random spot checks of the vector fields,
//! reported as one PASS/FAIL line per invariant family.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rollsim_core::full::{
    energy_full, make_full_state, tangent_membership_residual, vector_field_full_with,
    FieldOptions, FullState, Scene,
};
use rollsim_core::geometry::exp_so3;
use rollsim_core::integrate::{integrate, FullSystem};
use rollsim_core::reduced::{
    embed_reduced_in_full, energy_reduced, vector_field_reduced_coords, vector_field_reduced_with,
    ReducedState,
};
use rollsim_core::{IntegratorConfig, Mat3, Orientation, RigidBody, SurfaceChart, Vec2, Vec3};

pub const DEFAULT_SEED: u64 = 0;
/// Random states per family.
pub const CASES: usize = 250;
const FD_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Flip the gravity torque in `Ω̇`. Only for negative controls.
    pub negate_gravity_torque: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    Within(f64, f64),
}

impl Bound {
    fn holds(self, x: f64) -> bool {
        match self {
            Bound::AtMost(tol) => x <= tol,
            Bound::Within(lo, hi) => (lo..=hi).contains(&x),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(tol) => write!(f, "<= {tol:e}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

/// Outcome of one invariant family.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub cases: usize,
    /// Worst measured value (NaN is treated as a failure).
    pub worst: f64,
    pub bound: Bound,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.bound.holds(self.worst)
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {:<26} worst={:.6e} bound {} cases={}",
            self.name, self.worst, self.bound, self.cases
        )
    }
}

/// Text report, one line per family.
pub fn report(lines: &[CheckLine]) -> String {
    lines.iter().map(|l| format!("{l}\n")).collect()
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| {
        if v.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(v)
        }
    })
}

pub fn sphere_body() -> RigidBody {
    let surface = SurfaceChart::sphere(0.6, Orientation::Positive).expect("valid radius");
    RigidBody::with_principal_moments(2.0, Vec3::new(0.30, 0.25, 0.20), surface, 9.81)
        .expect("valid body")
}

pub fn ellipsoid_body() -> RigidBody {
    let surface =
        SurfaceChart::ellipsoid(0.5, 0.7, 1.0, Orientation::Positive).expect("valid axes");
    let inertia = Mat3::new(0.40, 0.02, -0.01, 0.02, 0.35, 0.03, -0.01, 0.03, 0.20);
    RigidBody::new(1.3, inertia, surface, 9.81).expect("valid body")
}

fn scenes() -> Vec<Scene> {
    let worlds = [
        SurfaceChart::plane(Orientation::Negative),
        SurfaceChart::sphere(3.0, Orientation::Negative).expect("valid radius"),
    ];
    let mut out = Vec::new();
    for body in [sphere_body(), ellipsoid_body()] {
        for world in &worlds {
            out.push(Scene::new(body.clone(), world.clone()));
        }
    }
    out
}

fn polar(rng: &mut ChaCha8Rng) -> Vec2 {
    Vec2::new(rng.gen_range(0.2..2.94), rng.gen_range(-3.1..3.1))
}

fn omega(rng: &mut ChaCha8Rng) -> Vec3 {
    Vec3::new(
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
    )
}

fn random_full_state(scene: &Scene, rng: &mut ChaCha8Rng) -> FullState {
    let y_body = polar(rng);
    let y_world = if scene.is_planar() {
        Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))
    } else {
        polar(rng)
    };
    let theta = rng.gen_range(-3.2..3.2);
    make_full_state(scene, y_body, y_world, theta, omega(rng)).expect("sampled away from poles")
}

/// `|dE/dt| / (1 + |E|)` by central differences along the field.
fn full_energy_rate(scene: &Scene, state: &FullState, options: &FieldOptions) -> f64 {
    let Ok(d) = vector_field_full_with(scene, state, options) else {
        return f64::NAN;
    };
    let along = |t: f64| FullState {
        rotation: state.rotation * exp_so3(&(d.omega_frame * t)),
        y_body: state.y_body + d.dy_body * t,
        y_world: state.y_world + d.dy_world * t,
        omega: state.omega + d.domega * t,
    };
    let rate = (energy_full(scene, &along(FD_STEP)) - energy_full(scene, &along(-FD_STEP)))
        / (2.0 * FD_STEP);
    rate.abs() / (1.0 + energy_full(scene, state).abs())
}

fn reduced_energy_rate(body: &RigidBody, state: &ReducedState, options: &FieldOptions) -> f64 {
    let Ok(d) = vector_field_reduced_with(body, state, options) else {
        return f64::NAN;
    };
    let e = |t: f64| {
        energy_reduced(
            body,
            &ReducedState {
                y: state.y + d.dy * t,
                omega: state.omega + d.domega * t,
            },
        )
        .unwrap_or(f64::NAN)
    };
    ((e(FD_STEP) - e(-FD_STEP)) / (2.0 * FD_STEP)).abs() / (1.0 + e(0.0).abs())
}

/// Largest `|W v + dn/dt|` over unit tangent directions `v` at random points
/// of each built-in chart, with `dn/dt` by central differences.
fn shape_operator_error(rng: &mut ChaCha8Rng, cases: usize) -> f64 {
    let charts = [
        (SurfaceChart::plane(Orientation::Negative), 5.0),
        (
            SurfaceChart::sphere(0.7, Orientation::Positive).expect("valid"),
            0.0,
        ),
        (
            SurfaceChart::ellipsoid(0.5, 0.7, 1.0, Orientation::Negative).expect("valid"),
            0.0,
        ),
        (
            SurfaceChart::paraboloid(0.8, Orientation::Positive).expect("valid"),
            2.0,
        ),
    ];
    let h = 1e-5;
    let mut errors = Vec::new();
    for (chart, extent) in &charts {
        for _ in 0..cases {
            let y = if *extent > 0.0 {
                Vec2::new(
                    rng.gen_range(-extent..*extent),
                    rng.gen_range(-extent..*extent),
                )
            } else {
                polar(rng)
            };
            let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let c = Vec2::new(angle.cos(), angle.sin());
            let v = chart.jacobian(&y) * c;
            let err = (|| {
                let w = chart.weingarten_ambient(&y).ok()?;
                let dn = (chart.normal(&(y + c * h)).ok()? - chart.normal(&(y - c * h)).ok()?)
                    / (2.0 * h);
                Some((w * v + dn).norm() / v.norm())
            })();
            errors.push(err.unwrap_or(f64::NAN));
        }
    }
    worst(errors)
}

/// Chaplygin-type ball on the plane used by the order check.
pub fn order_scene() -> Scene {
    let surface = SurfaceChart::sphere(0.5, Orientation::Positive).expect("valid radius");
    let body = RigidBody::with_principal_moments(1.0, Vec3::new(0.05, 0.08, 0.11), surface, 9.81)
        .expect("valid body");
    Scene::new(body, SurfaceChart::plane(Orientation::Negative))
}

/// Energy drift at `h` divided by the drift at `h/2` on the order scene.
pub fn energy_drift_ratio(options: &FieldOptions) -> f64 {
    let scene = order_scene();
    let s0 = make_full_state(
        &scene,
        Vec2::new(FRAC_PI_2, 0.0),
        Vec2::zeros(),
        0.0,
        Vec3::new(2.0, -1.0, 0.5),
    )
    .expect("regular state");
    let drift = |h: f64| {
        let cfg = IntegratorConfig {
            h,
            t_final: 2.0,
            sample_stride: 1,
            ..IntegratorConfig::default()
        };
        let system = FullSystem::new(&scene, *options);
        match integrate(&system, s0, &cfg) {
            Ok(traj) => traj.relative_energy_drift(),
            Err(_) => f64::NAN,
        }
    };
    drift(0.02) / drift(0.01)
}

/// Run every family. The same seed always gives the same lines.
pub fn run_checks(options: &CheckOptions) -> Vec<CheckLine> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let field = FieldOptions {
        negate_gravity_torque: options.negate_gravity_torque,
        ..FieldOptions::default()
    };
    let scenes = scenes();
    let full_states: Vec<(usize, FullState)> = (0..CASES)
        .map(|i| {
            let k = i % scenes.len();
            (k, random_full_state(&scenes[k], &mut rng))
        })
        .collect();
    let ellipsoid = ellipsoid_body();
    let reduced_states: Vec<ReducedState> = (0..CASES)
        .map(|_| ReducedState {
            y: polar(&mut rng),
            omega: omega(&mut rng),
        })
        .collect();

    let mut lines = Vec::new();
    lines.push(CheckLine {
        name: "energy-invariance-full",
        cases: CASES,
        worst: worst(
            full_states
                .iter()
                .map(|(k, s)| full_energy_rate(&scenes[*k], s, &field)),
        ),
        bound: Bound::AtMost(1e-6),
    });
    lines.push(CheckLine {
        name: "energy-invariance-reduced",
        cases: CASES,
        worst: worst(
            reduced_states
                .iter()
                .map(|s| reduced_energy_rate(&ellipsoid, s, &field)),
        ),
        bound: Bound::AtMost(1e-6),
    });
    lines.push(CheckLine {
        name: "tangent-membership",
        cases: CASES,
        worst: worst(full_states.iter().map(|(k, s)| {
            let scene = &scenes[*k];
            vector_field_full_with(scene, s, &field)
                .and_then(|d| tangent_membership_residual(scene, s, &d))
                .map_or(f64::NAN, |r| r / (1.0 + s.omega.norm()))
        })),
        bound: Bound::AtMost(1e-10),
    });
    lines.push(CheckLine {
        name: "shape-operator-oracle",
        cases: 4 * 100,
        worst: shape_operator_error(&mut rng, 100),
        bound: Bound::AtMost(1e-6),
    });
    lines.push(CheckLine {
        name: "intrinsic-vs-coordinate",
        cases: CASES,
        worst: worst(reduced_states.iter().map(|s| {
            match (
                vector_field_reduced_with(&ellipsoid, s, &field),
                vector_field_reduced_coords(&ellipsoid, s),
            ) {
                (Ok(a), Ok(b)) if !options.negate_gravity_torque => {
                    let scale = 1.0 + a.dy.norm() + a.domega.norm();
                    ((a.dy - b.dy).norm() + (a.domega - b.domega).norm()) / scale
                }
                (Ok(a), Ok(b)) => {
                    // the coordinate form has no negation hook; compare kinematics only
                    (a.dy - b.dy).norm() / (1.0 + a.dy.norm())
                }
                _ => f64::NAN,
            }
        })),
        bound: Bound::AtMost(1e-10),
    });
    lines.push(CheckLine {
        name: "reduction-commutes",
        cases: CASES,
        worst: worst(reduced_states.iter().enumerate().map(|(i, s)| {
            let scene = &scenes[if i % 2 == 0 { 0 } else { 2 }];
            let theta = (i as f64 * 0.37).sin() * 3.0;
            let x0 = Vec2::new((i as f64).cos(), (i as f64 * 1.3).sin()) * 4.0;
            let full = match embed_reduced_in_full(scene, s, theta, x0) {
                Ok(f) => f,
                Err(_) => return f64::NAN,
            };
            match (
                vector_field_full_with(scene, &full, &field),
                vector_field_reduced_with(&scene.body, s, &field),
            ) {
                (Ok(df), Ok(dr)) => {
                    let scale = 1.0 + dr.dy.norm() + dr.domega.norm();
                    ((df.dy_body - dr.dy).norm() + (df.domega - dr.domega).norm()) / scale
                }
                _ => f64::NAN,
            }
        })),
        bound: Bound::AtMost(1e-9),
    });
    lines.push(CheckLine {
        name: "integrator-order",
        cases: 2,
        worst: energy_drift_ratio(&field),
        bound: Bound::Within(12.0, 20.0),
    });
    lines
}
