//! The rolling system on an arbitrary fixed surface.
//!
//! A phase-space point is `(A, s, x, Ω)` with `A n_M(s) = n_H(x)`. The
//! contact-point velocity solves `Λ ṡ = Ω × n_M` with
//! `Λ = L_M(s) − A⁻¹ L_H(x) A` on `T_sM`, the world contact point follows
//! `ẋ = A ṡ`, the attitude `A⁻¹ Ȧ = hat(Ω)`, and
//!
//! ```text
//! Ĩ Ω̇ = (Ĩ Ω) × Ω + m s × (ṡ × Ω + g A⁻¹k),    Ĩ = I − m hat(s)².
//! ```
//!
//! The energy `½ Ωᵀ Ĩ Ω + m g (x − A s)·k` is a first integral.

use std::ops::{Add, Mul, Sub};

use crate::body::RigidBody;
use crate::geometry::{
    exp_so3, rotation_aligning, singular_values2, LocalGeometry, Orientation, SurfaceChart,
};
use crate::{ChartRole, Error, Mat2, Mat3, Result, Vec2, Vec3};

/// Default bound on the condition number of `Λ` before it counts as singular.
pub const LAMBDA_COND_MAX: f64 = 1e8;

/// A body together with the fixed surface it rolls on.
#[derive(Clone, Debug)]
pub struct Scene {
    pub body: RigidBody,
    pub world: SurfaceChart,
}

impl Scene {
    pub fn new(body: RigidBody, world: SurfaceChart) -> Self {
        Self { body, world }
    }

    /// True when the world is the plane `z = 0` with normal `−k`, i.e. the
    /// body rests on top of a horizontal floor.
    pub fn is_planar(&self) -> bool {
        self.world.is_xy_plane() && self.world.orientation() == Orientation::Negative
    }

    pub fn check_domains(&self, state: &FullState) -> Result<()> {
        if !state.is_finite() {
            return Err(Error::InvalidParameter(
                "state has non-finite entries".into(),
            ));
        }
        if !self.body.surface().contains(&state.y_body) {
            return Err(Error::ChartBoundary {
                role: ChartRole::Body,
                y1: state.y_body[0],
                y2: state.y_body[1],
            });
        }
        if !self.world.contains(&state.y_world) {
            return Err(Error::ChartBoundary {
                role: ChartRole::World,
                y1: state.y_world[0],
                y2: state.y_world[1],
            });
        }
        Ok(())
    }

    fn contact(&self, state: &FullState) -> Result<(LocalGeometry, LocalGeometry)> {
        self.check_domains(state)?;
        let m = self.body.surface().local_geometry(&state.y_body)?;
        let h = self.world.local_geometry(&state.y_world)?;
        Ok((m, h))
    }
}

/// `(A, y_M, y_H, Ω)`: body-to-world rotation, body and world contact
/// coordinates, and body-frame angular velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FullState {
    pub rotation: Mat3,
    pub y_body: Vec2,
    pub y_world: Vec2,
    pub omega: Vec3,
}

impl FullState {
    pub fn is_finite(&self) -> bool {
        self.rotation.iter().all(|v| v.is_finite())
            && self.y_body.iter().all(|v| v.is_finite())
            && self.y_world.iter().all(|v| v.is_finite())
            && self.omega.iter().all(|v| v.is_finite())
    }

    /// Move along `delta` for unit time: `A exp(hat(δΩ_frame))`, additive elsewhere.
    pub fn retract(&self, delta: &FullTangent) -> FullState {
        FullState {
            rotation: self.rotation * exp_so3(&delta.omega_frame),
            y_body: self.y_body + delta.dy_body,
            y_world: self.y_world + delta.dy_world,
            omega: self.omega + delta.domega,
        }
    }
}

/// Time derivative of a [`FullState`]; `omega_frame` is `A⁻¹ Ȧ` unhatted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FullTangent {
    pub omega_frame: Vec3,
    pub dy_body: Vec2,
    pub dy_world: Vec2,
    pub domega: Vec3,
}

impl FullTangent {
    pub fn zero() -> Self {
        Self {
            omega_frame: Vec3::zeros(),
            dy_body: Vec2::zeros(),
            dy_world: Vec2::zeros(),
            domega: Vec3::zeros(),
        }
    }
}

impl Add for FullTangent {
    type Output = FullTangent;
    fn add(self, o: FullTangent) -> FullTangent {
        FullTangent {
            omega_frame: self.omega_frame + o.omega_frame,
            dy_body: self.dy_body + o.dy_body,
            dy_world: self.dy_world + o.dy_world,
            domega: self.domega + o.domega,
        }
    }
}

impl Sub for FullTangent {
    type Output = FullTangent;
    fn sub(self, o: FullTangent) -> FullTangent {
        self + o * -1.0
    }
}

impl Mul<f64> for FullTangent {
    type Output = FullTangent;
    fn mul(self, k: f64) -> FullTangent {
        FullTangent {
            omega_frame: self.omega_frame * k,
            dy_body: self.dy_body * k,
            dy_world: self.dy_world * k,
            domega: self.domega * k,
        }
    }
}

/// Knobs of the vector-field evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldOptions {
    /// Condition-number bound for `Λ` (and the body shape operator in the
    /// reduced system).
    pub lambda_cond_max: f64,
    /// Flips the sign of the gravity torque in `Ω̇`. Only for negative
    /// controls of the energy-invariance check.
    #[doc(hidden)]
    pub negate_gravity_torque: bool,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self {
            lambda_cond_max: LAMBDA_COND_MAX,
            negate_gravity_torque: false,
        }
    }
}

/// `Λ` in the body tangent frame, plus a curvature scale for conditioning.
fn lambda_parts(m: &LocalGeometry, h: &LocalGeometry, a: &Mat3) -> (Mat2, f64) {
    let e = m.frame.basis();
    let body = e.transpose() * m.weingarten * e;
    let world = e.transpose() * (a.transpose() * h.weingarten * a) * e;
    let lam = body - world;
    let scale = [lam, body, world]
        .iter()
        .map(|x| singular_values2(x).0)
        .fold(0.0, f64::max);
    (lam, scale)
}

/// Inverse of a 2×2 operator whose condition number, measured against
/// `scale`, stays below `cond_max`. Returns the condition number on failure.
pub(crate) fn regular_inverse(
    op: &Mat2,
    scale: f64,
    cond_max: f64,
) -> std::result::Result<Mat2, f64> {
    let (_, smin) = singular_values2(op);
    let cond = if smin > 0.0 {
        scale / smin
    } else {
        f64::INFINITY
    };
    if !(cond <= cond_max) {
        return Err(cond);
    }
    op.try_inverse().ok_or(f64::INFINITY)
}

/// Matrix of `Λ = L_M − A⁻¹ L_H A` restricted to `T_sM`, in the orthonormal
/// frame of [`SurfaceChart::tangent_frame`].
pub fn lambda_operator(scene: &Scene, state: &FullState) -> Result<Mat2> {
    let (m, h) = scene.contact(state)?;
    Ok(lambda_parts(&m, &h, &state.rotation).0)
}

pub fn vector_field_full(scene: &Scene, state: &FullState) -> Result<FullTangent> {
    vector_field_full_with(scene, state, &FieldOptions::default())
}

pub fn vector_field_full_with(
    scene: &Scene,
    state: &FullState,
    options: &FieldOptions,
) -> Result<FullTangent> {
    let (m, h) = scene.contact(state)?;
    let a = &state.rotation;
    let omega = &state.omega;
    let n_body = m.normal();

    let (lam, scale) = lambda_parts(&m, &h, a);
    let lam_inv = regular_inverse(&lam, scale, options.lambda_cond_max)
        .map_err(|cond| Error::SingularLambda { cond })?;
    let c = lam_inv * m.frame.components(&omega.cross(&n_body));
    let s_dot = m.frame.ambient(&c);
    let dy_body = m.frame.chart_velocity(&c);
    let dy_world = h.chart_velocity_of(&(a * s_dot));

    let body = &scene.body;
    let s = m.point;
    let mass = body.mass();
    let mut up = a.transpose() * Vec3::z() * body.gravity();
    if options.negate_gravity_torque {
        up = -up;
    }
    let inertia = body.augmented_inertia(&s);
    let torque = (inertia * omega).cross(omega) + s.cross(&(s_dot.cross(omega) + up)) * mass;
    let domega = solve_spd3(&inertia, &torque)?;

    Ok(FullTangent {
        omega_frame: *omega,
        dy_body,
        dy_world,
        domega,
    })
}

pub(crate) fn solve_spd3(m: &Mat3, rhs: &Vec3) -> Result<Vec3> {
    m.cholesky()
        .map(|c| c.solve(rhs))
        .ok_or_else(|| Error::InvalidParameter("augmented inertia is not positive definite".into()))
}

/// `½ Ωᵀ Ĩ Ω + m g (x − A s)·k`.
pub fn energy_full(scene: &Scene, state: &FullState) -> f64 {
    let body = &scene.body;
    let s = body.surface().eval(&state.y_body);
    let x = scene.world.eval(&state.y_world);
    let kinetic = 0.5 * state.omega.dot(&(body.augmented_inertia(&s) * state.omega));
    kinetic + body.mass() * body.gravity() * (x - state.rotation * s)[2]
}

/// Lagrangian `½ ΩᵀIΩ + ½ m |v|² − m g a·k` with the rolling substitution
/// `v = −Ω × s`, `a = x − A s`.
pub fn lagrangian_on_constraint(scene: &Scene, state: &FullState) -> f64 {
    let body = &scene.body;
    let s = body.surface().eval(&state.y_body);
    let x = scene.world.eval(&state.y_world);
    let omega = &state.omega;
    0.5 * omega.dot(&(body.inertia() * omega)) + 0.5 * body.mass() * omega.cross(&s).norm_squared()
        - body.mass() * body.gravity() * (x - state.rotation * s)[2]
}

/// Violation of the tangent-space conditions
/// `Ω × n_M = L_M ṡ − A⁻¹ L_H ẋ` and `ẋ = A ṡ`, with `ṡ`, `ẋ` rebuilt from
/// the chart velocities. Returns the larger of the two norms.
pub fn tangent_membership_residual(
    scene: &Scene,
    state: &FullState,
    tangent: &FullTangent,
) -> Result<f64> {
    let (m, h) = scene.contact(state)?;
    let a = &state.rotation;
    let s_dot = m.jacobian * tangent.dy_body;
    let x_dot = h.jacobian * tangent.dy_world;
    let lhs = tangent.omega_frame.cross(&m.normal());
    let rhs = m.weingarten * s_dot - a.transpose() * (h.weingarten * x_dot);
    Ok((lhs - rhs).norm().max((x_dot - a * s_dot).norm()))
}

/// Infinitesimal generator of the planar symmetry group: a rotation rate
/// about the vertical and a horizontal translation velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarGenerator {
    pub rotation: f64,
    pub translation: Vec2,
}

/// Momentum paired with a planar generator,
/// `(A Ĩ Ω − m x × (Ω × s))·(ξ_r k) − m A(Ω × s)·ξ_a`.
pub fn momentum_j(scene: &Scene, state: &FullState, xi: &PlanarGenerator) -> Result<f64> {
    if !scene.is_planar() {
        return Err(Error::NotPlanarScene);
    }
    let body = &scene.body;
    let a = &state.rotation;
    let s = body.surface().eval(&state.y_body);
    let x = scene.world.eval(&state.y_world);
    let omega_s = state.omega.cross(&s);
    let angular = a * (body.augmented_inertia(&s) * state.omega) - x.cross(&omega_s) * body.mass();
    let xi_a = Vec3::new(xi.translation[0], xi.translation[1], 0.0);
    Ok(angular[2] * xi.rotation - (a * omega_s).dot(&xi_a) * body.mass())
}

/// A state on the contact manifold: `A` rotates `n_M(s)` onto `n_H(x)`, with
/// `theta` selecting the remaining rotation about the contact normal.
pub fn make_full_state(
    scene: &Scene,
    y_body: Vec2,
    y_world: Vec2,
    theta: f64,
    omega: Vec3,
) -> Result<FullState> {
    let n_body = scene.body.surface().normal(&y_body)?;
    let n_world = scene.world.normal(&y_world)?;
    Ok(FullState {
        rotation: rotation_aligning(&n_body, &n_world, theta),
        y_body,
        y_world,
        omega,
    })
}

/// `(‖AᵀA − I‖_F, ‖A n_M(s) − n_H(x)‖)`.
pub fn constraint_residuals(scene: &Scene, state: &FullState) -> Result<(f64, f64)> {
    let a = &state.rotation;
    let so3 = (a.transpose() * a - Mat3::identity()).norm();
    let n_body = scene.body.surface().normal(&state.y_body)?;
    let n_world = scene.world.normal(&state.y_world)?;
    Ok((so3, (a * n_body - n_world).norm()))
}
