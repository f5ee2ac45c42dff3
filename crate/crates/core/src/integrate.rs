//! Fixed-step integration of the rolling systems.
//!
//! Steps use the fourth-order Runge–Kutta–Munthe-Kaas scheme: the Euclidean
//! components follow classical RK4, while the attitude is advanced
//! multiplicatively, `A ← A exp(hat(δ))`, with the stage increments in the
//! body frame corrected by the commutator terms that keep the scheme fourth
//! order on SO(3). After each step the state can be projected back onto
//! `AᵀA = I` and the contact condition `A n_M(s) = n_H(x)`.

use std::fmt;
use std::ops::{Add, Mul};

use crate::body::RigidBody;
use crate::full::{
    constraint_residuals, energy_full, regular_inverse, vector_field_full_with, FieldOptions,
    FullState, FullTangent, Scene,
};
use crate::geometry::{orthonormalize, rotation_aligning, singular_values2};
use crate::reduced::{energy_reduced, vector_field_reduced_with, ReducedState, ReducedTangent};
use crate::{Error, Result};

/// Contact residual the projection must reach.
pub const PROJECTION_TOL: f64 = 1e-10;
/// Contact residual above which projection is not attempted.
pub const PROJECTION_MAX_RESIDUAL: f64 = 0.1;
/// Newton iterations allowed when moving the world contact point.
pub const PROJECTION_MAX_ITERS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    /// Step size in seconds.
    pub h: f64,
    /// Final time in seconds, rounded to a whole number of steps.
    pub t_final: f64,
    /// Record every `sample_stride`-th step.
    pub sample_stride: usize,
    pub project_rotation: bool,
    pub project_contact: bool,
    pub lambda_cond_max: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            h: 1e-3,
            t_final: 1.0,
            sample_stride: 1,
            project_rotation: true,
            project_contact: true,
            lambda_cond_max: crate::full::LAMBDA_COND_MAX,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.h.is_finite() && self.h > 0.0) {
            return bad(format!("step size h must be positive, got {}", self.h));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return bad(format!(
                "final time T must be non-negative, got {}",
                self.t_final
            ));
        }
        if self.t_final > 0.0 && self.h > self.t_final {
            return bad(format!(
                "step size h = {} exceeds T = {}",
                self.h, self.t_final
            ));
        }
        if self.t_final / self.h > 1e9 {
            return bad("more than 1e9 steps requested".into());
        }
        if self.sample_stride == 0 {
            return bad("sample_stride must be at least 1".into());
        }
        if !(self.lambda_cond_max > 1.0) {
            return bad(format!(
                "lambda_cond_max must exceed 1, got {}",
                self.lambda_cond_max
            ));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.h).round() as usize
    }

    pub fn field_options(&self) -> FieldOptions {
        FieldOptions {
            lambda_cond_max: self.lambda_cond_max,
            ..FieldOptions::default()
        }
    }
}

/// Tangent vectors that can be combined linearly, with a Lie bracket acting
/// on their rotational part.
pub trait LieTangent: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    /// Bracket of the rotational components (`a × b` for body angular
    /// velocities); zero on vector-space components.
    fn bracket(&self, other: &Self) -> Self;
}

impl LieTangent for FullTangent {
    fn bracket(&self, other: &Self) -> Self {
        FullTangent {
            omega_frame: self.omega_frame.cross(&other.omega_frame),
            ..FullTangent::zero()
        }
    }
}

impl LieTangent for ReducedTangent {
    fn bracket(&self, _other: &Self) -> Self {
        *self * 0.0
    }
}

/// A vector field on a state space with a retraction.
pub trait System {
    type State: Copy + fmt::Debug;
    type Tangent: LieTangent;

    fn field(&self, state: &Self::State) -> Result<Self::Tangent>;
    fn retract(&self, state: &Self::State, delta: &Self::Tangent) -> Self::State;
    /// Domain and finiteness check of a state.
    fn check(&self, state: &Self::State) -> Result<()>;
    fn energy(&self, state: &Self::State) -> f64;
    /// `(so3, contact)` residuals, for systems that have them.
    fn residuals(&self, state: &Self::State) -> Option<(f64, f64)>;
    fn project(&self, state: &Self::State, config: &IntegratorConfig) -> Result<Self::State>;
}

/// The general system on `SO(3) × M × H × R³`.
#[derive(Clone, Copy, Debug)]
pub struct FullSystem<'a> {
    pub scene: &'a Scene,
    pub options: FieldOptions,
}

impl<'a> FullSystem<'a> {
    pub fn new(scene: &'a Scene, options: FieldOptions) -> Self {
        Self { scene, options }
    }
}

impl System for FullSystem<'_> {
    type State = FullState;
    type Tangent = FullTangent;

    fn field(&self, state: &FullState) -> Result<FullTangent> {
        vector_field_full_with(self.scene, state, &self.options)
    }

    fn retract(&self, state: &FullState, delta: &FullTangent) -> FullState {
        state.retract(delta)
    }

    fn check(&self, state: &FullState) -> Result<()> {
        self.scene.check_domains(state)
    }

    fn energy(&self, state: &FullState) -> f64 {
        energy_full(self.scene, state)
    }

    fn residuals(&self, state: &FullState) -> Option<(f64, f64)> {
        Some(constraint_residuals(self.scene, state).unwrap_or((f64::NAN, f64::NAN)))
    }

    fn project(&self, state: &FullState, config: &IntegratorConfig) -> Result<FullState> {
        project_state(self.scene, state, config)
    }
}

/// The planar-reduced system on `M × R³`.
#[derive(Clone, Copy, Debug)]
pub struct ReducedSystem<'a> {
    pub body: &'a RigidBody,
    pub options: FieldOptions,
}

impl<'a> ReducedSystem<'a> {
    pub fn new(body: &'a RigidBody, options: FieldOptions) -> Self {
        Self { body, options }
    }
}

impl System for ReducedSystem<'_> {
    type State = ReducedState;
    type Tangent = ReducedTangent;

    fn field(&self, state: &ReducedState) -> Result<ReducedTangent> {
        vector_field_reduced_with(self.body, state, &self.options)
    }

    fn retract(&self, state: &ReducedState, delta: &ReducedTangent) -> ReducedState {
        state.retract(delta)
    }

    fn check(&self, state: &ReducedState) -> Result<()> {
        if self.body.surface().contains(&state.y) && state.omega.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::ChartBoundary {
                role: crate::ChartRole::Body,
                y1: state.y[0],
                y2: state.y[1],
            })
        }
    }

    fn energy(&self, state: &ReducedState) -> f64 {
        energy_reduced(self.body, state).unwrap_or(f64::NAN)
    }

    fn residuals(&self, _state: &ReducedState) -> Option<(f64, f64)> {
        None
    }

    fn project(&self, state: &ReducedState, _config: &IntegratorConfig) -> Result<ReducedState> {
        Ok(*state)
    }
}

/// One Runge–Kutta–Munthe-Kaas step of order four.
pub fn rk4_step<S: System>(system: &S, state: &S::State, h: f64) -> Result<S::State> {
    let k1 = system.field(state)?;
    let k2 = system.field(&system.retract(state, &(k1 * (0.5 * h))))?;
    let u3 = k2 * (0.5 * h) + k1.bracket(&k2) * (h * h / 8.0);
    let k3 = system.field(&system.retract(state, &u3))?;
    let k4 = system.field(&system.retract(state, &(k3 * h)))?;
    let sum = k1 + k2 * 2.0 + k3 * 2.0 + k4;
    let u = sum * (h / 6.0) + k1.bracket(&k4) * (h * h / 12.0);
    Ok(system.retract(state, &u))
}

/// Re-impose `AᵀA = I` (Gram–Schmidt) and the contact condition.
///
/// The contact condition is restored by Newton steps on the world contact
/// coordinates when the world surface is curved at the contact. Where it is
/// flat, moving the contact cannot turn the world normal, so the attitude is
/// rotated minimally onto it instead.
pub fn project_state(
    scene: &Scene,
    state: &FullState,
    config: &IntegratorConfig,
) -> Result<FullState> {
    let mut out = *state;
    if config.project_rotation {
        out.rotation = orthonormalize(&out.rotation);
    }
    if config.project_contact {
        out = project_contact(scene, &out)?;
    }
    Ok(out)
}

fn project_contact(scene: &Scene, state: &FullState) -> Result<FullState> {
    let n_body = scene.body.surface().normal(&state.y_body)?;
    let target = state.rotation * n_body;
    let residual =
        |y: &crate::Vec2| -> Result<f64> { Ok((target - scene.world.normal(y)?).norm()) };

    let mut out = *state;
    let mut r = residual(&out.y_world)?;
    if r <= 1e-13 {
        return Ok(out);
    }
    if !(r < PROJECTION_MAX_RESIDUAL) {
        return Err(Error::ProjectionDiverged { residual: r });
    }

    let mut rotate = false;
    for _ in 0..PROJECTION_MAX_ITERS {
        let geo = scene.world.local_geometry(&out.y_world)?;
        let f = geo.frame.components(&(target - geo.normal()));
        let e = geo.frame.basis();
        let jac = e.transpose() * geo.weingarten * geo.jacobian;
        let scale = singular_values2(&jac).0;
        let inv = match regular_inverse(&jac, scale, 1e8) {
            Ok(inv) if scale > 1e-12 => inv,
            _ => {
                rotate = true;
                break;
            }
        };
        out.y_world -= inv * f;
        if !scene.world.contains(&out.y_world) {
            return Err(Error::ChartBoundary {
                role: crate::ChartRole::World,
                y1: out.y_world[0],
                y2: out.y_world[1],
            });
        }
        r = residual(&out.y_world)?;
        if r <= 1e-13 {
            break;
        }
    }
    if rotate {
        let n_world = scene.world.normal(&out.y_world)?;
        out.rotation = rotation_aligning(&target, &n_world, 0.0) * out.rotation;
        r = (out.rotation * n_body - n_world).norm();
    }
    if !(r <= PROJECTION_TOL) {
        return Err(Error::ProjectionDiverged { residual: r });
    }
    Ok(out)
}

/// Sampled states with their diagnostics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub energy: Vec<f64>,
    /// Empty for systems without an attitude.
    pub so3_residual: Vec<f64>,
    /// Empty for systems without a contact constraint.
    pub contact_residual: Vec<f64>,
}

impl<S> Trajectory<S> {
    pub fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            energy: Vec::new(),
            so3_residual: Vec::new(),
            contact_residual: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn record<Sys: System<State = S>>(&mut self, system: &Sys, t: f64, state: S) {
        self.times.push(t);
        self.energy.push(system.energy(&state));
        if let Some((so3, contact)) = system.residuals(&state) {
            self.so3_residual.push(so3);
            self.contact_residual.push(contact);
        }
        self.states.push(state);
    }

    /// Largest `|E(t) − E(0)| / |E(0)|` over the samples (absolute when `E(0) = 0`).
    pub fn relative_energy_drift(&self) -> f64 {
        let Some(&e0) = self.energy.first() else {
            return 0.0;
        };
        let scale = if e0 == 0.0 { 1.0 } else { e0.abs() };
        self.energy
            .iter()
            .map(|e| (e - e0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// An integration that stopped early. `time` is when the failing step
/// started, or when the state that left the domain was reached.
#[derive(Clone, Debug)]
pub struct IntegrationFailure<S> {
    pub time: f64,
    pub error: Error,
    pub partial: Trajectory<S>,
}

impl<S> fmt::Display for IntegrationFailure<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at t = {}", self.error, self.time)
    }
}

impl<S: fmt::Debug> std::error::Error for IntegrationFailure<S> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Integrate from `state0` for `config.steps()` steps, projecting after each
/// step as configured and sampling every `sample_stride` steps (the initial
/// state is always the first sample).
#[allow(clippy::result_large_err)]
pub fn integrate<S: System>(
    system: &S,
    state0: S::State,
    config: &IntegratorConfig,
) -> std::result::Result<Trajectory<S::State>, IntegrationFailure<S::State>> {
    let mut traj = Trajectory::new();
    let fail = |time: f64, error: Error, partial: Trajectory<S::State>| IntegrationFailure {
        time,
        error,
        partial,
    };
    if let Err(e) = config.validate().and_then(|_| system.check(&state0)) {
        return Err(fail(0.0, e, traj));
    }
    traj.record(system, 0.0, state0);

    let h = config.h;
    let mut state = state0;
    for k in 0..config.steps() {
        let t = k as f64 * h;
        let t_next = (k + 1) as f64 * h;
        state = match rk4_step(system, &state, h) {
            Ok(next) => next,
            Err(e) => return Err(fail(t, e, traj)),
        };
        if let Err(e) = system
            .check(&state)
            .and_then(|_| system.project(&state, config))
            .map(|projected| state = projected)
        {
            return Err(fail(t_next, e, traj));
        }
        if (k + 1) % config.sample_stride == 0 {
            traj.record(system, t_next, state);
        }
    }
    Ok(traj)
}
