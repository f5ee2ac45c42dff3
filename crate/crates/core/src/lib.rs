//! Nonholonomic dynamics of a rigid body rolling without slipping on a fixed
//! surface.
//!
//! The body carries a parametrized surface `M` in its own frame and rolls on a
//! fixed parametrized surface `H` in the world frame. Phase space points are
//! `(A, s, x, Ω)`: the body rotation, the contact point on the body, the
//! contact point in the world, and the body-frame angular velocity. When `H`
//! is the horizontal plane the dynamics close on `(s, Ω)` after quotienting
//! by horizontal rotations and translations.
//!
//! Modules:
//! - [`geometry`]: surface charts, normals, fundamental forms, Weingarten maps.
//! - [`body`]: rigid-body data and the augmented inertia about the contact point.
//! - [`full`]: the general vector field, energy, momentum and constraint residuals.
//! - [`reduced`]: the planar-reduced system in intrinsic and coordinate form.
//! - [`integrate`]: fixed-step Lie-group Runge–Kutta with manifold projection.

// `!(x <= tol)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
mod error;
pub mod full;
pub mod geometry;
pub mod integrate;
pub mod reduced;

pub use body::RigidBody;
pub use error::{ChartRole, Error, Result};
pub use full::{FieldOptions, FullState, FullTangent, Scene};
pub use geometry::{BuiltinSurface, Orientation, SurfaceChart};
pub use integrate::{IntegrationFailure, IntegratorConfig, Trajectory};
pub use reduced::{ReducedState, ReducedTangent};

/// Fixed 3-vectors and matrices used throughout.
pub type Vec2 = nalgebra::Vector2<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat2 = nalgebra::Matrix2<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Mat3x2 = nalgebra::Matrix3x2<f64>;
