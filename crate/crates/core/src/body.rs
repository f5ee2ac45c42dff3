use crate::geometry::{hat, SurfaceChart};
use crate::{Error, Mat3, Result, Vec3};

/// A rigid body whose center of mass sits at the origin of its own frame.
///
/// `inertia` is the body-frame inertia tensor about the center of mass and
/// `surface` describes the body's boundary in that same frame, outward
/// oriented for a body resting on the outside of its contact surface.
/// Gravity acts along `−k` in the world frame with magnitude `gravity`.
#[derive(Clone, Debug)]
pub struct RigidBody {
    mass: f64,
    inertia: Mat3,
    surface: SurfaceChart,
    gravity: f64,
}

impl RigidBody {
    pub fn new(mass: f64, inertia: Mat3, surface: SurfaceChart, gravity: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass must be finite and positive, got {mass}"
            )));
        }
        if !(gravity.is_finite() && gravity >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gravity must be finite and non-negative, got {gravity}"
            )));
        }
        if inertia.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "inertia has non-finite entries".into(),
            ));
        }
        let asym = (inertia - inertia.transpose()).norm();
        if asym > 1e-12 * inertia.norm() {
            return Err(Error::InvalidParameter("inertia is not symmetric".into()));
        }
        if inertia.cholesky().is_none() {
            return Err(Error::InvalidParameter(
                "inertia is not positive definite".into(),
            ));
        }
        Ok(Self {
            mass,
            inertia,
            surface,
            gravity,
        })
    }

    /// Body with principal moments along the body-frame axes.
    pub fn with_principal_moments(
        mass: f64,
        moments: Vec3,
        surface: SurfaceChart,
        gravity: f64,
    ) -> Result<Self> {
        Self::new(mass, Mat3::from_diagonal(&moments), surface, gravity)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn inertia(&self) -> &Mat3 {
        &self.inertia
    }

    pub fn surface(&self) -> &SurfaceChart {
        &self.surface
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }

    /// Same body under a different gravitational acceleration.
    pub fn with_gravity(&self, gravity: f64) -> Result<Self> {
        Self::new(self.mass, self.inertia, self.surface.clone(), gravity)
    }

    /// Inertia about the body point `s`: `Ĩ = I − m hat(s)²`.
    pub fn augmented_inertia(&self, s: &Vec3) -> Mat3 {
        let k = hat(s);
        self.inertia - k * k * self.mass
    }
}
