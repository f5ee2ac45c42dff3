//! Parametrized oriented surfaces and their extrinsic curvature.
//!
//! A [`SurfaceChart`] is a single chart `y ↦ s(y) ∈ R³` over an open rectangle,
//! together with an orientation sign applied to the cross-product normal
//! `∂₁s × ∂₂s`. Normals are always unit length. The Weingarten map `W` follows
//! the convention `W ṡ = −d n/dt` along curves on the surface, so an outward
//! oriented unit sphere has `W = −Id` on its tangent planes.

mod rotation;
mod surfaces;

use std::fmt;
use std::sync::Arc;

pub use rotation::{exp_so3, hat, orthonormalize, rotation_aligning};
pub use surfaces::{BuiltinSurface, Ellipsoid, Paraboloid, Plane};

use crate::{Error, Mat2, Mat3, Mat3x2, Result, Vec2, Vec3};

/// Below this the unnormalized normal `|∂₁s × ∂₂s|` is treated as degenerate.
pub const DEGENERATE_NORMAL: f64 = 1e-12;
/// Below this `det g` is treated as degenerate.
pub const DEGENERATE_METRIC: f64 = 1e-18;

/// Open coordinate rectangle `(min₁, max₁) × (min₂, max₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub min: Vec2,
    pub max: Vec2,
}

impl Domain {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        Self {
            min: Vec2::from(min),
            max: Vec2::from(max),
        }
    }

    /// Strict interior test; NaN coordinates are outside.
    pub fn contains(&self, y: &Vec2) -> bool {
        (0..2).all(|i| y[i] > self.min[i] && y[i] < self.max[i])
    }
}

/// The map `y ↦ s(y)` and its first two derivatives.
///
/// Implementations must be smooth immersions on their domain with symmetric
/// Hessians. `hessian(y)[k]` is the 2×2 matrix `∂²s_k/∂y^a∂y^b` of ambient
/// component `k`.
pub trait Parametrization: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;
    fn eval(&self, y: &Vec2) -> Vec3;
    fn jacobian(&self, y: &Vec2) -> Mat3x2;
    fn hessian(&self, y: &Vec2) -> [Mat2; 3];
    fn domain(&self) -> Domain;

    /// True only for the chart `s(y) = (y₁, y₂, 0)`.
    fn is_xy_plane(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Orientation::Positive),
            -1 => Some(Orientation::Negative),
            _ => None,
        }
    }
}

/// Orthonormal frame of the tangent plane at a chart point.
///
/// `e1` is the normalized first coordinate direction and `(e1, e2, n)` is
/// right handed, so for a negatively oriented chart `e2` points against the
/// second coordinate direction. `chart_to_frame` maps chart velocities `ẏ` to
/// the frame components of `J ẏ`; it is upper triangular.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentFrame {
    pub e1: Vec3,
    pub e2: Vec3,
    pub n: Vec3,
    pub chart_to_frame: Mat2,
}

impl TangentFrame {
    /// Frame components `(e1·v, e2·v)` of an ambient vector.
    pub fn components(&self, v: &Vec3) -> Vec2 {
        Vec2::new(self.e1.dot(v), self.e2.dot(v))
    }

    /// Ambient vector with the given frame components.
    pub fn ambient(&self, c: &Vec2) -> Vec3 {
        self.e1 * c[0] + self.e2 * c[1]
    }

    /// 3×2 matrix with columns `e1`, `e2`.
    pub fn basis(&self) -> Mat3x2 {
        Mat3x2::from_columns(&[self.e1, self.e2])
    }

    /// Chart velocity whose image has frame components `c`.
    pub fn chart_velocity(&self, c: &Vec2) -> Vec2 {
        // chart_to_frame = [[a, b], [0, d]]
        let m = &self.chart_to_frame;
        let v2 = c[1] / m[(1, 1)];
        let v1 = (c[0] - m[(0, 1)] * v2) / m[(0, 0)];
        Vec2::new(v1, v2)
    }
}

/// Everything the dynamics needs at one chart point, computed together.
#[derive(Clone, Copy, Debug)]
pub struct LocalGeometry {
    pub point: Vec3,
    pub jacobian: Mat3x2,
    pub metric: Mat2,
    pub frame: TangentFrame,
    pub weingarten: Mat3,
}

impl LocalGeometry {
    pub fn normal(&self) -> Vec3 {
        self.frame.n
    }

    /// Chart velocity `ẏ` minimizing `|J ẏ − v|`, from the normal equations.
    pub fn chart_velocity_of(&self, v: &Vec3) -> Vec2 {
        let rhs = self.jacobian.transpose() * v;
        solve_spd2(&self.metric, &rhs)
    }
}

/// An oriented surface patch given by a single chart.
#[derive(Clone)]
pub struct SurfaceChart {
    param: Arc<dyn Parametrization>,
    orientation: Orientation,
}

impl fmt::Debug for SurfaceChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceChart")
            .field("param", &self.param)
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl SurfaceChart {
    pub fn new(param: impl Parametrization + 'static, orientation: Orientation) -> Self {
        Self {
            param: Arc::new(param),
            orientation,
        }
    }

    pub fn plane(orientation: Orientation) -> Self {
        Self::new(Plane::default(), orientation)
    }

    pub fn sphere(radius: f64, orientation: Orientation) -> Result<Self> {
        Ok(Self::new(Ellipsoid::sphere(radius)?, orientation))
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64, orientation: Orientation) -> Result<Self> {
        Ok(Self::new(Ellipsoid::new(a, b, c)?, orientation))
    }

    pub fn paraboloid(curvature: f64, orientation: Orientation) -> Result<Self> {
        Ok(Self::new(Paraboloid::new(curvature)?, orientation))
    }

    pub fn name(&self) -> &'static str {
        self.param.name()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        Self {
            param: Arc::clone(&self.param),
            orientation,
        }
    }

    pub fn domain(&self) -> Domain {
        self.param.domain()
    }

    pub fn contains(&self, y: &Vec2) -> bool {
        self.param.domain().contains(y)
    }

    pub fn is_xy_plane(&self) -> bool {
        self.param.is_xy_plane()
    }

    pub fn eval(&self, y: &Vec2) -> Vec3 {
        self.param.eval(y)
    }

    pub fn jacobian(&self, y: &Vec2) -> Mat3x2 {
        self.param.jacobian(y)
    }

    pub fn hessian(&self, y: &Vec2) -> [Mat2; 3] {
        self.param.hessian(y)
    }

    fn degenerate(&self, y: &Vec2) -> Error {
        Error::DegenerateChart {
            surface: self.param.name(),
            y1: y[0],
            y2: y[1],
        }
    }

    fn normal_from_jacobian(&self, y: &Vec2, j: &Mat3x2) -> Result<Vec3> {
        let cross = j.column(0).cross(&j.column(1));
        let norm = cross.norm();
        // `!(a >= b)` also rejects NaN
        if !(norm >= DEGENERATE_NORMAL) {
            return Err(self.degenerate(y));
        }
        Ok(cross * (self.orientation.sign() / norm))
    }

    /// Oriented unit normal `σ (∂₁s × ∂₂s)/|∂₁s × ∂₂s|`.
    pub fn normal(&self, y: &Vec2) -> Result<Vec3> {
        self.normal_from_jacobian(y, &self.jacobian(y))
    }

    /// First fundamental form `g_ab = ∂_a s · ∂_b s`.
    pub fn first_form(&self, y: &Vec2) -> Result<Mat2> {
        let j = self.jacobian(y);
        let g = j.transpose() * j;
        if !(g.determinant() >= DEGENERATE_METRIC) {
            return Err(self.degenerate(y));
        }
        Ok(g)
    }

    /// Second fundamental form `L_ab = n · ∂²s/∂y^a∂y^b` with the unit normal.
    pub fn second_form(&self, y: &Vec2) -> Result<Mat2> {
        let n = self.normal(y)?;
        Ok(contract_hessian(&self.hessian(y), &n))
    }

    /// Shape operator `L^a_b = g^{ac} L_cb` in chart coordinates.
    ///
    /// Column `b` holds the chart components of `W ∂_b s`.
    pub fn shape_operator(&self, y: &Vec2) -> Result<Mat2> {
        let g = self.first_form(y)?;
        let l = self.second_form(y)?;
        Ok(solve_spd2_mat(&g, &l))
    }

    /// Weingarten map as a 3×3 ambient matrix.
    ///
    /// `W ∂_a s = L^b_a ∂_b s` and `W n = 0`, so for tangent `v` the product
    /// `W v` is minus the derivative of the normal along `v`.
    pub fn weingarten_ambient(&self, y: &Vec2) -> Result<Mat3> {
        Ok(self.local_geometry(y)?.weingarten)
    }

    /// Gram–Schmidt frame on the jacobian columns.
    pub fn tangent_frame(&self, y: &Vec2) -> Result<TangentFrame> {
        let j = self.jacobian(y);
        let n = self.normal_from_jacobian(y, &j)?;
        Ok(frame_from(&j, n))
    }

    /// Point, derivatives, frame and Weingarten map at `y` in one pass.
    pub fn local_geometry(&self, y: &Vec2) -> Result<LocalGeometry> {
        let j = self.jacobian(y);
        let n = self.normal_from_jacobian(y, &j)?;
        let g = j.transpose() * j;
        if !(g.determinant() >= DEGENERATE_METRIC) {
            return Err(self.degenerate(y));
        }
        let l = contract_hessian(&self.hessian(y), &n);
        let g_inv = inverse_spd2(&g);
        let weingarten = j * g_inv * l * g_inv * j.transpose();
        Ok(LocalGeometry {
            point: self.eval(y),
            jacobian: j,
            metric: g,
            frame: frame_from(&j, n),
            weingarten,
        })
    }
}

fn contract_hessian(h: &[Mat2; 3], n: &Vec3) -> Mat2 {
    h[0] * n[0] + h[1] * n[1] + h[2] * n[2]
}

fn frame_from(j: &Mat3x2, n: Vec3) -> TangentFrame {
    let d1: Vec3 = j.column(0).into();
    let d2: Vec3 = j.column(1).into();
    let e1 = d1.normalize();
    let e2 = n.cross(&e1);
    let chart_to_frame = Mat2::new(e1.dot(&d1), e1.dot(&d2), 0.0, e2.dot(&d2));
    TangentFrame {
        e1,
        e2,
        n,
        chart_to_frame,
    }
}

fn inverse_spd2(g: &Mat2) -> Mat2 {
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    Mat2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]) / det
}

fn solve_spd2(g: &Mat2, rhs: &Vec2) -> Vec2 {
    inverse_spd2(g) * rhs
}

fn solve_spd2_mat(g: &Mat2, rhs: &Mat2) -> Mat2 {
    inverse_spd2(g) * rhs
}

/// Singular values `(σ_max, σ_min)` of a 2×2 matrix.
pub fn singular_values2(m: &Mat2) -> (f64, f64) {
    let sv = m.singular_values();
    (sv.max(), sv.min())
}
