use std::f64::consts::PI;

use super::{Domain, Orientation, Parametrization, SurfaceChart};
use crate::{Error, Mat2, Mat3x2, Result, Vec2, Vec3};

/// Polar margin excluded from spherical-coordinate charts.
pub const POLE_MARGIN: f64 = 1e-3;
/// Half-width of the default domain of graph-type charts.
pub const DEFAULT_EXTENT: f64 = 1e6;

fn positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and positive, got {value}"
        )))
    }
}

/// The horizontal plane `s(y) = (y₁, y₂, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub extent: f64,
}

impl Default for Plane {
    fn default() -> Self {
        Self {
            extent: DEFAULT_EXTENT,
        }
    }
}

impl Plane {
    pub fn with_extent(extent: f64) -> Result<Self> {
        Ok(Self {
            extent: positive("extent", extent)?,
        })
    }
}

impl Parametrization for Plane {
    fn name(&self) -> &'static str {
        "plane"
    }

    fn eval(&self, y: &Vec2) -> Vec3 {
        Vec3::new(y[0], y[1], 0.0)
    }

    fn jacobian(&self, _y: &Vec2) -> Mat3x2 {
        Mat3x2::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    }

    fn hessian(&self, _y: &Vec2) -> [Mat2; 3] {
        [Mat2::zeros(); 3]
    }

    fn domain(&self) -> Domain {
        Domain::new([-self.extent; 2], [self.extent; 2])
    }

    fn is_xy_plane(&self) -> bool {
        true
    }
}

/// Axis-aligned ellipsoid in spherical coordinates `y = (θ, φ)`:
/// `s = (a sinθ cosφ, b sinθ sinφ, c cosθ)`.
///
/// The cross-product normal is outward. θ excludes a small margin around the
/// poles; φ ranges over `(−2π, 2π)` so a contact point can wind once around
/// the polar axis in either direction without leaving the chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipsoid {
    pub axes: Vec3,
    sphere: bool,
}

impl Ellipsoid {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        Ok(Self {
            axes: Vec3::new(positive("a", a)?, positive("b", b)?, positive("c", c)?),
            sphere: false,
        })
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        let r = positive("radius", radius)?;
        Ok(Self {
            axes: Vec3::new(r, r, r),
            sphere: true,
        })
    }
}

impl Parametrization for Ellipsoid {
    fn name(&self) -> &'static str {
        if self.sphere {
            "sphere"
        } else {
            "ellipsoid"
        }
    }

    fn eval(&self, y: &Vec2) -> Vec3 {
        let (st, ct) = y[0].sin_cos();
        let (sp, cp) = y[1].sin_cos();
        self.axes.component_mul(&Vec3::new(st * cp, st * sp, ct))
    }

    fn jacobian(&self, y: &Vec2) -> Mat3x2 {
        let (st, ct) = y[0].sin_cos();
        let (sp, cp) = y[1].sin_cos();
        let d_theta = self.axes.component_mul(&Vec3::new(ct * cp, ct * sp, -st));
        let d_phi = self.axes.component_mul(&Vec3::new(-st * sp, st * cp, 0.0));
        Mat3x2::from_columns(&[d_theta, d_phi])
    }

    fn hessian(&self, y: &Vec2) -> [Mat2; 3] {
        let (st, ct) = y[0].sin_cos();
        let (sp, cp) = y[1].sin_cos();
        let [a, b, c] = [self.axes[0], self.axes[1], self.axes[2]];
        // rows: θθ, θφ, φφ of each unit-sphere component, then scaled
        let hx = Mat2::new(-st * cp, -ct * sp, -ct * sp, -st * cp) * a;
        let hy = Mat2::new(-st * sp, ct * cp, ct * cp, -st * sp) * b;
        let hz = Mat2::new(-ct, 0.0, 0.0, 0.0) * c;
        [hx, hy, hz]
    }

    fn domain(&self) -> Domain {
        Domain::new([POLE_MARGIN, -2.0 * PI], [PI - POLE_MARGIN, 2.0 * PI])
    }
}

/// Circular paraboloid graph `s(u, v) = (u, v, κ(u² + v²)/2)`, upward normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Paraboloid {
    pub curvature: f64,
    pub extent: f64,
}

impl Paraboloid {
    pub fn new(curvature: f64) -> Result<Self> {
        if !curvature.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "curvature must be finite, got {curvature}"
            )));
        }
        Ok(Self {
            curvature,
            extent: DEFAULT_EXTENT,
        })
    }
}

impl Parametrization for Paraboloid {
    fn name(&self) -> &'static str {
        "paraboloid"
    }

    fn eval(&self, y: &Vec2) -> Vec3 {
        Vec3::new(y[0], y[1], 0.5 * self.curvature * y.norm_squared())
    }

    fn jacobian(&self, y: &Vec2) -> Mat3x2 {
        let k = self.curvature;
        Mat3x2::new(1.0, 0.0, 0.0, 1.0, k * y[0], k * y[1])
    }

    fn hessian(&self, _y: &Vec2) -> [Mat2; 3] {
        [
            Mat2::zeros(),
            Mat2::zeros(),
            Mat2::identity() * self.curvature,
        ]
    }

    fn domain(&self) -> Domain {
        Domain::new([-self.extent; 2], [self.extent; 2])
    }
}

/// Built-in charts addressable by name.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BuiltinSurface {
    Plane { extent: f64 },
    Sphere { radius: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
    Paraboloid { curvature: f64, extent: f64 },
}

impl BuiltinSurface {
    pub const NAMES: [&'static str; 4] = ["plane", "sphere", "ellipsoid", "paraboloid"];

    /// Look up a built-in chart by name. `param` returns named numeric
    /// parameters; missing required ones are reported by name.
    pub fn from_name(name: &str, param: impl Fn(&str) -> Option<f64>) -> Result<Self> {
        let need = |key: &str| {
            param(key).ok_or_else(|| {
                Error::InvalidParameter(format!("surface '{name}' requires parameter '{key}'"))
            })
        };
        let surface = match name {
            "plane" => BuiltinSurface::Plane {
                extent: param("extent").unwrap_or(DEFAULT_EXTENT),
            },
            "sphere" => BuiltinSurface::Sphere {
                radius: need("radius")?,
            },
            "ellipsoid" => BuiltinSurface::Ellipsoid {
                a: need("a")?,
                b: need("b")?,
                c: need("c")?,
            },
            "paraboloid" => BuiltinSurface::Paraboloid {
                curvature: need("curvature")?,
                extent: param("extent").unwrap_or(DEFAULT_EXTENT),
            },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown surface '{other}' (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        };
        Ok(surface)
    }

    pub fn chart(&self, orientation: Orientation) -> Result<SurfaceChart> {
        Ok(match *self {
            BuiltinSurface::Plane { extent } => {
                SurfaceChart::new(Plane::with_extent(extent)?, orientation)
            }
            BuiltinSurface::Sphere { radius } => SurfaceChart::sphere(radius, orientation)?,
            BuiltinSurface::Ellipsoid { a, b, c } => SurfaceChart::ellipsoid(a, b, c, orientation)?,
            BuiltinSurface::Paraboloid { curvature, extent } => {
                let mut p = Paraboloid::new(curvature)?;
                p.extent = positive("extent", extent)?;
                SurfaceChart::new(p, orientation)
            }
        })
    }
}
