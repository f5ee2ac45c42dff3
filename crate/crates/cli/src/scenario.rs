//! Scenario files: TOML with `[body]`, `[body.surface]`, `[world.surface]`,
//! `[initial]` and an optional `[integrator]` section.
//!
//! ```toml
//! [body]
//! mass = 1.0
//! inertia = [0.1, 0.1, 0.1]    # principal moments, or a symmetric 3×3
//! gravity = 9.81               # optional
//!
//! [body.surface]
//! name = "sphere"
//! radius = 0.5
//! orientation = 1
//!
//! [world.surface]
//! name = "plane"
//! orientation = -1
//!
//! [initial]
//! yM = [1.5707963267948966, 0.0]
//! yH = [0.0, 0.0]
//! theta = 0.0
//! omega = [0.0, 0.0, 2.0]
//!
//! [integrator]
//! h = 1e-3
//! T = 10.0
//! sample_stride = 10
//! ```

use std::fmt;
use std::ops::Range;
use std::path::Path;

use rollsim_core::full::{make_full_state, FullState, Scene};
use rollsim_core::reduced::ReducedState;
use rollsim_core::{
    BuiltinSurface, Error, IntegratorConfig, Mat3, Orientation, RigidBody, SurfaceChart, Vec2, Vec3,
};
use serde::Deserialize;
use toml::Spanned;

/// Gravitational acceleration used when `[body].gravity` is omitted.
pub const DEFAULT_GRAVITY: f64 = 9.81;

/// A configuration problem, located in the scenario source when possible.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub origin: String,
    /// 1-based line and column.
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((line, col)) => write!(f, "{}:{line}:{col}: {}", self.origin, self.message),
            None => write!(f, "{}: {}", self.origin, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src.as_bytes()[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let line_start = before
        .iter()
        .rposition(|&b| b == b'\n')
        .map_or(0, |i| i + 1);
    let col = String::from_utf8_lossy(&before[line_start..])
        .chars()
        .count()
        + 1;
    (line, col)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub body: RawBody,
    pub world: RawWorld,
    pub initial: RawInitial,
    #[serde(default)]
    pub integrator: Option<Spanned<RawIntegrator>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBody {
    pub mass: Spanned<f64>,
    pub inertia: Spanned<RawInertia>,
    pub gravity: Option<Spanned<f64>>,
    pub surface: Spanned<RawSurface>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RawInertia {
    Principal([f64; 3]),
    Full([[f64; 3]; 3]),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawWorld {
    pub surface: Spanned<RawSurface>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSurface {
    pub name: Spanned<String>,
    pub orientation: Spanned<i64>,
    pub radius: Option<Spanned<f64>>,
    pub a: Option<Spanned<f64>>,
    pub b: Option<Spanned<f64>>,
    pub c: Option<Spanned<f64>>,
    pub curvature: Option<Spanned<f64>>,
    pub extent: Option<Spanned<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInitial {
    #[serde(rename = "yM")]
    pub y_body: Spanned<[f64; 2]>,
    #[serde(rename = "yH")]
    pub y_world: Spanned<[f64; 2]>,
    #[serde(default)]
    pub theta: f64,
    pub omega: Spanned<[f64; 3]>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawIntegrator {
    pub h: Option<Spanned<f64>>,
    #[serde(rename = "T")]
    pub t_final: Option<Spanned<f64>>,
    pub sample_stride: Option<Spanned<i64>>,
    pub project_rotation: Option<bool>,
    pub project_contact: Option<bool>,
    pub lambda_cond_max: Option<Spanned<f64>>,
}

/// Parse scenario text without validating it.
pub fn parse_scenario(src: &str) -> Result<RawScenario, ConfigError> {
    toml::from_str(src).map_err(|e| ConfigError {
        origin: String::new(),
        position: e.span().map(|span| line_col(src, span.start)),
        message: e.message().trim_end().to_string(),
    })
}

/// Initial data as written in the scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialData {
    pub y_body: Vec2,
    pub y_world: Vec2,
    pub theta: f64,
    pub omega: Vec3,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub scene: Scene,
    pub initial: InitialData,
    pub integrator: IntegratorConfig,
    /// Line and column of `[world.surface].name`, for errors about the world.
    pub world_surface_at: (usize, usize),
}

impl Scenario {
    pub fn from_str(src: &str, origin: &str) -> Result<Self, ConfigError> {
        let located = |mut e: ConfigError| {
            e.origin = origin.to_string();
            e
        };
        let raw = parse_scenario(src).map_err(located)?;
        build_scenario(&raw, src).map_err(located)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let src = std::fs::read_to_string(path).map_err(|e| ConfigError {
            origin: origin.clone(),
            position: None,
            message: format!("cannot read scenario: {e}"),
        })?;
        Self::from_str(&src, &origin)
    }

    /// The initial full state, with `A` rotating `n_M(yM)` onto `n_H(yH)`.
    pub fn full_state(&self) -> FullState {
        let i = &self.initial;
        make_full_state(&self.scene, i.y_body, i.y_world, i.theta, i.omega)
            .expect("initial normals are checked when the scenario is built")
    }

    pub fn reduced_state(&self) -> ReducedState {
        ReducedState {
            y: self.initial.y_body,
            omega: self.initial.omega,
        }
    }
}

/// Validate a parsed scenario. `src` is the text it was parsed from and is
/// only used to turn spans into line numbers.
pub fn build_scenario(raw: &RawScenario, src: &str) -> Result<Scenario, ConfigError> {
    let at = |span: Range<usize>, message: String| ConfigError {
        origin: String::new(),
        position: Some(line_col(src, span.start)),
        message,
    };

    let body_surface = surface_chart(&raw.body.surface, &at)?;
    let world_surface = surface_chart(&raw.world.surface, &at)?;

    let mass = &raw.body.mass;
    let inertia = match raw.body.inertia.get_ref() {
        RawInertia::Principal(m) => Mat3::from_diagonal(&Vec3::from(*m)),
        RawInertia::Full(rows) => Mat3::from_fn(|i, j| rows[i][j]),
    };
    let gravity = raw.body.gravity.as_ref();
    let body = RigidBody::new(
        *mass.get_ref(),
        inertia,
        body_surface,
        gravity.map_or(DEFAULT_GRAVITY, |g| *g.get_ref()),
    )
    .map_err(|e| {
        let message = e.to_string();
        let span = if message.contains("mass") {
            mass.span()
        } else if message.contains("gravity") {
            gravity.map_or(mass.span(), |g| g.span())
        } else {
            raw.body.inertia.span()
        };
        at(span, message)
    })?;
    let scene = Scene::new(body, world_surface);

    let init = &raw.initial;
    let initial = InitialData {
        y_body: Vec2::from(*init.y_body.get_ref()),
        y_world: Vec2::from(*init.y_world.get_ref()),
        theta: init.theta,
        omega: Vec3::from(*init.omega.get_ref()),
    };
    if !initial.theta.is_finite() {
        return Err(at(
            init.y_body.span(),
            "initial theta must be finite".into(),
        ));
    }
    if initial.omega.iter().any(|v| !v.is_finite()) {
        return Err(at(init.omega.span(), "initial omega must be finite".into()));
    }
    for (y, span, role) in [
        (&initial.y_body, init.y_body.span(), "body"),
        (&initial.y_world, init.y_world.span(), "world"),
    ] {
        let chart = if role == "body" {
            scene.body.surface()
        } else {
            &scene.world
        };
        if !chart.contains(y) {
            return Err(at(
                span,
                format!(
                    "initial {role} coordinates ({}, {}) are outside the {} chart",
                    y[0],
                    y[1],
                    chart.name()
                ),
            ));
        }
        chart
            .normal(y)
            .map_err(|e| at(span.clone(), e.to_string()))?;
    }

    let integrator = integrator_config(raw.integrator.as_ref(), &at)?;
    Ok(Scenario {
        scene,
        initial,
        integrator,
        world_surface_at: line_col(src, raw.world.surface.get_ref().name.span().start),
    })
}

fn surface_chart(
    raw: &Spanned<RawSurface>,
    at: &impl Fn(Range<usize>, String) -> ConfigError,
) -> Result<SurfaceChart, ConfigError> {
    let s = raw.get_ref();
    let orientation = Orientation::from_sign(*s.orientation.get_ref()).ok_or_else(|| {
        at(
            s.orientation.span(),
            format!(
                "orientation must be 1 or -1, got {}",
                s.orientation.get_ref()
            ),
        )
    })?;
    let spanned = |key: &str| match key {
        "radius" => s.radius.as_ref(),
        "a" => s.a.as_ref(),
        "b" => s.b.as_ref(),
        "c" => s.c.as_ref(),
        "curvature" => s.curvature.as_ref(),
        "extent" => s.extent.as_ref(),
        _ => None,
    };
    BuiltinSurface::from_name(s.name.get_ref(), |key| spanned(key).map(|v| *v.get_ref()))
        .and_then(|b| b.chart(orientation))
        .map_err(|e| {
            // point at the parameter a message starts with, if any
            let span = match &e {
                Error::InvalidParameter(msg) => ["radius", "a", "b", "c", "curvature", "extent"]
                    .into_iter()
                    .find(|key| msg.starts_with(&format!("{key} ")))
                    .and_then(spanned)
                    .map(|v| v.span()),
                _ => None,
            };
            at(span.unwrap_or(s.name.span()), e.to_string())
        })
}

fn integrator_config(
    raw: Option<&Spanned<RawIntegrator>>,
    at: &impl Fn(Range<usize>, String) -> ConfigError,
) -> Result<IntegratorConfig, ConfigError> {
    let mut cfg = IntegratorConfig::default();
    let Some(raw) = raw else {
        return Ok(cfg);
    };
    let section = raw.span();
    let r = raw.get_ref();
    if let Some(h) = &r.h {
        cfg.h = *h.get_ref();
    }
    if let Some(t) = &r.t_final {
        cfg.t_final = *t.get_ref();
    }
    if let Some(stride) = &r.sample_stride {
        cfg.sample_stride = usize::try_from(*stride.get_ref())
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                at(
                    stride.span(),
                    format!("sample_stride must be at least 1, got {}", stride.get_ref()),
                )
            })?;
    }
    cfg.project_rotation = r.project_rotation.unwrap_or(cfg.project_rotation);
    cfg.project_contact = r.project_contact.unwrap_or(cfg.project_contact);
    if let Some(c) = &r.lambda_cond_max {
        cfg.lambda_cond_max = *c.get_ref();
    }
    cfg.validate().map_err(|e| {
        let message = e.to_string();
        let span = if message.contains("lambda_cond_max") {
            r.lambda_cond_max.as_ref().map(|c| c.span())
        } else if message.contains("T =") || message.contains("final time") {
            r.t_final.as_ref().map(|t| t.span())
        } else {
            r.h.as_ref().map(|h| h.span())
        };
        at(span.unwrap_or(section.clone()), message)
    })?;
    Ok(cfg)
}
