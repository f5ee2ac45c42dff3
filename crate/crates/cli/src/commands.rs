//! `simulate` and `compare`.

use std::path::{Path, PathBuf};

use rollsim_core::integrate::{integrate, FullSystem, ReducedSystem};
use rollsim_core::{Error, IntegrationFailure, Trajectory};

use crate::output::{self, CsvKind};
use crate::scenario::{ConfigError, Scenario};

/// Largest full-vs-reduced deviation accepted by `compare`.
pub const COMPARE_TOL: f64 = 1e-6;

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Config = 1,
    Terminated = 2,
    Mismatch = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CommandError {
    pub fn exit(&self) -> Exit {
        Exit::Config
    }
}

fn write(path: &Path, contents: &str) -> Result<(), CommandError> {
    output::write_file(path, contents).map_err(|source| CommandError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit_gnuplot(script: Option<&Path>, csv: &Path, kind: CsvKind) -> Result<(), CommandError> {
    match script {
        Some(path) => write(path, &output::gnuplot_script(csv, kind)),
        None => Ok(()),
    }
}

/// Where a run stopped early, and why.
#[derive(Clone, Debug, PartialEq)]
pub struct Termination {
    pub error: Error,
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub samples: usize,
    pub terminated: Option<Termination>,
}

impl RunReport {
    pub fn exit(&self) -> Exit {
        if self.terminated.is_some() {
            Exit::Terminated
        } else {
            Exit::Success
        }
    }
}

fn split<S>(
    result: Result<Trajectory<S>, IntegrationFailure<S>>,
) -> (Trajectory<S>, Option<Termination>) {
    match result {
        Ok(traj) => (traj, None),
        Err(f) => (
            f.partial,
            Some(Termination {
                error: f.error,
                time: f.time,
            }),
        ),
    }
}

fn not_planar(scenario: &Scenario, origin: &Path) -> CommandError {
    CommandError::Config(ConfigError {
        origin: origin.display().to_string(),
        position: Some(scenario.world_surface_at),
        message: Error::NotPlanarScene.to_string(),
    })
}

/// Integrate a scenario and write its trajectory as CSV. A run that stops
/// early still writes the samples it reached, followed by a
/// `# terminated:` line.
pub fn simulate(
    scenario_path: &Path,
    output_path: &Path,
    reduced: bool,
    gnuplot: Option<&Path>,
) -> Result<RunReport, CommandError> {
    let scenario = Scenario::load(scenario_path)?;
    let cfg = &scenario.integrator;
    let (mut csv, samples, terminated, kind) = if reduced {
        if !scenario.scene.is_planar() {
            return Err(not_planar(&scenario, scenario_path));
        }
        let system = ReducedSystem::new(&scenario.scene.body, cfg.field_options());
        let (traj, term) = split(integrate(&system, scenario.reduced_state(), cfg));
        let body = format!(
            "{}\n{}",
            output::REDUCED_HEADER,
            output::reduced_rows(&traj)
        );
        (body, traj.len(), term, CsvKind::Reduced)
    } else {
        let system = FullSystem::new(&scenario.scene, cfg.field_options());
        let (traj, term) = split(integrate(&system, scenario.full_state(), cfg));
        let body = format!("{}\n{}", output::FULL_HEADER, output::full_rows(&traj));
        (body, traj.len(), term, CsvKind::Full)
    };
    if let Some(t) = &terminated {
        csv.push_str(&output::termination_line(t.error.kind(), t.time));
    }
    write(output_path, &csv)?;
    emit_gnuplot(gnuplot, output_path, kind)?;
    Ok(RunReport {
        samples,
        terminated,
    })
}

/// Knobs of [`compare`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompareOptions {
    /// Gravity used by the reduced run instead of the scenario's. Only for
    /// negative controls.
    pub reduced_gravity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareReport {
    pub samples: usize,
    /// Largest deviations in `y`, `Ω` and `E`.
    pub max_dev: [f64; 3],
    pub terminated: Option<Termination>,
}

impl CompareReport {
    pub fn exit(&self) -> Exit {
        if self.terminated.is_some() {
            Exit::Terminated
        } else if self.max_dev.iter().all(|&d| d <= COMPARE_TOL) {
            Exit::Success
        } else {
            Exit::Mismatch
        }
    }
}

/// Integrate a planar scenario with both the full and the reduced system
/// and write their per-sample deviations.
pub fn compare(
    scenario_path: &Path,
    output_path: &Path,
    options: CompareOptions,
    gnuplot: Option<&Path>,
) -> Result<CompareReport, CommandError> {
    let scenario = Scenario::load(scenario_path)?;
    if !scenario.scene.is_planar() {
        return Err(not_planar(&scenario, scenario_path));
    }
    let cfg = &scenario.integrator;
    let reduced_body = match options.reduced_gravity {
        Some(g) => scenario
            .scene
            .body
            .with_gravity(g)
            .map_err(|e| ConfigError {
                origin: "--reduced-gravity".into(),
                position: None,
                message: e.to_string(),
            })?,
        None => scenario.scene.body.clone(),
    };

    let full_system = FullSystem::new(&scenario.scene, cfg.field_options());
    let (full, full_term) = split(integrate(&full_system, scenario.full_state(), cfg));
    let reduced_system = ReducedSystem::new(&reduced_body, cfg.field_options());
    let (reduced, reduced_term) = split(integrate(&reduced_system, scenario.reduced_state(), cfg));

    let mut rows = Vec::with_capacity(full.len().min(reduced.len()));
    let mut max_dev = [0.0f64; 3];
    for i in 0..full.len().min(reduced.len()) {
        let (f, r) = (&full.states[i], &reduced.states[i]);
        let dev = [
            (f.y_body - r.y).norm(),
            (f.omega - r.omega).norm(),
            (full.energy[i] - reduced.energy[i]).abs(),
        ];
        for (m, d) in max_dev.iter_mut().zip(dev) {
            // NaN counts as a deviation
            *m = if d.is_nan() { f64::INFINITY } else { m.max(d) };
        }
        rows.push([full.times[i], dev[0], dev[1], dev[2]]);
    }
    let terminated = match (full_term, reduced_term) {
        (Some(a), Some(b)) => Some(if a.time <= b.time { a } else { b }),
        (a, b) => a.or(b),
    };

    let mut csv = format!(
        "{}\n{}",
        output::COMPARE_HEADER,
        output::compare_rows(&rows)
    );
    if let Some(t) = &terminated {
        csv.push_str(&output::termination_line(t.error.kind(), t.time));
    }
    write(output_path, &csv)?;
    emit_gnuplot(gnuplot, output_path, CsvKind::Compare)?;
    Ok(CompareReport {
        samples: rows.len(),
        max_dev,
        terminated,
    })
}
