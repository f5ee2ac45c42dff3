use std::fmt;

/// Which of the two surfaces an error refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartRole {
    Body,
    World,
}

impl fmt::Display for ChartRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartRole::Body => f.write_str("body"),
            ChartRole::World => f.write_str("world"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("DegenerateChart: {surface} chart is not an immersion at y = ({y1}, {y2})")]
    DegenerateChart {
        surface: &'static str,
        y1: f64,
        y2: f64,
    },
    #[error("ChartBoundary: {role} chart coordinates ({y1}, {y2}) left the chart domain")]
    ChartBoundary { role: ChartRole, y1: f64, y2: f64 },
    #[error("SingularLambda: rolling operator is singular (condition number {cond:e})")]
    SingularLambda { cond: f64 },
    #[error("SingularShapeOperator: body shape operator is singular (condition number {cond:e})")]
    SingularShapeOperator { cond: f64 },
    #[error("NotPlanarScene: the world surface is not the horizontal plane with downward normal")]
    NotPlanarScene,
    #[error("ProjectionDiverged: contact residual {residual:e} after projection")]
    ProjectionDiverged { residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Short variant name, used in report lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateChart { .. } => "DegenerateChart",
            Error::ChartBoundary { .. } => "ChartBoundary",
            Error::SingularLambda { .. } => "SingularLambda",
            Error::SingularShapeOperator { .. } => "SingularShapeOperator",
            Error::NotPlanarScene => "NotPlanarScene",
            Error::ProjectionDiverged { .. } => "ProjectionDiverged",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
