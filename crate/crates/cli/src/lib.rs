//! Scenario-file driven front end for `rollsim-core`: simulation to CSV,
//! full-versus-reduced comparison, and a seeded invariant check suite.

pub mod check;
pub mod commands;
pub mod output;
pub mod scenario;

pub use commands::{
    compare, simulate, CommandError, CompareOptions, CompareReport, Exit, RunReport,
};
pub use scenario::{build_scenario, parse_scenario, ConfigError, Scenario};
