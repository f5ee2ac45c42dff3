use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rollsim::check::{self, CheckOptions};
use rollsim::commands::{self, CompareOptions, Exit};

/// Simulate a rigid body rolling without slipping on a fixed surface.
#[derive(Debug, Parser)]
#[command(name = "rollsim", version)]
struct Cli {
    /// Also write a gnuplot script that plots the CSV output.
    #[arg(long, global = true, value_name = "PATH")]
    emit_gnuplot: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario and write the trajectory as CSV.
    Simulate {
        scenario: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Integrate the planar-reduced system on (s, Ω) instead.
        #[arg(long)]
        reduced: bool,
    },
    /// Integrate a planar scenario with both systems and write their deviations.
    Compare {
        scenario: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, hide = true)]
        reduced_gravity: Option<f64>,
    },
    /// Run the invariant checks on seeded random states.
    Check {
        #[arg(long, default_value_t = check::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, hide = true)]
        negate_gravity_torque: bool,
    },
}

fn exit(status: Exit) -> ExitCode {
    ExitCode::from(status.code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let gnuplot = cli.emit_gnuplot.as_deref();
    match cli.command {
        Command::Simulate {
            scenario,
            output,
            reduced,
        } => match commands::simulate(&scenario, &output, reduced, gnuplot) {
            Ok(report) => {
                if let Some(t) = &report.terminated {
                    eprintln!("terminated at t = {}: {}", t.time, t.error);
                }
                exit(report.exit())
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit(e.exit())
            }
        },
        Command::Compare {
            scenario,
            output,
            reduced_gravity,
        } => match commands::compare(
            &scenario,
            &output,
            CompareOptions { reduced_gravity },
            gnuplot,
        ) {
            Ok(report) => {
                let [y, omega, energy] = report.max_dev;
                println!("max dev_y = {y:e}");
                println!("max dev_omega = {omega:e}");
                println!("max dev_E = {energy:e}");
                if let Some(t) = &report.terminated {
                    eprintln!("terminated at t = {}: {}", t.time, t.error);
                }
                exit(report.exit())
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit(e.exit())
            }
        },
        Command::Check {
            seed,
            negate_gravity_torque,
        } => {
            if gnuplot.is_some() {
                eprintln!("note: check writes no CSV, --emit-gnuplot ignored");
            }
            let lines = check::run_checks(&CheckOptions {
                seed,
                negate_gravity_torque,
            });
            print!("{}", check::report(&lines));
            if lines.iter().all(|l| l.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
