//! CSV and gnuplot writers.
//!
//! Numbers are written in Rust's `{:e}` notation with 16 fractional digits
//! (17 significant), which does not depend on the locale; lines end in `\n`.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use rollsim_core::full::FullState;
use rollsim_core::reduced::ReducedState;
use rollsim_core::Trajectory;

pub const FULL_HEADER: &str =
    "t,A11,A12,A13,A21,A22,A23,A31,A32,A33,yM1,yM2,yH1,yH2,Ox,Oy,Oz,E,res_so3,res_contact";
pub const REDUCED_HEADER: &str = "t,y1,y2,Ox,Oy,Oz,E";
pub const COMPARE_HEADER: &str = "t,dev_y,dev_omega,dev_E";

/// One CSV field.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(values: impl IntoIterator<Item = f64>) -> String {
    let mut line = String::new();
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&number(v));
    }
    line.push('\n');
    line
}

pub fn full_rows(traj: &Trajectory<FullState>) -> String {
    let mut out = String::new();
    for (i, s) in traj.states.iter().enumerate() {
        let a = &s.rotation;
        let mut values = vec![traj.times[i]];
        for r in 0..3 {
            values.extend((0..3).map(|c| a[(r, c)]));
        }
        values.extend([s.y_body[0], s.y_body[1], s.y_world[0], s.y_world[1]]);
        values.extend(s.omega.iter().copied());
        values.extend([
            traj.energy[i],
            traj.so3_residual[i],
            traj.contact_residual[i],
        ]);
        out.push_str(&row(values));
    }
    out
}

pub fn reduced_rows(traj: &Trajectory<ReducedState>) -> String {
    let mut out = String::new();
    for (i, s) in traj.states.iter().enumerate() {
        out.push_str(&row([
            traj.times[i],
            s.y[0],
            s.y[1],
            s.omega[0],
            s.omega[1],
            s.omega[2],
            traj.energy[i],
        ]));
    }
    out
}

pub fn compare_rows(rows: &[[f64; 4]]) -> String {
    rows.iter().map(|r| row(r.iter().copied())).collect()
}

/// Trailing comment of a run that stopped early.
pub fn termination_line(reason: &str, time: f64) -> String {
    format!("# terminated: {reason} t={}\n", number(time))
}

pub fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    let mut file = io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(contents.as_bytes())?;
    file.flush()
}

/// What a CSV file holds, for choosing plots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsvKind {
    Full,
    Reduced,
    Compare,
}

/// A gnuplot script plotting `csv`.
pub fn gnuplot_script(csv: &Path, kind: CsvKind) -> String {
    let data = csv
        .display()
        .to_string()
        .replace('\\', "\\\\")
        .replace('"', "\\\"");
    let mut s = String::new();
    s.push_str("set datafile separator \",\"\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set grid\n");
    let _ = writeln!(s, "data = \"{data}\"");
    match kind {
        CsvKind::Full => {
            s.push_str("set multiplot layout 2,2\n");
            s.push_str("set title \"world contact path\"\nset size ratio -1\n");
            s.push_str("plot data using 13:14 with lines\n");
            s.push_str("set size noratio\nset title \"body contact coordinates\"\n");
            s.push_str("plot data using 1:11 with lines, data using 1:12 with lines\n");
            s.push_str("set title \"angular velocity\"\n");
            s.push_str("plot data using 1:15 with lines, data using 1:16 with lines, data using 1:17 with lines\n");
            s.push_str("set title \"energy\"\n");
            s.push_str("plot data using 1:18 with lines\n");
            s.push_str("unset multiplot\n");
        }
        CsvKind::Reduced => {
            s.push_str("set multiplot layout 1,3\n");
            s.push_str("set title \"body contact coordinates\"\n");
            s.push_str("plot data using 1:2 with lines, data using 1:3 with lines\n");
            s.push_str("set title \"angular velocity\"\n");
            s.push_str("plot data using 1:4 with lines, data using 1:5 with lines, data using 1:6 with lines\n");
            s.push_str("set title \"energy\"\n");
            s.push_str("plot data using 1:7 with lines\n");
            s.push_str("unset multiplot\n");
        }
        CsvKind::Compare => {
            s.push_str("set logscale y\nset title \"full vs reduced deviation\"\n");
            s.push_str("plot data using 1:2 with lines, data using 1:3 with lines, data using 1:4 with lines\n");
        }
    }
    s.push_str("pause mouse close\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_seventeen_significant_digits() {
        assert_eq!(number(1.0), "1.0000000000000000e0");
        assert_eq!(number(-0.1), "-1.0000000000000001e-1");
        assert_eq!(number(0.1).parse::<f64>().unwrap(), 0.1);
        let x = std::f64::consts::PI * 1e-300;
        assert_eq!(number(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn rows_are_comma_separated_with_newlines() {
        assert_eq!(
            compare_rows(&[[0.0, 1.0, 2.0, 3.0]]),
            "0.0000000000000000e0,1.0000000000000000e0,2.0000000000000000e0,3.0000000000000000e0\n"
        );
        assert_eq!(
            termination_line("SingularLambda", 0.5),
            "# terminated: SingularLambda t=5.0000000000000000e-1\n"
        );
    }

    #[test]
    fn headers_have_matching_column_counts() {
        assert_eq!(FULL_HEADER.split(',').count(), 20);
        assert_eq!(REDUCED_HEADER.split(',').count(), 7);
    }
}
