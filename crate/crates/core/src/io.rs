//! Plain-text serialisation: CSV tables and dense matrix dumps.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::hilbert::{GridState, TemporalAmplitude};
use crate::BoundReport;

/// Format a float so that it round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:e}")
    }
}

/// Generic CSV table: header plus rows of floats.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| fmt_f64(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Columns `x,re,im`.
pub fn state_csv(state: &GridState) -> String {
    csv_table(
        &["x", "re", "im"],
        state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, z)| vec![state.axis.value(i), z.re, z.im]),
    )
}

/// Two tables: `t,re,im` followed by `E,re,im`, separated by a blank line.
pub fn temporal_csv(f: &TemporalAmplitude) -> String {
    let t = csv_table(
        &["t", "re", "im"],
        f.f.iter()
            .enumerate()
            .map(|(i, z)| vec![f.time_axis.value(i), z.re, z.im]),
    );
    let e = csv_table(
        &["E", "re", "im"],
        f.f_tilde
            .iter()
            .enumerate()
            .map(|(i, z)| vec![f.energy_axis.value(i), z.re, z.im]),
    );
    format!("{t}\n{e}")
}

pub const REPORT_HEADER: &str = "tag,lhs,rhs,slack,tolerance,pass,asserted";

pub fn report_row(r: &BoundReport) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.tag,
        fmt_f64(r.lhs),
        fmt_f64(r.rhs),
        fmt_f64(r.slack),
        fmt_f64(r.tolerance),
        r.pass,
        r.asserted
    )
}

pub fn reports_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&report_row(r));
        out.push('\n');
    }
    out
}

/// Row-major dump, one matrix row per line, entries as `re,im` pairs
/// separated by spaces.
pub fn matrix_text(m: &DMatrix<C64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(' ');
            }
            let z = m[(i, j)];
            let _ = write!(out, "{},{}", fmt_f64(z.re), fmt_f64(z.im));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Axis, AxisKind};

    #[test]
    fn state_round_trips_through_csv() {
        let ax = Axis::new(AxisKind::Position, -1.0, 0.25, 9).unwrap();
        let s = GridState::gaussian(ax, 1.0, 0.1, 0.7, 0.3).unwrap();
        let text = state_csv(&s);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,re,im"));
        for (i, l) in lines.enumerate() {
            let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(v[0], ax.value(i));
            assert_eq!(v[1], s.amplitudes[i].re);
            assert_eq!(v[2], s.amplitudes[i].im);
        }
    }

    #[test]
    fn matrix_dump_shape() {
        let m = DMatrix::from_element(2, 3, C64::new(1.5, -2.0));
        let t = matrix_text(&m);
        assert_eq!(t.lines().count(), 2);
        assert_eq!(t.lines().next().unwrap().split(' ').count(), 3);
    }
}
