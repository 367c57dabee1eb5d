//! CSV writers. Every number is written with 12 significant digits.

use std::io::Write;

use nems_entangle::analysis::{FitReportRow, SweepTable, Trajectory};

pub const TRAJECTORY_COLUMNS: [&str; 10] = [
    "t",
    "n12",
    "n0_12",
    "n1_02",
    "n2_01",
    "tau",
    "min_symplectic_eig",
    "purity_nems",
    "n01",
    "negativity_error",
];

/// Widest model in the trend library.
const MAX_COEFFICIENTS: usize = 3;

pub fn number(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_COLUMNS)?;
    for r in &traj.records {
        let row = [
            r.t,
            r.n12,
            r.n0_12,
            r.n1_02,
            r.n2_01,
            r.tau,
            r.min_symplectic_eig,
            r.purity_nems,
            r.n01,
            r.negativity_error,
        ];
        w.write_record(row.map(number))?;
    }
    w.flush()?;
    Ok(())
}

/// One row per grid point. Failed points keep their row with empty values
/// and the reason in the `error` column.
pub fn write_sweep<W: Write>(out: W, table: &SweepTable) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let columns = table.variable.columns();
    let mut header = vec![table.variable.name()];
    header.extend_from_slice(columns);
    header.push("error");
    w.write_record(&header)?;
    for row in &table.rows {
        let mut rec = vec![number(row.value)];
        match &row.outcome {
            Ok(values) => {
                rec.extend(values.iter().map(|v| number(*v)));
                rec.push(String::new());
            }
            Err(e) => {
                rec.extend(columns.iter().map(|_| String::new()));
                rec.push(e.to_string());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn fit_report_header() -> Vec<String> {
    let mut h = vec!["label".to_string(), "model".into(), "points".into()];
    for k in 1..=MAX_COEFFICIENTS {
        h.push(format!("name{k}"));
        h.push(format!("value{k}"));
    }
    h.extend(["max_relative_error", "converged", "error"].map(String::from));
    h
}

pub fn write_fit_report<W: Write>(out: W, rows: &[FitReportRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(fit_report_header())?;
    for row in rows {
        let mut rec = vec![row.label.clone()];
        match &row.result {
            Ok(fit) => {
                rec.push(fit.model.name().into());
                rec.push(row.points.to_string());
                for k in 0..MAX_COEFFICIENTS {
                    match fit.coefficients.get(k) {
                        Some((name, v)) => rec.extend([name.to_string(), number(*v)]),
                        None => rec.extend([String::new(), String::new()]),
                    }
                }
                rec.push(number(fit.max_relative_error));
                rec.push(fit.converged.to_string());
                rec.push(String::new());
            }
            Err(e) => {
                rec.push(String::new());
                rec.push(row.points.to_string());
                rec.extend((0..2 * MAX_COEFFICIENTS + 2).map(|_| String::new()));
                rec.push(e.to_string());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(number(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(number(0.0), "0.00000000000e0");
        assert_eq!(number(-2.5e-7), "-2.50000000000e-7");
    }
}
