use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nems_entangle::analysis::{
    closed_trajectory, fit_sweep, open_trajectory, run_sweep, time_grid, FitReportRow, StudyPlan,
    SweepSetup, Trajectory, NEGATIVITY_ERROR_BUDGET,
};
use nems_entangle::error::Error;
use nems_entangle::exec::Execution;
use nems_entangle::model::{spectrum, SpectrumKind, SystemParams};
use nems_entangle::trend::{fit, FitModel};

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::output::{number, write_fit_report, write_sweep, write_trajectory};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory that relative output paths are resolved against.
    pub out_dir: Option<PathBuf>,
    pub exec: Execution,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn resolve(opts: &RunOptions, path: &Path) -> PathBuf {
    match &opts.out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

/// Renders into memory first so that each file is written exactly once.
fn write_file(
    path: &Path,
    render: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>,
) -> Result<()> {
    let mut buf = Vec::new();
    render(&mut buf).map_err(|e| CliError::io(path, e))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

/// `foo.csv` -> `foo_fits.csv`, next to the sweep table.
pub fn fits_path(table: &Path) -> PathBuf {
    let stem = table.file_stem().map_or("sweep".into(), |s| s.to_string_lossy());
    table.with_file_name(format!("{stem}_fits.csv"))
}

pub fn run(cfg: &ScenarioConfig, opts: &RunOptions, stdout: &mut impl Write) -> Result<RunReport> {
    let mut report = RunReport::default();
    let path = resolve(opts, &cfg.output_path);
    match cfg.scenario {
        Scenario::Spectrum => {
            let table = spectrum_report(&cfg.system)?;
            stdout
                .write_all(table.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))?;
            return Ok(report);
        }
        Scenario::ClosedZeroT | Scenario::ClosedThermal | Scenario::Open => {
            let traj = trajectory(cfg, opts.exec)?;
            if let Some(t) = traj.truncated_at {
                report.warnings.push(format!(
                    "trajectory stops at t = {}: past it the estimated negativity error exceeds {NEGATIVITY_ERROR_BUDGET:e} (next grid time {})",
                    grid_time(traj.end()),
                    grid_time(t)
                ));
            }
            write_file(&path, |b| write_trajectory(b, &traj))?;
            report.files.push(path);
        }
        Scenario::SweepKappa | Scenario::SweepAlpha | Scenario::SweepNbar | Scenario::SweepZeta => {
            let grid = cfg.sweep.as_ref().expect("sweep scenarios carry a grid");
            let setup = SweepSetup {
                omega: cfg.system.omega,
                ion_coupling: cfg.system.ion_coupling,
                kappa: cfg.system.kappa1,
                alpha: cfg.alpha(),
                zeta: cfg.bath.zeta,
                n_bar: cfg.bath.n_bar,
                dt: cfg.dt,
                t_max: cfg.t_max,
            };
            let table = run_sweep(&setup, grid.variable, &grid.values, opts.exec);
            let failed = table.rows.iter().filter(|r| r.outcome.is_err()).count();
            if failed > 0 {
                report.warnings.push(format!(
                    "{failed} of {} sweep points failed; see the error column",
                    table.rows.len()
                ));
            }
            let fits = fit_sweep(&table);
            note_failed_fits(&fits, &mut report);
            write_file(&path, |b| write_sweep(b, &table))?;
            let fits_file = fits_path(&path);
            write_file(&fits_file, |b| write_fit_report(b, &fits))?;
            report.files.extend([path, fits_file]);
        }
        Scenario::FitReport => {
            let plan = StudyPlan {
                omega: cfg.system.omega,
                ion_coupling: cfg.system.ion_coupling,
                dt: cfg.dt,
                closed_t_max: cfg.t_max,
                ..StudyPlan::default()
            };
            let fits = plan.full_report(opts.exec);
            note_failed_fits(&fits, &mut report);
            write_file(&path, |b| write_fit_report(b, &fits))?;
            report.files.push(path);
        }
    }
    Ok(report)
}

/// Strips round-off from accumulated grid times for display.
fn grid_time(t: f64) -> f64 {
    (t * 1e9).round() / 1e9
}

fn note_failed_fits(fits: &[FitReportRow], report: &mut RunReport) {
    for f in fits {
        if let Err(e) = &f.result {
            report.warnings.push(format!("fit `{}` failed: {e}", f.label));
        }
    }
}

fn trajectory(cfg: &ScenarioConfig, exec: Execution) -> Result<Trajectory> {
    let times = time_grid(cfg.t_max, cfg.dt)?;
    let traj = match cfg.scenario {
        Scenario::Open => open_trajectory(cfg.initial, &cfg.system, &cfg.bath, &times, exec)?,
        _ => closed_trajectory(cfg.initial, &cfg.system, &times, exec)?,
    };
    if traj.records.is_empty() {
        return Err(Error::NumericalAt {
            time: times[0],
            reason: "the initial state already exceeds the negativity error budget".into(),
        }
        .into());
    }
    Ok(traj)
}

/// Six eigenvalues of the phase-space generator, the squeezing threshold and
/// the classification, as a plain-text table.
pub fn spectrum_report(s: &SystemParams) -> Result<String> {
    let c = spectrum(s)?;
    let kind = match c.kind {
        SpectrumKind::Rotational => "rotational",
        SpectrumKind::Mixed => "mixed",
    };
    let mut out = String::new();
    out.push_str(&format!("threshold  {}\n", number(c.threshold)));
    out.push_str(&format!("kind       {kind}\n"));
    out.push_str("eigenvalue  re  im\n");
    for (k, z) in c.eigenvalues.iter().enumerate() {
        out.push_str(&format!("{}  {}  {}\n", k + 1, number(z.re), number(z.im)));
    }
    Ok(out)
}

/// Columns of a CSV file, by header name.
pub struct CsvColumns {
    pub header: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

impl CsvColumns {
    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
        let header = r
            .headers()
            .map_err(|e| CliError::io(path, e))?
            .iter()
            .map(String::from)
            .collect();
        let rows = r
            .records()
            .collect::<csv::Result<Vec<_>>>()
            .map_err(|e| CliError::io(path, e))?;
        Ok(Self { header, rows })
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Usage(format!(
                "no column `{name}` (available: {})",
                self.header.join(", ")
            ))
        })
    }

    /// `(x, y)` pairs from rows where both fields are numbers. Rows with an
    /// empty field (failed sweep points) are skipped.
    pub fn series(&self, x: &str, y: &str) -> Result<(Vec<f64>, Vec<f64>)> {
        let (ix, iy) = (self.index(x)?, self.index(y)?);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (k, row) in self.rows.iter().enumerate() {
            let (Some(a), Some(b)) = (row.get(ix), row.get(iy)) else {
                return Err(CliError::Usage(format!("data row {} is short", k + 1)));
            };
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("data row {}: `{s}` is not a number", k + 1)))
            };
            xs.push(parse(a)?);
            ys.push(parse(b)?);
        }
        Ok((xs, ys))
    }
}

/// Fits `model` to two columns of a CSV file.
pub fn fit_columns(path: &Path, model: &str, x: Option<&str>, y: Option<&str>) -> Result<FitReportRow> {
    let model = FitModel::from_name(model).ok_or_else(|| {
        let names: Vec<_> = FitModel::ALL.iter().map(|m| m.name()).collect();
        CliError::Usage(format!("unknown model `{model}` (expected one of {})", names.join(", ")))
    })?;
    let data = CsvColumns::read(path)?;
    let x = match x {
        Some(x) => x.to_string(),
        None => data
            .header
            .first()
            .cloned()
            .ok_or_else(|| CliError::Usage("empty header".into()))?,
    };
    let y = match y {
        Some(y) => y.to_string(),
        None if data.header.iter().any(|h| h == "n12") => "n12".into(),
        None => data
            .header
            .get(1)
            .cloned()
            .ok_or_else(|| CliError::Usage("need at least two columns".into()))?,
    };
    let (xs, ys) = data.series(&x, &y)?;
    Ok(FitReportRow {
        label: format!("{y} vs {x}"),
        points: xs.len(),
        result: fit(model, &xs, &ys, None),
    })
}
