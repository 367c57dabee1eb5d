//! Trajectories, parameter sweeps and trend fits built on the solvers.
//!
//! Above the squeezing threshold the covariance grows like `e^{2ω̃t}` and
//! round-off in the negativities grows with it, at a rate that depends on
//! how pure the state is. Trajectories stop at the first state whose
//! estimated negativity error passes [`NEGATIVITY_ERROR_BUDGET`] and report
//! where they stopped.

use crate::closed::{evolve_closed, BlockDecomposition, InitialState};
use crate::entanglement::{
    ion_ion_negativity, ion_ion_negativity_error, negativities, negativities_error,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::SystemParams;
use crate::open::{drift_and_diffusion, evolve_open, nems_damping_lindblads, BathParams};
use crate::symplectic::CovarianceMatrix;
use crate::trend::{
    first_zero_time, fit, local_maxima, oscillation_period, FitModel, FitResult, PeakList,
    PeriodEstimate,
};

/// Largest tolerated round-off estimate for a reported negativity.
pub const NEGATIVITY_ERROR_BUDGET: f64 = 1e-6;

/// Noise level of the normalized `det C_I` used for zero crossings.
pub const DET_NOISE: f64 = 1e-12;

/// Negativities at or below this count as zero.
pub const ZERO_TOL: f64 = 1e-10;

/// Uniform grid `0, dt, 2dt, ..., t_max`.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    if !(t_max.is_finite() && t_max > dt) {
        return Err(Error::invalid(format!("t_max must exceed dt, got {t_max}")));
    }
    let n = (t_max / dt).round() as usize;
    Ok((0..=n).map(|k| k as f64 * dt).collect())
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::invalid(format!("bad grid [{lo}, {hi}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect())
}

/// One time point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub n12: f64,
    pub n0_12: f64,
    pub n1_02: f64,
    pub n2_01: f64,
    pub tau: f64,
    /// Smallest symplectic eigenvalue of `2γ`.
    pub min_symplectic_eig: f64,
    /// `1 / (2 sqrt(det γ_N))` for the resonator's reduced state.
    pub purity_nems: f64,
    /// Resonator-ion-1 negativity.
    pub n01: f64,
    /// Largest round-off estimate over the negativities of this record.
    pub negativity_error: f64,
}

impl TrajectoryRecord {
    pub fn from_state(t: f64, gamma: &CovarianceMatrix) -> Result<Self> {
        let n = negativities(gamma)?;
        let negativity_error = negativities_error(gamma)?;
        let min_symplectic_eig = gamma.min_symplectic_eigenvalue()?;
        let g = gamma.matrix();
        let det_n = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
        Ok(Self {
            t,
            n12: n.n12,
            n0_12: n.cuts.n0_12,
            n1_02: n.cuts.n1_02,
            n2_01: n.cuts.n2_01,
            tau: n.tau,
            min_symplectic_eig,
            purity_nems: 1.0 / (2.0 * det_n.sqrt()),
            n01: n.n01,
            negativity_error,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    /// First grid time left out, because the estimated negativity error
    /// passed [`NEGATIVITY_ERROR_BUDGET`] or the state overflowed.
    pub truncated_at: Option<f64>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, f: impl Fn(&TrajectoryRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }

    /// Last time covered.
    pub fn end(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.t)
    }
}

enum Point<T> {
    Kept(T),
    Beyond,
}

/// Evaluates `f` on every state, then keeps the prefix before the first
/// state that overflowed or whose `error` estimate passes the budget. Errors
/// past that point are ignored. Returns the kept values.
fn until_horizon<T: Send>(
    states: &[Result<CovarianceMatrix>],
    exec: Execution,
    error: impl Fn(&CovarianceMatrix) -> Result<f64> + Sync,
    f: impl Fn(usize, &CovarianceMatrix) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let idx: Vec<usize> = (0..states.len()).collect();
    let points = exec.map(&idx, |&i| -> Result<Point<T>> {
        match &states[i] {
            Err(e) if e.is_numerical() => Ok(Point::Beyond),
            Err(e) => Err(e.clone()),
            Ok(g) if error(g)? > NEGATIVITY_ERROR_BUDGET => Ok(Point::Beyond),
            Ok(g) => Ok(Point::Kept(f(i, g)?)),
        }
    });
    let mut kept = Vec::with_capacity(states.len());
    for p in points {
        match p? {
            Point::Kept(v) => kept.push(v),
            Point::Beyond => break,
        }
    }
    Ok(kept)
}

fn records_until_horizon(
    times: &[f64],
    states: Vec<Result<CovarianceMatrix>>,
    exec: Execution,
) -> Result<Trajectory> {
    let records = until_horizon(&states, exec, negativities_error, |i, g| {
        TrajectoryRecord::from_state(times[i], g)
    })?;
    Ok(Trajectory {
        truncated_at: times.get(records.len()).copied(),
        records,
    })
}

pub fn closed_states(
    initial: InitialState,
    s: &SystemParams,
    times: &[f64],
    exec: Execution,
) -> Result<Vec<Result<CovarianceMatrix>>> {
    let gamma0 = initial.covariance()?;
    s.validate()?;
    Ok(exec.map(times, |&t| evolve_closed(&gamma0, s, t)))
}

pub fn closed_trajectory(
    initial: InitialState,
    s: &SystemParams,
    times: &[f64],
    exec: Execution,
) -> Result<Trajectory> {
    let states = closed_states(initial, s, times, exec)?;
    records_until_horizon(times, states, exec)
}

pub fn open_states(
    initial: InitialState,
    s: &SystemParams,
    bath: &BathParams,
    times: &[f64],
) -> Result<Vec<CovarianceMatrix>> {
    let dd = drift_and_diffusion(s, &nems_damping_lindblads(bath))?;
    evolve_open(&initial.covariance()?, &dd, times)
}

/// Open evolution is sequential in time; the negativities are mapped with
/// `exec`.
pub fn open_trajectory(
    initial: InitialState,
    s: &SystemParams,
    bath: &BathParams,
    times: &[f64],
    exec: Execution,
) -> Result<Trajectory> {
    let states = open_states(initial, s, bath, times)?;
    records_until_horizon(times, states.into_iter().map(Ok).collect(), exec)
}

/// `det C_I / |C_I|_F²`, scale-free so that round-off stays near `1e-16`.
pub fn normalized_det_c_i(gamma: &CovarianceMatrix) -> Result<f64> {
    let c = BlockDecomposition::from_covariance(gamma)?.c_i;
    let norm = c.norm_squared();
    Ok(if norm == 0.0 { 0.0 } else { c.determinant() / norm })
}

/// First local maximum and oscillation period of the ion-ion negativity
/// under closed evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSummary {
    pub first_peak_time: f64,
    pub first_peak_value: f64,
    pub period: PeriodEstimate,
    /// End of the analysed window.
    pub window_end: f64,
}

pub fn closed_summary(
    s: &SystemParams,
    alpha: f64,
    dt: f64,
    t_max: f64,
    exec: Execution,
) -> Result<ClosedSummary> {
    let times = time_grid(t_max, dt)?;
    let initial = InitialState::NemsThermal { alpha };
    let states = closed_states(initial, s, &times, exec)?;
    let values = until_horizon(&states, exec, ion_ion_negativity_error, |_, g| {
        Ok((ion_ion_negativity(g)?, normalized_det_c_i(g)?))
    })?;
    let times = &times[..values.len()];
    if values.len() < 3 {
        return Err(Error::NotEnoughData("trajectory leaves the reliable range immediately".into()));
    }
    let n12: Vec<f64> = values.iter().map(|v| v.0).collect();
    let det: Vec<f64> = values.iter().map(|v| v.1).collect();

    let peaks = local_maxima(times, &n12)?;
    if peaks.is_empty() {
        return Err(Error::NotEnoughData(format!(
            "no local maximum of N12 before t = {}",
            times[times.len() - 1]
        )));
    }
    let period = oscillation_period(times, &det, DET_NOISE, &n12)?;
    Ok(ClosedSummary {
        first_peak_time: peaks.times[0],
        first_peak_value: peaks.values[0],
        period,
        window_end: times[times.len() - 1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Kappa,
    Alpha,
    NBar,
    Zeta,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Kappa => "kappa",
            SweepVariable::Alpha => "alpha",
            SweepVariable::NBar => "n_bar",
            SweepVariable::Zeta => "zeta",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::Kappa, Self::Alpha, Self::NBar, Self::Zeta]
            .into_iter()
            .find(|v| v.name() == name)
    }

    /// Names of the measured quantities for this sweep.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            SweepVariable::Kappa | SweepVariable::Alpha => {
                &["first_peak_time", "max_n12", "period"]
            }
            SweepVariable::NBar | SweepVariable::Zeta => &["tau", "n01", "n12"],
        }
    }
}

/// Fixed parameters of a sweep; the swept one is overridden per point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSetup {
    pub omega: f64,
    pub ion_coupling: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub zeta: f64,
    pub n_bar: f64,
    pub dt: f64,
    /// Window end for closed sweeps, evaluation time for open sweeps.
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<Vec<f64>, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// `(x, y)` pairs of one column over the points that succeeded.
    pub fn series(&self, column: &str) -> (Vec<f64>, Vec<f64>) {
        let Some(k) = self.variable.columns().iter().position(|c| *c == column) else {
            return (vec![], vec![]);
        };
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|v| (r.value, v[k])))
            .unzip()
    }
}

/// Negativities `(tau, n01, n12)` at time `t` under open evolution.
pub fn open_point(s: &SystemParams, bath: &BathParams, alpha: f64, t: f64) -> Result<Vec<f64>> {
    let states = open_states(InitialState::NemsThermal { alpha }, s, bath, &[t])?;
    let g = &states[0];
    let err = negativities_error(g)?;
    if err > NEGATIVITY_ERROR_BUDGET {
        return Err(Error::NumericalAt {
            time: t,
            reason: format!("negativity error estimate {err:.1e} exceeds the budget"),
        });
    }
    let n = negativities(g)?;
    Ok(vec![n.tau, n.n01, n.n12])
}

fn sweep_point(setup: &SweepSetup, var: SweepVariable, x: f64) -> Result<Vec<f64>> {
    let mut p = *setup;
    match var {
        SweepVariable::Kappa => p.kappa = x,
        SweepVariable::Alpha => p.alpha = x,
        SweepVariable::NBar => p.n_bar = x,
        SweepVariable::Zeta => p.zeta = x,
    }
    let s = SystemParams::resonant(p.omega, p.kappa, p.ion_coupling)?;
    match var {
        SweepVariable::Kappa | SweepVariable::Alpha => {
            let c = closed_summary(&s, p.alpha, p.dt, p.t_max, Execution::Sequential)?;
            Ok(vec![c.first_peak_time, c.first_peak_value, c.period.period])
        }
        SweepVariable::NBar | SweepVariable::Zeta => {
            let bath = BathParams::new(p.zeta, p.n_bar)?;
            open_point(&s, &bath, p.alpha, p.t_max)
        }
    }
}

/// Evaluates every grid point; failures are kept in their row.
pub fn run_sweep(
    setup: &SweepSetup,
    var: SweepVariable,
    grid: &[f64],
    exec: Execution,
) -> SweepTable {
    let rows = exec.map(grid, |&x| SweepRow {
        value: x,
        outcome: sweep_point(setup, var, x),
    });
    SweepTable {
        variable: var,
        rows,
    }
}

/// One fitted trend.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReportRow {
    /// What was fitted, e.g. `max_n12 vs kappa`.
    pub label: String,
    pub points: usize,
    pub result: std::result::Result<FitResult, Error>,
}

fn fit_row(label: String, model: FitModel, xs: &[f64], ys: &[f64]) -> FitReportRow {
    FitReportRow {
        label,
        points: xs.len(),
        result: fit(model, xs, ys, None),
    }
}

fn positive_only(xs: &[f64], ys: &[f64]) -> (Vec<f64>, Vec<f64>) {
    xs.iter()
        .zip(ys)
        .filter(|(_, y)| **y > ZERO_TOL)
        .map(|(x, y)| (*x, *y))
        .unzip()
}

/// Trend fits for a sweep: log growth and inverse-sqrt period in `kappa`,
/// exponential in `sqrt(alpha)`, and offset exponentials in `n_bar` or
/// `zeta`. Open-system fits use only points with nonzero negativity.
pub fn fit_sweep(table: &SweepTable) -> Vec<FitReportRow> {
    let var = table.variable.name();
    match table.variable {
        SweepVariable::Kappa => {
            let (x, y) = table.series("max_n12");
            let (xp, yp) = table.series("period");
            vec![
                fit_row(format!("max_n12 vs {var}"), FitModel::LogGrowth, &x, &y),
                fit_row(format!("period vs {var}"), FitModel::InverseSqrt, &xp, &yp),
            ]
        }
        SweepVariable::Alpha => {
            let (x, y) = table.series("max_n12");
            vec![fit_row(format!("max_n12 vs {var}"), FitModel::ExpSqrtAlpha, &x, &y)]
        }
        SweepVariable::NBar | SweepVariable::Zeta => ["tau", "n01", "n12"]
            .iter()
            .map(|c| {
                let (x, y) = table.series(c);
                let (x, y) = positive_only(&x, &y);
                fit_row(format!("{c} vs {var}"), FitModel::OffsetExp, &x, &y)
            })
            .collect(),
    }
}

/// Local maxima of `tau`, `n01` and `n12` along one open trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSequences {
    pub tau: PeakList,
    pub n01: PeakList,
    pub n12: PeakList,
    pub window_end: f64,
}

pub fn open_peak_sequences(
    s: &SystemParams,
    bath: &BathParams,
    alpha: f64,
    dt: f64,
    t_max: f64,
    exec: Execution,
) -> Result<PeakSequences> {
    let times = time_grid(t_max, dt)?;
    let traj = open_trajectory(InitialState::NemsThermal { alpha }, s, bath, &times, exec)?;
    let t = traj.times();
    if t.len() < 3 {
        return Err(Error::NotEnoughData("trajectory too short for peaks".into()));
    }
    let peaks = |f: fn(&TrajectoryRecord) -> f64| local_maxima(&t, &traj.column(f));
    Ok(PeakSequences {
        tau: peaks(|r| r.tau)?,
        n01: peaks(|r| r.n01)?,
        n12: peaks(|r| r.n12)?,
        window_end: traj.end(),
    })
}

/// Pure-exponential decay fits to the peak sequences.
pub fn fit_peak_decay(p: &PeakSequences) -> Vec<FitReportRow> {
    [("tau", &p.tau), ("n01", &p.n01), ("n12", &p.n12)]
        .into_iter()
        .map(|(name, peaks)| {
            let (x, y) = positive_only(&peaks.times, &peaks.values);
            fit_row(format!("{name} peaks vs t"), FitModel::PureExp, &x, &y)
        })
        .collect()
}

/// Time of the first local maximum of `tau`, `n01` and `n12`.
pub fn first_maximum_times(
    s: &SystemParams,
    bath: &BathParams,
    alpha: f64,
    dt: f64,
    t_max: f64,
) -> Result<[f64; 3]> {
    let p = open_peak_sequences(s, bath, alpha, dt, t_max, Execution::Sequential)?;
    let first = |name: &str, l: &PeakList| {
        l.times
            .first()
            .copied()
            .ok_or_else(|| Error::NotEnoughData(format!("no local maximum of {name} before t = {}", p.window_end)))
    };
    Ok([first("tau", &p.tau)?, first("n01", &p.n01)?, first("n12", &p.n12)?])
}

/// Time-to-maximum rows over a `kappa` grid, with offset inverse-sqrt fits.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeToMaximum {
    pub rows: Vec<SweepRow>,
    pub fits: Vec<FitReportRow>,
}

pub fn time_to_maximum(
    setup: &SweepSetup,
    kappas: &[f64],
    exec: Execution,
) -> TimeToMaximum {
    let rows = exec.map(kappas, |&k| SweepRow {
        value: k,
        outcome: SystemParams::resonant(setup.omega, k, setup.ion_coupling)
            .and_then(|s| {
                let bath = BathParams::new(setup.zeta, setup.n_bar)?;
                first_maximum_times(&s, &bath, setup.alpha, setup.dt, setup.t_max)
            })
            .map(|a| a.to_vec()),
    });
    let fits = ["tau", "n01", "n12"]
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let (x, y): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter_map(|r| r.outcome.as_ref().ok().map(|v| (r.value, v[i])))
                .unzip();
            fit_row(format!("t_max {name} vs kappa"), FitModel::OffsetInverseSqrt, &x, &y)
        })
        .collect();
    TimeToMaximum { rows, fits }
}

/// When entanglement first dies under open evolution. `None` means it
/// survives the analysed window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstZeroTimes {
    pub n12: Option<f64>,
    pub tau: Option<f64>,
    pub window_end: f64,
}

impl FirstZeroTimes {
    /// Tripartite entanglement outlives the ion-ion entanglement: `n12` dies
    /// inside the window and `tau` dies strictly later or not at all.
    pub fn tau_outlives_n12(&self) -> bool {
        match (self.n12, self.tau) {
            (Some(n), Some(t)) => t > n,
            (Some(_), None) => true,
            _ => false,
        }
    }
}

pub fn first_zero_times(
    s: &SystemParams,
    bath: &BathParams,
    alpha: f64,
    dt: f64,
    t_max: f64,
    exec: Execution,
) -> Result<FirstZeroTimes> {
    let times = time_grid(t_max, dt)?;
    let traj = open_trajectory(InitialState::NemsThermal { alpha }, s, bath, &times, exec)?;
    let t = traj.times();
    Ok(FirstZeroTimes {
        n12: first_zero_time(&t, &traj.column(|r| r.n12), ZERO_TOL)?,
        tau: first_zero_time(&t, &traj.column(|r| r.tau), ZERO_TOL)?,
        window_end: traj.end(),
    })
}

/// Grids and windows of the standard trend study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyPlan {
    pub omega: f64,
    pub ion_coupling: f64,
    pub dt: f64,
    /// Closed-system window.
    pub closed_t_max: f64,
    pub kappa_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub alpha_kappas: Vec<f64>,
    /// Open sweeps: coupling, evaluation time.
    pub open_kappa: f64,
    pub open_t: f64,
    pub n_bar_grid: Vec<f64>,
    pub n_bar_zeta: f64,
    pub zeta_grid: Vec<f64>,
    pub zeta_n_bar: f64,
    /// Peak-decay trajectory.
    pub decay_n_bar: f64,
    pub decay_zeta: f64,
    pub decay_t_max: f64,
    /// Time-to-maximum study.
    pub ttm_kappas: Vec<f64>,
    pub ttm_n_bar: f64,
    pub ttm_zeta: f64,
    pub ttm_t_max: f64,
}

impl Default for StudyPlan {
    fn default() -> Self {
        Self {
            omega: 0.5,
            ion_coupling: 0.05,
            dt: 0.01,
            closed_t_max: 30.0,
            kappa_grid: (1..=40).map(f64::from).collect(),
            alpha_grid: (1..=10).map(f64::from).collect(),
            alpha_kappas: vec![1.0, 3.0],
            open_kappa: 1.0,
            open_t: 10.0,
            n_bar_grid: (0..=30).map(f64::from).collect(),
            n_bar_zeta: 0.01,
            zeta_grid: (0..=20).map(|k| 0.005 * k as f64).collect(),
            zeta_n_bar: 4.5,
            decay_n_bar: 10.0,
            decay_zeta: 0.01,
            decay_t_max: 60.0,
            ttm_kappas: (2..=20).map(|k| 0.5 * k as f64).collect(),
            ttm_n_bar: 4.5,
            ttm_zeta: 0.1,
            ttm_t_max: 10.0,
        }
    }
}

impl StudyPlan {
    fn setup(&self) -> SweepSetup {
        SweepSetup {
            omega: self.omega,
            ion_coupling: self.ion_coupling,
            kappa: self.open_kappa,
            alpha: 1.0,
            zeta: self.n_bar_zeta,
            n_bar: self.zeta_n_bar,
            dt: self.dt,
            t_max: self.closed_t_max,
        }
    }

    pub fn kappa_sweep(&self, exec: Execution) -> SweepTable {
        run_sweep(&self.setup(), SweepVariable::Kappa, &self.kappa_grid, exec)
    }

    pub fn alpha_sweep(&self, kappa: f64, exec: Execution) -> SweepTable {
        let setup = SweepSetup {
            kappa,
            ..self.setup()
        };
        run_sweep(&setup, SweepVariable::Alpha, &self.alpha_grid, exec)
    }

    pub fn n_bar_sweep(&self, exec: Execution) -> SweepTable {
        let setup = SweepSetup {
            zeta: self.n_bar_zeta,
            t_max: self.open_t,
            ..self.setup()
        };
        run_sweep(&setup, SweepVariable::NBar, &self.n_bar_grid, exec)
    }

    pub fn zeta_sweep(&self, exec: Execution) -> SweepTable {
        let setup = SweepSetup {
            n_bar: self.zeta_n_bar,
            t_max: self.open_t,
            ..self.setup()
        };
        run_sweep(&setup, SweepVariable::Zeta, &self.zeta_grid, exec)
    }

    pub fn peak_decay(&self, exec: Execution) -> Result<PeakSequences> {
        let s = SystemParams::resonant(self.omega, self.open_kappa, self.ion_coupling)?;
        let bath = BathParams::new(self.decay_zeta, self.decay_n_bar)?;
        open_peak_sequences(&s, &bath, 1.0, self.dt, self.decay_t_max, exec)
    }

    pub fn time_to_maximum(&self, exec: Execution) -> TimeToMaximum {
        let setup = SweepSetup {
            zeta: self.ttm_zeta,
            n_bar: self.ttm_n_bar,
            t_max: self.ttm_t_max,
            ..self.setup()
        };
        time_to_maximum(&setup, &self.ttm_kappas, exec)
    }

    /// Every trend fit of the study, in a fixed order.
    pub fn full_report(&self, exec: Execution) -> Vec<FitReportRow> {
        let mut out = fit_sweep(&self.kappa_sweep(exec));
        for &k in &self.alpha_kappas {
            for mut row in fit_sweep(&self.alpha_sweep(k, exec)) {
                row.label = format!("{} (kappa = {k})", row.label);
                out.push(row);
            }
        }
        out.extend(fit_sweep(&self.n_bar_sweep(exec)));
        out.extend(fit_sweep(&self.zeta_sweep(exec)));
        match self.peak_decay(exec) {
            Ok(p) => out.extend(fit_peak_decay(&p)),
            Err(e) => out.push(FitReportRow {
                label: "peaks vs t".into(),
                points: 0,
                result: Err(e),
            }),
        }
        out.extend(self.time_to_maximum(exec).fits);
        out
    }
}
