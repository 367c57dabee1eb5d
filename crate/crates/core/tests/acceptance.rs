//! One test per acceptance criterion. Each prints a `PASS` or `FAIL` line
//! with the measured numbers before asserting; run with `--nocapture` to see
//! them all.

use nalgebra::{DMatrix, Matrix2};
use nems_entangle::analysis::{
    closed_summary, closed_trajectory, first_zero_times, fit_peak_decay, fit_sweep, time_grid,
    FitReportRow, StudyPlan, SweepTable,
};
use nems_entangle::closed::{
    evolve_closed, propagator_analytic, propagator_numeric, BlockDecomposition, InitialState,
    PropagatorParams,
};
use nems_entangle::entanglement::log_negativity;
use nems_entangle::exec::Execution;
use nems_entangle::model::SystemParams;
use nems_entangle::open::{
    drift_and_diffusion, evolve_open, evolve_open_quadrature, nems_damping_lindblads, steady_state,
    BathParams,
};
use nems_entangle::symplectic::{is_symplectic, Bipartition, CovarianceMatrix};

const EXEC: Execution = Execution::Parallel;

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!("{} criterion {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion}: {detail}");
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// `max |a - b| / max(1, max |a|)`.
fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    max_abs(&(a - b)) / max_abs(a).max(1.0)
}

fn all_ok(table: &SweepTable) -> bool {
    table.rows.iter().all(|r| r.outcome.is_ok())
}

fn coefficient(row: &FitReportRow, name: &str) -> f64 {
    row.result
        .as_ref()
        .ok()
        .and_then(|r| r.coefficient(name))
        .unwrap_or(f64::NAN)
}

fn find<'a>(rows: &'a [FitReportRow], prefix: &str) -> &'a FitReportRow {
    rows.iter()
        .find(|r| r.label.starts_with(prefix))
        .unwrap_or_else(|| panic!("no fit row {prefix}"))
}

/// Worst relative error of `fitted` against `target` (NaN counts as a miss).
fn worst(fitted: &[f64], target: &[f64]) -> f64 {
    fitted
        .iter()
        .zip(target)
        .map(|(g, w)| if g.is_finite() { rel(*g, *w) } else { f64::INFINITY })
        .fold(0.0, f64::max)
}

#[test]
fn criterion_01_peak_growth_law() {
    let table = StudyPlan::default().kappa_sweep(EXEC);
    let (k, peak) = table.series("max_n12");
    let err = k
        .iter()
        .zip(&peak)
        .map(|(k, p)| rel(*p, 0.5 * (2.0 * k + 0.9).ln()))
        .fold(0.0, f64::max);
    let pass = all_ok(&table) && k.len() == 40 && err < 0.05;
    verdict(
        "1",
        pass,
        &format!("first N12 maximum vs 0.5 ln(2κ + 0.9) over κ = 1..40: max rel err {err:.4} (< 0.05), {} points", k.len()),
    );
}

#[test]
fn criterion_02_period_law() {
    let table = StudyPlan::default().kappa_sweep(EXEC);
    let (k, period) = table.series("period");
    let err = k
        .iter()
        .zip(&period)
        .map(|(k, p)| rel(*p, 1.0 / (0.1 * k.sqrt() + 0.4)))
        .fold(0.0, f64::max);
    let pass = all_ok(&table) && k.len() == 40 && err < 0.05;
    verdict(
        "2",
        pass,
        &format!("period vs 1/(0.1 sqrt κ + 0.4) over κ = 1..40: max rel err {err:.4} (< 0.05); period at κ = 1 is {:.4}, at κ = 40 is {:.4}",
            period.first().copied().unwrap_or(f64::NAN), period.last().copied().unwrap_or(f64::NAN)),
    );
}

#[test]
fn criterion_03_thermal_suppression() {
    let plan = StudyPlan::default();
    let mut pass = true;
    let mut detail = Vec::new();
    for (kappa, target) in [(1.0, [1.91, 1.3]), (3.0, [2.08, 0.75])] {
        let table = plan.alpha_sweep(kappa, EXEC);
        let rows = fit_sweep(&table);
        let row = find(&rows, "max_n12");
        let got = [coefficient(row, "b"), coefficient(row, "c")];
        let err = worst(&got, &target);
        pass &= all_ok(&table) && err < 0.10;
        detail.push(format!(
            "κ = {kappa}: (b, c) = ({:.3}, {:.3}) vs ({}, {}), worst rel err {err:.3}",
            got[0], got[1], target[0], target[1]
        ));
    }
    verdict("3", pass, &format!("{} (< 0.10)", detail.join("; ")));
}

#[test]
fn criterion_04_period_alpha_independence() {
    let s = SystemParams::resonant(0.5, 3.0, 0.05).unwrap();
    let p1 = closed_summary(&s, 1.0, 0.01, 30.0, EXEC).unwrap().period;
    let p5 = closed_summary(&s, 5.0, 0.01, 30.0, EXEC).unwrap().period;
    let err = rel(p5.period, p1.period);
    verdict(
        "4",
        err < 0.01,
        &format!(
            "κ = 3 period at α = 1: {:.5} ({:?}); α = 5: {:.5} ({:?}); rel diff {err:.2e} (< 0.01)",
            p1.period, p1.method, p5.period, p5.method
        ),
    );
}

#[test]
fn criterion_05_open_n_bar_dependence() {
    let table = StudyPlan::default().n_bar_sweep(EXEC);
    let rows = fit_sweep(&table);
    let got: Vec<f64> = ["tau", "n01", "n12"]
        .iter()
        .map(|c| coefficient(find(&rows, c), "c"))
        .collect();
    let target = [0.07, 0.04, 0.08];
    let err = worst(&got, &target);
    verdict(
        "5",
        all_ok(&table) && err < 0.15,
        &format!(
            "a + b exp(-c N̄) at t = 10: c(τ, N01, N12) = ({:.4}, {:.4}, {:.4}) vs (0.07, 0.04, 0.08), worst rel err {err:.3} (< 0.15)",
            got[0], got[1], got[2]
        ),
    );
}

#[test]
fn criterion_06_decay_rate_ordering() {
    let peaks = StudyPlan::default().peak_decay(EXEC).unwrap();
    let rows = fit_peak_decay(&peaks);
    let b = |name: &str| coefficient(find(&rows, name), "b");
    let got = [b("n12"), b("n01"), b("tau")];
    let target = [0.120, 0.032, 0.008];
    let ordered = got[0] > got[1] && got[1] > got[2];
    let err = worst(&got, &target);
    verdict(
        "6",
        ordered && err < 0.15,
        &format!(
            "peak decay rates (N12, N01, τ) = ({:.4}, {:.4}, {:.4}) vs (0.120, 0.032, 0.008); ordered: {ordered}; worst rel err {err:.3} (< 0.15); peaks ({}, {}, {}) up to t = {:.2}",
            got[0], got[1], got[2], peaks.n12.len(), peaks.n01.len(), peaks.tau.len(), peaks.window_end
        ),
    );
}

#[test]
fn criterion_07_zeta_dependence() {
    let table = StudyPlan::default().zeta_sweep(EXEC);
    let rows = fit_sweep(&table);
    let got: Vec<f64> = ["tau", "n01", "n12"]
        .iter()
        .map(|c| coefficient(find(&rows, c), "c"))
        .collect();
    let target = [23.60, 20.75, 47.20];
    let err = worst(&got, &target);
    verdict(
        "7",
        all_ok(&table) && err < 0.15,
        &format!(
            "a + b exp(-c ζ) at t = 10: c(τ, N01, N12) = ({:.2}, {:.2}, {:.2}) vs (23.60, 20.75, 47.20), worst rel err {err:.3} (< 0.15)",
            got[0], got[1], got[2]
        ),
    );
}

#[test]
fn criterion_08_time_to_maximum_law() {
    let ttm = StudyPlan::default().time_to_maximum(EXEC);
    let target = [
        ("tau", [-0.04, -0.06, 0.44]),
        ("n01", [-0.10, -0.20, 0.75]),
        ("n12", [-0.02, 0.05, 0.28]),
    ];
    let mut pass = ttm.rows.iter().all(|r| r.outcome.is_ok());
    let mut detail = Vec::new();
    for (name, want) in target {
        let row = find(&ttm.fits, &format!("t_max {name}"));
        let got = [coefficient(row, "a"), coefficient(row, "b"), coefficient(row, "c")];
        let err = worst(&got, &want);
        pass &= err < 0.15;
        detail.push(format!(
            "{name}: ({:.3}, {:.3}, {:.3}) vs {want:?}, worst rel err {err:.2}",
            got[0], got[1], got[2]
        ));
    }
    verdict("8", pass, &format!("a + 1/(b + c sqrt κ): {} (< 0.15)", detail.join("; ")));
}

#[test]
fn criterion_09_robustness_ordering() {
    let configs = [
        (1.0, 0.01, 4.5),
        (1.5, 0.01, 4.5),
        (1.0, 0.02, 4.5),
        (1.0, 0.01, 15.0),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (kappa, zeta, n_bar) in configs {
        let s = SystemParams::resonant(0.5, kappa, 0.05).unwrap();
        let bath = BathParams::new(zeta, n_bar).unwrap();
        let z = first_zero_times(&s, &bath, 1.0, 0.01, 40.0, EXEC).unwrap();
        pass &= z.tau_outlives_n12();
        let show = |v: Option<f64>| v.map_or(format!("> {:.2}", z.window_end), |t| format!("{t:.2}"));
        detail.push(format!(
            "(κ {kappa}, ζ {zeta}, N̄ {n_bar}): N12 zero at {}, τ zero at {}",
            show(z.n12),
            show(z.tau)
        ));
    }
    verdict("9", pass, &detail.join("; "));
}

/// Two-mode squeezed vacuum with squeezing `r`.
fn two_mode_squeezed(r: f64) -> CovarianceMatrix {
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let mut v = DMatrix::identity(4, 4) * c;
    v[(0, 2)] = s;
    v[(2, 0)] = s;
    v[(1, 3)] = -s;
    v[(3, 1)] = -s;
    CovarianceMatrix::new(v * 0.5).unwrap()
}

#[test]
fn criterion_10_property_suite() {
    let mut items: Vec<(&str, bool, String)> = Vec::new();
    let times: Vec<f64> = (0..=50).map(|k| 0.1 * k as f64).collect();
    let kappas = [0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 3.0];

    let mut worst_defect: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut symplectic = true;
    for &kappa in &kappas {
        let s = SystemParams::resonant(0.5, kappa, 0.05).unwrap();
        let p = PropagatorParams::from_system(&s).unwrap();
        for &t in &times {
            let a = propagator_analytic(&p, t).unwrap();
            let n = propagator_numeric(&s, t).unwrap();
            symplectic &= is_symplectic(&a, 1e-10) && is_symplectic(&n, 1e-10);
            let j = nems_entangle::symplectic::symplectic_form(3).unwrap().into_matrix();
            worst_defect = worst_defect.max(max_abs(&(a.transpose() * &j * &a - &j)));
            worst_gap = worst_gap.max(rel_diff(&n, &a));
        }
    }
    items.push(("propagators symplectic", symplectic, format!("max |EᵀJE - J| = {worst_defect:.1e} (<= 1e-10)")));
    items.push(("analytic vs exponential", worst_gap <= 1e-8, format!("max rel diff {worst_gap:.1e} (<= 1e-8)")));

    let mut block_defect: f64 = 0.0;
    let mut coupling_gap: f64 = 0.0;
    let mut alpha_one_gap: f64 = 0.0;
    for &kappa in &kappas {
        let s = SystemParams::resonant(0.5, kappa, 0.05).unwrap();
        let s2 = SystemParams::resonant(0.5, kappa, 0.2).unwrap();
        for &t in &times {
            for init in [InitialState::CoherentProduct, InitialState::NemsThermal { alpha: 5.0 }] {
                let g0 = init.covariance().unwrap();
                let g = evolve_closed(&g0, &s, t).unwrap();
                let b = BlockDecomposition::from_covariance(&g).unwrap();
                let d = b.a_i + b.c_i - Matrix2::identity();
                block_defect = block_defect.max(d.abs().max() / b.c_i.abs().max().max(1.0));
                let g2 = evolve_closed(&g0, &s2, t).unwrap();
                coupling_gap = coupling_gap.max(rel_diff(g.matrix(), g2.matrix()));
            }
            let cold = evolve_closed(&InitialState::CoherentProduct.covariance().unwrap(), &s, t).unwrap();
            let warm = evolve_closed(&InitialState::NemsThermal { alpha: 1.0 }.covariance().unwrap(), &s, t).unwrap();
            alpha_one_gap = alpha_one_gap.max(rel_diff(cold.matrix(), warm.matrix()));
        }
    }
    items.push(("A_I = I - C_I", block_defect <= 1e-10, format!("max rel defect {block_defect:.1e} (<= 1e-10)")));
    items.push(("ion-ion coupling independence", coupling_gap <= 1e-10, format!("max rel diff between Ω = 0.05 and 0.2: {coupling_gap:.1e} (<= 1e-10)")));

    let s1 = SystemParams::resonant(0.5, 1.0, 0.05).unwrap();
    let bath = BathParams::new(0.01, 4.5).unwrap();
    let dd = drift_and_diffusion(&s1, &nems_damping_lindblads(&bath)).unwrap();
    let g0 = InitialState::CoherentProduct.covariance().unwrap();
    let grid: Vec<f64> = (0..=10).map(f64::from).collect();
    let ode = evolve_open(&g0, &dd, &grid).unwrap();
    let quad_gap = grid
        .iter()
        .zip(&ode)
        .map(|(t, g)| rel_diff(evolve_open_quadrature(&g0, &dd, *t).unwrap().matrix(), g.matrix()))
        .fold(0.0, f64::max);
    items.push(("ODE vs quadrature", quad_gap <= 1e-6, format!("max rel diff over t = 0..10: {quad_gap:.1e} (<= 1e-6)")));

    let s0 = SystemParams::resonant(0.5, 0.0, 0.05).unwrap();
    let n_bar = 4.5;
    let dd0 = drift_and_diffusion(&s0, &nems_damping_lindblads(&BathParams::new(0.01, n_bar).unwrap())).unwrap();
    let ss = steady_state(&dd0).unwrap();
    let ss_gap = max_abs(&(ss.covariance.matrix() - DMatrix::identity(2, 2) * (n_bar + 0.5)));
    items.push(("decoupled steady state", ss_gap <= 1e-8 && ss.damped_modes == [0], format!("|X - (N̄ + 1/2) I| = {ss_gap:.1e} (<= 1e-8)")));

    let r = 0.7;
    let n = log_negativity(&two_mode_squeezed(r), &Bipartition::new(vec![1]).unwrap()).unwrap();
    items.push(("two-mode squeezed N = r", (n - r).abs() <= 1e-9, format!("N = {n:.12} for r = {r} (N = 2r = {:.12} under the sum-over-pairs convention)", 2.0 * r)));

    items.push(("α = 1 thermal equals T = 0", alpha_one_gap <= 1e-10, format!("max rel diff {alpha_one_gap:.1e} (<= 1e-10)")));

    let traj = closed_trajectory(InitialState::CoherentProduct, &s0, &time_grid(30.0, 0.01).unwrap(), EXEC).unwrap();
    let max_n12 = traj.records.iter().map(|r| r.n12).fold(0.0, f64::max);
    items.push((
        "κ = 0 gives N12 = 0",
        max_n12 == 0.0 && traj.truncated_at.is_none(),
        format!("max N12 over {} points = {max_n12}", traj.records.len()),
    ));

    let mut pass = true;
    for (name, ok, detail) in &items {
        println!("  [{}] {name}: {detail}", if *ok { "ok" } else { "FAIL" });
        pass &= ok;
    }
    let failed: Vec<&str> = items.iter().filter(|i| !i.1).map(|i| i.0).collect();
    verdict(
        "10",
        pass,
        &format!("{} of {} properties hold; failing: {failed:?}", items.len() - failed.len(), items.len()),
    );
}
