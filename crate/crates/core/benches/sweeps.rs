use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nems_entangle::analysis::{closed_trajectory, run_sweep, time_grid, SweepSetup, SweepVariable};
use nems_entangle::closed::InitialState;
use nems_entangle::exec::Execution;
use nems_entangle::model::SystemParams;
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn closed_trajectory_bench(c: &mut Criterion) {
    let s = SystemParams::resonant(0.5, 1.0, 0.05).unwrap();
    let times = time_grid(30.0, 0.01).unwrap();
    let mut group = c.benchmark_group("closed_trajectory");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| closed_trajectory(InitialState::CoherentProduct, black_box(&s), &times, exec).unwrap())
        });
    }
    group.finish();
}

fn n_bar_sweep_bench(c: &mut Criterion) {
    let setup = SweepSetup {
        omega: 0.5,
        ion_coupling: 0.05,
        kappa: 1.0,
        alpha: 1.0,
        zeta: 0.01,
        n_bar: 0.0,
        dt: 0.01,
        t_max: 10.0,
    };
    let grid: Vec<f64> = (0..=30).map(f64::from).collect();
    let mut group = c.benchmark_group("open_n_bar_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_sweep(black_box(&setup), SweepVariable::NBar, &grid, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, closed_trajectory_bench, n_bar_sweep_bench);
criterion_main!(benches);
