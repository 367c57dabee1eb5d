mod common;

use common::{random_state, random_symplectic};
use nalgebra::DMatrix;
use nems_entangle::analysis::{closed_summary, closed_trajectory, time_grid};
use nems_entangle::closed::{evolve_closed, BlockDecomposition, InitialState};
use nems_entangle::entanglement::{
    ion_ion_negativity, ion_ion_negativity_from_correlation, ion_ion_negativity_local,
    log_negativity, negativity_error_estimate, one_versus_two,
};
use nems_entangle::exec::Execution;
use nems_entangle::model::SystemParams;
use nems_entangle::symplectic::{partial_transpose, Bipartition, CovarianceMatrix};
use proptest::prelude::*;

fn entries(n: usize, scale: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-scale..scale, n)
}

/// Rotates the phase space of one mode by `theta`.
fn rotate_mode(gamma: &CovarianceMatrix, mode: usize, theta: f64) -> CovarianceMatrix {
    let mut s = DMatrix::identity(6, 6);
    let (c, sn) = (theta.cos(), theta.sin());
    let k = 2 * mode;
    s[(k, k)] = c;
    s[(k, k + 1)] = sn;
    s[(k + 1, k)] = -sn;
    s[(k + 1, k + 1)] = c;
    let m = &s * gamma.matrix() * s.transpose();
    CovarianceMatrix::new((&m + m.transpose()) * 0.5).unwrap()
}

#[test]
fn uncoupled_ions_never_entangle() {
    let s = SystemParams::resonant(0.5, 0.0, 0.05).unwrap();
    let times = time_grid(30.0, 0.05).unwrap();
    for init in [InitialState::CoherentProduct, InitialState::NemsThermal { alpha: 3.0 }] {
        let traj = closed_trajectory(init, &s, &times, Execution::Parallel).unwrap();
        assert_eq!(traj.records.len(), times.len());
        assert!(traj.records.iter().all(|r| r.n12 == 0.0));
    }
}

#[test]
fn thermal_noise_lowers_the_first_peak() {
    let s = SystemParams::resonant(0.5, 3.0, 0.05).unwrap();
    let peaks: Vec<f64> = (1..=10)
        .map(|a| {
            closed_summary(&s, f64::from(a), 0.01, 30.0, Execution::Parallel)
                .unwrap()
                .first_peak_value
        })
        .collect();
    for w in peaks.windows(2) {
        assert!(w[1] <= w[0], "{peaks:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn either_side_of_a_cut(
        h in entries(21, 0.6),
        nus in prop::collection::vec(1.0..2.0f64, 3),
        side in prop::sample::subsequence(vec![0usize, 1, 2], 1..3),
    ) {
        let gamma = random_state(&random_symplectic(3, &h), &nus);
        let part = Bipartition::new(side).unwrap();
        let other = part.complement(3).unwrap();
        let a = log_negativity(&gamma, &part).unwrap();
        let b = log_negativity(&gamma, &other).unwrap();
        prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }

    #[test]
    fn tau_is_the_smallest_cut(h in entries(21, 0.6), nus in prop::collection::vec(1.0..2.0f64, 3)) {
        let gamma = random_state(&random_symplectic(3, &h), &nus);
        let cuts = one_versus_two(&gamma).unwrap();
        let tau = cuts.min();
        prop_assert!(tau >= 0.0);
        prop_assert!(tau <= cuts.n0_12 && tau <= cuts.n1_02 && tau <= cuts.n2_01);
    }

    #[test]
    fn three_routes_to_ion_ion_negativity(
        kappa in 0.0..3.0f64,
        alpha in 1.0..10.0f64,
        t in 0.0..6.0f64,
    ) {
        let s = SystemParams::resonant(0.5, kappa, 0.05).unwrap();
        let g = evolve_closed(&InitialState::NemsThermal { alpha }.covariance().unwrap(), &s, t).unwrap();
        let b = BlockDecomposition::from_covariance(&g).unwrap();
        let full = ion_ion_negativity(&g).unwrap();
        let local = ion_ion_negativity_local(&b.a_i).unwrap();
        let corr = ion_ion_negativity_from_correlation(&b.c_i).unwrap();
        prop_assert!((full - local).abs() <= 1e-9, "{full} vs {local}");
        prop_assert!((full - corr).abs() <= 1e-9, "{full} vs {corr}");
    }

    #[test]
    fn local_rotation_keeps_ion_ion_negativity(
        kappa in 0.0..3.0f64,
        t in 0.0..6.0f64,
        theta in 0.0..std::f64::consts::TAU,
        mode in 1usize..3,
    ) {
        let s = SystemParams::resonant(0.5, kappa, 0.05).unwrap();
        let g = evolve_closed(&InitialState::CoherentProduct.covariance().unwrap(), &s, t).unwrap();
        let before = ion_ion_negativity(&g).unwrap();
        let after = ion_ion_negativity(&rotate_mode(&g, mode, theta)).unwrap();
        prop_assert!((before - after).abs() <= 1e-9, "{before} vs {after}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn error_estimate_bounds_round_off_spread(
        kappa in 0.5..3.0f64,
        t in 0.0..6.0f64,
        alpha in 1.0..5.0f64,
        side in prop::sample::select(vec![vec![1usize, 2], vec![0, 2], vec![0, 1]]),
        noise in prop::collection::vec(-1.0..1.0f64, 36),
    ) {
        let s = SystemParams::resonant(0.5, kappa, 0.05).unwrap();
        let g = evolve_closed(&InitialState::NemsThermal { alpha }.covariance().unwrap(), &s, t).unwrap();
        let part = Bipartition::new(side).unwrap();
        let est = negativity_error_estimate(&g, &part).unwrap();
        prop_assume!(est < 1e-3);
        let d = DMatrix::from_fn(6, 6, |i, j| {
            let k = 6 * i.min(j) + i.max(j);
            noise[k] * f64::EPSILON * g.matrix()[(i, j)].abs()
        });
        let moved = CovarianceMatrix::new(g.matrix() + d).unwrap();
        let ln_mu = |x: &CovarianceMatrix| {
            partial_transpose(x, &part).unwrap().symplectic_spectrum().unwrap()[0].ln()
        };
        let spread = (ln_mu(&moved) - ln_mu(&g)).abs();
        prop_assert!(spread <= 20.0 * est + 1e-14, "spread {spread:e}, estimate {est:e}");
    }
}
