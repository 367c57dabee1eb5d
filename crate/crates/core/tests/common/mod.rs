#![allow(dead_code)]

use nalgebra::DMatrix;
use nems_entangle::symplectic::{matrix_exponential, symplectic_form, CovarianceMatrix};

pub fn max_abs_entry(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `max |a - b| / max(1, max |a|)`.
pub fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    max_abs_entry(&(a - b)) / max_abs_entry(a).max(1.0)
}

pub fn symmetric_from(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = entries[k];
            m[(j, i)] = entries[k];
            k += 1;
        }
    }
    m
}

/// `exp(J H)` for the symmetric matrix built from `entries`.
pub fn random_symplectic(n_modes: usize, entries: &[f64]) -> DMatrix<f64> {
    let h = symmetric_from(2 * n_modes, entries);
    let j = symplectic_form(n_modes).unwrap().into_matrix();
    matrix_exponential(&(j * h)).unwrap()
}

/// `S · Diag(ν_k/2) · Sᵀ`, each `ν_k >= 1` repeated for `x` and `p`.
pub fn random_state(s: &DMatrix<f64>, nus: &[f64]) -> CovarianceMatrix {
    let d = DMatrix::from_fn(s.nrows(), s.nrows(), |i, j| {
        if i == j {
            0.5 * nus[i / 2]
        } else {
            0.0
        }
    });
    let m = s * d * s.transpose();
    CovarianceMatrix::new((&m + m.transpose()) * 0.5).unwrap()
}

/// Permutes modes 1 and 2 of a three-mode state.
pub fn swap_ions(m: &DMatrix<f64>) -> DMatrix<f64> {
    let perm = [0, 1, 4, 5, 2, 3];
    DMatrix::from_fn(6, 6, |i, j| m[(perm[i], perm[j])])
}
