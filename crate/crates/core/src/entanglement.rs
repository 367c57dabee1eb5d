//! Logarithmic negativity of Gaussian states.
//!
//! Convention: with `μ_j` the symplectic eigenvalues of `2γ` after partial
//! transposition,
//!
//! ```text
//! N = -Σ_j ln min(1, μ_j)
//! ```
//!
//! using the natural logarithm. Each `μ_j` appears twice among the moduli of
//! the eigenvalues of `iJ(2γ^T)`, so this equals `-½ Σ ln min(1, ·)` taken over
//! all `2n` moduli. A two-mode squeezed vacuum with squeezing `r` has
//! `N = 2r`. Eigenvalues within [`CLIP_TOL`] of 1 count as 1.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::symplectic::{max_abs, partial_transpose, symplectic_form, Bipartition, CovarianceMatrix};

/// Symplectic eigenvalues at or above `1 - CLIP_TOL` carry no negativity.
pub const CLIP_TOL: f64 = 1e-10;

/// Physicality slack, relative to `max(1, |2γ|_max)`.
pub const PHYSICAL_TOL: f64 = 1e-9;

fn check_physical(gamma: &CovarianceMatrix) -> Result<()> {
    if !gamma.is_physical(PHYSICAL_TOL)? {
        let margin = gamma.uncertainty_margin()?;
        return Err(Error::invalid(format!(
            "covariance matrix violates the uncertainty relation (min eigenvalue of 2γ + iJ = {margin:.6e})"
        )));
    }
    Ok(())
}

fn negativity_from_spectrum(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .filter(|&&mu| mu < 1.0 - CLIP_TOL)
        .fold(0.0, |acc, mu| acc - mu.ln())
}

fn transposed_spectrum(gamma: &CovarianceMatrix, part: &Bipartition) -> Result<Vec<f64>> {
    partial_transpose(gamma, part)?.symplectic_spectrum()
}

pub fn log_negativity(gamma: &CovarianceMatrix, part: &Bipartition) -> Result<f64> {
    part.validate(gamma.n_modes())?;
    check_physical(gamma)?;
    Ok(negativity_from_spectrum(&transposed_spectrum(gamma, part)?))
}

/// First-order size of the round-off error in `-ln μ_min` for the cut, where
/// `μ_min` is the smallest transposed symplectic eigenvalue.
///
/// With `Ṽ = 2γ^T = L Lᵀ` and `x` a unit eigenvector of `i Lᵀ J L` for
/// `μ_min`, a perturbation `δṼ` moves `ln μ_min` by `r† δṼ r` with
/// `r = L⁻ᵀ x`. Taking `|δṼ| = ε |Ṽ|_F` for the rounding of the stored state
/// gives the estimate `ε |Ṽ|_F |r|²`. Pure, strongly squeezed states have
/// `|r|² ~ |Ṽ|` and lose accuracy much faster than mixed ones.
pub fn negativity_error_estimate(gamma: &CovarianceMatrix, part: &Bipartition) -> Result<f64> {
    part.validate(gamma.n_modes())?;
    let v = partial_transpose(gamma, part)?.into_matrix() * 2.0;
    let Some(chol) = v.clone().cholesky() else {
        return Ok(f64::INFINITY);
    };
    let l = chol.l();
    let j = symplectic_form(gamma.n_modes())?.into_matrix();
    let svd = (l.transpose() * j * &l).svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::numerical("singular vectors unavailable"))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    // The two right singular vectors of the smallest pair span the invariant
    // plane of ±iμ_min.
    let lt = l.transpose();
    let mut r_sq = 0.0;
    for &k in &order[..2] {
        let w = v_t.row(k).transpose();
        let y = lt
            .solve_upper_triangular(&w)
            .ok_or_else(|| Error::numerical("singular Cholesky factor"))?;
        r_sq += 0.5 * y.norm_squared();
    }
    let est = f64::EPSILON * v.norm() * r_sq;
    Ok(if est.is_finite() { est } else { f64::INFINITY })
}

/// Error estimate for [`ion_ion_negativity`].
pub fn ion_ion_negativity_error(gamma: &CovarianceMatrix) -> Result<f64> {
    negativity_error_estimate(&gamma.reduced(&[1, 2])?, &Bipartition::new(vec![1])?)
}

/// Largest error estimate over the quantities in [`Negativities`].
pub fn negativities_error(gamma: &CovarianceMatrix) -> Result<f64> {
    if gamma.n_modes() != 3 {
        return Err(Error::invalid("expected a three-mode state"));
    }
    let mut worst = ion_ion_negativity_error(gamma)?;
    worst = worst.max(negativity_error_estimate(
        &gamma.reduced(&[0, 1])?,
        &Bipartition::new(vec![1])?,
    )?);
    for side in [vec![1, 2], vec![0, 2], vec![0, 1]] {
        worst = worst.max(negativity_error_estimate(gamma, &Bipartition::new(side)?)?);
    }
    Ok(worst)
}

/// True iff the smallest transposed symplectic eigenvalue is at least
/// `1 - CLIP_TOL` (positive partial transpose). Necessary and sufficient for
/// separability when one side of the cut is a single mode.
pub fn separability_check(gamma: &CovarianceMatrix, part: &Bipartition) -> Result<bool> {
    let spectrum = transposed_spectrum(gamma, part)?;
    Ok(spectrum[0] >= 1.0 - CLIP_TOL)
}

/// Negativity between the two ions (modes 1 and 2), from their reduced state.
pub fn ion_ion_negativity(gamma: &CovarianceMatrix) -> Result<f64> {
    pair_negativity(gamma, 1, 2)
}

/// Negativity between the resonator (mode 0) and ion 1, from their reduced
/// state.
pub fn resonator_ion_negativity(gamma: &CovarianceMatrix) -> Result<f64> {
    pair_negativity(gamma, 0, 1)
}

fn pair_negativity(gamma: &CovarianceMatrix, a: usize, b: usize) -> Result<f64> {
    if gamma.n_modes() != 3 {
        return Err(Error::invalid("expected a three-mode state"));
    }
    let reduced = gamma.reduced(&[a, b])?;
    log_negativity(&reduced, &Bipartition::new(vec![1])?)
}

/// One-mode-versus-rest negativities of a three-mode state. `n0_12` is mode 0
/// against modes 1 and 2, and so on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneVersusTwo {
    pub n0_12: f64,
    pub n1_02: f64,
    pub n2_01: f64,
}

impl OneVersusTwo {
    /// Positive iff the state is fully inseparable.
    pub fn min(&self) -> f64 {
        self.n0_12.min(self.n1_02).min(self.n2_01)
    }
}

pub fn one_versus_two(gamma: &CovarianceMatrix) -> Result<OneVersusTwo> {
    if gamma.n_modes() != 3 {
        return Err(Error::invalid("expected a three-mode state"));
    }
    check_physical(gamma)?;
    let cut = |b: Vec<usize>| -> Result<f64> {
        Ok(negativity_from_spectrum(&transposed_spectrum(gamma, &Bipartition::new(b)?)?))
    };
    Ok(OneVersusTwo {
        n0_12: cut(vec![1, 2])?,
        n1_02: cut(vec![0, 2])?,
        n2_01: cut(vec![0, 1])?,
    })
}

/// Smallest of the three one-versus-two negativities.
pub fn tripartite_min_negativity(gamma: &CovarianceMatrix) -> Result<f64> {
    Ok(one_versus_two(gamma)?.min())
}

/// Ordinary eigenvalues `(smaller, larger)` of a symmetric 2x2 matrix. The
/// smaller one is taken as `det / larger` when both have the same sign, which
/// keeps it accurate for nearly singular large matrices.
fn sym2_eigenvalues(m: &Matrix2<f64>) -> (f64, f64) {
    let (a, b, d) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
    let half_tr = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let det = a * d - b * b;
    if half_tr > 0.0 {
        let hi = half_tr + disc;
        (det / hi, hi)
    } else if half_tr < 0.0 {
        let lo = half_tr - disc;
        (lo, det / lo)
    } else {
        (-disc, disc)
    }
}

fn negativity_from_mu_squared(mu_sq: f64, scale: f64) -> Result<f64> {
    if mu_sq < -PHYSICAL_TOL * scale.max(1.0) {
        return Err(Error::Precondition(format!(
            "block is not of the symmetric-ion form (squared symplectic eigenvalue {mu_sq:.3e})"
        )));
    }
    let mu = mu_sq.max(0.0).sqrt();
    Ok(if mu < 1.0 - CLIP_TOL { -mu.ln() } else { 0.0 })
}

/// Ion-ion negativity from the single-ion block alone:
/// `μ = sqrt(2 Λ⁻(A_I) - 1)`. Valid for states with `A_I = I - C_I`, which
/// closed evolution from coherent or resonator-thermal inputs produces.
pub fn ion_ion_negativity_local(a_i: &Matrix2<f64>) -> Result<f64> {
    let (lo, _) = sym2_eigenvalues(a_i);
    negativity_from_mu_squared(2.0 * lo - 1.0, a_i.abs().max())
}

/// Same quantity from the ion-ion correlation block:
/// `μ = sqrt(1 - 2 Λ⁺(C_I))`.
pub fn ion_ion_negativity_from_correlation(c_i: &Matrix2<f64>) -> Result<f64> {
    let (_, hi) = sym2_eigenvalues(c_i);
    negativity_from_mu_squared(1.0 - 2.0 * hi, c_i.abs().max())
}

/// All negativities of one three-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Negativities {
    pub n12: f64,
    pub cuts: OneVersusTwo,
    pub tau: f64,
    /// Resonator-ion-1 negativity.
    pub n01: f64,
}

pub fn negativities(gamma: &CovarianceMatrix) -> Result<Negativities> {
    let cuts = one_versus_two(gamma)?;
    Ok(Negativities {
        n12: ion_ion_negativity(gamma)?,
        cuts,
        tau: cuts.min(),
        n01: resonator_ion_negativity(gamma)?,
    })
}

/// Negativities along a time grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NegativityTrajectory {
    pub times: Vec<f64>,
    pub n12: Vec<f64>,
    pub n0_12: Vec<f64>,
    pub n1_02: Vec<f64>,
    pub n2_01: Vec<f64>,
    pub tau: Vec<f64>,
}

impl NegativityTrajectory {
    pub fn from_states(
        times: &[f64],
        states: &[CovarianceMatrix],
        exec: Execution,
    ) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::invalid("times and states differ in length"));
        }
        let values = exec.try_map(states, negativities)?;
        let mut out = NegativityTrajectory {
            times: times.to_vec(),
            ..Default::default()
        };
        for v in values {
            out.n12.push(v.n12);
            out.n0_12.push(v.cuts.n0_12);
            out.n1_02.push(v.cuts.n1_02);
            out.n2_01.push(v.cuts.n2_01);
            out.tau.push(v.tau);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Largest absolute entry of `2γ`, the scale that sets round-off in the
/// symplectic spectrum.
pub fn conditioning_scale(gamma: &CovarianceMatrix) -> f64 {
    2.0 * max_abs(gamma.matrix())
}
