//! Mode-ordered symplectic linear algebra.
//!
//! All phase-space matrices use the interleaved ordering
//! `(x0, p0, x1, p1, ...)`; the symplectic form is block diagonal with one
//! `[[0, 1], [-1, 0]]` block per mode. Covariance matrices follow the
//! `hbar = 1` convention in which the vacuum is `I/2`, so physicality and
//! entanglement tests are phrased in terms of `2γ`.

use nalgebra::{DMatrix, Schur, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Relative tolerance used when pairing the `±iμ` eigenvalues of `JV`.
pub const PAIRING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n_modes: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }
}

pub fn symplectic_form(n_modes: usize) -> Result<SymplecticForm> {
    if n_modes == 0 {
        return Err(Error::invalid("symplectic form needs at least one mode"));
    }
    let dim = 2 * n_modes;
    let mut matrix = DMatrix::zeros(dim, dim);
    for k in 0..n_modes {
        matrix[(2 * k, 2 * k + 1)] = 1.0;
        matrix[(2 * k + 1, 2 * k)] = -1.0;
    }
    Ok(SymplecticForm { n_modes, matrix })
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    asymmetry(m) <= SYMMETRY_TOL * max_abs(m).max(1.0)
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn check_phase_space_dim(m: &DMatrix<f64>, what: &str) -> Result<usize> {
    if !m.is_square() || m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "{what} must be square with even nonzero dimension, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows() / 2)
}

/// Second moments of an `n`-mode Gaussian state, `hbar = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates shape, finiteness and symmetry, then stores `(m + mᵀ)/2`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        check_phase_space_dim(&matrix, "covariance matrix")?;
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("covariance matrix has non-finite entries"));
        }
        if !is_symmetric(&matrix) {
            return Err(Error::invalid(format!(
                "covariance matrix is not symmetric (max asymmetry {:.3e})",
                asymmetry(&matrix)
            )));
        }
        Ok(Self {
            matrix: symmetrize(&matrix),
        })
    }

    /// Symmetrizes without the symmetry check. Used after evolution steps,
    /// where round-off asymmetry is expected and removed.
    pub(crate) fn from_evolved(matrix: DMatrix<f64>) -> Self {
        Self {
            matrix: symmetrize(&matrix),
        }
    }

    /// Product vacuum / coherent state, `I/2`.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::invalid("need at least one mode"));
        }
        Ok(Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Covariance matrix of the listed modes, in the given order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        let n = self.n_modes();
        if modes.is_empty() {
            return Err(Error::invalid("reduced state needs at least one mode"));
        }
        for (i, &m) in modes.iter().enumerate() {
            if m >= n {
                return Err(Error::invalid(format!("mode {m} out of range for {n} modes")));
            }
            if modes[..i].contains(&m) {
                return Err(Error::invalid(format!("mode {m} listed twice")));
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let k = idx.len();
        let matrix = DMatrix::from_fn(k, k, |i, j| self.matrix[(idx[i], idx[j])]);
        Ok(Self { matrix })
    }

    /// Symplectic eigenvalues of `2γ`; all are `>= 1` for a physical state.
    pub fn symplectic_spectrum(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&(&self.matrix * 2.0))
    }

    /// Smallest symplectic eigenvalue of `2γ`, from the singular values of
    /// `Lᵀ J L` with `2γ = L Lᵀ`. Stays accurate for strongly squeezed states
    /// where the spectrum of `J·2γ` is nearly defective. Falls back to the
    /// general route when `2γ` is not positive definite.
    pub fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        let v = &self.matrix * 2.0;
        if v.clone().cholesky().is_none() {
            return Ok(symplectic_eigenvalues(&v)?[0]);
        }
        let j = symplectic_form(self.n_modes())?.into_matrix();
        let moduli = congruent_moduli(&v, &j)?;
        Ok(moduli.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Smallest eigenvalue of the Hermitian matrix `2γ + iJ`, which is
    /// nonnegative exactly for physical states.
    ///
    /// Unlike the smallest symplectic eigenvalue, this is a well-conditioned
    /// symmetric eigenproblem: its round-off stays near `ε |2γ|` even for
    /// strongly squeezed states, where the spectrum of `JV` is degenerate.
    pub fn uncertainty_margin(&self) -> Result<f64> {
        let dim = self.matrix.nrows();
        let v = &self.matrix * 2.0;
        let j = symplectic_form(self.n_modes())?.into_matrix();
        // Real form of the Hermitian matrix V + iJ.
        let mut real = DMatrix::zeros(2 * dim, 2 * dim);
        real.view_mut((0, 0), (dim, dim)).copy_from(&v);
        real.view_mut((dim, dim), (dim, dim)).copy_from(&v);
        real.view_mut((0, dim), (dim, dim)).copy_from(&(-&j));
        real.view_mut((dim, 0), (dim, dim)).copy_from(&j);
        let eig = SymmetricEigen::try_new(real, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::numerical("symmetric eigensolver did not converge"))?;
        Ok(eig.eigenvalues.min())
    }

    /// Uncertainty-relation check: `2γ + iJ >= -tol * max(1, |2γ|_max)`.
    pub fn is_physical(&self, tol: f64) -> Result<bool> {
        let slack = tol * (2.0 * max_abs(&self.matrix)).max(1.0);
        Ok(self.uncertainty_margin()? >= -slack)
    }
}

/// Set of modes on the transposed side of a bipartite cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(side_b: impl Into<Vec<usize>>) -> Result<Self> {
        let side_b = side_b.into();
        if side_b.is_empty() {
            return Err(Error::invalid("bipartition side B is empty"));
        }
        for (i, m) in side_b.iter().enumerate() {
            if side_b[..i].contains(m) {
                return Err(Error::invalid(format!("mode {m} listed twice in bipartition")));
            }
        }
        Ok(Self { side_b })
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    /// The other side of the cut for an `n_modes` system.
    pub fn complement(&self, n_modes: usize) -> Result<Self> {
        self.validate(n_modes)?;
        Bipartition::new(
            (0..n_modes)
                .filter(|m| !self.side_b.contains(m))
                .collect::<Vec<_>>(),
        )
    }

    pub fn validate(&self, n_modes: usize) -> Result<()> {
        if let Some(&m) = self.side_b.iter().find(|&&m| m >= n_modes) {
            return Err(Error::invalid(format!(
                "bipartition mode {m} out of range for {n_modes} modes"
            )));
        }
        if self.side_b.len() == n_modes {
            return Err(Error::invalid("bipartition side B contains every mode"));
        }
        Ok(())
    }
}

/// `e^M` by Padé scaling-and-squaring.
pub fn matrix_exponential(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::invalid("matrix exponential needs a square matrix"));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix exponential of a non-finite matrix"));
    }
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let e = m.exp();
    if e.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("matrix exponential overflowed"));
    }
    Ok(e)
}

/// Symplectic eigenvalues of a symmetric positive-definite `2n x 2n` matrix,
/// ascending.
///
/// They are the moduli of the eigenvalues of `iJV`. For positive-definite `V`
/// the spectrum of `JV` is `{±iμ_k}`, so the `2n` moduli come in equal pairs;
/// each pair is collapsed to one value.
pub fn symplectic_eigenvalues(v: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = check_phase_space_dim(v, "symplectic eigenvalue input")?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("symplectic eigenvalue input has non-finite entries"));
    }
    if !is_symmetric(v) {
        return Err(Error::invalid(format!(
            "symplectic eigenvalue input is not symmetric (max asymmetry {:.3e})",
            asymmetry(v)
        )));
    }
    let j = symplectic_form(n)?.into_matrix();
    let jv = &j * v;
    let mut moduli: Vec<f64> = match Schur::try_new(jv, f64::EPSILON, 10_000) {
        Some(schur) => schur.complex_eigenvalues().iter().map(|z| z.norm()).collect(),
        // The QR iteration can stall on nearly diagonal states, where JV has
        // repeated ±i pairs.
        None => congruent_moduli(v, &j)?,
    };
    // Stable sort keeps original index order among exact ties.
    moduli.sort_by(|a, b| a.total_cmp(b));

    let scale = max_abs(v).max(1.0);
    let mut out = Vec::with_capacity(n);
    for pair in moduli.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        if (b - a).abs() > PAIRING_TOL * scale {
            return Err(Error::numerical(format!(
                "unpaired symplectic eigenvalue moduli {a:.6e} and {b:.6e}"
            )));
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

/// Moduli of the eigenvalues of `JV` as the singular values of the similar
/// antisymmetric matrix `Lᵀ J L`, where `V = L Lᵀ`.
fn congruent_moduli(v: &DMatrix<f64>, j: &DMatrix<f64>) -> Result<Vec<f64>> {
    let chol = v
        .clone()
        .cholesky()
        .ok_or_else(|| Error::numerical("Schur decomposition of JV did not converge and V is not positive definite"))?;
    let l = chol.l();
    let sv = (l.transpose() * j * l).singular_values();
    if !sv.iter().all(|x| x.is_finite()) {
        return Err(Error::numerical("non-finite singular values"));
    }
    Ok(sv.iter().copied().collect())
}

/// `‖EᵀJE − J‖_max <= tol`.
pub fn is_symplectic(e: &DMatrix<f64>, tol: f64) -> bool {
    let Ok(n) = check_phase_space_dim(e, "matrix") else {
        return false;
    };
    let j = match symplectic_form(n) {
        Ok(j) => j.into_matrix(),
        Err(_) => return false,
    };
    let defect = e.transpose() * &j * e - &j;
    max_abs(&defect) <= tol
}

/// `PγP` with `P` flipping the momentum of every mode on side B.
pub fn partial_transpose(gamma: &CovarianceMatrix, part: &Bipartition) -> Result<CovarianceMatrix> {
    let n = gamma.n_modes();
    part.validate(n)?;
    let mut m = gamma.matrix.clone();
    for &mode in part.side_b() {
        let p = 2 * mode + 1;
        for k in 0..2 * n {
            m[(p, k)] = -m[(p, k)];
            m[(k, p)] = -m[(k, p)];
        }
    }
    Ok(CovarianceMatrix { matrix: m })
}

#[cfg(test)]
pub(crate) mod test_states {
    use nalgebra::DMatrix;

    /// Two-mode squeezed vacuum `γ` with squeezing `r`.
    pub fn two_mode_squeezed(r: f64) -> DMatrix<f64> {
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        let mut v = DMatrix::zeros(4, 4);
        v[(0, 0)] = c;
        v[(1, 1)] = c;
        v[(2, 2)] = c;
        v[(3, 3)] = c;
        v[(0, 2)] = s;
        v[(2, 0)] = s;
        v[(1, 3)] = -s;
        v[(3, 1)] = -s;
        v * 0.5
    }
}
