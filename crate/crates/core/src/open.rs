//! Markovian damping of the resonator: linear Lindblad operators, the drift
//! and diffusion matrices they induce, and the Lyapunov-type equation
//! `dγ/dt = Γγ + γΓᵀ + D`.
//!
//! Two independent solvers are provided: fixed-step RK4 with step-halving
//! control ([`evolve_open`], the production path) and the closed-form
//! solution with an adaptive Gauss-Kronrod integral
//! ([`evolve_open_quadrature`], used as a cross-check).

use nalgebra::{Complex, DMatrix, DVector, SMatrix};

use crate::error::{Error, Result};
use crate::model::{hamiltonian_matrix, SystemParams};
use crate::symplectic::{matrix_exponential, max_abs, symplectic_form, CovarianceMatrix};

type M6 = SMatrix<f64, 6, 6>;

/// Resonator damping rate and reservoir occupation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    pub zeta: f64,
    pub n_bar: f64,
}

impl BathParams {
    pub fn new(zeta: f64, n_bar: f64) -> Result<Self> {
        if !(zeta.is_finite() && zeta >= 0.0) {
            return Err(Error::invalid(format!("zeta must be nonnegative, got {zeta}")));
        }
        if !(n_bar.is_finite() && n_bar >= 0.0) {
            return Err(Error::invalid(format!("n_bar must be nonnegative, got {n_bar}")));
        }
        Ok(Self { zeta, n_bar })
    }
}

/// Lindblad operators `L_k = λ_k · J R`, stored as their complex phase-space
/// coefficient vectors `λ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSpec {
    vectors: Vec<DVector<Complex<f64>>>,
}

impl LindbladSpec {
    pub fn new(vectors: Vec<DVector<Complex<f64>>>) -> Result<Self> {
        if let Some(first) = vectors.first() {
            let n = first.len();
            if n == 0 || n % 2 != 0 {
                return Err(Error::invalid("Lindblad vectors need even nonzero length"));
            }
            if vectors.iter().any(|v| v.len() != n) {
                return Err(Error::invalid("Lindblad vectors have mismatched lengths"));
            }
        }
        if vectors
            .iter()
            .flat_map(|v| v.iter())
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::invalid("Lindblad vectors have non-finite entries"));
        }
        Ok(Self { vectors })
    }

    pub fn empty() -> Self {
        Self { vectors: Vec::new() }
    }

    pub fn vectors(&self) -> &[DVector<Complex<f64>>] {
        &self.vectors
    }
}

/// Thermal damping of mode 0 at rate `zeta` towards occupation `n_bar`.
pub fn nems_damping_lindblads(b: &BathParams) -> LindbladSpec {
    let up = (b.zeta * (b.n_bar + 1.0) / 2.0).sqrt();
    let down = -(b.zeta * b.n_bar / 2.0).sqrt();
    let mut decay = DVector::zeros(6);
    decay[0] = Complex::new(0.0, up);
    decay[1] = Complex::new(-up, 0.0);
    let mut pump = DVector::zeros(6);
    pump[0] = Complex::new(0.0, down);
    pump[1] = Complex::new(down, 0.0);
    LindbladSpec {
        vectors: vec![decay, pump],
    }
}

/// `dγ/dt = Γγ + γΓᵀ + D`.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftDiffusion {
    pub drift: DMatrix<f64>,
    pub diffusion: DMatrix<f64>,
}

/// With `Υ = Σ λ_k λ_k†`: `Γ = J(ℋ - Im Υ)`, `D = Re Υ`.
pub fn drift_and_diffusion(s: &SystemParams, l: &LindbladSpec) -> Result<DriftDiffusion> {
    s.validate()?;
    let h = hamiltonian_matrix(s);
    let dim = h.nrows();
    let mut ups = DMatrix::<Complex<f64>>::zeros(dim, dim);
    for v in l.vectors() {
        if v.len() != dim {
            return Err(Error::invalid(format!(
                "Lindblad vector of length {} for a {dim}-dimensional phase space",
                v.len()
            )));
        }
        ups += v * v.adjoint();
    }
    let re = ups.map(|z| z.re);
    let im = ups.map(|z| z.im);
    let j = symplectic_form(dim / 2)?.into_matrix();
    let diffusion = (&re + re.transpose()) * 0.5;
    Ok(DriftDiffusion {
        drift: j * (h - im),
        diffusion,
    })
}

fn to_m6(m: &DMatrix<f64>, what: &str) -> Result<M6> {
    if m.nrows() != 6 || m.ncols() != 6 {
        return Err(Error::invalid(format!(
            "{what} must be 6x6, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(M6::from_fn(|i, j| m[(i, j)]))
}

fn from_m6(m: &M6) -> DMatrix<f64> {
    DMatrix::from_fn(6, 6, |i, j| m[(i, j)])
}

fn m6_max(m: &M6) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

struct Rhs {
    drift: M6,
    drift_t: M6,
    diffusion: M6,
}

impl Rhs {
    fn eval(&self, g: &M6) -> M6 {
        self.drift * g + g * self.drift_t + self.diffusion
    }

    fn rk4_step(&self, g: &M6, h: f64) -> M6 {
        let k1 = self.eval(g);
        let k2 = self.eval(&(g + k1 * (0.5 * h)));
        let k3 = self.eval(&(g + k2 * (0.5 * h)));
        let k4 = self.eval(&(g + k3 * h));
        g + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
    }

    fn advance(&self, g: &M6, span: f64, steps: usize) -> M6 {
        let h = span / steps as f64;
        let mut y = *g;
        for _ in 0..steps {
            y = self.rk4_step(&y, h);
        }
        y
    }
}

/// Base RK4 step.
pub const MAX_STEP: f64 = 1e-3;
/// Successive-halving agreement required on every grid interval, relative to
/// `max(1, |γ|_max)`.
pub const HALVING_TOL: f64 = 1e-8;
const MAX_HALVINGS: u32 = 12;

/// Integrates from `t = 0` to each grid time. On every interval the state is
/// advanced with step `h` and `h/2`; `h` starts at `min(MAX_STEP, dt/10)` and
/// is halved until the two agree.
pub fn evolve_open(
    gamma0: &CovarianceMatrix,
    dd: &DriftDiffusion,
    t_grid: &[f64],
) -> Result<Vec<CovarianceMatrix>> {
    let mut g = to_m6(gamma0.matrix(), "initial covariance")?;
    let rhs = Rhs {
        drift: to_m6(&dd.drift, "drift")?,
        drift_t: to_m6(&dd.drift.transpose(), "drift")?,
        diffusion: to_m6(&dd.diffusion, "diffusion")?,
    };
    if t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("time grid has non-finite entries"));
    }
    if t_grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::invalid("time grid must start at t >= 0"));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("time grid must be ascending"));
    }

    let mut out = Vec::with_capacity(t_grid.len());
    let mut now = 0.0;
    for &target in t_grid {
        let span = target - now;
        if span > 0.0 {
            let mut steps = (span / MAX_STEP.min(span / 10.0)).ceil() as usize;
            let mut coarse = rhs.advance(&g, span, steps);
            let mut halvings = 0;
            loop {
                steps *= 2;
                let fine = rhs.advance(&g, span, steps);
                if !fine.iter().all(|v| v.is_finite()) {
                    return Err(Error::NumericalAt {
                        time: target,
                        reason: "non-finite covariance".into(),
                    });
                }
                let err = m6_max(&(fine - coarse));
                if err <= HALVING_TOL * m6_max(&fine).max(1.0) {
                    g = fine;
                    break;
                }
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(Error::NumericalAt {
                        time: target,
                        reason: format!("step size underflow (halving error {err:.3e})"),
                    });
                }
                coarse = fine;
            }
            g = (g + g.transpose()) * 0.5;
        }
        now = target;
        out.push(CovarianceMatrix::from_evolved(from_m6(&g)));
    }
    Ok(out)
}

// Gauss-Kronrod 7-15 nodes on [-1, 1] (non-negative half) and weights.
const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for nodes 1, 3, 5, 7 of the list above.
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Absolute tolerance for the diffusion integral.
pub const QUADRATURE_TOL: f64 = 1e-9;
const MAX_INTERVALS: usize = 4000;

fn gk15<F: Fn(f64) -> Result<DMatrix<f64>>>(
    f: &F,
    a: f64,
    b: f64,
) -> Result<(DMatrix<f64>, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = &fc * K15_WEIGHTS[7];
    let mut gauss = &fc * G7_WEIGHTS[3];
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let pair = f(c - x)? + f(c + x)?;
        kron += &pair * K15_WEIGHTS[i];
        if i % 2 == 1 {
            gauss += &pair * G7_WEIGHTS[i / 2];
        }
    }
    kron *= h;
    gauss *= h;
    let err = max_abs(&(&kron - &gauss));
    Ok((kron, err))
}

/// `γ(t) = e^{Γt} γ0 e^{Γᵀt} + ∫₀ᵗ e^{Γs} D e^{Γᵀs} ds`, the integral by
/// globally adaptive Gauss-Kronrod quadrature to absolute accuracy
/// [`QUADRATURE_TOL`] (or the round-off floor of the integral, if larger).
pub fn evolve_open_quadrature(
    gamma0: &CovarianceMatrix,
    dd: &DriftDiffusion,
    t: f64,
) -> Result<CovarianceMatrix> {
    let dim = gamma0.matrix().nrows();
    if dd.drift.shape() != (dim, dim) || dd.diffusion.shape() != (dim, dim) {
        return Err(Error::invalid("drift/diffusion size does not match the state"));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("time must be finite and >= 0, got {t}")));
    }
    let e = matrix_exponential(&(&dd.drift * t))?;
    let mut total = &e * gamma0.matrix() * e.transpose();
    if t == 0.0 || max_abs(&dd.diffusion) == 0.0 {
        return Ok(CovarianceMatrix::from_evolved(total));
    }

    let integrand = |s: f64| -> Result<DMatrix<f64>> {
        let es = matrix_exponential(&(&dd.drift * s))?;
        Ok(&es * &dd.diffusion * es.transpose())
    };

    // (a, b, estimate, error)
    let mut pieces = vec![];
    let (v, err) = gk15(&integrand, 0.0, t)?;
    pieces.push((0.0, t, v, err));
    loop {
        let sum: DMatrix<f64> = pieces
            .iter()
            .fold(DMatrix::zeros(dim, dim), |acc, p| acc + &p.2);
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        let floor = 64.0 * f64::EPSILON * max_abs(&sum);
        if err <= QUADRATURE_TOL.max(floor) {
            total += sum;
            break;
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::numerical(format!(
                "quadrature did not converge (error estimate {err:.3e})"
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (a, b, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (a + b);
        let (l, le) = gk15(&integrand, a, mid)?;
        let (r, re) = gk15(&integrand, mid, b)?;
        pieces.push((a, mid, l, le));
        pieces.push((mid, b, r, re));
    }
    if total.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalAt {
            time: t,
            reason: "non-finite covariance".into(),
        });
    }
    Ok(CovarianceMatrix::from_evolved(total))
}

/// Long-time limit of the damped part of the system.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// Modes that relax to a unique stationary covariance.
    pub damped_modes: Vec<usize>,
    /// Stationary covariance of `damped_modes`, in that order.
    pub covariance: CovarianceMatrix,
}

fn sub(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Groups modes that are coupled through the drift or the diffusion.
fn coupled_components(dd: &DriftDiffusion) -> Vec<Vec<usize>> {
    let n = dd.drift.nrows() / 2;
    let linked = |a: usize, b: usize| {
        (0..2).any(|i| {
            (0..2).any(|j| {
                let (r, c) = (2 * a + i, 2 * b + j);
                dd.drift[(r, c)] != 0.0
                    || dd.drift[(c, r)] != 0.0
                    || dd.diffusion[(r, c)] != 0.0
            })
        })
    };
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if label[start].is_some() {
            continue;
        }
        let id = comps.len();
        let mut members = vec![start];
        label[start] = Some(id);
        let mut k = 0;
        while k < members.len() {
            let a = members[k];
            for b in 0..n {
                if label[b].is_none() && linked(a, b) {
                    label[b] = Some(id);
                    members.push(b);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}

/// Solves `ΓX + XΓᵀ + D = 0` on every damped block of the system.
///
/// The phase space is split into groups of modes coupled by `Γ` or `D`. A
/// group without diffusion whose drift is Hamiltonian (`-JΓ` symmetric) never
/// relaxes and is left out of the result. Every other group must have a
/// Hurwitz-stable drift. If no group is damped there is no steady state.
pub fn steady_state(dd: &DriftDiffusion) -> Result<SteadyState> {
    let dim = dd.drift.nrows();
    if dim == 0 || !dim.is_multiple_of(2) || dd.drift.shape() != (dim, dim) || dd.diffusion.shape() != (dim, dim)
    {
        return Err(Error::invalid("drift and diffusion must be equal-size even square matrices"));
    }
    let scale = max_abs(&dd.drift).max(max_abs(&dd.diffusion)).max(1.0);

    let mut damped = Vec::new();
    for comp in coupled_components(dd) {
        let idx: Vec<usize> = comp.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let g = sub(&dd.drift, &idx);
        let d = sub(&dd.diffusion, &idx);
        let j = symplectic_form(comp.len())?.into_matrix();
        let h = -(&j * &g);
        let conservative = max_abs(&d) == 0.0 && max_abs(&(&h - h.transpose())) <= 1e-14 * scale;
        if conservative {
            continue;
        }
        let max_re = g
            .clone()
            .complex_eigenvalues()
            .iter()
            .fold(f64::NEG_INFINITY, |m, z| m.max(z.re));
        if !(max_re < -1e-12 * scale) {
            return Err(Error::NoSteadyState(format!(
                "drift on modes {comp:?} is not stable (max real part {max_re:.3e})"
            )));
        }
        damped.push((comp, idx, g, d));
    }
    if damped.is_empty() {
        return Err(Error::NoSteadyState("no damped modes".into()));
    }

    let modes: Vec<usize> = damped.iter().flat_map(|c| c.0.iter().copied()).collect();
    let k = 2 * modes.len();
    let mut x = DMatrix::zeros(k, k);
    let mut offset = 0;
    for (_, idx, g, d) in &damped {
        let m = idx.len();
        let eye = DMatrix::<f64>::identity(m, m);
        let lhs = eye.kronecker(g) + g.kronecker(&eye);
        let rhs = -DVector::from_column_slice(d.as_slice());
        let v = lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::numerical("singular Lyapunov system"))?;
        let xc = DMatrix::from_column_slice(m, m, v.as_slice());
        let residual = g * &xc + &xc * g.transpose() + d;
        if max_abs(&residual) > 1e-10 * max_abs(&xc).max(1.0) {
            return Err(Error::numerical(format!(
                "Lyapunov residual {:.3e} too large",
                max_abs(&residual)
            )));
        }
        x.view_mut((offset, offset), (m, m)).copy_from(&xc);
        offset += m;
    }
    Ok(SteadyState {
        damped_modes: modes,
        covariance: CovarianceMatrix::new((&x + x.transpose()) * 0.5)?,
    })
}
