//! Closed-system evolution `γ(t) = E_t γ0 E_tᵀ` with `E_t = exp(Jℋt)`.
//!
//! On resonance (`omega = nu - ion_coupling`, symmetric ions) the propagator
//! has a closed form in terms of three frequencies: `ω̄ = sqrt(ω(κ+ω))`,
//! `ω̃ = sqrt(ω(κ-ω))` and `ω₊ = nu + ion_coupling`. Below `κ = ω` the
//! hyperbolic terms turn into trigonometric ones; exactly at `κ = ω` they take
//! their limits.
//!
//! The closed-form blocks are naturally written in a frame where ion 2's
//! coordinates are inverted (`x2, p2 -> -x2, -p2`). [`BlockDecomposition`]
//! lives in that frame; everything else here is in the lab frame.

use nalgebra::{DMatrix, Matrix2};

use crate::error::{Error, Result};
use crate::model::{dynamics_generator, SystemParams};
use crate::symplectic::{matrix_exponential, CovarianceMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Every mode in a coherent state: `γ0 = I/2`.
    CoherentProduct,
    /// Resonator thermal with `alpha = 2 n̄ + 1`, ions coherent:
    /// `γ0 = Diag(α, α, 1, 1, 1, 1) / 2`.
    NemsThermal { alpha: f64 },
}

impl InitialState {
    pub fn covariance(&self) -> Result<CovarianceMatrix> {
        let alpha = match *self {
            InitialState::CoherentProduct => 1.0,
            InitialState::NemsThermal { alpha } => {
                check_alpha(alpha)?;
                alpha
            }
        };
        let mut m = DMatrix::identity(6, 6) * 0.5;
        m[(0, 0)] = 0.5 * alpha;
        m[(1, 1)] = 0.5 * alpha;
        CovarianceMatrix::new(m)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::invalid(format!(
            "thermal parameter alpha must be >= 1, got {alpha}"
        )));
    }
    Ok(())
}

/// Frequencies entering the closed-form resonant propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorParams {
    pub omega: f64,
    pub kappa: f64,
    pub omega_plus: f64,
}

impl PropagatorParams {
    pub fn new(omega: f64, kappa: f64, omega_plus: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(format!("omega must be positive, got {omega}")));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::invalid(format!("kappa must be nonnegative, got {kappa}")));
        }
        if !omega_plus.is_finite() {
            return Err(Error::invalid("omega_plus must be finite"));
        }
        Ok(Self {
            omega,
            kappa,
            omega_plus,
        })
    }

    /// Requires resonant symmetric parameters.
    pub fn from_system(s: &SystemParams) -> Result<Self> {
        s.validate()?;
        if !s.is_resonant() {
            return Err(Error::Precondition(
                "closed-form propagator needs symmetric ions on resonance".into(),
            ));
        }
        Self::new(s.omega, s.kappa1, s.omega_plus())
    }

    pub fn omega_bar(&self) -> f64 {
        (self.omega * (self.kappa + self.omega)).sqrt()
    }

    /// `ω̃²`, negative below `κ = ω`.
    pub fn omega_tilde_squared(&self) -> f64 {
        self.omega * (self.kappa - self.omega)
    }

    /// `ω̃`, real only for `κ >= ω`.
    pub fn omega_tilde(&self) -> Option<f64> {
        let q = self.omega_tilde_squared();
        (q >= 0.0).then(|| q.sqrt())
    }

    fn hyperbolic(&self) -> Hyperbolic {
        Hyperbolic {
            q: self.omega_tilde_squared(),
        }
    }
}

/// `cosh(ω̃t)`, `sinh(ω̃t)/ω̃` and `ω̃ sinh(ω̃t)` as real functions of
/// `q = ω̃²`, continued through `q = 0`.
struct Hyperbolic {
    q: f64,
}

impl Hyperbolic {
    fn cosh(&self, t: f64) -> f64 {
        match self.q {
            q if q > 0.0 => (q.sqrt() * t).cosh(),
            q if q < 0.0 => ((-q).sqrt() * t).cos(),
            _ => 1.0,
        }
    }

    fn sinh_over(&self, t: f64) -> f64 {
        match self.q {
            q if q > 0.0 => {
                let r = q.sqrt();
                (r * t).sinh() / r
            }
            q if q < 0.0 => {
                let r = (-q).sqrt();
                (r * t).sin() / r
            }
            _ => t,
        }
    }

    fn sinh_times(&self, t: f64) -> f64 {
        match self.q {
            q if q > 0.0 => {
                let r = q.sqrt();
                r * (r * t).sinh()
            }
            q if q < 0.0 => {
                let r = (-q).sqrt();
                -r * (r * t).sin()
            }
            _ => 0.0,
        }
    }
}

/// Ion 2 lives at interleaved indices 4 and 5.
fn invert_ion2(m: &mut DMatrix<f64>) {
    for k in [4, 5] {
        for j in 0..6 {
            m[(k, j)] = -m[(k, j)];
            m[(j, k)] = -m[(j, k)];
        }
    }
}

/// Closed-form `E_t` on resonance, in the interleaved lab-frame layout.
pub fn propagator_analytic(p: &PropagatorParams, t: f64) -> Result<DMatrix<f64>> {
    if !t.is_finite() {
        return Err(Error::invalid("time must be finite"));
    }
    let w = p.omega;
    let wb = p.omega_bar();
    let hyp = p.hyperbolic();
    let (co, si) = ((wb * t).cos(), (wb * t).sin());
    let (cp, sp) = ((p.omega_plus * t).cos(), (p.omega_plus * t).sin());
    let ch = hyp.cosh(t);
    // (ω/ω̃) sinh ω̃t and (ω̃/ω) sinh ω̃t
    let sh_over = w * hyp.sinh_over(t);
    let sh_times = hyp.sinh_times(t) / w;
    let si_over = w / wb * si;
    let si_times = wb / w * si;
    let r2 = std::f64::consts::SQRT_2 / 4.0;

    // Block order (x0, x1, x2, p0, p1, p2), ion 2 inverted.
    let mut e = [[0.0_f64; 6]; 6];
    let e12 = r2 * (ch - co);
    let e23 = 0.25 * (2.0 * cp - co - ch);
    let e15 = r2 * (-si_over + sh_over);
    let e42 = r2 * (si_times + sh_times);

    e[0][0] = 0.5 * (ch + co);
    e[3][3] = e[0][0];
    for (i, j) in [(0, 1), (1, 0), (3, 4), (4, 3)] {
        e[i][j] = e12;
    }
    for (i, j) in [(0, 2), (2, 0), (3, 5), (5, 3)] {
        e[i][j] = -e12;
    }
    e[1][1] = 0.25 * (ch + co + 2.0 * cp);
    e[4][4] = e[1][1];
    for (i, j) in [(1, 2), (2, 1), (4, 5), (5, 4)] {
        e[i][j] = e23;
    }
    e[2][2] = 0.25 * (2.0 * cp + co + ch);
    e[5][5] = e[2][2];

    e[0][3] = 0.5 * (si_over + sh_over);
    e[0][4] = e15;
    e[1][3] = e15;
    e[0][5] = -e15;
    e[2][3] = -e15;
    e[1][4] = 0.25 * (si_over + sh_over + 2.0 * sp);
    e[2][5] = e[1][4];
    e[1][5] = -0.25 * (si_over + sh_over - 2.0 * sp);
    e[2][4] = e[1][5];

    e[3][0] = 0.5 * (-si_times + sh_times);
    e[3][1] = e42;
    e[4][0] = e42;
    e[3][2] = -e42;
    e[5][0] = -e42;
    e[4][1] = 0.25 * (sh_times - si_times - 2.0 * sp);
    e[5][2] = e[4][1];
    e[4][2] = 0.25 * (si_times - sh_times - 2.0 * sp);
    e[5][1] = e[4][2];

    // Block index -> interleaved index.
    const TO_INTERLEAVED: [usize; 6] = [0, 2, 4, 1, 3, 5];
    let mut out = DMatrix::zeros(6, 6);
    for i in 0..6 {
        for j in 0..6 {
            out[(TO_INTERLEAVED[i], TO_INTERLEAVED[j])] = e[i][j];
        }
    }
    invert_ion2(&mut out);
    Ok(out)
}

/// `exp(Jℋt)` for arbitrary parameters.
pub fn propagator_numeric(s: &SystemParams, t: f64) -> Result<DMatrix<f64>> {
    s.validate()?;
    if !t.is_finite() {
        return Err(Error::invalid("time must be finite"));
    }
    matrix_exponential(&(dynamics_generator(s) * t))
}

/// Closed form on resonance, matrix exponential otherwise.
pub fn propagator(s: &SystemParams, t: f64) -> Result<DMatrix<f64>> {
    match PropagatorParams::from_system(s) {
        Ok(p) => propagator_analytic(&p, t),
        Err(Error::Precondition(_)) => propagator_numeric(s, t),
        Err(e) => Err(e),
    }
}

fn transport(gamma0: &CovarianceMatrix, e: &DMatrix<f64>) -> Result<CovarianceMatrix> {
    let m = e * gamma0.matrix() * e.transpose();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("covariance overflowed"));
    }
    Ok(CovarianceMatrix::from_evolved(m))
}

pub fn evolve_closed(gamma0: &CovarianceMatrix, s: &SystemParams, t: f64) -> Result<CovarianceMatrix> {
    if gamma0.n_modes() != 3 {
        return Err(Error::invalid("closed evolution needs a three-mode state"));
    }
    transport(gamma0, &propagator(s, t)?)
}

/// Evolution from a thermal resonator and coherent ions.
pub fn evolve_closed_thermal(alpha: f64, s: &SystemParams, t: f64) -> Result<CovarianceMatrix> {
    check_alpha(alpha)?;
    let gamma0 = InitialState::NemsThermal { alpha }.covariance()?;
    evolve_closed(&gamma0, s, t)
}

/// The 2x2 sectors of a symmetric-ion covariance matrix, in the frame where
/// ion 2 is inverted:
///
/// ```text
/// [ γ_N   C      -C    ]
/// [ Cᵀ    A_I/2  C_I/2 ]
/// [ -Cᵀ   C_Iᵀ/2 A_I/2 ]
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDecomposition {
    pub gamma_n: Matrix2<f64>,
    pub a_i: Matrix2<f64>,
    pub c_i: Matrix2<f64>,
    pub c: Matrix2<f64>,
}

fn block(m: &DMatrix<f64>, r: usize, c: usize) -> Matrix2<f64> {
    Matrix2::new(m[(r, c)], m[(r, c + 1)], m[(r + 1, c)], m[(r + 1, c + 1)])
}

impl BlockDecomposition {
    /// Reads `γ_N`, `C`, `A_I` (from ion 1) and `C_I`. Ion 2's diagonal block
    /// and the resonator/ion-2 sector are not read; for a symmetric-ion state
    /// they are implied.
    pub fn from_covariance(gamma: &CovarianceMatrix) -> Result<Self> {
        if gamma.n_modes() != 3 {
            return Err(Error::invalid("block decomposition needs a three-mode state"));
        }
        let m = gamma.matrix();
        Ok(Self {
            gamma_n: block(m, 0, 0),
            c: block(m, 0, 2),
            a_i: block(m, 2, 2) * 2.0,
            c_i: block(m, 2, 4) * -2.0,
        })
    }

    /// The lab-frame 6x6 covariance matrix with this block structure.
    pub fn assemble(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(6, 6);
        let mut put = |r: usize, c: usize, b: Matrix2<f64>| {
            for i in 0..2 {
                for j in 0..2 {
                    m[(r + i, c + j)] = b[(i, j)];
                }
            }
        };
        let half_a = self.a_i * 0.5;
        let half_ci = self.c_i * 0.5;
        put(0, 0, self.gamma_n);
        put(0, 2, self.c);
        put(0, 4, -self.c);
        put(2, 0, self.c.transpose());
        put(4, 0, -self.c.transpose());
        put(2, 2, half_a);
        put(4, 4, half_a);
        put(2, 4, half_ci);
        put(4, 2, half_ci.transpose());
        invert_ion2(&mut m);
        m
    }
}

/// Closed-form blocks for the coherent-product initial state on resonance,
/// built from the auxiliary functions `a, a', b, b', c, d` of `t`.
pub fn closed_form_blocks(omega: f64, kappa: f64, t: f64) -> Result<BlockDecomposition> {
    // omega_plus does not enter the covariance matrix.
    let p = PropagatorParams::new(omega, kappa, 0.0)?;
    if !t.is_finite() {
        return Err(Error::invalid("time must be finite"));
    }
    let wb = p.omega_bar();
    let hyp = p.hyperbolic();
    let s = (wb * t).sin();
    let sdiv = hyp.sinh_over(t);

    let a = -kappa / (2.0 * (kappa + omega)) * s * s;
    let a_p = kappa / (2.0 * omega) * s * s;
    let b = 0.5 * omega * kappa * sdiv * sdiv;
    let b_p = kappa / (2.0 * omega) * hyp.sinh_times(t) * sdiv;
    let c = -kappa / (4.0 * wb) * (2.0 * wb * t).sin();
    let d = 0.25 * kappa * hyp.sinh_over(2.0 * t);

    let ab = a + b;
    let ab_p = a_p + b_p;
    let cd = c + d;
    let r2 = std::f64::consts::SQRT_2 / 4.0;
    Ok(BlockDecomposition {
        gamma_n: Matrix2::new(1.0 + ab, cd, cd, 1.0 + ab_p) * 0.5,
        a_i: Matrix2::new(1.0 + 0.5 * ab, 0.5 * cd, 0.5 * cd, 1.0 + 0.5 * ab_p),
        c_i: Matrix2::new(ab, cd, cd, ab_p) * -0.5,
        c: Matrix2::new(a - b, c - d, c - d, a_p - b_p) * -r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{is_symplectic, max_abs};

    fn diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        max_abs(&(a - b))
    }

    #[test]
    fn identity_at_zero() {
        let p = PropagatorParams::new(0.5, 3.0, 0.6).unwrap();
        let e = propagator_analytic(&p, 0.0).unwrap();
        assert!(diff(&e, &DMatrix::identity(6, 6)) < 1e-15);
        let s = SystemParams::resonant(0.5, 3.0, 0.05).unwrap();
        assert!(diff(&propagator_numeric(&s, 0.0).unwrap(), &DMatrix::identity(6, 6)) < 1e-15);
    }

    #[test]
    fn analytic_matches_exponential_in_all_regimes() {
        for kappa in [0.0, 0.2, 0.5, 0.9, 1.0, 3.0] {
            let s = SystemParams::resonant(0.5, kappa, 0.05).unwrap();
            let p = PropagatorParams::from_system(&s).unwrap();
            for k in 0..=20 {
                let t = 0.5 * k as f64;
                let a = propagator_analytic(&p, t).unwrap();
                let n = propagator_numeric(&s, t).unwrap();
                let scale = max_abs(&n).max(1.0);
                assert!(diff(&a, &n) / scale < 1e-12, "kappa={kappa} t={t}");
                assert!(is_symplectic(&a, 1e-10 * scale * scale));
            }
        }
    }

    #[test]
    fn semigroup_and_unimodular() {
        let s = SystemParams::new(0.5, 0.57, 0.6, 0.05, 1.2, 0.8).unwrap();
        let (t1, t2) = (0.7, 1.9);
        let lhs = propagator_numeric(&s, t1 + t2).unwrap();
        let rhs = propagator_numeric(&s, t1).unwrap() * propagator_numeric(&s, t2).unwrap();
        assert!(diff(&lhs, &rhs) < 1e-9);
        assert!((lhs.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uncoupled_vacuum_is_stationary() {
        let s = SystemParams::resonant(0.5, 0.0, 0.05).unwrap();
        let g0 = CovarianceMatrix::vacuum(3).unwrap();
        for t in [0.3, 2.0, 17.0] {
            let g = evolve_closed(&g0, &s, t).unwrap();
            assert!(diff(g.matrix(), g0.matrix()) < 1e-14);
        }
    }

    #[test]
    fn blocks_match_full_evolution() {
        let g0 = CovarianceMatrix::vacuum(3).unwrap();
        for kappa in [0.3, 0.5, 1.0, 3.0] {
            let s = SystemParams::resonant(0.5, kappa, 0.05).unwrap();
            for k in 0..=10 {
                let t = 0.7 * k as f64;
                let g = evolve_closed(&g0, &s, t).unwrap();
                let blocks = closed_form_blocks(0.5, kappa, t).unwrap();
                let scale = max_abs(g.matrix()).max(1.0);
                assert!(diff(&blocks.assemble(), g.matrix()) / scale < 1e-12, "kappa={kappa} t={t}");
                let read = BlockDecomposition::from_covariance(&g).unwrap();
                assert!((read.a_i - (Matrix2::identity() - read.c_i)).abs().max() / scale < 1e-12);
            }
        }
    }

    #[test]
    fn blocks_at_zero_time() {
        let b = closed_form_blocks(0.5, 3.0, 0.0).unwrap();
        assert_eq!(b.a_i, Matrix2::identity());
        assert_eq!(b.c_i, Matrix2::zeros());
        assert_eq!(b.gamma_n, Matrix2::identity() * 0.5);
    }

    #[test]
    fn thermal_initial_state() {
        let s = SystemParams::resonant(0.5, 3.0, 0.05).unwrap();
        let g = evolve_closed_thermal(5.0, &s, 0.0).unwrap();
        assert_eq!(g.matrix()[(0, 0)], 2.5);
        assert!(evolve_closed_thermal(0.9, &s, 1.0).is_err());
        let g1 = evolve_closed_thermal(1.0, &s, 2.3).unwrap();
        let g0 = evolve_closed(&CovarianceMatrix::vacuum(3).unwrap(), &s, 2.3).unwrap();
        assert!(diff(g1.matrix(), g0.matrix()) < 1e-15);
    }
}
