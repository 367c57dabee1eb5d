//! Hamiltonian of one resonator mode (mode 0) coupled to two ion modes
//! (modes 1 and 2), and the spectrum of the resulting linear flow.

use nalgebra::{Complex, DMatrix, Schur};

use crate::error::{Error, Result};
use crate::symplectic::symplectic_form;

/// Frequencies and couplings of the three-mode Hamiltonian, all in one
/// angular-frequency unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Resonator frequency.
    pub omega: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// Direct ion-ion exchange coupling.
    pub ion_coupling: f64,
    /// Resonator-ion couplings.
    pub kappa1: f64,
    pub kappa2: f64,
}

impl SystemParams {
    pub fn new(
        omega: f64,
        nu1: f64,
        nu2: f64,
        ion_coupling: f64,
        kappa1: f64,
        kappa2: f64,
    ) -> Result<Self> {
        let p = Self {
            omega,
            nu1,
            nu2,
            ion_coupling,
            kappa1,
            kappa2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric parameters on resonance: `nu1 = nu2 = omega + ion_coupling`,
    /// `kappa1 = kappa2 = kappa`.
    pub fn resonant(omega: f64, kappa: f64, ion_coupling: f64) -> Result<Self> {
        let nu = omega + ion_coupling;
        Self::new(omega, nu, nu, ion_coupling, kappa, kappa)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega,
            self.nu1,
            self.nu2,
            self.ion_coupling,
            self.kappa1,
            self.kappa2,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("system parameters must be finite"));
        }
        if self.omega <= 0.0 {
            return Err(Error::invalid(format!("omega must be positive, got {}", self.omega)));
        }
        if self.nu1 <= 0.0 || self.nu2 <= 0.0 {
            return Err(Error::invalid("ion trap frequencies must be positive"));
        }
        if self.kappa1 < 0.0 || self.kappa2 < 0.0 {
            return Err(Error::invalid("ion-resonator couplings must be nonnegative"));
        }
        if self.ion_coupling < 0.0 {
            return Err(Error::invalid("ion-ion coupling must be nonnegative"));
        }
        if self.ion_coupling >= self.nu1.min(self.nu2) {
            return Err(Error::invalid(
                "ion-ion coupling must be smaller than both trap frequencies",
            ));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.nu1 == self.nu2 && self.kappa1 == self.kappa2
    }

    /// Symmetric and `omega == nu - ion_coupling` to within a few ulps.
    pub fn is_resonant(&self) -> bool {
        let detuning = self.nu1 - self.ion_coupling - self.omega;
        self.is_symmetric() && detuning.abs() <= 4.0 * f64::EPSILON * self.nu1.max(1.0)
    }

    /// Lower normal-mode frequency of the ion pair, `nu - ion_coupling`
    /// (symmetric case).
    pub fn omega_minus(&self) -> f64 {
        0.5 * (self.nu1 + self.nu2) - self.ion_coupling
    }

    /// Upper normal-mode frequency of the ion pair, `nu + ion_coupling`.
    pub fn omega_plus(&self) -> f64 {
        0.5 * (self.nu1 + self.nu2) + self.ion_coupling
    }
}

/// Device parameters (SI units) that determine the resonator-ion coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalCoupling {
    pub coulomb_constant: f64,
    pub ion_charge: f64,
    pub capacitance: f64,
    pub gate_voltage: f64,
    /// Equilibrium ion-resonator distance.
    pub distance: f64,
    pub ion_mass: f64,
    pub resonator_mass: f64,
    pub trap_frequency: f64,
    pub resonator_frequency: f64,
}

/// `χ / sqrt(m M ν ω)` with `χ = 2 k e C0 V0 / d³`.
pub fn coupling_constant(p: &PhysicalCoupling) -> Result<f64> {
    let fields = [
        ("coulomb_constant", p.coulomb_constant),
        ("ion_charge", p.ion_charge),
        ("capacitance", p.capacitance),
        ("gate_voltage", p.gate_voltage),
        ("distance", p.distance),
        ("ion_mass", p.ion_mass),
        ("resonator_mass", p.resonator_mass),
        ("trap_frequency", p.trap_frequency),
        ("resonator_frequency", p.resonator_frequency),
    ];
    for (name, v) in fields {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
        }
    }
    let chi = 2.0 * p.coulomb_constant * p.ion_charge * p.capacitance * p.gate_voltage
        / p.distance.powi(3);
    let norm = (p.ion_mass * p.resonator_mass * p.trap_frequency * p.resonator_frequency).sqrt();
    Ok(chi / norm)
}

/// Quadratic-form matrix of the Hamiltonian in `(x0, p0, x1, p1, x2, p2)`
/// order. Positions couple through `U`, momenta through `T`; the constant
/// energy offset is dropped.
pub fn hamiltonian_matrix(s: &SystemParams) -> DMatrix<f64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let u = [
        [s.omega, -s.kappa1 * r, -s.kappa2 * r],
        [-s.kappa1 * r, s.nu1, -s.ion_coupling],
        [-s.kappa2 * r, -s.ion_coupling, s.nu2],
    ];
    let t = [
        [s.omega, 0.0, 0.0],
        [0.0, s.nu1, -s.ion_coupling],
        [0.0, -s.ion_coupling, s.nu2],
    ];
    let mut h = DMatrix::zeros(6, 6);
    for i in 0..3 {
        for j in 0..3 {
            h[(2 * i, 2 * j)] = u[i][j];
            h[(2 * i + 1, 2 * j + 1)] = t[i][j];
        }
    }
    h
}

/// `Jℋ`, the generator of the phase-space flow `E_t = exp(Jℋ t)`.
pub fn dynamics_generator(s: &SystemParams) -> DMatrix<f64> {
    let j = symplectic_form(3).expect("three modes").into_matrix();
    j * hamiltonian_matrix(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Purely imaginary spectrum: the flow is a phase-space rotation.
    Rotational,
    /// A real eigenvalue pair is present: rotations mixed with squeezing.
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumClassification {
    /// Three `±` pairs, each pair stored `(+, -)`.
    pub eigenvalues: Vec<Complex<f64>>,
    pub kind: SpectrumKind,
    /// `sqrt(omega * (nu - ion_coupling))`, the coupling above which the
    /// flow squeezes.
    pub threshold: f64,
}

fn sqrt_pair(lambda: f64) -> [Complex<f64>; 2] {
    // Eigenvalues of the generator are ±sqrt(-lambda).
    if lambda >= 0.0 {
        let r = lambda.sqrt();
        [Complex::new(0.0, r), Complex::new(0.0, -r)]
    } else {
        let r = (-lambda).sqrt();
        [Complex::new(r, 0.0), Complex::new(-r, 0.0)]
    }
}

/// Closed-form eigenvalues of `Jℋ` for symmetric parameters, in the order
/// `±i ω₊`, then the two resonator-ion normal-mode pairs (larger squared
/// frequency first).
pub fn analytic_spectrum(s: &SystemParams) -> Result<Vec<Complex<f64>>> {
    s.validate()?;
    if !s.is_symmetric() {
        return Err(Error::invalid(
            "closed-form spectrum requires nu1 == nu2 and kappa1 == kappa2",
        ));
    }
    let w = s.omega;
    let wm = s.omega_minus();
    let k = s.kappa1;
    let mean = w * w + wm * wm;
    let split = ((w * w - wm * wm).powi(2) + 4.0 * k * k * w * wm).sqrt();
    let upper = 0.5 * (mean + split);
    let lower = 0.5 * (mean - split);

    let mut out = Vec::with_capacity(6);
    out.extend(sqrt_pair(s.omega_plus().powi(2)));
    out.extend(sqrt_pair(upper));
    out.extend(sqrt_pair(lower));
    Ok(out)
}

/// Eigenvalues of `Jℋ` from a real Schur decomposition.
pub fn numeric_spectrum(s: &SystemParams) -> Result<Vec<Complex<f64>>> {
    s.validate()?;
    let schur = Schur::try_new(dynamics_generator(s), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numerical("Schur decomposition of the generator did not converge"))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Spectrum and rotational/mixed classification. Symmetric parameters use the
/// closed form and classify by `kappa > threshold` (the boundary is
/// rotational); otherwise the numeric spectrum is classified by whether any
/// real part exceeds `1e-10`.
pub fn spectrum(s: &SystemParams) -> Result<SpectrumClassification> {
    s.validate()?;
    let threshold = (s.omega * s.omega_minus()).sqrt();
    if s.is_symmetric() {
        let eigenvalues = analytic_spectrum(s)?;
        let kind = if s.kappa1 > threshold {
            SpectrumKind::Mixed
        } else {
            SpectrumKind::Rotational
        };
        return Ok(SpectrumClassification {
            eigenvalues,
            kind,
            threshold,
        });
    }
    let eigenvalues = numeric_spectrum(s)?;
    let max_re = eigenvalues.iter().fold(0.0_f64, |m, z| m.max(z.re));
    let kind = if max_re > 1e-10 {
        SpectrumKind::Mixed
    } else {
        SpectrumKind::Rotational
    };
    Ok(SpectrumClassification {
        eigenvalues,
        kind,
        threshold,
    })
}
