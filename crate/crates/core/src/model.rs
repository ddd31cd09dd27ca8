//! Two qubits coupled through a bidirectional waveguide at special spacing.
//!
//! Basis ordering is `|0⟩=|g₁g₂⟩, |1⟩=|g₁e₂⟩, |2⟩=|e₁g₂⟩, |3⟩=|e₁e₂⟩`, with
//! qubit 1 the left (most significant) Kronecker factor. The single-qubit
//! convention is `σ_z|e⟩ = +|e⟩` and lowering `σ|e⟩ = |g⟩`.
//!
//! When the qubit spacing is an integer or half-integer multiple of the
//! wavelength, both output ports couple to one *Hermitian* collective
//! quadrature `J_± = (σ_x⊗1 ± 1⊗σ_x)/√2` — the even spacing selects `J₊`,
//! the odd spacing `J₋`. Its spectrum splits the two-qubit space into a
//! "bright" pair of eigenvectors with eigenvalues `±√2` and a dark
//! two-dimensional kernel spanned by Bell states, which is what makes the
//! long-time entanglement of the monitored system possible.

use crate::qmat::{kron, CMatrix, StateVector, C64};
use thiserror::Error;

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("parameter {name} = {value} out of range: {requirement}")]
    BadParam { name: &'static str, value: f64, requirement: &'static str },
}

/// Spacing parity: which collective quadrature the waveguide ports see.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Spacing an integer number of wavelengths — ports couple to `J₊`.
    Even,
    /// Spacing a half-integer number of wavelengths — ports couple to `J₋`.
    Odd,
}

impl std::str::FromStr for Parity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(format!("unknown parity '{other}' (expected even|odd)")),
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// The ten states the simulator refers to by name: the computational basis,
/// the four Bell states, and the two separable bright eigenvectors of `J₊`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    GG,
    GE,
    EG,
    EE,
    /// `(|gg⟩+|ee⟩)/√2`
    PsiPlus,
    /// `(|gg⟩−|ee⟩)/√2`
    PsiMinus,
    /// `(|ge⟩+|eg⟩)/√2`
    PhiPlus,
    /// `(|ge⟩−|eg⟩)/√2`
    PhiMinus,
    /// `(|gg⟩+|ge⟩+|eg⟩+|ee⟩)/2` — separable, `J₊`-eigenvalue `+√2`
    SmallPhiPlus,
    /// `(|gg⟩−|ge⟩−|eg⟩+|ee⟩)/2` — separable, `J₊`-eigenvalue `−√2`
    SmallPhiMinus,
}

impl NamedState {
    pub const ALL: [NamedState; 10] = [
        NamedState::GG,
        NamedState::GE,
        NamedState::EG,
        NamedState::EE,
        NamedState::PsiPlus,
        NamedState::PsiMinus,
        NamedState::PhiPlus,
        NamedState::PhiMinus,
        NamedState::SmallPhiPlus,
        NamedState::SmallPhiMinus,
    ];

    pub const BELL: [NamedState; 4] =
        [NamedState::PsiPlus, NamedState::PsiMinus, NamedState::PhiPlus, NamedState::PhiMinus];
}

impl std::str::FromStr for NamedState {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "gg" => NamedState::GG,
            "ge" => NamedState::GE,
            "eg" => NamedState::EG,
            "ee" => NamedState::EE,
            "psi_plus" => NamedState::PsiPlus,
            "psi_minus" => NamedState::PsiMinus,
            "phi_plus" => NamedState::PhiPlus,
            "phi_minus" => NamedState::PhiMinus,
            "small_phi_plus" => NamedState::SmallPhiPlus,
            "small_phi_minus" => NamedState::SmallPhiMinus,
            other => return Err(format!("unknown state label '{other}'")),
        })
    }
}

impl std::fmt::Display for NamedState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NamedState::GG => "gg",
            NamedState::GE => "ge",
            NamedState::EG => "eg",
            NamedState::EE => "ee",
            NamedState::PsiPlus => "psi_plus",
            NamedState::PsiMinus => "psi_minus",
            NamedState::PhiPlus => "phi_plus",
            NamedState::PhiMinus => "phi_minus",
            NamedState::SmallPhiPlus => "small_phi_plus",
            NamedState::SmallPhiMinus => "small_phi_minus",
        })
    }
}

/// Physical configuration: decay rate, detuning-frame qubit frequency,
/// spacing parity, and the two detector efficiencies.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideModel {
    pub gamma: f64,
    pub omega_tilde: f64,
    pub kd_parity: Parity,
    pub eta_l: f64,
    pub eta_r: f64,
}

pub fn build_model(
    gamma: f64,
    omega_tilde: f64,
    kd_parity: Parity,
    eta_l: f64,
    eta_r: f64,
) -> Result<WaveguideModel, ModelError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(ModelError::BadParam {
            name: "gamma",
            value: gamma,
            requirement: "must be finite and > 0",
        });
    }
    if !omega_tilde.is_finite() {
        return Err(ModelError::BadParam {
            name: "omega_tilde",
            value: omega_tilde,
            requirement: "must be finite",
        });
    }
    for (name, eta) in [("eta_l", eta_l), ("eta_r", eta_r)] {
        if !(0.0..=1.0).contains(&eta) {
            return Err(ModelError::BadParam { name, value: eta, requirement: "must be in [0, 1]" });
        }
    }
    Ok(WaveguideModel { gamma, omega_tilde, kd_parity, eta_l, eta_r })
}

impl WaveguideModel {
    /// Detector efficiencies in channel order (left, right).
    pub fn efficiencies(&self) -> [f64; 2] {
        [self.eta_l, self.eta_r]
    }

    /// The collective quadrature this spacing couples to (both ports share it).
    pub fn jump_operator(&self) -> CMatrix {
        collective_quadrature(self.kd_parity)
    }

    /// Rotating-frame Hamiltonian `H̃₀ = (ω̃/2)(σ_z⊗1 + 1⊗σ_z)`
    /// = `ω̃·diag(−1, 0, 0, +1)`.
    pub fn hamiltonian(&self) -> CMatrix {
        let mut h = CMatrix::zeros(4);
        h.set(0, 0, C64::new(-self.omega_tilde, 0.0));
        h.set(3, 3, C64::new(self.omega_tilde, 0.0));
        h
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_entries(2, vec![
        C64::new(0.0, 0.0), C64::new(0.0, -1.0),
        C64::new(0.0, 1.0), C64::new(0.0, 0.0),
    ])
}

/// `σ_z` with `|e⟩` the +1 eigenvector: `diag(−1, +1)` in the (g, e) basis.
pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(2, &[-1.0, 0.0, 0.0, 1.0])
}

/// Lowering operator `σ|e⟩ = |g⟩`.
pub fn lowering() -> CMatrix {
    CMatrix::from_real(2, &[0.0, 1.0, 0.0, 0.0])
}

/// `J_± = (σ_x⊗1 ± 1⊗σ_x)/√2`.
pub fn collective_quadrature(kd_parity: Parity) -> CMatrix {
    let sx1 = kron(&pauli_x(), &CMatrix::identity(2));
    let sx2 = kron(&CMatrix::identity(2), &pauli_x());
    let combined = match kd_parity {
        Parity::Even => sx1.add(&sx2),
        Parity::Odd => sx1.sub(&sx2),
    };
    combined.scale_re(1.0 / SQRT2)
}

/// Jump operators for the two output ports. The special spacings make both
/// ports see the *same* quadrature; keeping two entries preserves the
/// two-channel bookkeeping (efficiencies, click records) everywhere else.
pub fn jump_operator_set(model: &WaveguideModel) -> [CMatrix; 2] {
    let j = model.jump_operator();
    [j.clone(), j]
}

pub fn named_state(label: NamedState) -> StateVector {
    let h = 0.5;
    let r = 1.0 / SQRT2;
    let amps: [f64; 4] = match label {
        NamedState::GG => [1.0, 0.0, 0.0, 0.0],
        NamedState::GE => [0.0, 1.0, 0.0, 0.0],
        NamedState::EG => [0.0, 0.0, 1.0, 0.0],
        NamedState::EE => [0.0, 0.0, 0.0, 1.0],
        NamedState::PsiPlus => [r, 0.0, 0.0, r],
        NamedState::PsiMinus => [r, 0.0, 0.0, -r],
        NamedState::PhiPlus => [0.0, r, r, 0.0],
        NamedState::PhiMinus => [0.0, r, -r, 0.0],
        NamedState::SmallPhiPlus => [h, h, h, h],
        NamedState::SmallPhiMinus => [h, -h, -h, h],
    };
    StateVector::from_real(&amps)
}
