//! Unconditional (ensemble-averaged) master equation for the two-qubit
//! collective decay, plus the validated density-matrix type the rest of the
//! crate passes around.
//!
//! The generator is `L ρ = −i[H̃₀, ρ] + γ Σ_λ D[J_λ]ρ` with one dissipator
//! per output port; both ports carry the same Hermitian quadrature `J`, so
//! the total dissipation is `2γ D[J]`. In the eigenbasis of `J` the equation
//! is exactly solvable — coherences decay as `e^{−γ(j_m−j_n)² t}` and
//! populations freeze — which the tests exploit as an oracle.
//!
//! Public time arguments are in units of the single-qubit lifetime
//! `T₁ = 1/γ`; only [`liouvillian_apply`] speaks physical rates.

use crate::model::WaveguideModel;
use crate::qmat::{herm_eig, CMatrix, QmatError, StateVector, C64};
use thiserror::Error;

const HERM_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-9;
const EIG_FLOOR: f64 = -1e-8;

/// Largest RK4 step the integrator accepts, in `T₁` units.
pub const MAX_STEP_T1: f64 = 0.01;
/// Default RK4 step, in `T₁` units.
pub const DEFAULT_STEP_T1: f64 = 0.005;
/// Positivity guard while integrating (looser than the constructor's floor:
/// RK4 drift is transient and the per-step symmetrize/renormalize containment
/// keeps it at rounding scale).
const EVOLVE_EIG_FLOOR: f64 = -1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("density matrix is not Hermitian (max |ρ - ρ†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("density matrix trace is {trace:.12} (must be 1 within 1e-9)")]
    TraceNotOne { trace: f64 },
    #[error("density matrix has eigenvalue {min_eigenvalue:.3e} below -1e-8")]
    NotPositive { min_eigenvalue: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum LindbladError {
    #[error("step {dt} T₁ out of range: must be positive and ≤ {MAX_STEP_T1} T₁")]
    StepTooLarge { dt: f64 },
    #[error("state lost positivity at t = {t} T₁ (min eigenvalue {min_eigenvalue:.3e})")]
    PositivityLost { min_eigenvalue: f64, t: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Numeric(#[from] QmatError),
}

/// A validated two-qubit state: Hermitian, unit trace, positive within a
/// numerical floor. Construction checks the invariants; evolution code keeps
/// them by explicit symmetrize/renormalize containment.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(m: CMatrix) -> Result<Self, StateError> {
        let dev = m.hermitian_deviation();
        if dev > HERM_TOL {
            return Err(StateError::NotHermitian { deviation: dev });
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(StateError::TraceNotOne { trace: tr });
        }
        let sym = m.symmetrize();
        let (w, _) = herm_eig(&sym).expect("symmetrized matrix is Hermitian");
        let min = w.last().copied().unwrap_or(0.0);
        if min < EIG_FLOOR {
            return Err(StateError::NotPositive { min_eigenvalue: min });
        }
        Ok(DensityMatrix { m: sym })
    }

    /// `|ψ⟩⟨ψ|` of the normalized input.
    pub fn from_pure(psi: &StateVector) -> Self {
        DensityMatrix { m: psi.normalized().outer() }
    }

    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        DensityMatrix { m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m.get(i, j)
    }

    /// Diagonal in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.m.dim()).map(|i| self.m.get(i, i).re).collect()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.m.data().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (w, _) = herm_eig(&self.m).expect("density matrix is Hermitian");
        *w.last().expect("nonempty spectrum")
    }
}

/// `L ρ = −i[H̃₀, ρ] + γ Σ_{λ∈{L,R}} (J ρ J† − ½{J†J, ρ})`, physical rates.
pub fn liouvillian_apply(model: &WaveguideModel, rho: &CMatrix) -> CMatrix {
    let h = model.hamiltonian();
    let j = model.jump_operator();
    let jj = j.matmul(&j); // J Hermitian: J†J = J²
    let comm = h.matmul(rho).sub(&rho.matmul(&h));
    let sandwich = j.matmul(rho).matmul(&j);
    let anti = jj.matmul(rho).add(&rho.matmul(&jj));
    // two identical ports ⇒ dissipator weight 2γ
    let dissipator = sandwich.sub(&anti.scale_re(0.5)).scale_re(2.0 * model.gamma);
    comm.scale(C64::new(0.0, -1.0)).add(&dissipator)
}

/// Dimensionless right-hand side in `T₁` time: `(dρ/dτ) = L ρ / γ`.
fn scaled_rhs(model: &WaveguideModel, rho: &CMatrix) -> CMatrix {
    liouvillian_apply(model, rho).scale_re(1.0 / model.gamma)
}

/// Classical RK4 on the master equation. Returns the state at every grid
/// point `t_i = i·dt` from `0` through `t_max` (times in `T₁` units). Each
/// step is symmetrized and renormalized, and a positivity guard aborts if
/// the state ever drifts past rounding scale.
pub fn evolve(
    model: &WaveguideModel,
    rho0: &DensityMatrix,
    dt: f64,
    t_max: f64,
) -> Result<Vec<(f64, DensityMatrix)>, LindbladError> {
    if !(dt > 0.0 && dt.is_finite()) || dt > MAX_STEP_T1 {
        return Err(LindbladError::StepTooLarge { dt });
    }
    let n_steps = (t_max / dt).round() as usize;
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push((0.0, rho0.clone()));
    let mut rho = rho0.matrix().clone();
    for i in 0..n_steps {
        let k1 = scaled_rhs(model, &rho);
        let k2 = scaled_rhs(model, &rho.add(&k1.scale_re(dt / 2.0)));
        let k3 = scaled_rhs(model, &rho.add(&k2.scale_re(dt / 2.0)));
        let k4 = scaled_rhs(model, &rho.add(&k3.scale_re(dt)));
        let incr = k1.add(&k2.scale_re(2.0)).add(&k3.scale_re(2.0)).add(&k4);
        rho = rho.add(&incr.scale_re(dt / 6.0)).symmetrize();
        let tr = rho.trace().re;
        rho = rho.scale_re(1.0 / tr);
        let t = (i + 1) as f64 * dt;
        let (w, _) = herm_eig(&rho)?;
        let min = *w.last().expect("nonempty spectrum");
        if min < EVOLVE_EIG_FLOOR {
            return Err(LindbladError::PositivityLost { min_eigenvalue: min, t });
        }
        out.push((t, DensityMatrix::from_matrix_unchecked(rho.clone())));
    }
    Ok(out)
}

/// `max |L ρ| / γ` — zero exactly on stationary states, in `1/T₁` units.
pub fn steady_state_residual(model: &WaveguideModel, rho: &DensityMatrix) -> f64 {
    liouvillian_apply(model, rho.matrix()).max_abs() / model.gamma
}
