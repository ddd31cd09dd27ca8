//! Simulation library for two qubits coupled through a pair of waveguide
//! channels with collective decay.
//!
//! The library integrates the unconditional (Lindblad) master equation and
//! two conditional unravelings of it — photon counting ("jump") and homodyne
//! detection ("diffusive") — and extracts entanglement observables, most
//! importantly the Wootters concurrence. Closed-form reference solutions for
//! the no-click evolution, its concurrence, the long-time steady state, and
//! the ensemble-averaged concurrence under single-port homodyne detection
//! live in [`oracles`] and back the test suite.
//!
//! Conventions used throughout:
//!
//! * Basis ordering `{|0⟩=|g₁g₂⟩, |1⟩=|g₁e₂⟩, |2⟩=|e₁g₂⟩, |3⟩=|e₁e₂⟩}`;
//!   qubit 1 is the left Kronecker factor.
//! * `σ_z|e⟩ = +|e⟩`, `σ_z|g⟩ = −|g⟩`.
//! * Times and step sizes passed to dynamics functions are in units of
//!   `T₁ = 1/γ`; closed-form oracles take physical `(gamma, t)` pairs.
//! * All randomness flows through the counter-based [`trajectories::RngStream`],
//!   so every result is a deterministic function of `(model, config, seed)`
//!   independent of thread schedule.

pub mod config;
pub mod ensemble;
pub mod experiment;
pub mod lindblad;
pub mod measures;
pub mod model;
pub mod oracles;
pub mod qmat;
pub mod trajectories;
