//! Statevector simulator for gradient-descent ground-state search, where
//! each step `x ← (I − γH)x` is carried out by a linear-combination-of-unitaries
//! circuit with post-selection.
//!
//! The pipeline runs from fermionic integrals ([`fermion`]) through the
//! Jordan–Wigner map to Pauli sums ([`pauli`]), then to the circuit
//! ([`lcu`]) and the iteration driver ([`descent`]). [`perturbation`],
//! [`noise`] and [`vqe`] cover the companion experiments, and [`oracle`]
//! holds the exact references everything is checked against.

pub mod compiled;
pub mod descent;
pub mod error;
pub mod fermion;
pub mod lcu;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod perturbation;
pub mod state;
pub mod vqe;
pub mod workflow;

pub use error::{Error, Result};
pub use pauli::{Pauli, PauliString, PauliSum};
pub use state::StateVector;
