//! Hybrid variational/classical dynamical mean-field engine for the
//! Anderson impurity model.
//!
//! Quantum half: Pauli-operator Hamiltonians, a statevector simulator with
//! shot and readout noise, and a Rotosolve-driven VQE for ground states,
//! excited states and transition weights. Classical half: Lehmann Green's
//! functions, self-energy, quasiparticle weight, densities of states, weight
//! regularization and the self-consistency loop. A dense exact-diagonalization
//! oracle backs every step.

// `!(a > b)` comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dmft;
pub mod error;
pub mod greens;
pub mod hamiltonian;
pub mod model;
pub mod oracle;
pub mod par;
pub mod pauli;
pub mod reduced;
pub mod sim;
pub mod spectral;
pub mod verify;
pub mod vqe;

pub use error::{Error, Result};
