//! Exact statevector simulation, shot sampling and readout-error models.

pub mod circuit;
pub mod sampling;
pub mod spam;
pub mod statevector;

pub use circuit::{Angle, Circuit, Gate};
pub use sampling::{expectation, expectation_sampled, zero_state_probability, EvalMode, ShotConfig};
pub use spam::{apply_spam, spam_correct, ReadoutError, SpamModel};
pub use statevector::{expectation_exact, run_circuit, Statevector};
