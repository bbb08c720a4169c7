//! Variational eigensolvers: ansatz circuits, Rotosolve and the
//! Green's-function pole search.

pub mod ansatz;
pub mod rotosolve;
pub mod solver;
pub mod spectrum;

pub use ansatz::{Ansatz, AnsatzKind};
pub use rotosolve::{rotosolve_minimize, RotosolveOptions, RotosolveResult};
pub use solver::{find_excited_states, find_ground_state, transition_amplitude, Eigenstate, Labeling, Representation, VqeOptions};
pub use spectrum::{solve_spectrum, Method, SpectrumOptions, SpectrumReport, StateRecord};
