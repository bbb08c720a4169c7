//! Classical post-processing of pole data: Green's functions, self-energy,
//! quasiparticle weight, densities of states and weight regularization.

pub mod dos;
pub mod evaluator;
pub mod laurent;
pub mod regularize;

pub use dos::{dos_impurity, dos_lattice, occupations, rho0, self_energy_curve, uniform_grid, DosCurve, DosKind, Occupations, SelfEnergyCurve};
pub use evaluator::{hybridization, GreensEvaluator, QuasiparticleWeight, SigmaExpansion};
pub use regularize::{regularize, regularize_orbital, regularize_two_site_ph, sum_rule_residuals, two_site_lambda};
