//! Property suites checked against exact diagonalization.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::greens::{regularize, sum_rule_residuals};
use crate::hamiltonian::{build_two_site_hamiltonian, ladder_on_qubit, number_operator, two_site_spin_z, Ladder};
use crate::model::{Sector, TwoSiteParams};
use crate::oracle::{dense_matrix, full_spectrum, spectral_data_from, verify_ladder_identities_with};
use crate::par::{self, Exec};
use crate::pauli::PauliSum;
use crate::reduced::{build_reduced_hamiltonian, sector_states};
use crate::sim::sampling::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    #[default]
    None,
    /// Negates the Z-string of every ladder operator above qubit 0, to show
    /// that the ladder suite notices.
    ZString,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub draws: usize,
    pub seed: u64,
    pub fault: Fault,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { draws: 20, seed: 0, fault: Fault::None, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub max_error: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub draws: Vec<TwoSiteParams>,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("verification over {} random parameter sets\n", self.draws.len());
        for r in &self.suites {
            let _ = writeln!(s, "{:<5} {:<28} max error {:.3e} (tol {:.0e})", if r.passed { "PASS" } else { "FAIL" }, r.name, r.max_error, r.tol);
        }
        s
    }
}

/// Random parameters: `U in [0, 8]`, `mu in [-2, 4]`, `eps2 in [-2, 2]`,
/// `V in [0.1, 1.5]`.
pub fn random_params<R: Rng>(rng: &mut R) -> TwoSiteParams {
    TwoSiteParams::new(rng.random_range(0.0..8.0), rng.random_range(-2.0..4.0), rng.random_range(-2.0..2.0), rng.random_range(0.1..1.5))
}

fn max_coefficient(s: &PauliSum) -> f64 {
    s.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

#[derive(Default)]
struct DrawErrors {
    ladder: f64,
    reduced: f64,
    commutator: f64,
    weights: f64,
    regularized: f64,
}

fn check_draw(p: &TwoSiteParams, draw: usize, opts: &VerifyOptions) -> Result<DrawErrors> {
    let h = build_two_site_hamiltonian(p)?;
    let sz = two_site_spin_z();
    let spectrum = full_spectrum(&h, &sz)?;
    let mut e = DrawErrors::default();

    let fault = opts.fault;
    e.ladder = verify_ladder_identities_with(&spectrum, |n, q, k: Ladder| {
        let op = ladder_on_qubit(n, q, k)?;
        Ok(if fault == Fault::ZString && q > 0 { op.scale(-1.0) } else { op })
    })?
    .max_deviation();

    for sector in Sector::two_site_table() {
        let exact = spectrum.sector_energies(sector);
        let hr = build_reduced_hamiltonian(sector, p)?;
        let m = dense_matrix(&hr)?;
        let idx = sector_states(sector)?;
        let block = crate::oracle::CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
        let mut ev: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        if ev.len() != exact.len() {
            e.reduced = f64::INFINITY;
            continue;
        }
        for (a, b) in ev.iter().zip(&exact) {
            e.reduced = e.reduced.max((a - b).abs());
        }
    }

    e.commutator = max_coefficient(&h.commutator(&number_operator(4))?).max(max_coefficient(&h.commutator(&sz)?));

    let data = spectral_data_from(&spectrum, &[0])?;
    e.weights = (data.weight_sum(0) - 1.0).abs();
    for q in data.poles() {
        e.weights = e.weights.max((-q.lambda[0]).max(q.lambda[0] - 1.0));
    }

    // noisy weights, then restore the sum rules
    let mut rng = stream_rng(opts.seed ^ 0x5eed, draw as u64);
    let mut noisy = data.clone();
    for q in noisy.particle.iter_mut().chain(noisy.hole.iter_mut()) {
        if q.lambda[0] > 1e-6 {
            q.lambda[0] = (q.lambda[0] + rng.random_range(-0.02..0.02)).max(0.0);
        }
    }
    let model = p.to_model();
    e.regularized = match regularize(&noisy, &model) {
        Ok(r) => sum_rule_residuals(&r, &model, 0, 0).iter().fold(0.0, |m, x| m.max(x.abs())),
        Err(_) => f64::INFINITY,
    };
    Ok(e)
}

/// Runs every suite over `opts.draws` random parameter sets.
pub fn run_verification(opts: &VerifyOptions) -> Result<VerifyReport> {
    let draws: Vec<TwoSiteParams> = (0..opts.draws).map(|k| random_params(&mut stream_rng(opts.seed, k as u64))).collect();
    let per: Vec<DrawErrors> = par::map_range(opts.exec, draws.len(), |k| check_draw(&draws[k], k, opts)).into_iter().collect::<Result<_>>()?;
    let worst = |f: fn(&DrawErrors) -> f64| per.iter().map(f).fold(0.0, f64::max);
    let suite = |name: &str, err: f64, tol: f64| SuiteResult { name: name.into(), max_error: err, tol, passed: err <= tol };
    let suites = vec![
        suite("ladder identities", worst(|e| e.ladder), 1e-12),
        suite("reduced sector spectra", worst(|e| e.reduced), 1e-12),
        suite("symmetry commutators", worst(|e| e.commutator), 0.0),
        suite("weight sum rule", worst(|e| e.weights), 1e-8),
        suite("regularized sum rules", worst(|e| e.regularized), 1e-12),
    ];
    Ok(VerifyReport { draws, suites })
}
