//! Ground states, overlap-penalized excited states and transition weights.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ansatz::Ansatz;
use super::rotosolve::{rotosolve_minimize, RotosolveOptions};
use crate::error::{Error, Result};
use crate::model::Sector;
use crate::par::{self, Exec};
use crate::pauli::PauliSum;
use crate::sim::sampling::{derive_seed, expectation, stream_rng};
use crate::sim::{expectation_exact, run_circuit, zero_state_probability, Circuit, EvalMode, Gate};

/// Sector labels above this distance from an integer mark a state unconverged.
pub const LABEL_TOL: f64 = 0.1;

/// Overlap with a prior state above this marks an excited state unconverged.
pub const OVERLAP_TOL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeOptions {
    pub restarts: usize,
    pub seed: u64,
    /// `None` picks [`RotosolveOptions::exact`] or [`RotosolveOptions::noisy`]
    /// from the evaluation mode.
    pub rotosolve: Option<RotosolveOptions>,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for VqeOptions {
    fn default() -> Self {
        VqeOptions { restarts: 5, seed: 0, rotosolve: None, exec: Exec::default() }
    }
}

impl VqeOptions {
    fn rotosolve_for(&self, mode: &EvalMode) -> RotosolveOptions {
        self.rotosolve.unwrap_or(if mode.is_exact() { RotosolveOptions::exact() } else { RotosolveOptions::noisy() })
    }
}

/// How a state's `(N, Sz)` label is obtained.
#[derive(Debug, Clone)]
pub enum Labeling<'a> {
    /// Measure these operators in the prepared state (noiselessly).
    Measure { number: &'a PauliSum, spin_z: &'a PauliSum },
    /// The register only holds this sector.
    Known(Sector),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenstate {
    pub sector: Sector,
    /// Position within the sector, counting from the lowest found state.
    pub index: usize,
    /// Objective re-evaluated at the optimum (a fresh estimate in shot mode).
    pub energy: f64,
    pub params: Vec<f64>,
    pub ansatz: Ansatz,
    pub circuit: Circuit,
    pub converged: bool,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

fn label_state(circuit: &Circuit, labeling: &Labeling) -> Result<(Sector, Option<String>)> {
    match labeling {
        Labeling::Known(s) => Ok((*s, None)),
        Labeling::Measure { number, spin_z } => {
            let s = run_circuit(circuit, None)?;
            let n = expectation_exact(&s, number)?;
            let sz = expectation_exact(&s, spin_z)?;
            let (rn, rs) = (n.round(), sz.round());
            let note = ((n - rn).abs() > LABEL_TOL || (sz - rs).abs() > LABEL_TOL)
                .then(|| format!("non-integral sector labels <N>={n:.4}, <Sz>={sz:.4}"));
            Ok((Sector::new(rn.max(0.0) as usize, rs as i32), note))
        }
    }
}

/// Best of `restarts` Rotosolve runs of `objective` from random angles.
fn minimize_with_restarts<F>(ansatz: &Ansatz, mode: &EvalMode, opts: &VqeOptions, objective: F) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&Circuit, &EvalMode) -> Result<f64> + Sync + Send,
{
    let roto = opts.rotosolve_for(mode);
    let restarts = opts.restarts.max(1);
    let runs = par::map_range(opts.exec, restarts, |r| -> Result<(Vec<f64>, f64)> {
        let mut rng = stream_rng(opts.seed, r as u64);
        let theta0: Vec<f64> = (0..ansatz.n_params()).map(|_| PI - 2.0 * PI * rng.random::<f64>()).collect();
        let run_mode = mode.derived(derive_seed(opts.seed, r as u64));
        let mut calls = 0u64;
        let f = |t: &[f64]| {
            calls += 1;
            objective(&ansatz.build(t)?, &run_mode.derived(calls))
        };
        let res = rotosolve_minimize(f, &theta0, &roto)?;
        Ok((res.theta, res.value))
    });
    let mut best: Option<(Vec<f64>, f64)> = None;
    for r in runs {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.1 < b.1) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Lowest-energy state of `h` reachable by `ansatz`.
pub fn find_ground_state(h: &PauliSum, ansatz: Ansatz, mode: &EvalMode, opts: &VqeOptions, labeling: &Labeling) -> Result<Eigenstate> {
    if ansatz.n_qubits() != h.n_qubits() {
        return Err(Error::Dimension(format!("{}-qubit ansatz for {}-qubit Hamiltonian", ansatz.n_qubits(), h.n_qubits())));
    }
    if !h.is_hermitian(1e-12) {
        return Err(Error::NonHermitian("VQE objective must be Hermitian".into()));
    }
    let (params, _) = minimize_with_restarts(&ansatz, mode, opts, |c, m| expectation(c, h, m))?;
    let circuit = ansatz.build(&params)?;
    let (sector, note) = label_state(&circuit, labeling)?;
    let energy = expectation(&circuit, h, &mode.derived(u64::MAX))?;
    Ok(Eigenstate {
        sector,
        index: 0,
        energy,
        params,
        ansatz,
        circuit,
        converged: note.is_none(),
        diagnostics: note.into_iter().collect(),
    })
}

/// `|<prior|candidate>|^2` as the all-zero probability of `candidate` followed by `prior†`.
pub fn overlap(candidate: &Circuit, prior: &Circuit, mode: &EvalMode) -> Result<f64> {
    Ok(zero_state_probability(&candidate.then(&prior.inverse()?)?, mode)?.clamp(0.0, 1.0))
}

/// Default overlap weight: twice the spectral-span bound `2 sum |c|`.
pub fn default_overlap_beta(h: &PauliSum) -> f64 {
    2.0 * 2.0 * h.one_norm()
}

/// Next state above `prior`: minimizes `<H> + beta sum_k |<psi_k|psi>|^2`.
pub fn find_excited_states(
    h: &PauliSum,
    ansatz: Ansatz,
    prior: &[Eigenstate],
    beta_overlap: f64,
    mode: &EvalMode,
    opts: &VqeOptions,
    labeling: &Labeling,
) -> Result<Eigenstate> {
    if ansatz.n_qubits() != h.n_qubits() || prior.iter().any(|p| p.circuit.n_qubits() != h.n_qubits()) {
        return Err(Error::Dimension("prior states and ansatz must match the Hamiltonian".into()));
    }
    if beta_overlap < 0.0 {
        return Err(Error::Parameter("overlap weight must be non-negative".into()));
    }
    let objective = |c: &Circuit, m: &EvalMode| -> Result<f64> {
        let mut f = expectation(c, h, &m.derived(0))?;
        if beta_overlap > 0.0 {
            for (k, p) in prior.iter().enumerate() {
                f += beta_overlap * overlap(c, &p.circuit, &m.derived(k as u64 + 1))?;
            }
        }
        Ok(f)
    };
    let (params, _) = minimize_with_restarts(&ansatz, mode, opts, objective)?;
    let circuit = ansatz.build(&params)?;
    let (sector, note) = label_state(&circuit, labeling)?;
    let mut diagnostics: Vec<String> = note.into_iter().collect();
    let final_mode = mode.derived(u64::MAX);
    let energy = expectation(&circuit, h, &final_mode)?;
    if beta_overlap > 0.0 {
        for p in prior {
            let o = overlap(&circuit, &p.circuit, &EvalMode::Exact)?;
            if o > OVERLAP_TOL {
                diagnostics.push(format!("overlap {o:.4} with prior state {} of {}", p.index, p.sector));
            }
        }
    }
    let index = prior.iter().filter(|p| p.sector == sector).count();
    Ok(Eigenstate { sector, index, energy, params, ansatz, circuit, converged: diagnostics.is_empty(), diagnostics })
}

/// Register on which a transition weight is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// Full register; `alpha` is the qubit of the orbital.
    Full,
    /// Reduced two-qubit registers of the two-site model; only the site-1
    /// spin-up orbital is supported and spin-forbidden pairs return 0.
    Reduced,
}

/// `|<excited| (prod Z) X_alpha |ground>|^2`, read as the all-zero
/// probability of `U_ground`, the Z-string and X, then `U_excited†`.
pub fn transition_amplitude(ground: &Eigenstate, excited: &Eigenstate, alpha: usize, representation: Representation, mode: &EvalMode) -> Result<f64> {
    let (n0, n1) = (ground.sector.n_electrons as i64, excited.sector.n_electrons as i64);
    if (n0 - n1).abs() != 1 {
        return Err(Error::Parameter(format!("sectors {} and {} do not differ by one electron", ground.sector, excited.sector)));
    }
    let n = ground.circuit.n_qubits();
    let mut middle = Circuit::new(n);
    match representation {
        Representation::Full => {
            if alpha >= n {
                return Err(Error::OutOfRange(format!("orbital qubit {alpha} on {n} qubits")));
            }
            middle.push(Gate::X(alpha))?;
            for q in 0..alpha {
                middle.push(Gate::Z(q))?;
            }
        }
        Representation::Reduced => {
            if alpha != 0 {
                return Err(Error::Unsupported("reduced transition weights only for the site-1 spin-up orbital".into()));
            }
            if ground.sector != Sector::new(2, 0) {
                return Err(Error::Unsupported(format!("reduced transition weights need a (N=2, Sz=0) ground state, got {}", ground.sector)));
            }
            let dsz = excited.sector.sz - ground.sector.sz;
            let allowed = if n1 > n0 { dsz == 1 } else { dsz == -1 };
            if !allowed {
                return Ok(0.0);
            }
            middle.push(Gate::X(0))?;
        }
    }
    let c = ground.circuit.then(&middle)?.then(&excited.circuit.inverse()?)?;
    Ok(zero_state_probability(&c, mode)?.clamp(0.0, 1.0))
}
