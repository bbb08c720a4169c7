//! Finite-shot estimators.
//!
//! Every Pauli term (or qubit-wise commuting group, with grouping on) gets its
//! own `shots` measurements, drawn from a ChaCha stream keyed by
//! `(seed, term index)`, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Gate};
use super::spam::{apply_spam, spam_correct, SpamModel};
use super::statevector::{run_circuit, Statevector};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::pauli::{Pauli, PauliSum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotConfig {
    /// Measurements per Pauli term (per group when grouping).
    pub shots: u64,
    pub seed: u64,
    /// Measure qubit-wise commuting terms together.
    #[serde(default)]
    pub grouping: bool,
    #[serde(default)]
    pub spam: Option<SpamModel>,
    /// Apply the inverse confusion matrix to measured frequencies.
    #[serde(default)]
    pub correct_spam: bool,
    #[serde(skip)]
    pub exec: Exec,
}

impl ShotConfig {
    pub fn new(shots: u64, seed: u64) -> Self {
        ShotConfig { shots, seed, grouping: false, spam: None, correct_spam: false, exec: Exec::default() }
    }

    /// Same settings with a different seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        ShotConfig { seed, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EvalMode {
    /// Expectations read directly from the statevector.
    Exact,
    Shots(ShotConfig),
}

impl EvalMode {
    pub fn is_exact(&self) -> bool {
        matches!(self, EvalMode::Exact)
    }

    /// Mode for the `index`-th independent evaluation under this mode.
    pub fn derived(&self, index: u64) -> EvalMode {
        match self {
            EvalMode::Exact => EvalMode::Exact,
            EvalMode::Shots(c) => EvalMode::Shots(c.reseeded(derive_seed(c.seed, index))),
        }
    }
}

/// Mixes a child index into a root seed (SplitMix64 finalizer).
pub fn derive_seed(root: u64, index: u64) -> u64 {
    let mut z = root ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Multinomial counts drawn as a chain of binomials.
pub fn sample_counts(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; probs.len()];
    let mut left = shots;
    let mut mass = 1.0f64;
    for (k, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if k + 1 == probs.len() {
            counts[k] = left;
            break;
        }
        let q = if mass > 0.0 { (p.max(0.0) / mass).clamp(0.0, 1.0) } else { 0.0 };
        let n = Binomial::new(left, q).map_err(|e| Error::Numerical(format!("binomial({left}, {q}): {e}")))?.sample(rng);
        counts[k] = n;
        left -= n;
        mass -= p.max(0.0);
    }
    Ok(counts)
}

/// Measured frequencies of `probs` under `cfg` (readout noise, correction).
fn measure(probs: &[f64], cfg: &ShotConfig, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let observed = match &cfg.spam {
        Some(m) => apply_spam(probs, m)?,
        None => probs.to_vec(),
    };
    let counts = sample_counts(&observed, cfg.shots, rng)?;
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / cfg.shots as f64).collect();
    match (&cfg.spam, cfg.correct_spam) {
        (Some(m), true) => spam_correct(&freq, m, true),
        _ => Ok(freq),
    }
}

/// Rotates each measured qubit so X or Y is read out along Z.
fn basis_change(state: &Statevector, basis: &[Pauli]) -> Result<Statevector> {
    let mut s = state.clone();
    for (q, p) in basis.iter().enumerate() {
        match p {
            Pauli::X => s.apply(&Gate::H(q))?,
            Pauli::Y => {
                s.apply(&Gate::Sdg(q))?;
                s.apply(&Gate::H(q))?;
            }
            _ => {}
        }
    }
    Ok(s)
}

fn parity_mask(axes: &[Pauli]) -> usize {
    let n = axes.len();
    axes.iter()
        .enumerate()
        .filter(|(_, p)| **p != Pauli::I)
        .fold(0, |m, (q, _)| m | 1 << (n - 1 - q))
}

fn parity_mean(freq: &[f64], mask: usize) -> f64 {
    freq.iter()
        .enumerate()
        .map(|(b, f)| if (b & mask).count_ones().is_multiple_of(2) { *f } else { -f })
        .sum()
}

/// Greedy qubit-wise commuting groups, in canonical term order.
fn group_terms(terms: &[(Vec<Pauli>, f64)], grouping: bool) -> Vec<(Vec<Pauli>, Vec<usize>)> {
    let mut groups: Vec<(Vec<Pauli>, Vec<usize>)> = Vec::new();
    for (k, (axes, _)) in terms.iter().enumerate() {
        if grouping {
            let fits = |basis: &[Pauli]| basis.iter().zip(axes).all(|(b, a)| *a == Pauli::I || *b == Pauli::I || a == b);
            if let Some(g) = groups.iter_mut().find(|g| fits(&g.0)) {
                for (b, a) in g.0.iter_mut().zip(axes) {
                    if *a != Pauli::I {
                        *b = *a;
                    }
                }
                g.1.push(k);
                continue;
            }
        }
        groups.push((axes.clone(), vec![k]));
    }
    groups
}

/// Shot estimate of `<h>` in the state prepared by the bound circuit `c`.
pub fn expectation_sampled(c: &Circuit, h: &PauliSum, cfg: &ShotConfig) -> Result<f64> {
    if cfg.shots < 1 {
        return Err(Error::Parameter("need at least one shot".into()));
    }
    if c.n_qubits() != h.n_qubits() {
        return Err(Error::Dimension(format!("{}-qubit circuit, {}-qubit operator", c.n_qubits(), h.n_qubits())));
    }
    let state = run_circuit(c, None)?;
    let all = h.real_terms(1e-12)?;
    let offset: f64 = all.iter().filter(|(a, _)| a.iter().all(|p| *p == Pauli::I)).map(|(_, c)| c).sum();
    let terms: Vec<(Vec<Pauli>, f64)> = all.into_iter().filter(|(a, _)| a.iter().any(|p| *p != Pauli::I)).collect();
    let groups = group_terms(&terms, cfg.grouping);

    let parts = par::map_range(cfg.exec, groups.len(), |g| -> Result<f64> {
        let (basis, members) = &groups[g];
        let rotated = basis_change(&state, basis)?;
        let mut rng = stream_rng(cfg.seed, g as u64);
        let freq = measure(&rotated.probabilities(), cfg, &mut rng)?;
        Ok(members.iter().map(|&k| terms[k].1 * parity_mean(&freq, parity_mask(&terms[k].0))).sum())
    });
    let mut total = offset;
    for p in parts {
        total += p?;
    }
    Ok(total)
}

/// Probability of reading all zeros after the bound circuit `c`.
pub fn zero_state_probability(c: &Circuit, mode: &EvalMode) -> Result<f64> {
    let state = run_circuit(c, None)?;
    match mode {
        EvalMode::Exact => Ok(state.amplitudes()[0].norm_sqr()),
        EvalMode::Shots(cfg) => {
            if cfg.shots < 1 {
                return Err(Error::Parameter("need at least one shot".into()));
            }
            let mut rng = stream_rng(cfg.seed, 0);
            Ok(measure(&state.probabilities(), cfg, &mut rng)?[0])
        }
    }
}

/// `<h>` under either evaluation mode.
pub fn expectation(c: &Circuit, h: &PauliSum, mode: &EvalMode) -> Result<f64> {
    match mode {
        EvalMode::Exact => super::statevector::expectation_exact(&run_circuit(c, None)?, h),
        EvalMode::Shots(cfg) => expectation_sampled(c, h, cfg),
    }
}
