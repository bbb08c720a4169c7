//! Dense complex amplitudes and gate application.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::{Angle, Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliMasks, PauliSum};

pub const MAX_QUBITS: usize = 16;

/// Amplitudes over `2^n` basis states; qubit 0 is the highest-order bit and
/// bit value 0 means the orbital is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::default(); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Statevector { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || n == 0 {
            return Err(Error::Dimension(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let s = Statevector { n_qubits: n, amps };
        if (s.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Parameter(format!("state norm {} is not 1", s.norm())));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = self.bit(q);
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | bit]);
                self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply(&mut self, g: &Gate) -> Result<()> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let fixed = |a: Angle| match a {
            Angle::Fixed(t) => Ok(t),
            Angle::Slot(k) => Err(Error::UnboundParameter(k)),
        };
        if g.qubits().iter().any(|&q| q >= self.n_qubits) {
            return Err(Error::OutOfRange(format!("{g:?} on {} qubits", self.n_qubits)));
        }
        match *g {
            Gate::Ry(q, a) => {
                let t = fixed(a)? / 2.0;
                let (s, co) = t.sin_cos();
                self.apply_1q(q, [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]);
            }
            Gate::Rx(q, a) => {
                let t = fixed(a)? / 2.0;
                let (s, co) = t.sin_cos();
                self.apply_1q(q, [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]);
            }
            Gate::Rz(q, a) => {
                let t = fixed(a)? / 2.0;
                let (s, co) = t.sin_cos();
                self.apply_1q(q, [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]]);
            }
            Gate::Cx { control, target } => {
                let (cb, tb) = (self.bit(control), self.bit(target));
                for b in 0..self.amps.len() {
                    if b & cb != 0 && b & tb == 0 {
                        self.amps.swap(b, b | tb);
                    }
                }
            }
            Gate::X(q) => self.apply_1q(q, [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]),
            Gate::Y(q) => self.apply_1q(q, [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]),
            Gate::Z(q) => self.apply_1q(q, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]),
            Gate::H(q) => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                self.apply_1q(q, [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]);
            }
            Gate::S(q) => self.apply_1q(q, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]]),
            Gate::Sdg(q) => self.apply_1q(q, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]),
        }
        Ok(())
    }

    /// `P|self>` for a single Pauli pattern.
    pub fn apply_pauli(&self, masks: PauliMasks) -> Statevector {
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            out[b ^ masks.x] = a * masks.phase_on(b);
        }
        Statevector { n_qubits: self.n_qubits, amps: out }
    }
}

/// Applies the bound circuit `c` to `initial` (default `|0...0>`).
pub fn run_circuit(c: &Circuit, initial: Option<&Statevector>) -> Result<Statevector> {
    if c.n_qubits() > MAX_QUBITS {
        return Err(Error::Unsupported(format!("{} qubits", c.n_qubits())));
    }
    let mut s = match initial {
        Some(s) if s.n_qubits() != c.n_qubits() => {
            return Err(Error::Dimension(format!("{}-qubit state into {}-qubit circuit", s.n_qubits(), c.n_qubits())))
        }
        Some(s) => s.clone(),
        None => Statevector::zero(c.n_qubits()),
    };
    for g in c.gates() {
        s.apply(g)?;
    }
    Ok(s)
}

/// `<s|P|s>` for one Pauli pattern (complex in general).
pub fn pauli_expectation(s: &Statevector, masks: PauliMasks) -> Complex64 {
    s.amps
        .iter()
        .enumerate()
        .map(|(b, a)| s.amps[b ^ masks.x].conj() * masks.phase_on(b) * a)
        .sum()
}

/// `<s|h|s>`; fails when the imaginary part reaches 1e-8.
pub fn expectation_exact(s: &Statevector, h: &PauliSum) -> Result<f64> {
    if s.n_qubits() != h.n_qubits() {
        return Err(Error::Dimension(format!("{}-qubit state, {}-qubit operator", s.n_qubits(), h.n_qubits())));
    }
    let mut total = Complex64::default();
    for (axes, c) in h.terms() {
        total += c * pauli_expectation(s, PauliMasks::of(axes));
    }
    if total.im.abs() >= 1e-8 {
        return Err(Error::NonHermitian(format!("expectation has imaginary part {}", total.im)));
    }
    Ok(total.re)
}
