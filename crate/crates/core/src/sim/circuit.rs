//! Gate lists with optional parameter slots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rotation angle: fixed, or read from a parameter vector at bind time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Angle {
    Fixed(f64),
    Slot(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Ry(usize, Angle),
    Rx(usize, Angle),
    Rz(usize, Angle),
    Cx { control: usize, target: usize },
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    S(usize),
    Sdg(usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cx { control, target } => vec![control, target],
            Gate::Ry(q, _) | Gate::Rx(q, _) | Gate::Rz(q, _) => vec![q],
            Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::H(q) | Gate::S(q) | Gate::Sdg(q) => vec![q],
        }
    }

    fn angle(&self) -> Option<Angle> {
        match *self {
            Gate::Ry(_, a) | Gate::Rx(_, a) | Gate::Rz(_, a) => Some(a),
            _ => None,
        }
    }

    fn with_angle(&self, a: Angle) -> Gate {
        match *self {
            Gate::Ry(q, _) => Gate::Ry(q, a),
            Gate::Rx(q, _) => Gate::Rx(q, a),
            Gate::Rz(q, _) => Gate::Rz(q, a),
            g => g,
        }
    }

    /// Inverse of a bound gate.
    fn inverse(&self) -> Result<Gate> {
        Ok(match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => match g.angle() {
                Some(Angle::Fixed(t)) => g.with_angle(Angle::Fixed(-t)),
                Some(Angle::Slot(k)) => return Err(Error::UnboundParameter(k)),
                None => g,
            },
        })
    }
}

/// Ordered gate list on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<&mut Self> {
        let qs = g.qubits();
        if qs.iter().any(|&q| q >= self.n_qubits) {
            return Err(Error::OutOfRange(format!("{g:?} on {} qubits", self.n_qubits)));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Parameter(format!("{g:?} needs distinct qubits")));
        }
        if let Some(Angle::Fixed(t)) = g.angle() {
            if !t.is_finite() {
                return Err(Error::Parameter(format!("non-finite angle in {g:?}")));
            }
        }
        self.gates.push(g);
        Ok(self)
    }

    /// Builder-style push for gates known to be valid.
    pub fn with(mut self, g: Gate) -> Result<Self> {
        self.push(g)?;
        Ok(self)
    }

    /// Number of parameter slots referenced (one past the largest index).
    pub fn n_slots(&self) -> usize {
        self.gates
            .iter()
            .filter_map(|g| match g.angle() {
                Some(Angle::Slot(k)) => Some(k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_bound(&self) -> bool {
        self.n_slots() == 0
    }

    /// Replaces every slot with its value from `params`.
    pub fn bind(&self, params: &[f64]) -> Result<Circuit> {
        let gates = self
            .gates
            .iter()
            .map(|g| match g.angle() {
                Some(Angle::Slot(k)) => {
                    let t = *params.get(k).ok_or(Error::UnboundParameter(k))?;
                    if !t.is_finite() {
                        return Err(Error::Parameter(format!("non-finite value for slot {k}")));
                    }
                    Ok(g.with_angle(Angle::Fixed(t)))
                }
                _ => Ok(*g),
            })
            .collect::<Result<_>>()?;
        Ok(Circuit { n_qubits: self.n_qubits, gates })
    }

    /// `U†` of a bound circuit.
    pub fn inverse(&self) -> Result<Circuit> {
        let gates = self.gates.iter().rev().map(Gate::inverse).collect::<Result<_>>()?;
        Ok(Circuit { n_qubits: self.n_qubits, gates })
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension(format!("{} vs {} qubits", self.n_qubits, other.n_qubits)));
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Ok(Circuit { n_qubits: self.n_qubits, gates })
    }
}
