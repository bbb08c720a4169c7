//! Real-amplitude ansatz circuits built from RY rotations and CX entanglers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Angle, Circuit, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnsatzKind {
    /// Four qubits: RY layer, CX chain 0→1→2→3, RY layer (8 angles).
    Pt4,
    /// `Pt4` with one more RY on qubit 2 between CX(1,2) and CX(2,3) (9 angles).
    Pt4x,
    /// Two qubits: RY, RY, CX(0,1), RY, RY (4 angles).
    Cr2N2,
    /// Two qubits: a single RY on qubit 1 (1 angle).
    Cr2N13,
}

/// An ansatz family plus the optional RY(π) on qubit 0 that selects the
/// other spin partner of a reduced one- or three-electron register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ansatz {
    pub kind: AnsatzKind,
    #[serde(default)]
    pub flip: bool,
}

impl Ansatz {
    pub fn new(kind: AnsatzKind) -> Self {
        Ansatz { kind, flip: false }
    }

    pub fn flipped(kind: AnsatzKind) -> Self {
        Ansatz { kind, flip: true }
    }

    pub fn n_qubits(&self) -> usize {
        match self.kind {
            AnsatzKind::Pt4 | AnsatzKind::Pt4x => 4,
            AnsatzKind::Cr2N2 | AnsatzKind::Cr2N13 => 2,
        }
    }

    pub fn n_params(&self) -> usize {
        match self.kind {
            AnsatzKind::Pt4 => 8,
            AnsatzKind::Pt4x => 9,
            AnsatzKind::Cr2N2 => 4,
            AnsatzKind::Cr2N13 => 1,
        }
    }

    /// Circuit with parameter slots `0..n_params`.
    pub fn template(&self) -> Circuit {
        let ry = |q, k| Gate::Ry(q, Angle::Slot(k));
        let cx = |c, t| Gate::Cx { control: c, target: t };
        let mut gates = Vec::new();
        if self.flip {
            gates.push(Gate::Ry(0, Angle::Fixed(PI)));
        }
        match self.kind {
            AnsatzKind::Pt4 | AnsatzKind::Pt4x => {
                gates.extend((0..4).map(|q| ry(q, q)));
                gates.push(cx(0, 1));
                gates.push(cx(1, 2));
                if self.kind == AnsatzKind::Pt4x {
                    gates.push(ry(2, 8));
                }
                gates.push(cx(2, 3));
                gates.extend((0..4).map(|q| ry(q, 4 + q)));
            }
            AnsatzKind::Cr2N2 => {
                gates.extend([ry(0, 0), ry(1, 1), cx(0, 1), ry(0, 2), ry(1, 3)]);
            }
            AnsatzKind::Cr2N13 => gates.push(ry(1, 0)),
        }
        let mut c = Circuit::new(self.n_qubits());
        for g in gates {
            c.push(g).expect("ansatz gates are in range");
        }
        c
    }

    pub fn build(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.n_params() {
            return Err(Error::Parameter(format!(
                "{:?} takes {} angles, got {}",
                self.kind,
                self.n_params(),
                params.len()
            )));
        }
        self.template().bind(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run_circuit, Statevector};

    #[test]
    fn zero_angles_act_as_identity() {
        for kind in [AnsatzKind::Pt4, AnsatzKind::Pt4x, AnsatzKind::Cr2N2, AnsatzKind::Cr2N13] {
            let a = Ansatz::new(kind);
            let s = run_circuit(&a.build(&vec![0.0; a.n_params()]).unwrap(), None).unwrap();
            assert_eq!(s, Statevector::zero(a.n_qubits()));
        }
    }

    #[test]
    fn only_ry_rotations() {
        for kind in [AnsatzKind::Pt4, AnsatzKind::Pt4x, AnsatzKind::Cr2N2, AnsatzKind::Cr2N13] {
            let a = Ansatz::flipped(kind);
            assert_eq!(a.template().n_slots(), a.n_params());
            assert!(a.template().gates().iter().all(|g| matches!(g, Gate::Ry(..) | Gate::Cx { .. })));
        }
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(Ansatz::new(AnsatzKind::Pt4).build(&[0.0; 9]).is_err());
    }

    #[test]
    fn flip_selects_partner() {
        let s = run_circuit(&Ansatz::flipped(AnsatzKind::Cr2N13).build(&[0.0]).unwrap(), None).unwrap();
        assert!((s.amplitudes()[2].re - 1.0).abs() < 1e-15);
    }
}
