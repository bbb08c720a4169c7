//! Two-qubit Hamiltonians of the two-site model restricted to fixed
//! electron number and spin.
//!
//! Full-register basis indices use the compact layout (site 1 up, site 2 up,
//! site 1 down, site 2 down; qubit 0 is the highest bit, bit set = occupied).
//! Reduced basis index `2*b1 + b2` with bit set meaning `Z̄ = -1`.
//!
//! * `N = 1`: the position of the single electron; `Z̄1 = -Sz`.
//! * `N = 3`: the position of the single hole; `Z̄1 = -Sz`.
//! * `N = 2, Sz = 0`: `Z̄1 = Z1`, `Z̄2 = Z3`, with qubits 2 and 4 slaved
//!   to 1 and 3 (`Z2 = -Z1`, `Z4 = -Z3`).
//!
//! The remaining sectors hold a single state and reduce to a constant.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Sector, TwoSiteParams};
use crate::oracle::CVector;
use crate::pauli::PauliSum;

/// Full-register index of every reduced basis state of `sector`.
///
/// For `N = 1` and `N = 3` the four reduced states cover both spin sectors.
pub fn embedding(sector: Sector) -> Result<Vec<usize>> {
    sector.validate(4)?;
    Ok(match (sector.n_electrons, sector.sz) {
        (0, 0) => vec![0b0000],
        (1, _) => vec![0b0001, 0b0010, 0b0100, 0b1000],
        (2, 0) => vec![0b0101, 0b0110, 0b1001, 0b1010],
        (2, 2) => vec![0b1100],
        (2, -2) => vec![0b0011],
        (3, _) => vec![0b0111, 0b1011, 0b1101, 0b1110],
        (4, 0) => vec![0b1111],
        _ => return Err(Error::Parameter(format!("sector {sector} has no reduced form"))),
    })
}

/// Whether reduced qubit 1 must be flipped (`Z̄1 = -1`) to land in `sector`.
/// Only meaningful for `N = 1` and `N = 3`.
pub fn spin_flip(sector: Sector) -> bool {
    matches!(sector.n_electrons, 1 | 3) && sector.sz == 1
}

/// Reduced basis states that belong to `sector`.
pub fn sector_states(sector: Sector) -> Result<Vec<usize>> {
    let all = embedding(sector)?;
    Ok(match sector.n_electrons {
        1 | 3 => {
            let base = if spin_flip(sector) { 2 } else { 0 };
            vec![base, base + 1]
        }
        _ => (0..all.len()).collect(),
    })
}

/// Two-qubit (or constant) Hamiltonian equivalent to the two-site model on
/// `sector`.
pub fn build_reduced_hamiltonian(sector: Sector, p: &TwoSiteParams) -> Result<PauliSum> {
    sector.validate(4)?;
    p.validate()?;
    let TwoSiteParams { u, mu, eps2, v } = *p;
    let h = match (sector.n_electrons, sector.sz) {
        (0, 0) => PauliSum::constant(2, mu - u / 4.0 - eps2),
        (1, s) if s.abs() == 1 => PauliSum::from_labels(
            2,
            &[(mu / 2.0 + eps2 / 2.0, "IZ"), (v, "IX"), (mu / 2.0 - u / 4.0 - eps2 / 2.0, "II")],
        )?,
        (2, 0) => {
            let a = mu / 2.0 - u / 4.0 + eps2 / 2.0;
            PauliSum::from_labels(2, &[(u / 4.0, "ZZ"), (a, "ZI"), (a, "IZ"), (v, "XI"), (v, "IX")])?
        }
        (2, s) if s.abs() == 2 => PauliSum::constant(2, -u / 4.0),
        (3, s) if s.abs() == 1 => PauliSum::from_labels(
            2,
            &[(mu / 2.0 + eps2 / 2.0 - u / 2.0, "IZ"), (v, "IX"), (-(mu / 2.0 - u / 4.0 - eps2 / 2.0), "II")],
        )?,
        (4, 0) => PauliSum::constant(2, -mu + 3.0 * u / 4.0 + eps2),
        _ => return Err(Error::Parameter(format!("sector {sector} has no reduced form"))),
    };
    Ok(h)
}

/// Lifts a reduced state vector to the full four-qubit register.
pub fn lift_state(sector: Sector, reduced: &[Complex64]) -> Result<CVector> {
    let emb = embedding(sector)?;
    let mut v = CVector::zeros(16);
    for (k, &b) in emb.iter().enumerate() {
        v[b] = reduced.get(k).copied().unwrap_or_default();
    }
    Ok(v)
}
