//! Jordan-Wigner ladder operators and the Hamiltonians built from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ImpurityModel, QubitLayout, Sector, TwoSiteParams};
use crate::pauli::{Pauli, PauliString, PauliSum, Phase};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Fermionic ladder operator on `qubit`: `½(X ∓ iY)` preceded by a Z on every
/// lower-indexed qubit. `Create` maps the empty state `|0>` to `|1>`.
pub fn ladder_on_qubit(n_qubits: usize, qubit: usize, kind: Ladder) -> Result<PauliSum> {
    if qubit >= n_qubits {
        return Err(Error::OutOfRange(format!("qubit {qubit} on {n_qubits} qubits")));
    }
    let mut axes = vec![Pauli::I; n_qubits];
    for a in axes.iter_mut().take(qubit) {
        *a = Pauli::Z;
    }
    axes[qubit] = Pauli::X;
    let x = PauliString::new(axes.clone(), Phase::ONE)?;
    axes[qubit] = Pauli::Y;
    let y = PauliString::new(axes, Phase::ONE)?;
    let sign = match kind {
        Ladder::Create => -1.0,
        Ladder::Annihilate => 1.0,
    };
    PauliSum::from_string(&x, Complex64::new(0.5, 0.0)).add(&PauliSum::from_string(&y, Complex64::new(0.0, 0.5 * sign)))
}

/// Ladder operator for a spin orbital placed by `layout`.
pub fn ladder_operator(orbital: usize, kind: Ladder, layout: &QubitLayout) -> Result<PauliSum> {
    let q = *layout
        .qubit_of
        .get(orbital)
        .ok_or_else(|| Error::OutOfRange(format!("orbital {orbital} with {} orbitals", layout.n_qubits())))?;
    ladder_on_qubit(layout.n_qubits(), q, kind)
}

/// `(prod_{q' < q} Z_q') X_q`, the operator whose matrix elements give the
/// transition weights between states differing by one electron.
pub fn jw_x_string(n_qubits: usize, qubit: usize) -> Result<PauliSum> {
    let mut axes = vec![Pauli::I; n_qubits];
    for a in axes.iter_mut().take(qubit) {
        *a = Pauli::Z;
    }
    if qubit >= n_qubits {
        return Err(Error::OutOfRange(format!("qubit {qubit} on {n_qubits} qubits")));
    }
    axes[qubit] = Pauli::X;
    Ok(PauliSum::from_string(&PauliString::new(axes, Phase::ONE)?, Complex64::new(1.0, 0.0)))
}

/// Generic impurity Hamiltonian
/// `sum (eps_a - mu) n_a + sum U c†c†cc + sum V (c†_a c_i + h.c.) + sum eps_i n_i`.
pub fn build_impurity_hamiltonian(model: &ImpurityModel, layout: &QubitLayout) -> Result<PauliSum> {
    model.validate()?;
    layout.validate()?;
    if layout.n_qubits() != model.n_orbitals() {
        return Err(Error::Dimension(format!(
            "layout has {} qubits for {} orbitals",
            layout.n_qubits(),
            model.n_orbitals()
        )));
    }
    let n = layout.n_qubits();
    let ni = model.n_imp();
    let cd: Vec<PauliSum> = (0..n).map(|k| ladder_operator(k, Ladder::Create, layout)).collect::<Result<_>>()?;
    let c: Vec<PauliSum> = (0..n).map(|k| ladder_operator(k, Ladder::Annihilate, layout)).collect::<Result<_>>()?;

    let mut h = PauliSum::zero(n);
    for (a, &e) in model.eps_imp.iter().enumerate() {
        let w = e - model.mu;
        if w != 0.0 {
            h = h.add(&cd[a].mul(&c[a])?.scale(w))?;
        }
    }
    for u in &model.interactions {
        if u.value != 0.0 {
            let t = cd[u.a].mul(&cd[u.b])?.mul(&c[u.c])?.mul(&c[u.d])?;
            h = h.add(&t.scale(u.value))?;
        }
    }
    for (a, row) in model.hoppings.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            if v != 0.0 {
                let b = ni + i;
                let hop = cd[a].mul(&c[b])?.add(&cd[b].mul(&c[a])?)?;
                h = h.add(&hop.scale(v))?;
            }
        }
    }
    for (i, &e) in model.eps_bath.iter().enumerate() {
        if e != 0.0 {
            h = h.add(&cd[ni + i].mul(&c[ni + i])?.scale(e))?;
        }
    }
    Ok(h)
}

/// Two-site Hamiltonian in Pauli form on the compact layout (qubits: site 1
/// up, site 2 up, site 1 down, site 2 down).
pub fn build_two_site_hamiltonian(p: &TwoSiteParams) -> Result<PauliSum> {
    p.validate()?;
    let TwoSiteParams { u, mu, eps2, v } = *p;
    let a = mu / 2.0 - u / 4.0;
    PauliSum::from_labels(
        4,
        &[
            (u / 4.0, "ZIZI"),
            (a, "ZIII"),
            (a, "IIZI"),
            (-eps2 / 2.0, "IZII"),
            (-eps2 / 2.0, "IIIZ"),
            (v / 2.0, "XXII"),
            (v / 2.0, "YYII"),
            (v / 2.0, "IIXX"),
            (v / 2.0, "IIYY"),
        ],
    )
}

/// Total electron number `sum_q (I - Z_q)/2`.
pub fn number_operator(n_qubits: usize) -> PauliSum {
    let mut out = PauliSum::constant(n_qubits, n_qubits as f64 / 2.0);
    for q in 0..n_qubits {
        out = out.add(&PauliSum::single(n_qubits, q, Pauli::Z, -0.5).expect("qubit in range")).expect("same size");
    }
    out
}

/// Spin projection `n_up - n_down` (units of hbar/2).
pub fn spin_z_operator(model: &ImpurityModel, layout: &QubitLayout) -> Result<PauliSum> {
    let n = layout.n_qubits();
    let mut out = PauliSum::zero(n);
    for k in 0..model.n_orbitals() {
        let q = layout.qubit_of[k];
        let s = if model.is_spin_up(k) { 1.0 } else { -1.0 };
        out = out.add(&PauliSum::single(n, q, Pauli::Z, -0.5 * s)?.add_constant(0.5 * s))?;
    }
    Ok(out)
}

/// `½(-Z1 - Z2 + Z3 + Z4)` on the compact two-site layout.
pub fn two_site_spin_z() -> PauliSum {
    PauliSum::from_labels(4, &[(-0.5, "ZIII"), (-0.5, "IZII"), (0.5, "IIZI"), (0.5, "IIIZ")]).expect("valid labels")
}

/// `h + beta (N - n_target)^2`.
pub fn add_number_penalty(h: &PauliSum, beta: f64, n_target: usize) -> Result<PauliSum> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Parameter(format!("penalty weight must be positive, got {beta}")));
    }
    let d = number_operator(h.n_qubits()).add_constant(-(n_target as f64));
    h.add(&d.mul(&d)?.scale(beta))
}

/// `h + beta (N - N_s)^2 + beta (Sz - Sz_s)^2` selecting a single sector.
pub fn add_sector_penalty(h: &PauliSum, beta: f64, sector: Sector, spin_z: &PauliSum) -> Result<PauliSum> {
    let h = add_number_penalty(h, beta, sector.n_electrons)?;
    let d = spin_z.add_constant(-(sector.sz as f64));
    h.add(&d.mul(&d)?.scale(beta))
}

/// Penalty weight large enough to push every off-target state above the
/// on-target spectrum: ten times the sum of |coefficients|.
pub fn default_penalty_beta(h: &PauliSum) -> f64 {
    10.0 * (h.one_norm() + h.identity_coefficient().abs())
}
