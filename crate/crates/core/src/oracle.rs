//! Dense exact diagonalization used as the reference for everything else.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{jw_x_string, ladder_on_qubit, number_operator, Ladder};
use crate::model::Sector;
use crate::pauli::{Pauli, PauliMasks, PauliString, PauliSum, Phase};
use crate::spectral::{Pole, SpectralData};

pub const MAX_DENSE_QUBITS: usize = 12;

/// Energies closer than this are treated as degenerate when ordering states.
pub const DEGENERACY_TOL: f64 = 1e-8;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Dense `2^n x 2^n` matrix of `h`.
pub fn dense_matrix(h: &PauliSum) -> Result<CMatrix> {
    let n = h.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Unsupported(format!("dense matrix on {n} qubits")));
    }
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for (axes, c) in h.terms() {
        let masks = PauliMasks::of(axes);
        for b in 0..dim {
            m[(b ^ masks.x, b)] += c * masks.phase_on(b);
        }
    }
    Ok(m)
}

/// Kronecker product of the single-qubit factors of one string.
pub fn kron_string(s: &PauliString) -> CMatrix {
    let mut m = CMatrix::from_element(1, 1, s.phase().value());
    for p in s.axes() {
        let pm = p.matrix();
        let f = CMatrix::from_fn(2, 2, |i, j| pm[i][j]);
        m = m.kronecker(&f);
    }
    m
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    let dev = (m - m.adjoint()).camax();
    if dev > 1e-10 {
        return Err(Error::NonHermitian(format!("max |H - H†| = {dev:e}")));
    }
    Ok(())
}

/// Sorted eigenvalues of a Hermitian operator.
pub fn eigenvalues(h: &PauliSum) -> Result<Vec<f64>> {
    let m = dense_matrix(h)?;
    check_hermitian(&m)?;
    let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}

/// Diagonal of an operator built only from I and Z.
fn diagonal(op: &PauliSum) -> Result<Vec<f64>> {
    let dim = 1usize << op.n_qubits();
    let mut d = vec![0.0; dim];
    for (axes, c) in op.terms() {
        if axes.iter().any(|p| matches!(p, Pauli::X | Pauli::Y)) {
            return Err(Error::Parameter("sector operator must be diagonal".into()));
        }
        let masks = PauliMasks::of(axes);
        for (b, v) in d.iter_mut().enumerate() {
            *v += (c * masks.phase_on(b)).re;
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, Serialize)]
pub struct Eigenpair {
    pub energy: f64,
    #[serde(skip)]
    pub vector: CVector,
    pub sector: Sector,
}

/// Every eigenpair of a Hamiltonian, labeled by `(N, Sz)`.
#[derive(Debug, Clone, Serialize)]
pub struct LabeledSpectrum {
    pub n_qubits: usize,
    /// Sorted by energy; degenerate partners by descending `Sz`.
    pub states: Vec<Eigenpair>,
}

/// Diagonalizes `h` block by block in the joint eigenbasis of `N` and
/// `spin_z`, so every eigenvector carries exact quantum numbers.
pub fn full_spectrum(h: &PauliSum, spin_z: &PauliSum) -> Result<LabeledSpectrum> {
    let n = h.n_qubits();
    let number = number_operator(n);
    if !h.commutator(&number)?.is_empty() {
        return Err(Error::Parameter("Hamiltonian does not conserve electron number".into()));
    }
    if !h.commutator(spin_z)?.is_empty() {
        return Err(Error::Parameter("Hamiltonian does not conserve Sz".into()));
    }
    let m = dense_matrix(h)?;
    check_hermitian(&m)?;
    let nd = diagonal(&number)?;
    let sd = diagonal(spin_z)?;
    let dim = 1usize << n;

    let mut sectors: Vec<Sector> = (0..dim)
        .map(|b| Sector::new(nd[b].round() as usize, sd[b].round() as i32))
        .collect();
    sectors.sort();
    sectors.dedup();

    let mut states = Vec::with_capacity(dim);
    for sector in sectors {
        let idx: Vec<usize> = (0..dim)
            .filter(|&b| nd[b].round() as usize == sector.n_electrons && sd[b].round() as i32 == sector.sz)
            .collect();
        let block = CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
        let eig = block.symmetric_eigen();
        for k in 0..idx.len() {
            let mut v = CVector::zeros(dim);
            for (i, &b) in idx.iter().enumerate() {
                v[b] = eig.eigenvectors[(i, k)];
            }
            states.push(Eigenpair { energy: eig.eigenvalues[k], vector: v, sector });
        }
    }
    order_states(&mut states);
    Ok(LabeledSpectrum { n_qubits: n, states })
}

/// Sorts by energy, placing degenerate partners in descending `Sz`.
fn order_states(states: &mut [Eigenpair]) {
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let mut i = 0;
    while i < states.len() {
        let mut j = i + 1;
        while j < states.len() && states[j].energy - states[i].energy < DEGENERACY_TOL {
            j += 1;
        }
        states[i..j].sort_by_key(|s| std::cmp::Reverse(s.sector.sz));
        i = j;
    }
}

impl LabeledSpectrum {
    /// States with `n` electrons in energy order (index = state label `n`).
    pub fn manifold(&self, n_electrons: usize) -> Vec<&Eigenpair> {
        self.states.iter().filter(|s| s.sector.n_electrons == n_electrons).collect()
    }

    pub fn sector(&self, sector: Sector) -> Vec<&Eigenpair> {
        self.states.iter().filter(|s| s.sector == sector).collect()
    }

    pub fn sector_energies(&self, sector: Sector) -> Vec<f64> {
        self.sector(sector).iter().map(|s| s.energy).collect()
    }

    /// Lowest state; ties prefer the smallest `|Sz|`. Fails if the lowest
    /// level is shared by different electron numbers.
    pub fn ground(&self) -> Result<&Eigenpair> {
        let e0 = self.states[0].energy;
        let low: Vec<&Eigenpair> = self.states.iter().filter(|s| s.energy - e0 < DEGENERACY_TOL).collect();
        if low.iter().any(|s| s.sector.n_electrons != low[0].sector.n_electrons) {
            return Err(Error::Numerical(format!(
                "ground level E0={e0} is degenerate across electron numbers"
            )));
        }
        Ok(low.into_iter().min_by_key(|s| s.sector.sz.abs()).expect("non-empty"))
    }

    /// Max deviation of `<v_i|v_j>` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.states.iter().enumerate() {
            for (j, b) in self.states.iter().enumerate() {
                let d = a.vector.dotc(&b.vector) - if i == j { Complex64::new(1.0, 0.0) } else { Complex64::default() };
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

/// `<a| op |b>`.
pub fn matrix_element(op: &CMatrix, a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(&(op * b))
}

/// Exact poles and weights from a labeled spectrum. `qubits` lists the
/// qubit of every tracked orbital.
pub fn spectral_data_from(spectrum: &LabeledSpectrum, qubits: &[usize]) -> Result<SpectralData> {
    let n = spectrum.n_qubits;
    let g = spectrum.ground()?;
    let ops: Vec<CMatrix> = qubits.iter().map(|&q| jw_x_string(n, q).and_then(|o| dense_matrix(&o))).collect::<Result<_>>()?;
    let weights = |s: &Eigenpair| -> Vec<f64> { ops.iter().map(|o| matrix_element(o, &s.vector, &g.vector).norm_sqr()).collect() };

    let n0 = g.sector.n_electrons;
    let particle = spectrum
        .manifold(n0 + 1)
        .iter()
        .enumerate()
        .map(|(k, s)| Pole { omega: s.energy - g.energy, lambda: weights(s), sector: Some(s.sector), state: Some(k) })
        .collect();
    let hole = if n0 == 0 {
        Vec::new()
    } else {
        spectrum
            .manifold(n0 - 1)
            .iter()
            .enumerate()
            .map(|(k, s)| Pole { omega: g.energy - s.energy, lambda: weights(s), sector: Some(s.sector), state: Some(k) })
            .collect()
    };
    let mut out = SpectralData { n0, e0: g.energy, particle, hole };
    out.sort();
    Ok(out)
}

/// Exact spectral data of `h` for the orbitals on `qubits`.
pub fn exact_spectral_data(h: &PauliSum, spin_z: &PauliSum, qubits: &[usize]) -> Result<SpectralData> {
    spectral_data_from(&full_spectrum(h, spin_z)?, qubits)
}

/// Largest deviation found by [`verify_ladder_identities`].
#[derive(Debug, Clone, Serialize)]
pub struct LadderReport {
    /// `max |<a|c_q|b> - <a|Z..X_q|b>|` over pairs with `N_a = N_b - 1`.
    pub x_form: f64,
    /// `max |<a|c_q|b> - i<a|Z..Y_q|b>|` over the same pairs.
    pub y_form: f64,
    /// `max |<a|c_q|b>|` over pairs violating `N_a = N_b - 1`.
    pub selection: f64,
    /// Same three checks for the creation operator.
    pub create_x_form: f64,
    pub create_y_form: f64,
    pub create_selection: f64,
    pub pairs_checked: usize,
}

impl LadderReport {
    pub fn max_deviation(&self) -> f64 {
        [self.x_form, self.y_form, self.selection, self.create_x_form, self.create_y_form, self.create_selection]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Checks that ladder-operator matrix elements between eigenstates equal
/// those of the Z-string-dressed X and Y operators, and that they vanish
/// unless the electron numbers differ by exactly one.
pub fn verify_ladder_identities(spectrum: &LabeledSpectrum) -> Result<LadderReport> {
    verify_ladder_identities_with(spectrum, ladder_on_qubit)
}

/// As [`verify_ladder_identities`] with a caller-supplied ladder builder.
pub fn verify_ladder_identities_with<F>(spectrum: &LabeledSpectrum, ladder: F) -> Result<LadderReport>
where
    F: Fn(usize, usize, Ladder) -> Result<PauliSum>,
{
    let n = spectrum.n_qubits;
    let mut r = LadderReport {
        x_form: 0.0,
        y_form: 0.0,
        selection: 0.0,
        create_x_form: 0.0,
        create_y_form: 0.0,
        create_selection: 0.0,
        pairs_checked: 0,
    };
    let i = Complex64::new(0.0, 1.0);
    for q in 0..n {
        let ann = dense_matrix(&ladder(n, q, Ladder::Annihilate)?)?;
        let cre = dense_matrix(&ladder(n, q, Ladder::Create)?)?;
        let zx = dense_matrix(&jw_x_string(n, q)?)?;
        let mut y_axes = vec![Pauli::Z; q];
        y_axes.push(Pauli::Y);
        y_axes.resize(n, Pauli::I);
        let zy = kron_string(&PauliString::new(y_axes, Phase::ONE)?);
        for a in &spectrum.states {
            let zx_a = zx.adjoint() * &a.vector;
            let zy_a = zy.adjoint() * &a.vector;
            let ann_a = ann.adjoint() * &a.vector;
            let cre_a = cre.adjoint() * &a.vector;
            for b in &spectrum.states {
                let (na, nb) = (a.sector.n_electrons as i64, b.sector.n_electrons as i64);
                let m_ann = ann_a.dotc(&b.vector);
                let m_cre = cre_a.dotc(&b.vector);
                let m_x = zx_a.dotc(&b.vector);
                let m_y = zy_a.dotc(&b.vector);
                if na == nb - 1 {
                    r.x_form = r.x_form.max((m_ann - m_x).norm());
                    r.y_form = r.y_form.max((m_ann - i * m_y).norm());
                } else {
                    r.selection = r.selection.max(m_ann.norm());
                }
                if na == nb + 1 {
                    r.create_x_form = r.create_x_form.max((m_cre - m_x).norm());
                    r.create_y_form = r.create_y_form.max((m_cre + i * m_y).norm());
                } else {
                    r.create_selection = r.create_selection.max(m_cre.norm());
                }
                r.pairs_checked += 1;
            }
        }
    }
    Ok(r)
}
