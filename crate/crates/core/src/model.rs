//! Physical parameters of the Anderson impurity model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One entry of the sparse interaction tensor: `value * c†_a c†_b c_c c_d`.
///
/// A density-density interaction `U n_a n_b` is the entry `(a, b, b, a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub value: f64,
}

/// Impurity orbitals coupled to a non-interacting bath.
///
/// Spin orbitals are indexed impurity-first: `0..n_imp` are impurity
/// orbitals, `n_imp..n_imp+n_bath` bath orbitals. Within each block even
/// offsets are spin up and odd offsets spin down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpurityModel {
    pub mu: f64,
    pub eps_imp: Vec<f64>,
    pub eps_bath: Vec<f64>,
    /// `hoppings[alpha][i]` couples impurity orbital `alpha` to bath orbital `i`.
    pub hoppings: Vec<Vec<f64>>,
    pub interactions: Vec<Interaction>,
}

impl ImpurityModel {
    pub fn n_imp(&self) -> usize {
        self.eps_imp.len()
    }

    pub fn n_bath(&self) -> usize {
        self.eps_bath.len()
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_imp() + self.n_bath()
    }

    pub fn validate(&self) -> Result<()> {
        let (ni, nb) = (self.n_imp(), self.n_bath());
        if ni == 0 || ni % 2 != 0 || nb % 2 != 0 {
            return Err(Error::Parameter(format!(
                "need a positive even number of impurity spin orbitals and an even number of bath spin orbitals, got {ni} and {nb}"
            )));
        }
        if self.hoppings.len() != ni || self.hoppings.iter().any(|r| r.len() != nb) {
            return Err(Error::Dimension(format!("hopping matrix must be {ni}x{nb}")));
        }
        let finite = self.mu.is_finite()
            && self.eps_imp.iter().chain(&self.eps_bath).all(|x| x.is_finite())
            && self.hoppings.iter().flatten().all(|x| x.is_finite())
            && self.interactions.iter().all(|u| u.value.is_finite());
        if !finite {
            return Err(Error::Parameter("model parameters must be finite".into()));
        }
        for u in &self.interactions {
            if [u.a, u.b, u.c, u.d].iter().any(|&k| k >= ni) {
                return Err(Error::OutOfRange(format!(
                    "interaction ({},{},{},{}) outside {ni} impurity orbitals",
                    u.a, u.b, u.c, u.d
                )));
            }
        }
        Ok(())
    }

    /// True when orbital `k` carries spin up.
    pub fn is_spin_up(&self, k: usize) -> bool {
        if k < self.n_imp() {
            k.is_multiple_of(2)
        } else {
            (k - self.n_imp()).is_multiple_of(2)
        }
    }

    /// Bath orbitals coupled to `alpha`, as `(eps_i, V_alpha_i)` pairs.
    pub fn coupled_bath(&self, alpha: usize) -> Vec<(f64, f64)> {
        self.hoppings[alpha]
            .iter()
            .zip(&self.eps_bath)
            .filter(|(v, _)| **v != 0.0)
            .map(|(v, e)| (*e, *v))
            .collect()
    }
}

/// Parameters of the single-bath-site model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSiteParams {
    pub u: f64,
    pub mu: f64,
    pub eps2: f64,
    pub v: f64,
}

impl TwoSiteParams {
    pub fn new(u: f64, mu: f64, eps2: f64, v: f64) -> Self {
        TwoSiteParams { u, mu, eps2, v }
    }

    /// Particle-hole symmetric point `mu = U/2`, `eps2 = 0`.
    pub fn half_filled(u: f64, v: f64) -> Self {
        TwoSiteParams { u, mu: u / 2.0, eps2: 0.0, v }
    }

    pub fn is_particle_hole_symmetric(&self, tol: f64) -> bool {
        (self.mu - self.u / 2.0).abs() <= tol && self.eps2.abs() <= tol
    }

    /// Difference between the fermionic Hamiltonian built from ladder
    /// operators and the Pauli form, which drops this constant.
    pub fn fermionic_offset(&self) -> f64 {
        -self.mu + self.u / 4.0 + self.eps2
    }

    pub fn to_model(&self) -> ImpurityModel {
        ImpurityModel {
            mu: self.mu,
            eps_imp: vec![0.0, 0.0],
            eps_bath: vec![self.eps2, self.eps2],
            hoppings: vec![vec![self.v, 0.0], vec![0.0, self.v]],
            interactions: vec![Interaction { a: 0, b: 1, c: 1, d: 0, value: self.u }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.u, self.mu, self.eps2, self.v].iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::Parameter("two-site parameters must be finite".into()))
        }
    }
}

/// Maps spin orbitals to qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLayout {
    pub qubit_of: Vec<usize>,
}

impl QubitLayout {
    /// Orbital `k` on qubit `k`.
    pub fn standard(n_orbitals: usize) -> Self {
        QubitLayout { qubit_of: (0..n_orbitals).collect() }
    }

    /// Two-site ordering: site 1 up, site 2 up, site 1 down, site 2 down.
    pub fn two_site_compact() -> Self {
        QubitLayout { qubit_of: vec![0, 2, 1, 3] }
    }

    pub fn n_qubits(&self) -> usize {
        self.qubit_of.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.qubit_of.len();
        let mut seen = vec![false; n];
        for &q in &self.qubit_of {
            if q >= n || seen[q] {
                return Err(Error::Parameter(format!("layout {:?} is not a permutation", self.qubit_of)));
            }
            seen[q] = true;
        }
        Ok(())
    }
}

/// Electron number and spin projection (units of hbar/2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Sector {
    pub n_electrons: usize,
    pub sz: i32,
}

impl Sector {
    pub fn new(n_electrons: usize, sz: i32) -> Self {
        Sector { n_electrons, sz }
    }

    /// Sectors reachable on a two-site register.
    pub fn two_site_table() -> [Sector; 9] {
        [
            Sector::new(0, 0),
            Sector::new(1, 1),
            Sector::new(1, -1),
            Sector::new(2, 0),
            Sector::new(2, 2),
            Sector::new(2, -2),
            Sector::new(3, 1),
            Sector::new(3, -1),
            Sector::new(4, 0),
        ]
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let n = self.n_electrons as i32;
        if self.n_electrons > n_qubits || self.sz.abs() > n || (n + self.sz) % 2 != 0 {
            return Err(Error::Parameter(format!("invalid sector N={} Sz={}", self.n_electrons, self.sz)));
        }
        Ok(())
    }
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(N={}, Sz={})", self.n_electrons, self.sz)
    }
}
