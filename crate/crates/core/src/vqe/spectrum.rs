//! Green's-function poles and weights of the two-site model from VQE.

use serde::{Deserialize, Serialize};

use super::ansatz::{Ansatz, AnsatzKind};
use super::solver::{
    default_overlap_beta, find_excited_states, find_ground_state, transition_amplitude, Eigenstate, Labeling, Representation, VqeOptions,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{add_sector_penalty, build_two_site_hamiltonian, default_penalty_beta, number_operator, two_site_spin_z};
use crate::model::{Sector, TwoSiteParams};
use crate::reduced::{build_reduced_hamiltonian, sector_states, spin_flip};
use crate::sim::sampling::derive_seed;
use crate::sim::EvalMode;
use crate::spectral::{Pole, SpectralData};

/// Where sector selection happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Full four-qubit register, sectors selected by penalty terms.
    Pt,
    /// One reduced two-qubit register per sector.
    Cr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub method: Method,
    pub mode: EvalMode,
    pub vqe: VqeOptions,
    /// Full-register ansatz for the penalty method.
    pub full_ansatz: AnsatzKind,
    /// Evaluate transition weights (otherwise they are left at zero).
    pub weights: bool,
    /// At the particle-hole symmetric point, mirror the particle poles
    /// instead of solving the hole sectors.
    pub use_symmetry: bool,
    /// Penalty weight; `None` uses [`default_penalty_beta`].
    pub beta: Option<f64>,
    /// Only solve the sectors reachable by adding or removing a spin-up
    /// electron on site 1 (the rest carry zero weight).
    pub spin_allowed_only: bool,
}

impl SpectrumOptions {
    pub fn new(method: Method, mode: EvalMode) -> Self {
        SpectrumOptions {
            method,
            mode,
            vqe: VqeOptions::default(),
            full_ansatz: AnsatzKind::Pt4x,
            weights: true,
            use_symmetry: true,
            beta: None,
            spin_allowed_only: false,
        }
    }
}

/// One solved eigenstate in the Table-style summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub sector: Sector,
    /// Label `n` within the electron-number manifold.
    pub index: usize,
    pub energy: f64,
    /// Transition weight to the ground state for the site-1 spin-up orbital.
    pub lambda: Option<f64>,
    pub ansatz: Ansatz,
    pub params: Vec<f64>,
    /// Taken from the partner sector by particle-hole symmetry.
    pub mirrored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub data: SpectralData,
    pub ground: StateRecord,
    pub excited: Vec<StateRecord>,
    pub converged: bool,
    pub diagnostics: Vec<String>,
}

impl SpectrumReport {
    /// Energies of the `n_electrons` manifold in label order.
    pub fn manifold_energies(&self, n_electrons: usize) -> Vec<f64> {
        self.excited.iter().filter(|s| s.sector.n_electrons == n_electrons).map(|s| s.energy).collect()
    }
}

/// Sector dimension on the four-qubit register.
fn sector_dim(sector: Sector) -> usize {
    (0..16usize)
        .filter(|b| {
            let occ = |q: usize| (b >> (3 - q)) & 1;
            let n = b.count_ones() as usize;
            let sz = (occ(0) + occ(1)) as i32 - (occ(2) + occ(3)) as i32;
            n == sector.n_electrons && sz == sector.sz
        })
        .count()
}

fn sectors_with(n_electrons: usize) -> Vec<Sector> {
    let n = n_electrons as i32;
    (-n..=n).rev().map(|sz| Sector::new(n_electrons, sz)).filter(|s| s.validate(4).is_ok() && sector_dim(*s) > 0).collect()
}

/// Stable sort by frequency where poles within `tol` of each other keep
/// their label order, so noise cannot reorder a degenerate pair.
fn sort_clustered(poles: &mut Vec<Pole>) {
    const TOL: f64 = 1e-6;
    let mut idx: Vec<usize> = (0..poles.len()).collect();
    idx.sort_by(|&a, &b| poles[a].omega.total_cmp(&poles[b].omega));
    let mut key = vec![0.0; poles.len()];
    let mut anchor = f64::NEG_INFINITY;
    let mut prev = f64::NEG_INFINITY;
    for &i in &idx {
        if poles[i].omega - prev > TOL {
            anchor = poles[i].omega;
        }
        prev = poles[i].omega;
        key[i] = anchor;
    }
    let mut tagged: Vec<(f64, Pole)> = key.into_iter().zip(poles.drain(..)).collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    poles.extend(tagged.into_iter().map(|(_, p)| p));
}

struct Solver<'a> {
    p: TwoSiteParams,
    opts: &'a SpectrumOptions,
    h: crate::pauli::PauliSum,
    number: crate::pauli::PauliSum,
    spin_z: crate::pauli::PauliSum,
    diagnostics: Vec<String>,
    tag: u64,
}

impl<'a> Solver<'a> {
    fn next_opts(&mut self) -> (VqeOptions, EvalMode) {
        self.tag += 1;
        let mut v = self.opts.vqe.clone();
        v.seed = derive_seed(self.opts.vqe.seed, self.tag);
        (v, self.opts.mode.derived(1000 + self.tag))
    }

    fn note(&mut self, s: &Eigenstate) {
        for d in &s.diagnostics {
            self.diagnostics.push(format!("{} state {}: {d}", s.sector, s.index));
        }
    }

    /// All states of `sector`, lowest first.
    fn solve_sector(&mut self, sector: Sector) -> Result<Vec<Eigenstate>> {
        let count;
        let (h, ansatz) = match self.opts.method {
            Method::Pt => {
                count = sector_dim(sector);
                let beta = self.opts.beta.unwrap_or_else(|| default_penalty_beta(&self.h));
                (add_sector_penalty(&self.h, beta, sector, &self.spin_z)?, Ansatz::new(self.opts.full_ansatz))
            }
            Method::Cr => {
                count = sector_states(sector)?.len();
                let kind = if sector == Sector::new(2, 0) { AnsatzKind::Cr2N2 } else { AnsatzKind::Cr2N13 };
                let a = Ansatz { kind, flip: spin_flip(sector) };
                (build_reduced_hamiltonian(sector, &self.p)?, a)
            }
        };
        let (number, spin_z) = (self.number.clone(), self.spin_z.clone());
        let labeling = match self.opts.method {
            Method::Pt => Labeling::Measure { number: &number, spin_z: &spin_z },
            Method::Cr => Labeling::Known(sector),
        };
        let beta_overlap = default_overlap_beta(&h);
        let mut states: Vec<Eigenstate> = Vec::new();
        for k in 0..count {
            let (vqe, mode) = self.next_opts();
            let mut s = if k == 0 {
                find_ground_state(&h, ansatz, &mode, &vqe, &labeling)?
            } else {
                find_excited_states(&h, ansatz, &states, beta_overlap, &mode, &vqe, &labeling)?
            };
            if s.sector != sector {
                s.converged = false;
                s.diagnostics.push(format!("landed in {} instead of {sector}", s.sector));
                s.sector = sector;
            }
            s.index = k;
            if self.opts.method == Method::Pt {
                // report the physical energy, not the penalized objective
                let (_, m) = self.next_opts();
                s.energy = crate::sim::sampling::expectation(&s.circuit, &self.h, &m)?;
            }
            self.note(&s);
            states.push(s);
        }
        Ok(states)
    }
}

/// Ground state, `N0 ± 1` manifolds and transition weights of the two-site
/// model, in the Pauli-form energy convention.
pub fn solve_spectrum(p: &TwoSiteParams, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    p.validate()?;
    let mut s = Solver {
        p: *p,
        opts,
        h: build_two_site_hamiltonian(p)?,
        number: number_operator(4),
        spin_z: two_site_spin_z(),
        diagnostics: Vec::new(),
        tag: 0,
    };

    let ground = match opts.method {
        Method::Pt => {
            let (vqe, mode) = s.next_opts();
            let labeling = Labeling::Measure { number: &s.number, spin_z: &s.spin_z };
            let g = find_ground_state(&s.h, Ansatz::new(opts.full_ansatz), &mode, &vqe, &labeling)?;
            s.note(&g);
            g
        }
        Method::Cr => {
            let mut best: Option<Eigenstate> = None;
            for sector in Sector::two_site_table() {
                let g = s.solve_sector_ground(sector)?;
                let better = match &best {
                    None => true,
                    Some(b) => g.energy < b.energy - 1e-9 || ((g.energy - b.energy).abs() <= 1e-9 && g.sector.sz.abs() < b.sector.sz.abs()),
                };
                if better {
                    best = Some(g);
                }
            }
            best.expect("sector table is non-empty")
        }
    };
    let n0 = ground.sector.n_electrons;
    let representation = match opts.method {
        Method::Pt => Representation::Full,
        Method::Cr => Representation::Reduced,
    };
    if opts.method == Method::Cr && ground.sector != Sector::new(2, 0) {
        return Err(Error::Unsupported(format!("reduced registers need a (N=2, Sz=0) ground state, found {}", ground.sector)));
    }

    let mirror = opts.use_symmetry && p.is_particle_hole_symmetric(1e-12) && ground.sector == Sector::new(2, 0);
    // manifold label of rank k in a sector: spin partners are exactly
    // degenerate, so labels interleave sectors in descending Sz
    let label = |sector: Sector, rank: usize| -> usize {
        let all = sectors_with(sector.n_electrons);
        let pos = all.iter().position(|x| *x == sector).unwrap_or(0);
        rank * all.len() + pos
    };
    let record = |st: &Eigenstate, sector: Sector, lambda: Option<f64>, mirrored: bool| StateRecord {
        sector,
        index: label(sector, st.index),
        energy: st.energy,
        lambda,
        ansatz: st.ansatz,
        params: st.params.clone(),
        mirrored,
    };
    let mut excited: Vec<StateRecord> = Vec::new();
    for (target, particle) in [(n0 + 1, true), (n0.wrapping_sub(1), false)] {
        if target > 4 || (mirror && !particle) {
            continue;
        }
        for sector in sectors_with(target) {
            let dsz = sector.sz - ground.sector.sz;
            if opts.spin_allowed_only && dsz != if particle { 1 } else { -1 } {
                continue;
            }
            for st in s.solve_sector(sector)? {
                let lambda = if opts.weights {
                    let (_, m) = s.next_opts();
                    Some(transition_amplitude(&ground, &st, 0, representation, &m)?)
                } else {
                    None
                };
                excited.push(record(&st, sector, lambda, false));
                if mirror {
                    // E_{N0-1} levels equal E_{N0+1} levels with Sz reversed
                    excited.push(record(&st, Sector::new(n0 - 1, -sector.sz), lambda, true));
                }
            }
        }
    }
    excited.sort_by_key(|r| (std::cmp::Reverse(r.sector.n_electrons), r.index));

    let e0 = ground.energy;
    let pole = |r: &StateRecord, omega: f64| Pole { omega, lambda: vec![r.lambda.unwrap_or(0.0)], sector: Some(r.sector), state: Some(r.index) };
    let mut data = SpectralData {
        n0,
        e0,
        particle: excited.iter().filter(|r| r.sector.n_electrons == n0 + 1).map(|r| pole(r, r.energy - e0)).collect(),
        hole: excited.iter().filter(|r| r.sector.n_electrons + 1 == n0).map(|r| pole(r, e0 - r.energy)).collect(),
    };
    sort_clustered(&mut data.particle);
    sort_clustered(&mut data.hole);

    let ground_record = StateRecord { index: 0, ..record(&ground, ground.sector, None, false) };
    let converged = s.diagnostics.is_empty();
    Ok(SpectrumReport { data, ground: ground_record, excited, converged, diagnostics: s.diagnostics })
}

impl Solver<'_> {
    fn solve_sector_ground(&mut self, sector: Sector) -> Result<Eigenstate> {
        let h = build_reduced_hamiltonian(sector, &self.p)?;
        let kind = if sector == Sector::new(2, 0) { AnsatzKind::Cr2N2 } else { AnsatzKind::Cr2N13 };
        let ansatz = Ansatz { kind, flip: spin_flip(sector) };
        let (vqe, mode) = self.next_opts();
        let g = if sector_states(sector)?.len() == 1 {
            // single-state sector: the reduced operator is a constant
            let circuit = ansatz.build(&vec![0.0; ansatz.n_params()])?;
            Eigenstate {
                sector,
                index: 0,
                energy: h.identity_coefficient(),
                params: vec![0.0; ansatz.n_params()],
                ansatz,
                circuit,
                converged: true,
                diagnostics: vec![],
            }
        } else {
            find_ground_state(&h, ansatz, &mode, &vqe, &Labeling::Known(sector))?
        };
        self.note(&g);
        Ok(g)
    }
}
