//! Pole energies and weights of the impurity Green's function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Sector;

/// One pole: energy and weight per tracked orbital.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub omega: f64,
    pub lambda: Vec<f64>,
    /// Sector of the excited state this pole comes from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<Sector>,
    /// Index `n` of the excited state within its electron-number manifold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<usize>,
}

impl Pole {
    pub fn new(omega: f64, lambda: Vec<f64>) -> Self {
        Pole { omega, lambda, sector: None, state: None }
    }
}

/// Ground-state data plus particle (`N0+1`) and hole (`N0-1`) poles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub n0: usize,
    pub e0: f64,
    pub particle: Vec<Pole>,
    pub hole: Vec<Pole>,
}

impl SpectralData {
    /// Sorts both pole lists by energy (stable, so degenerate partners keep
    /// their state order).
    pub fn sort(&mut self) {
        self.particle.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        self.hole.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    }

    pub fn n_orbitals(&self) -> usize {
        self.particle.iter().chain(&self.hole).map(|p| p.lambda.len()).max().unwrap_or(0)
    }

    pub fn poles(&self) -> impl Iterator<Item = &Pole> {
        self.hole.iter().chain(&self.particle)
    }

    /// `(omega, lambda)` pairs for one orbital over all poles.
    pub fn weights(&self, k: usize) -> Vec<(f64, f64)> {
        self.poles().map(|p| (p.omega, p.lambda.get(k).copied().unwrap_or(0.0))).collect()
    }

    /// `sum_n (lambda_p + lambda_h)` for orbital `k`.
    pub fn weight_sum(&self, k: usize) -> f64 {
        self.weights(k).iter().map(|(_, l)| l).sum()
    }

    /// Impurity occupation per spin orbital: weight of poles below zero, a
    /// pole exactly at zero counting half.
    pub fn filled_weight(&self, k: usize) -> f64 {
        self.weights(k)
            .iter()
            .map(|&(w, l)| if w < 0.0 { l } else if w == 0.0 { 0.5 * l } else { 0.0 })
            .sum()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        for p in self.poles() {
            if !p.omega.is_finite() {
                return Err(Error::Numerical(format!("non-finite pole energy {}", p.omega)));
            }
            if p.lambda.iter().any(|l| !(-tol..=1.0 + tol).contains(l)) {
                return Err(Error::Numerical(format!("pole weight outside [0,1]: {:?}", p.lambda)));
            }
        }
        for k in 0..self.n_orbitals() {
            let s = self.weight_sum(k);
            if (s - 1.0).abs() > tol {
                return Err(Error::Numerical(format!("weights of orbital {k} sum to {s}")));
            }
        }
        Ok(())
    }

    /// Copy with every weight clipped into `[0, 1]`.
    pub fn clipped(&self) -> SpectralData {
        let clip = |p: &Pole| Pole { lambda: p.lambda.iter().map(|l| l.clamp(0.0, 1.0)).collect(), ..p.clone() };
        SpectralData {
            n0: self.n0,
            e0: self.e0,
            particle: self.particle.iter().map(clip).collect(),
            hole: self.hole.iter().map(clip).collect(),
        }
    }
}
