//! Impurity Green's function, hybridization, self-energy and quasiparticle
//! weight from pole data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::laurent::Laurent;
use crate::error::{Error, Result};
use crate::model::ImpurityModel;
use crate::par::Exec;
use crate::spectral::SpectralData;

/// Broadening used for plotting.
pub const DEFAULT_DELTA: f64 = 0.05;
/// Broadening of the `Im Sigma(i delta) / delta` cross-check of `z`.
pub const Z_CHECK_DELTA: f64 = 1e-5;
/// Relative agreement required between the two `z` evaluations.
pub const Z_CHECK_TOL: f64 = 1e-4;
/// Residues of `Sigma` above this are unphysical poles.
pub const SIGMA_POLE_TOL: f64 = 1e-6;
/// `|G|` below this makes `1/G` undefined.
pub const G_ZERO_TOL: f64 = 1e-14;
/// A zero of `G` closer than this (relative to `|G'|`) to the expansion
/// point is treated as sitting on it.
const SNAP: f64 = 1e-8;
/// Poles closer than this to an expansion point are treated as on it.
const MERGE: f64 = 1e-12;

/// `sum_i |V_i|^2 / (z - eps_i)` for impurity orbital `alpha`.
pub fn hybridization(model: &ImpurityModel, alpha: usize, z: Complex64) -> Complex64 {
    model.coupled_bath(alpha).iter().map(|&(e, v)| v * v / (z - e)).sum()
}

/// Local expansion of `Sigma` around a real energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaExpansion {
    pub at: f64,
    pub residue: f64,
    pub value: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiparticleWeight {
    /// From the analytic slope, clipped into `[0, 1]`.
    pub z: f64,
    /// `1 / (1 - dRe Sigma/dw)` before clipping.
    pub raw: f64,
    /// From `Im Sigma(i delta) / delta` at [`Z_CHECK_DELTA`].
    pub z_delta: f64,
    pub slope: f64,
    /// The two evaluations agree to [`Z_CHECK_TOL`].
    pub consistent: bool,
}

/// Evaluates one diagonal Green's-function element.
#[derive(Debug, Clone)]
pub struct GreensEvaluator {
    pub spectral: SpectralData,
    pub model: ImpurityModel,
    pub delta: f64,
    /// Impurity orbital of the model.
    pub alpha: usize,
    /// Index of the orbital in the pole weight vectors.
    pub slot: usize,
    pub exec: Exec,
    poles: Vec<(f64, f64)>,
}

impl GreensEvaluator {
    /// Orbital 0, weight slot 0.
    pub fn new(spectral: SpectralData, model: ImpurityModel, delta: f64) -> Result<Self> {
        Self::for_orbital(spectral, model, delta, 0, 0)
    }

    pub fn for_orbital(spectral: SpectralData, model: ImpurityModel, delta: f64, alpha: usize, slot: usize) -> Result<Self> {
        model.validate()?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Parameter(format!("broadening must be positive, got {delta}")));
        }
        if alpha >= model.n_imp() {
            return Err(Error::OutOfRange(format!("impurity orbital {alpha} of {}", model.n_imp())));
        }
        if spectral.poles().any(|p| !p.omega.is_finite() || p.lambda.get(slot).is_none_or(|l| !l.is_finite())) {
            return Err(Error::Parameter("poles must be finite and carry a weight for the orbital".into()));
        }
        let poles = spectral.weights(slot);
        Ok(GreensEvaluator { spectral, model, delta, alpha, slot, exec: Exec::default(), poles })
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::for_orbital(self.spectral.clone(), self.model.clone(), delta, self.alpha, self.slot)
    }

    /// `(omega, lambda)` of every pole.
    pub fn poles(&self) -> &[(f64, f64)] {
        &self.poles
    }

    fn eps_alpha(&self) -> f64 {
        self.model.eps_imp[self.alpha]
    }

    /// Pole sum at a complex energy (no broadening added). Returns the value
    /// and whether `z` sat exactly on a pole and had to be nudged.
    pub fn greens_checked(&self, z: Complex64) -> (Complex64, bool) {
        let hit = self.poles.iter().any(|&(w, l)| l != 0.0 && z == Complex64::new(w, 0.0));
        let z = if hit { z + Complex64::new(0.0, 4.0 * f64::EPSILON * z.norm().max(1.0)) } else { z };
        (self.poles.iter().map(|&(w, l)| l / (z - w)).sum(), hit)
    }

    pub fn greens_complex(&self, z: Complex64) -> Complex64 {
        self.greens_checked(z).0
    }

    /// `G(omega + i delta)`.
    pub fn greens(&self, omega: f64) -> Complex64 {
        self.greens_complex(Complex64::new(omega, self.delta))
    }

    pub fn hybridization(&self, z: Complex64) -> Complex64 {
        hybridization(&self.model, self.alpha, z)
    }

    /// `G0^-1(z) = z - eps_alpha + mu - Delta(z)`.
    pub fn g0_inverse(&self, z: Complex64) -> Complex64 {
        z - self.eps_alpha() + self.model.mu - self.hybridization(z)
    }

    /// `Sigma(z) = G0^-1(z) - G^-1(z)` at a complex energy.
    pub fn sigma_complex(&self, z: Complex64) -> Result<Complex64> {
        let g = self.greens_complex(z);
        if g.norm() < G_ZERO_TOL {
            return Err(Error::SigmaPole(format!("G vanishes at {z}")));
        }
        Ok(self.g0_inverse(z) - g.inv())
    }

    /// Retarded `Sigma(omega + i delta)`.
    pub fn self_energy(&self, omega: f64) -> Result<Complex64> {
        self.sigma_complex(Complex64::new(omega, self.delta))
    }

    /// Laurent expansion of `Sigma` at a real energy.
    pub fn expand_sigma(&self, at: f64) -> Result<SigmaExpansion> {
        let x = Complex64::new(at, 0.0);
        let g = self.poles.iter().filter(|p| p.1 != 0.0).fold(Laurent::zero(), |acc, &(w, l)| acc.add(&Laurent::simple_pole(l, w, x, MERGE)));
        let scale = g.coeff(1).norm().max(g.coeff(0).norm() * 1e-300);
        let tol = if g.low < 0 { 0.0 } else { SNAP * scale };
        let g_inv = g.recip(tol).ok_or_else(|| Error::SigmaPole(format!("G vanishes identically near {at}")))?;
        let mut g0 = Laurent::constant(x - self.eps_alpha() + self.model.mu).add(&Laurent::h());
        for (e, v) in self.model.coupled_bath(self.alpha) {
            g0 = g0.sub(&Laurent::simple_pole(v * v, e, x, MERGE));
        }
        let s = g0.sub(&g_inv);
        if s.low < -1 && s.coeff(s.low).norm() > SIGMA_POLE_TOL {
            return Err(Error::SigmaPole(format!("higher-order pole of Sigma at {at}")));
        }
        Ok(SigmaExpansion { at, residue: s.coeff(-1).re, value: s.coeff(0).re, slope: s.coeff(1).re })
    }

    /// `Re Sigma` on the real axis (the `delta -> 0` limit of the rational
    /// form). Non-finite at poles of `Sigma`.
    pub fn sigma_real(&self, omega: f64) -> f64 {
        let near_bath = self.model.coupled_bath(self.alpha).iter().any(|&(e, _)| (omega - e).abs() < 1e-7);
        if near_bath {
            return match self.expand_sigma(omega) {
                Ok(s) if s.residue.abs() <= SIGMA_POLE_TOL => s.value,
                _ => f64::INFINITY,
            };
        }
        let x = Complex64::new(omega, 0.0);
        let g = self.greens_complex(x).re;
        if g == 0.0 {
            return f64::INFINITY;
        }
        (self.g0_inverse(x) - 1.0 / g).re
    }

    /// Residue of `Sigma` at every bath energy coupled to the orbital.
    pub fn bath_residues(&self) -> Result<Vec<(f64, f64)>> {
        self.model.coupled_bath(self.alpha).iter().map(|&(e, _)| Ok((e, self.expand_sigma(e)?.residue))).collect()
    }

    /// Fails when `Sigma` has an unphysical pole at a bath energy.
    pub fn check_regular(&self) -> Result<()> {
        for (e, r) in self.bath_residues()? {
            if r.abs() > SIGMA_POLE_TOL {
                return Err(Error::SigmaPole(format!("Sigma has a pole at bath energy {e} with residue {r:.3e}")));
            }
        }
        Ok(())
    }

    /// `z = 1 / (1 - dRe Sigma/dw |_0)`, cross-checked against
    /// `1 / (1 - Im Sigma(i delta) / delta)`.
    pub fn quasiparticle_weight(&self) -> Result<QuasiparticleWeight> {
        let s = self.expand_sigma(0.0)?;
        if s.residue.abs() > SIGMA_POLE_TOL {
            return Err(Error::SigmaPole(format!("Sigma has a pole at zero energy (residue {:.3e}); z is undefined", s.residue)));
        }
        let raw = 1.0 / (1.0 - s.slope);
        let z_delta = match self.sigma_complex(Complex64::new(0.0, Z_CHECK_DELTA)) {
            Ok(sig) => 1.0 / (1.0 - sig.im / Z_CHECK_DELTA),
            Err(_) => f64::NAN,
        };
        let consistent = (raw - z_delta).abs() <= Z_CHECK_TOL * raw.abs().max(1e-12);
        Ok(QuasiparticleWeight { z: raw.clamp(0.0, 1.0), raw, z_delta, slope: s.slope, consistent })
    }

    /// Real zeros of `G` between consecutive weighted poles (the candidate
    /// poles of `Sigma`), ascending.
    pub fn greens_zeros(&self) -> Vec<f64> {
        let mut w: Vec<f64> = self.poles.iter().filter(|p| p.1 > G_ZERO_TOL).map(|p| p.0).collect();
        w.sort_by(f64::total_cmp);
        w.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let g = |x: f64| self.greens_complex(Complex64::new(x, 0.0)).re;
        w.windows(2)
            .filter_map(|p| {
                let (mut lo, mut hi) = (p[0], p[1]);
                let eps = 1e-12 * (hi - lo).max(1.0);
                let (a, b) = (lo + eps, hi - eps);
                if g(a).signum() == g(b).signum() {
                    return None;
                }
                (lo, hi) = (a, b);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if g(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Some(0.5 * (lo + hi))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_two_site_hamiltonian, two_site_spin_z};
    use crate::model::TwoSiteParams;
    use crate::oracle::exact_spectral_data;
    use crate::spectral::Pole;
    use approx::assert_abs_diff_eq;

    fn exact(p: &TwoSiteParams, delta: f64) -> GreensEvaluator {
        let d = exact_spectral_data(&build_two_site_hamiltonian(p).unwrap(), &two_site_spin_z(), &[0]).unwrap();
        GreensEvaluator::new(d, p.to_model(), delta).unwrap()
    }

    #[test]
    fn single_pole() {
        let d = SpectralData { n0: 0, e0: 0.0, particle: vec![Pole::new(0.0, vec![1.0])], hole: vec![] };
        let g = GreensEvaluator::new(d, TwoSiteParams::half_filled(0.0, 1.0).to_model(), 0.1).unwrap();
        let v = g.greens(0.0);
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, -10.0, epsilon = 1e-12);
        let (_, hit) = g.greens_checked(Complex64::new(0.0, 0.0));
        assert!(hit);
    }

    #[test]
    fn bad_inputs() {
        let d = SpectralData { n0: 0, e0: 0.0, particle: vec![], hole: vec![] };
        let m = TwoSiteParams::half_filled(0.0, 1.0).to_model();
        assert!(GreensEvaluator::new(d.clone(), m.clone(), 0.0).is_err());
        assert!(GreensEvaluator::for_orbital(d, m, 0.1, 5, 0).is_err());
    }

    #[test]
    fn half_filling_odd_symmetry() {
        let g = exact(&TwoSiteParams::half_filled(4.0, 0.745356), 0.05);
        assert_abs_diff_eq!(g.greens(0.0).re, 0.0, epsilon = 1e-12);
        for w in [0.3, 1.1, 2.7] {
            let (a, b) = (g.greens(w), g.greens(-w));
            assert_abs_diff_eq!(a.re, -b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn matches_direct_pole_sum() {
        let p = TwoSiteParams::half_filled(4.0, 0.745356);
        let d = exact_spectral_data(&build_two_site_hamiltonian(&p).unwrap(), &two_site_spin_z(), &[0]).unwrap();
        let g = GreensEvaluator::new(d.clone(), p.to_model(), 0.05).unwrap();
        for k in 0..1000 {
            let w = -5.0 + 10.0 * k as f64 / 999.0;
            let z = Complex64::new(w, 0.05);
            let direct: Complex64 = d.hole.iter().chain(&d.particle).map(|q| q.lambda[0] / (z - q.omega)).sum();
            assert!((g.greens(w) - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn hybridization_forms() {
        let m = TwoSiteParams::half_filled(4.0, 0.8).to_model();
        let z = Complex64::new(0.3, 0.1);
        assert!((hybridization(&m, 0, z) - 0.64 / z).norm() < 1e-15);
        let m0 = TwoSiteParams::half_filled(4.0, 0.0).to_model();
        assert_eq!(hybridization(&m0, 0, z), Complex64::new(0.0, 0.0));
        let mut two = m.clone();
        two.eps_bath = vec![-1.0, 0.0, 2.0, 0.0];
        two.hoppings = vec![vec![0.5, 0.0, 0.7, 0.0], vec![0.0, 0.5, 0.0, 0.7]];
        two.eps_imp = vec![0.0, 0.0];
        let expect = 0.25 / (z + 1.0) + 0.49 / (z - 2.0);
        assert!((hybridization(&two, 0, z) - expect).norm() < 1e-15);
    }

    #[test]
    fn non_interacting_self_energy_vanishes() {
        let p = TwoSiteParams::new(0.0, 0.3, -0.4, 0.9);
        let g = exact(&p, 0.05);
        for w in [-2.0, -0.5, 0.0, 0.7, 3.0] {
            assert!(g.self_energy(w).unwrap().norm() < 1e-10);
            assert!(g.sigma_real(w).abs() < 1e-9);
        }
        let z = g.quasiparticle_weight().unwrap();
        assert_abs_diff_eq!(z.z, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn hartree_value_at_half_filling() {
        let g = exact(&TwoSiteParams::half_filled(4.0, 0.745356), 0.05);
        let s = g.expand_sigma(0.0).unwrap();
        assert_abs_diff_eq!(s.value, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.residue, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g.self_energy(0.0).unwrap().re, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn self_consistent_weight() {
        let v = (1.0f64 - (4.0f64 / 6.0).powi(2)).sqrt();
        let g = exact(&TwoSiteParams::half_filled(4.0, v), 0.05);
        let z = g.quasiparticle_weight().unwrap();
        assert_abs_diff_eq!(z.z, v * v, epsilon = 1e-9);
        assert!(z.consistent, "{z:?}");
    }

    #[test]
    fn exact_data_has_no_bath_pole() {
        for p in [TwoSiteParams::half_filled(4.0, 0.745356), TwoSiteParams::new(4.0, -0.16016, -0.29764, 0.93709)] {
            let g = exact(&p, 0.05);
            g.check_regular().unwrap();
            let e = p.eps2;
            let mut prev = None;
            for d in [1e-3, 1e-4, 1e-5] {
                let s = g.sigma_complex(Complex64::new(e, d)).unwrap().norm();
                if let Some(q) = prev {
                    assert!((s - q) / q < 0.01, "{s} vs {q}");
                }
                prev = Some(s);
            }
        }
    }

    #[test]
    fn perturbed_weights_create_pole() {
        let p = TwoSiteParams::half_filled(4.0, 0.745356);
        let mut g = exact(&p, 0.05);
        for q in g.spectral.particle.iter_mut().chain(g.spectral.hole.iter_mut()) {
            if q.lambda[0] > 0.2 && q.lambda[0] < 0.3 {
                q.lambda[0] += 0.01;
            }
        }
        let g = GreensEvaluator::new(g.spectral, p.to_model(), 0.05).unwrap();
        assert!(matches!(g.check_regular(), Err(Error::SigmaPole(_))));
        assert!(matches!(g.quasiparticle_weight(), Err(Error::SigmaPole(_))));
    }

    #[test]
    fn atomic_limit_has_mott_pole() {
        // decoupled impurity: poles at +-U/2
        let d = SpectralData { n0: 2, e0: 0.0, particle: vec![Pole::new(2.0, vec![0.5])], hole: vec![Pole::new(-2.0, vec![0.5])] };
        let g = GreensEvaluator::new(d, TwoSiteParams::half_filled(4.0, 0.0).to_model(), 0.05).unwrap();
        assert!(g.sigma_real(0.0).is_infinite());
        assert!(matches!(g.quasiparticle_weight(), Err(Error::SigmaPole(_))));
    }

    #[test]
    fn zeros_of_g_interlace_poles() {
        let g = exact(&TwoSiteParams::half_filled(4.0, 0.745356), 0.05);
        let z = g.greens_zeros();
        assert_eq!(z.len(), 3);
        assert_abs_diff_eq!(z[1], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(z[0], -z[2], epsilon = 1e-10);
    }
}
