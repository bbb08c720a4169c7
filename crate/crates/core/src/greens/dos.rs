//! Densities of states, self-energy curves and occupations.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::evaluator::GreensEvaluator;
use crate::error::{Error, Result};
use crate::par;

/// Semicircular density of states of the Bethe lattice with half-bandwidth 2.
pub fn rho0(x: f64) -> f64 {
    if x.abs() >= 2.0 || !x.is_finite() {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) {
        return Err(Error::Parameter(format!("grid needs n >= 2 and hi > lo, got {n} points on [{lo}, {hi}]")));
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DosKind {
    Impurity,
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosCurve {
    pub kind: DosKind,
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
}

impl DosCurve {
    pub fn trapezoid(&self) -> f64 {
        self.omega.windows(2).zip(self.values.windows(2)).map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1])).sum()
    }

    /// Grid positions of local maxima; a flat top counts once.
    pub fn local_maxima(&self) -> Vec<f64> {
        let v = &self.values;
        let mut out = Vec::new();
        let mut i = 1;
        while i + 1 < v.len() {
            if v[i] > v[i - 1] {
                let mut j = i;
                while j + 1 < v.len() && v[j + 1] == v[i] {
                    j += 1;
                }
                if j + 1 < v.len() && v[j + 1] < v[i] {
                    out.push(self.omega[(i + j) / 2]);
                }
                i = j + 1;
            } else {
                i += 1;
            }
        }
        out
    }

    /// Grid position of the largest value.
    pub fn argmax(&self) -> f64 {
        let k = (0..self.values.len()).max_by(|&a, &b| self.values[a].total_cmp(&self.values[b])).unwrap_or(0);
        self.omega[k]
    }

    /// `omega,dos` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("omega,dos\n");
        for (w, v) in self.omega.iter().zip(&self.values) {
            let _ = writeln!(s, "{w},{v}");
        }
        s
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|w| !w.is_finite()) {
        return Err(Error::Parameter("frequency grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// `-(2/pi) Im G(omega + i delta)`.
pub fn dos_impurity(g: &GreensEvaluator, grid: &[f64], delta: f64) -> Result<DosCurve> {
    check_grid(grid)?;
    if !(delta > 0.0) {
        return Err(Error::Parameter("broadening must be positive".into()));
    }
    let values = par::map(g.exec, grid, |&w| (-2.0 / std::f64::consts::PI * g.greens_complex(Complex64::new(w, delta)).im).max(0.0));
    Ok(DosCurve { kind: DosKind::Impurity, omega: grid.to_vec(), values })
}

/// Lattice DOS argument `omega + mu - eps_alpha - Re Sigma(omega)`.
fn lattice_argument(g: &GreensEvaluator, w: f64) -> f64 {
    w + g.model.mu - g.model.eps_imp[g.alpha] - g.sigma_real(w)
}

/// `2 rho0(omega + mu - Re Sigma(omega))`.
pub fn dos_lattice(g: &GreensEvaluator, grid: &[f64]) -> Result<DosCurve> {
    check_grid(grid)?;
    let values = par::map(g.exec, grid, |&w| 2.0 * rho0(lattice_argument(g, w)));
    Ok(DosCurve { kind: DosKind::Lattice, omega: grid.to_vec(), values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfEnergyCurve {
    pub omega: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SelfEnergyCurve {
    /// `omega,re_sigma,im_sigma` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("omega,re_sigma,im_sigma\n");
        for ((w, r), i) in self.omega.iter().zip(&self.re).zip(&self.im) {
            let _ = writeln!(s, "{w},{r},{i}");
        }
        s
    }
}

/// Retarded `Sigma(omega + i delta)` on a grid; points where `G` vanishes
/// are reported as NaN.
pub fn self_energy_curve(g: &GreensEvaluator, grid: &[f64]) -> Result<SelfEnergyCurve> {
    check_grid(grid)?;
    let v = par::map(g.exec, grid, |&w| g.self_energy(w).unwrap_or(Complex64::new(f64::NAN, f64::NAN)));
    Ok(SelfEnergyCurve { omega: grid.to_vec(), re: v.iter().map(|c| c.re).collect(), im: v.iter().map(|c| c.im).collect() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Occupations {
    pub n_imp: f64,
    pub n_lat: f64,
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Option<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || (b - a) < 1e-13 {
            return Some(left + right + delta / 15.0);
        }
        if depth == 0 {
            return None;
        }
        Some(rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)? + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
    if b <= a {
        return Ok(0.0);
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, max_depth).ok_or_else(|| Error::Numerical(format!("adaptive quadrature did not converge on [{a}, {b}]")))
}

/// Root of a sign change of `f` on `[a, b]` by bisection.
fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `n_imp` from the hole weights and `n_lat` by quadrature of the lattice
/// DOS below zero.
pub fn occupations(g: &GreensEvaluator) -> Result<Occupations> {
    Ok(Occupations { n_imp: impurity_occupation(g), n_lat: lattice_occupation(g, 1e-6)? })
}

/// `2 sum_h lambda_h`, the `delta -> 0` limit of the Lorentzian integral.
pub fn impurity_occupation(g: &GreensEvaluator) -> f64 {
    2.0 * g.spectral.hole.iter().map(|p| p.lambda[g.slot]).sum::<f64>()
}

/// `int_{-inf}^0 2 rho0(omega + mu - Re Sigma) d omega`, with panels broken
/// at the poles of `Sigma` and at the band edges.
pub fn lattice_occupation(g: &GreensEvaluator, tol: f64) -> Result<f64> {
    let x = |w: f64| lattice_argument(g, w);
    let f = |w: f64| 2.0 * rho0(x(w));
    let poles: Vec<f64> = g.greens_zeros().into_iter().filter(|&z| z < 0.0).collect();
    // below the band: x -> w + const as w -> -inf
    let mut lo = -4.0 - poles.first().map_or(0.0, |p| p.abs());
    for _ in 0..60 {
        if x(lo) < -2.5 && f(lo) == 0.0 {
            break;
        }
        lo *= 2.0;
    }
    let mut cuts = vec![lo];
    cuts.extend(poles.iter().copied().filter(|&p| p > lo));
    cuts.push(0.0);
    let mut points = Vec::new();
    for seg in cuts.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b <= a {
            continue;
        }
        let eps = 1e-12 * (b - a).max(1.0);
        let (a1, b1) = (a + eps, b - eps);
        points.push(a);
        for level in [-2.0, 2.0] {
            let h = |w: f64| x(w) - level;
            let (ha, hb) = (h(a1), h(b1));
            if ha.is_finite() && hb.is_finite() && (ha > 0.0) != (hb > 0.0) {
                points.push(bisect(h, a1, b1));
            } else if !ha.is_finite() || !hb.is_finite() {
                // step inward from a pole until the value is finite
                let (mut a2, mut b2) = (a1, b1);
                for _ in 0..40 {
                    if h(a2).is_finite() && h(b2).is_finite() {
                        break;
                    }
                    a2 += (b - a) * 1e-6;
                    b2 -= (b - a) * 1e-6;
                }
                if (h(a2) > 0.0) != (h(b2) > 0.0) {
                    points.push(bisect(h, a2, b2));
                }
            }
        }
    }
    points.push(0.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let n = points.len().max(2) as f64;
    let mut total = 0.0;
    for p in points.windows(2) {
        total += adaptive_simpson(&f, p[0], p[1], tol / n, 50)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_two_site_hamiltonian, two_site_spin_z};
    use crate::model::TwoSiteParams;
    use crate::oracle::exact_spectral_data;
    use approx::assert_abs_diff_eq;

    fn exact(p: &TwoSiteParams, delta: f64) -> GreensEvaluator {
        let d = exact_spectral_data(&build_two_site_hamiltonian(p).unwrap(), &two_site_spin_z(), &[0]).unwrap();
        GreensEvaluator::new(d, p.to_model(), delta).unwrap()
    }

    #[test]
    fn semicircle_normalized() {
        let v = adaptive_simpson(&rho0, -2.0, 2.0, 1e-10, 50).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
        assert_eq!(rho0(2.5), 0.0);
    }

    #[test]
    fn simpson_polynomial_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x - x, 0.0, 2.0, 1e-12, 10).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_checks() {
        assert!(uniform_grid(1.0, 0.0, 10).is_err());
        assert_eq!(uniform_grid(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        let g = exact(&TwoSiteParams::half_filled(0.0, 1.0), 0.1);
        assert!(dos_lattice(&g, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn non_interacting_lattice_is_semicircle() {
        let p = TwoSiteParams::new(0.0, 0.4, 0.0, 1.0);
        let g = exact(&p, 0.05);
        let grid = uniform_grid(-3.0, 3.0, 601).unwrap();
        let d = dos_lattice(&g, &grid).unwrap();
        for (w, v) in d.omega.iter().zip(&d.values) {
            // the square-root edge amplifies rounding in Sigma
            assert_abs_diff_eq!(*v, 2.0 * rho0(w + 0.4), epsilon = 1e-6);
        }
        assert_abs_diff_eq!(d.argmax(), -0.4, epsilon = 1e-9);
    }

    #[test]
    fn impurity_sum_rule() {
        let g = exact(&TwoSiteParams::half_filled(4.0, 0.745356), 0.02);
        let grid = uniform_grid(-400.0, 400.0, 400_001).unwrap();
        let d = dos_impurity(&g, &grid, 0.02).unwrap();
        assert!((d.trapezoid() - 2.0).abs() < 0.02);
    }

    #[test]
    fn half_filled_occupations() {
        for p in [TwoSiteParams::half_filled(4.0, 0.745356), TwoSiteParams::half_filled(0.0, 1.0)] {
            let o = occupations(&exact(&p, 0.05)).unwrap();
            assert_abs_diff_eq!(o.n_imp, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(o.n_lat, 1.0, epsilon = 1e-5);
        }
    }

    #[test]
    fn analytic_impurity_occupation_matches_lorentzian_limit() {
        let p = TwoSiteParams::new(4.0, -0.16016, -0.29764, 0.93709);
        let g = exact(&p, 0.05);
        let n = impurity_occupation(&g);
        // integral of the Lorentzian tails below zero, Richardson in delta
        let lorentz = |d: f64| -> f64 {
            g.poles().iter().map(|&(w, l)| 2.0 * l * (0.5 + (-w / d).atan() / std::f64::consts::PI)).sum()
        };
        let (a, b) = (lorentz(2e-3), lorentz(1e-3));
        assert_abs_diff_eq!(2.0 * b - a, n, epsilon = 1e-4);
        assert_abs_diff_eq!(n, 0.5, epsilon = 1e-3);
    }

    #[test]
    fn three_peak_lattice_dos() {
        let v = (1.0f64 - (4.0f64 / 6.0).powi(2)).sqrt();
        let g = exact(&TwoSiteParams::half_filled(4.0, v), 0.05);
        let grid = uniform_grid(-6.0, 6.0, 12_001).unwrap();
        let d = dos_lattice(&g, &grid).unwrap();
        assert_eq!(d.local_maxima().len(), 3, "{:?}", d.local_maxima());
        assert!(d.values.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn csv_layout() {
        let c = DosCurve { kind: DosKind::Impurity, omega: vec![0.0, 0.5], values: vec![1.0, 0.25] };
        assert_eq!(c.to_csv(), "omega,dos\n0,1\n0.5,0.25\n");
    }
}
