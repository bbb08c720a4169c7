//! Two-site DMFT self-consistency: `V^2 = z` and `n_imp = n_lat`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::{dos_impurity, dos_lattice, occupations, regularize, regularize_two_site_ph, uniform_grid, DosCurve, GreensEvaluator};
use crate::model::{Sector, TwoSiteParams};
use crate::par::{self, Exec};
use crate::sim::sampling::derive_seed;
use crate::sim::EvalMode;
use crate::spectral::SpectralData;
use crate::vqe::{solve_spectrum, AnsatzKind, Method, SpectrumOptions, SpectrumReport, VqeOptions};

/// Frequency grid and broadening of the exported densities of states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DosGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub delta: f64,
}

impl Default for DosGrid {
    fn default() -> Self {
        DosGrid { lo: -6.0, hi: 6.0, points: 1201, delta: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmftConfig {
    pub u: f64,
    pub mu: f64,
    /// Forces `mu = U/2`, `eps2 = 0` and the closed-form weights.
    pub ph_symmetric: bool,
    pub v0: f64,
    pub eps2_0: f64,
    /// Tolerance on `|V - sqrt(z)|`.
    pub eta: f64,
    /// Tolerance on `|n_imp - n_lat|`.
    pub occ_tol: f64,
    pub max_iters: usize,
    pub mode: EvalMode,
    pub method: Method,
    pub full_ansatz: AnsatzKind,
    /// Mixing `V <- (1 - a) V + a sqrt(z)`, also scales the `eps2` step.
    pub damping: f64,
    pub regularize: bool,
    pub vqe: VqeOptions,
    pub dos: DosGrid,
}

impl DmftConfig {
    pub fn ph(u: f64) -> Self {
        DmftConfig {
            u,
            mu: u / 2.0,
            ph_symmetric: true,
            v0: 1.0,
            eps2_0: 0.0,
            eta: 0.01,
            occ_tol: 1e-3,
            max_iters: 30,
            mode: EvalMode::Exact,
            method: Method::Cr,
            full_ansatz: AnsatzKind::Pt4x,
            damping: 1.0,
            regularize: true,
            vqe: VqeOptions::default(),
            dos: DosGrid::default(),
        }
    }

    pub fn general(u: f64, mu: f64) -> Self {
        DmftConfig { mu, ph_symmetric: false, eta: 1e-4, occ_tol: 1e-5, max_iters: 60, ..Self::ph(u) }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.u, self.mu, self.v0, self.eps2_0, self.eta, self.occ_tol, self.damping].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::Parameter("DMFT parameters must be finite".into()));
        }
        if self.eta <= 0.0 || self.occ_tol <= 0.0 {
            return Err(Error::Parameter("tolerances must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Parameter(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if self.v0 <= 0.0 {
            return Err(Error::Parameter("initial V must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Parameter("need at least one iteration".into()));
        }
        Ok(())
    }
}

/// One pass through the loop, before the parameter update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub v: f64,
    pub eps2: f64,
    pub z: f64,
    pub n_imp: f64,
    pub n_lat: f64,
    pub e0: f64,
    /// Lowest and third `N0+1` levels (`E_{3,0}`, `E_{3,2}`).
    pub e30: f64,
    pub e32: f64,
    /// Weight of the lowest particle pole.
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmftResult {
    pub converged: bool,
    /// Why the loop stopped early, if it did.
    pub failure: Option<String>,
    pub iterations: Vec<IterationRecord>,
    /// Parameters after the final update.
    pub params: TwoSiteParams,
    pub z: f64,
    pub spectral: Option<SpectralData>,
    pub dos_imp: Option<DosCurve>,
    pub dos_lat: Option<DosCurve>,
    /// The same curves at `U = 0` for the final bath parameters.
    pub dos_lat_free: Option<DosCurve>,
}

impl DmftResult {
    /// `iter,V,eps2,z,n_imp,n_lat,E0,E30,E32,lambda` rows.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iter,V,eps2,z,n_imp,n_lat,E0,E30,E32,lambda\n");
        for r in &self.iterations {
            let _ = writeln!(s, "{},{},{},{},{},{},{},{},{},{}", r.iter, r.v, r.eps2, r.z, r.n_imp, r.n_lat, r.e0, r.e30, r.e32, r.lambda);
        }
        s
    }

    pub fn final_v(&self) -> f64 {
        self.params.v
    }
}

struct Solved {
    report: SpectrumReport,
    data: SpectralData,
    lambda: f64,
}

fn solve(cfg: &DmftConfig, p: &TwoSiteParams, iter: usize) -> Result<Solved> {
    let mut o = SpectrumOptions::new(cfg.method, cfg.mode.derived(iter as u64));
    o.vqe = VqeOptions { seed: derive_seed(cfg.vqe.seed, iter as u64), ..cfg.vqe.clone() };
    o.full_ansatz = cfg.full_ansatz;
    o.spin_allowed_only = true;
    // the closed form needs energies only
    o.weights = !(cfg.ph_symmetric && cfg.regularize);
    let report = solve_spectrum(p, &o)?;
    let model = p.to_model();
    let (data, lambda) = if cfg.regularize {
        if cfg.ph_symmetric {
            let (d, _) = regularize_two_site_ph(&report.data, p.v, 0)?;
            let l = d.particle.first().map_or(0.0, |q| q.lambda[0]);
            (d, l)
        } else {
            let d = regularize(&report.data, &model)?;
            let l = d.particle.first().map_or(0.0, |q| q.lambda[0]);
            (d, l)
        }
    } else {
        let l = report.data.particle.first().map_or(0.0, |q| q.lambda[0]);
        (report.data.clone(), l)
    };
    Ok(Solved { report, data, lambda })
}

fn levels(report: &SpectrumReport, n: usize) -> (f64, f64) {
    let at = |k: usize| report.excited.iter().find(|r| r.sector.n_electrons == n && r.index == k).map_or(f64::NAN, |r| r.energy);
    (at(0), at(2))
}

/// Shot-mode stopping uses the mean of the last three residuals.
fn residual_test(history: &[f64], exact: bool, tol: f64) -> bool {
    if exact {
        return history.last().is_some_and(|r| r.abs() < tol);
    }
    history.len() >= 3 && history[history.len() - 3..].iter().map(|r| r.abs()).sum::<f64>() / 3.0 < tol
}

/// Lattice DOS of the non-interacting model with the same bath.
pub fn free_lattice_dos(p: &TwoSiteParams, grid: &[f64], delta: f64) -> Result<DosCurve> {
    let free = TwoSiteParams { u: 0.0, ..*p };
    let h = crate::hamiltonian::build_two_site_hamiltonian(&free)?;
    let d = crate::oracle::exact_spectral_data(&h, &crate::hamiltonian::two_site_spin_z(), &[0])?;
    dos_lattice(&GreensEvaluator::new(d, free.to_model(), delta)?, grid)
}

/// Attaches curves computed from the last solved iteration (`data` was
/// obtained at `at`, before the final update).
fn finish(cfg: &DmftConfig, mut res: DmftResult, last: Option<(SpectralData, TwoSiteParams)>) -> DmftResult {
    if let Some((d, at)) = &last {
        let grid = uniform_grid(cfg.dos.lo, cfg.dos.hi, cfg.dos.points.max(2)).ok();
        if let (Some(grid), Ok(g)) = (grid, GreensEvaluator::new(d.clone(), at.to_model(), cfg.dos.delta)) {
            res.dos_imp = dos_impurity(&g, &grid, cfg.dos.delta).ok();
            res.dos_lat = dos_lattice(&g, &grid).ok();
            res.dos_lat_free = free_lattice_dos(at, &grid, cfg.dos.delta).ok();
        }
    }
    res.spectral = last.map(|l| l.0);
    res
}

fn empty(p: TwoSiteParams) -> DmftResult {
    DmftResult {
        converged: false,
        failure: None,
        iterations: Vec::new(),
        params: p,
        z: f64::NAN,
        spectral: None,
        dos_imp: None,
        dos_lat: None,
        dos_lat_free: None,
    }
}

/// Half-filled loop on `V` alone.
pub fn run_ph_symmetric(cfg: &DmftConfig) -> Result<DmftResult> {
    cfg.validate()?;
    if !cfg.ph_symmetric {
        return Err(Error::Parameter("run_ph_symmetric needs ph_symmetric = true".into()));
    }
    let mut p = TwoSiteParams::half_filled(cfg.u, cfg.v0);
    let mut res = empty(p);
    let mut history = Vec::new();
    let mut last = None;
    for iter in 0..cfg.max_iters {
        let (z, rec, data) = if p.v == 0.0 {
            // decoupled impurity: Mott insulator, z = 0
            let rec = IterationRecord { iter, v: 0.0, eps2: 0.0, z: 0.0, n_imp: 1.0, n_lat: 1.0, e0: f64::NAN, e30: f64::NAN, e32: f64::NAN, lambda: f64::NAN };
            (0.0, rec, None)
        } else {
            let s = solve(cfg, &p, iter)?;
            let (e30, e32) = levels(&s.report, 3);
            let g = GreensEvaluator::new(s.data.clone(), p.to_model(), cfg.dos.delta)?;
            let z = match g.quasiparticle_weight() {
                Ok(q) => q.z,
                Err(Error::SigmaPole(msg)) => {
                    res.failure = Some(format!("iteration {iter}: {msg}"));
                    res.params = p;
                    return Ok(finish(cfg, res, Some((s.data, p))));
                }
                Err(e) => return Err(e),
            };
            let rec = IterationRecord { iter, v: p.v, eps2: 0.0, z, n_imp: 1.0, n_lat: 1.0, e0: s.report.ground.energy, e30, e32, lambda: s.lambda };
            (z, rec, Some((s.data, p)))
        };
        res.iterations.push(rec);
        history.push(p.v - z.sqrt());
        if data.is_some() {
            last = data;
        }
        res.z = z;
        let done = residual_test(&history, cfg.mode.is_exact(), cfg.eta);
        p.v = (1.0 - cfg.damping) * p.v + cfg.damping * z.sqrt();
        if done {
            res.converged = true;
            break;
        }
    }
    res.params = p;
    Ok(finish(cfg, res, last))
}

/// Secant root search on the occupation residual with a bisection fallback
/// once a sign change has been seen.
#[derive(Debug, Default)]
struct Eps2Search {
    points: Vec<(f64, f64)>,
}

impl Eps2Search {
    fn next(&mut self, eps2: f64, r: f64, damping: f64) -> f64 {
        self.points.push((eps2, r));
        let n = self.points.len();
        let step = if n < 2 {
            -r
        } else {
            let (e1, r1) = self.points[n - 2];
            let denom = r - r1;
            if denom.abs() < 1e-14 || (eps2 - e1).abs() < 1e-14 {
                f64::NAN
            } else {
                -r * (eps2 - e1) / denom
            }
        };
        // tightest bracket among recent points
        let bracket = self
            .points
            .iter()
            .rev()
            .take(6)
            .filter(|q| (q.1 > 0.0) != (r > 0.0))
            .min_by(|a, b| (a.0 - eps2).abs().total_cmp(&(b.0 - eps2).abs()))
            .map(|q| (q.0.min(eps2), q.0.max(eps2)));
        let cand = eps2 + damping * step;
        match bracket {
            Some((lo, hi)) if !(cand > lo && cand < hi) => 0.5 * (lo + hi),
            _ if !cand.is_finite() => eps2 - damping * r,
            _ => cand,
        }
    }
}

/// Loop on `(eps2, V)` at fixed `mu`.
pub fn run_general(cfg: &DmftConfig) -> Result<DmftResult> {
    cfg.validate()?;
    if cfg.ph_symmetric {
        return run_ph_symmetric(cfg);
    }
    let mut p = TwoSiteParams::new(cfg.u, cfg.mu, cfg.eps2_0, cfg.v0);
    let mut res = empty(p);
    let mut search = Eps2Search::default();
    let (mut hv, mut hn) = (Vec::new(), Vec::new());
    let mut last = None;
    for iter in 0..cfg.max_iters {
        let s = solve(cfg, &p, iter)?;
        if s.report.ground.sector != Sector::new(2, 0) {
            res.failure = Some(format!("iteration {iter}: ground state moved to {}", s.report.ground.sector));
            break;
        }
        let (e30, e32) = levels(&s.report, 3);
        let g = GreensEvaluator::new(s.data.clone(), p.to_model(), cfg.dos.delta)?;
        let check = g.check_regular().and_then(|_| g.quasiparticle_weight());
        let z = match check {
            Ok(q) => q.z,
            Err(Error::SigmaPole(msg)) => {
                res.failure = Some(format!("iteration {iter}: {msg}"));
                last = Some((s.data, p));
                break;
            }
            Err(e) => return Err(e),
        };
        let occ = occupations(&g)?;
        res.iterations.push(IterationRecord { iter, v: p.v, eps2: p.eps2, z, n_imp: occ.n_imp, n_lat: occ.n_lat, e0: s.report.ground.energy, e30, e32, lambda: s.lambda });
        res.z = z;
        last = Some((s.data, p));
        hv.push(p.v - z.sqrt());
        hn.push(occ.n_imp - occ.n_lat);
        let exact = cfg.mode.is_exact();
        let done = residual_test(&hv, exact, cfg.eta) && residual_test(&hn, exact, cfg.occ_tol);
        p.v = (1.0 - cfg.damping) * p.v + cfg.damping * z.sqrt();
        p.eps2 = search.next(p.eps2, occ.n_imp - occ.n_lat, cfg.damping);
        if done {
            res.converged = true;
            break;
        }
    }
    res.params = p;
    Ok(finish(cfg, res, last))
}

/// Runs either loop depending on the configuration.
pub fn run(cfg: &DmftConfig) -> Result<DmftResult> {
    if cfg.ph_symmetric {
        run_ph_symmetric(cfg)
    } else {
        run_general(cfg)
    }
}

/// One point of a `z(U)` scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZPoint {
    pub u: f64,
    pub z: f64,
    pub v: f64,
    pub converged: bool,
}

/// Half-filled loops for several `U`, run as an independent batch.
pub fn z_sweep(base: &DmftConfig, us: &[f64], exec: Exec) -> Result<Vec<ZPoint>> {
    par::map(exec, us, |&u| {
        let cfg = DmftConfig { u, mu: u / 2.0, ph_symmetric: true, ..base.clone() };
        let r = run_ph_symmetric(&cfg)?;
        Ok(ZPoint { u, z: r.z, v: r.params.v, converged: r.converged })
    })
    .into_iter()
    .collect()
}

/// `U,z,V,converged` rows.
pub fn z_sweep_csv(points: &[ZPoint]) -> String {
    let mut s = String::from("U,z,V,converged\n");
    for q in points {
        let _ = writeln!(s, "{},{},{},{}", q.u, q.z, q.v, q.converged);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn config_validation() {
        assert!(DmftConfig { damping: 0.0, ..DmftConfig::ph(4.0) }.validate().is_err());
        assert!(DmftConfig { v0: -1.0, ..DmftConfig::ph(4.0) }.validate().is_err());
        assert!(DmftConfig { eta: 0.0, ..DmftConfig::ph(4.0) }.validate().is_err());
        assert!(run_ph_symmetric(&DmftConfig::general(4.0, 0.0)).is_err());
    }

    #[test]
    fn half_filled_fixed_point() {
        let r = run_ph_symmetric(&DmftConfig::ph(4.0)).unwrap();
        assert!(r.converged);
        assert!(r.iterations.len() <= 10);
        assert!((r.final_v() - 0.745356).abs() < 0.01);
        assert_abs_diff_eq!(r.iterations[0].v, 1.0);
    }

    #[test]
    fn non_interacting_converges_at_once() {
        let r = run_ph_symmetric(&DmftConfig::ph(0.0)).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations.len(), 1);
        assert_abs_diff_eq!(r.final_v(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn contraction_near_fixed_point() {
        let cfg = DmftConfig { eta: 1e-7, ..DmftConfig::ph(3.0) };
        let r = run_ph_symmetric(&cfg).unwrap();
        let vstar = (1.0f64 - 0.25).sqrt();
        let errs: Vec<f64> = r.iterations.iter().map(|i| (i.v - vstar).abs()).collect();
        for w in errs.windows(2) {
            if w[0] < 0.1 && w[0] > 1e-9 {
                assert!(w[1] < w[0], "{errs:?}");
            }
        }
    }

    #[test]
    fn secant_search_finds_root() {
        let mut s = Eps2Search::default();
        let f = |x: f64| (x - 0.3) * (1.0 + x * x) * 0.5;
        let mut x = 0.0;
        for _ in 0..30 {
            x = s.next(x, f(x), 1.0);
        }
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-10);
    }

    #[test]
    fn trace_layout() {
        let r = run_ph_symmetric(&DmftConfig::ph(0.0)).unwrap();
        let csv = r.trace_csv();
        assert!(csv.starts_with("iter,V,eps2,z,n_imp,n_lat,E0,E30,E32,lambda\n0,1,0,"));
        assert_eq!(csv.lines().count(), 2);
    }
}
