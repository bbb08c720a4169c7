//! The four batch commands. Each writes its artifacts under the output
//! directory and returns an exit status.

use std::fmt::Write as _;
use std::path::Path;

use qdmft::dmft::{free_lattice_dos, run, z_sweep, z_sweep_csv, DmftResult};
use qdmft::greens::{dos_impurity, dos_lattice, occupations, regularize, self_energy_curve, uniform_grid, GreensEvaluator};
use qdmft::hamiltonian::{build_two_site_hamiltonian, two_site_spin_z};
use qdmft::model::{Sector, TwoSiteParams};
use qdmft::oracle::exact_spectral_data;
use qdmft::par::Exec;
use qdmft::reduced::build_reduced_hamiltonian;
use qdmft::sim::sampling::derive_seed;
use qdmft::sim::{expectation_sampled, EvalMode};
use qdmft::spectral::SpectralData;
use qdmft::verify::{run_verification, VerifyOptions};
use qdmft::vqe::{solve_spectrum, transition_amplitude, Eigenstate, Method, Representation, SpectrumReport, StateRecord};
use serde::Serialize;

use crate::config::RunConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_UNCONVERGED: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;

/// Failure that ends a command early, with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub status: u8,
    pub message: String,
}

impl From<qdmft::Error> for Failure {
    fn from(e: qdmft::Error) -> Self {
        use qdmft::Error::*;
        let status = match e {
            Parameter(_) | Parse(_) | Unsupported(_) | Dimension(_) | OutOfRange(_) => EXIT_CONFIG,
            _ => EXIT_UNCONVERGED,
        };
        Failure { status, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn write(dir: &Path, name: &str, content: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(dir.join(name), content))
        .map_err(|e| Failure { status: EXIT_CONFIG, message: format!("cannot write {}: {e}", dir.join(name).display()) })
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn exact(p: &TwoSiteParams) -> qdmft::Result<SpectralData> {
    exact_spectral_data(&build_two_site_hamiltonian(p)?, &two_site_spin_z(), &[0])
}

fn describe(cfg: &RunConfig, p: &TwoSiteParams) -> String {
    let mode = match cfg.solver.mode {
        crate::config::ModeName::Exact => "exact".to_string(),
        crate::config::ModeName::Shots => format!("{} shots, seed {}", cfg.solver.shots, cfg.seed()),
    };
    let method = match cfg.solver.method {
        Method::Pt => format!("pt/{:?}", cfg.ansatz()).to_lowercase(),
        Method::Cr => "cr".into(),
    };
    format!("U={} mu={} eps2={} V={} (method {method}, mode {mode})", p.u, p.mu, p.eps2, p.v)
}

/// Energy of a record and its label row, taken from spectral data.
fn level(d: &SpectralData, n: usize, state: usize) -> Option<(f64, f64)> {
    let particle = n > d.n0;
    let poles = if particle { &d.particle } else { &d.hole };
    poles
        .iter()
        .find(|q| q.sector.map(|s| s.n_electrons) == Some(n) && q.state == Some(state))
        .map(|q| (if particle { d.e0 + q.omega } else { d.e0 - q.omega }, q.lambda[0]))
}

fn eigenstate(r: &StateRecord, sector: Sector) -> qdmft::Result<Eigenstate> {
    Ok(Eigenstate {
        sector,
        index: r.index,
        energy: r.energy,
        params: r.params.clone(),
        ansatz: r.ansatz,
        circuit: r.ansatz.build(&r.params)?,
        converged: true,
        diagnostics: vec![],
    })
}

/// Energy and weight re-measured at the optimal angles with a fixed shot budget.
fn fixed_angle_estimates(cfg: &RunConfig, p: &TwoSiteParams, report: &SpectrumReport) -> qdmft::Result<Vec<(f64, Option<f64>)>> {
    let shots = cfg.shot_config(cfg.solver.table_shots);
    let h = build_two_site_hamiltonian(p)?;
    let n0 = report.ground.sector.n_electrons;
    // mirrored records reuse the angles of their N0+1 partner
    let source = |r: &StateRecord| if r.mirrored { Sector::new(n0 + 1, -r.sector.sz) } else { r.sector };
    let energy = |r: &StateRecord, k: u64| -> qdmft::Result<f64> {
        let op = match cfg.solver.method {
            Method::Pt => h.clone(),
            Method::Cr => build_reduced_hamiltonian(source(r), p)?,
        };
        expectation_sampled(&r.ansatz.build(&r.params)?, &op, &shots.reseeded(derive_seed(shots.seed, k)))
    };
    let representation = match cfg.solver.method {
        Method::Pt => Representation::Full,
        Method::Cr => Representation::Reduced,
    };
    let ground = eigenstate(&report.ground, report.ground.sector)?;
    let mut out = vec![(energy(&report.ground, 0)?, None)];
    for (k, r) in report.excited.iter().enumerate() {
        let e = energy(r, 1 + 2 * k as u64)?;
        let mode = EvalMode::Shots(shots.reseeded(derive_seed(shots.seed, 2 + 2 * k as u64)));
        let l = transition_amplitude(&ground, &eigenstate(r, source(r))?, 0, representation, &mode)?;
        out.push((e, Some(l)));
    }
    Ok(out)
}

pub fn solve(cfg: &RunConfig) -> Outcome {
    let p = cfg.params();
    let report = solve_spectrum(&p, &cfg.spectrum_options())?;
    let oracle = exact(&p)?;
    let shots = fixed_angle_estimates(cfg, &p, &report)?;
    let shift = if cfg.output.fermionic_energies { p.fermionic_offset() } else { 0.0 };

    let mut t = format!("two-site impurity spectrum: {}\n", describe(cfg, &p));
    if cfg.output.fermionic_energies {
        let _ = writeln!(t, "energies include the constant {shift} of the fermionic Hamiltonian");
    } else {
        let _ = writeln!(t, "energies in the Pauli-form convention (add {} for the fermionic Hamiltonian)", p.fermionic_offset());
    }
    let _ = writeln!(t, "{:<14} {:>12} {:>12} {:>24}", "quantity", "exact", "vqe", format!("optimal angles ({} shots)", cfg.solver.table_shots));
    let cell = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6}"));
    let _ = writeln!(t, "{:<14} {:>12} {:>12} {:>24}", "E0", cell(Some(oracle.e0 + shift)), cell(Some(report.ground.energy + shift)), cell(Some(shots[0].0 + shift)));
    for (r, (e_shot, l_shot)) in report.excited.iter().zip(&shots[1..]) {
        let n = r.sector.n_electrons;
        let ex = if oracle.n0 == report.ground.sector.n_electrons { level(&oracle, n, r.index) } else { None };
        let name = format!("E_{{{n},{}}}", r.index);
        let _ = writeln!(t, "{:<14} {:>12} {:>12} {:>24}", name, cell(ex.map(|x| x.0 + shift)), cell(Some(r.energy + shift)), cell(Some(e_shot + shift)));
        let name = format!("lambda_{{{n},{}}}", r.index);
        let _ = writeln!(t, "{:<14} {:>12} {:>12} {:>24}", name, cell(ex.map(|x| x.1)), cell(r.lambda), cell(*l_shot));
    }
    let _ = writeln!(t, "converged: {}", if report.converged { "yes" } else { "no" });
    for d in &report.diagnostics {
        let _ = writeln!(t, "  {d}");
    }

    #[derive(Serialize)]
    struct Angles<'a> {
        ground: &'a StateRecord,
        excited: &'a [StateRecord],
    }
    #[derive(Serialize)]
    struct SpectralFile<'a> {
        params: TwoSiteParams,
        fermionic_offset: f64,
        converged: bool,
        diagnostics: &'a [String],
        vqe: &'a SpectralData,
        exact: &'a SpectralData,
    }
    let dir = &cfg.output.dir;
    write(
        dir,
        "spectral.json",
        &json(&SpectralFile { params: p, fermionic_offset: p.fermionic_offset(), converged: report.converged, diagnostics: &report.diagnostics, vqe: &report.data, exact: &oracle }),
    )?;
    write(dir, "angles.json", &json(&Angles { ground: &report.ground, excited: &report.excited }))?;
    write(dir, "report.txt", &t)?;
    print!("{t}");
    Ok(if report.converged { EXIT_OK } else { EXIT_UNCONVERGED })
}

/// Curves for one spectral data set at the parameters it was solved at.
fn write_curves(cfg: &RunConfig, data: &SpectralData, at: &TwoSiteParams, report: &mut String) -> Result<(), Failure> {
    let o = &cfg.output;
    let grid = uniform_grid(o.dos_lo, o.dos_hi, o.dos_points)?;
    let g = GreensEvaluator::new(data.clone(), at.to_model(), o.dos_delta)?;
    let imp = dos_impurity(&g, &grid, o.dos_delta)?;
    let lat = dos_lattice(&g, &grid)?;
    let free = free_lattice_dos(at, &grid, o.dos_delta)?;
    let sigma = self_energy_curve(&g, &grid)?;
    write(&o.dir, "dos_imp.csv", &imp.to_csv())?;
    write(&o.dir, "dos_lat.csv", &lat.to_csv())?;
    write(&o.dir, "dos_lat_u0.csv", &free.to_csv())?;
    write(&o.dir, "self_energy.csv", &sigma.to_csv())?;
    let peaks: Vec<String> = lat.local_maxima().iter().map(|w| format!("{w:.3}")).collect();
    let _ = writeln!(report, "lattice DOS maxima at [{}]", peaks.join(", "));
    let _ = writeln!(report, "impurity DOS weight on grid {:.6}, lattice {:.6}", imp.trapezoid(), lat.trapezoid());
    match g.quasiparticle_weight() {
        Ok(z) => {
            let _ = writeln!(report, "z = {:.6}", z.z);
        }
        Err(e) => {
            let _ = writeln!(report, "z undefined: {e}");
        }
    }
    if let Ok(occ) = occupations(&g) {
        let _ = writeln!(report, "n_imp = {:.6}, n_lat = {:.6}", occ.n_imp, occ.n_lat);
    }
    Ok(())
}

fn dmft_report(cfg: &RunConfig, r: &DmftResult) -> String {
    let mut t = format!("DMFT loop: {}\n", describe(cfg, &cfg.params()));
    let _ = writeln!(t, "{} after {} iterations", if r.converged { "converged" } else { "not converged" }, r.iterations.len());
    if let Some(f) = &r.failure {
        let _ = writeln!(t, "stopped: {f}");
    }
    let _ = writeln!(t, "final V = {:.6}, eps2 = {:.6}, z = {:.6}", r.params.v, r.params.eps2, r.z);
    if let Some(last) = r.iterations.last() {
        let _ = writeln!(t, "last iteration: n_imp = {:.6}, n_lat = {:.6}", last.n_imp, last.n_lat);
    }
    t
}

pub fn dmft(cfg: &RunConfig) -> Outcome {
    let dc = cfg.dmft();
    let r = run(&dc)?;
    let dir = &cfg.output.dir;
    let mut t = dmft_report(cfg, &r);
    write(dir, "trace.csv", &r.trace_csv())?;
    if let (Some(d), Some(last)) = (&r.spectral, r.iterations.last()) {
        let at = TwoSiteParams { v: last.v, eps2: last.eps2, ..r.params };
        write_curves(cfg, d, &at, &mut t)?;
        #[derive(Serialize)]
        struct Final<'a> {
            converged: bool,
            failure: &'a Option<String>,
            params: TwoSiteParams,
            z: f64,
            solved_at: TwoSiteParams,
            spectral: &'a SpectralData,
        }
        write(dir, "spectral.json", &json(&Final { converged: r.converged, failure: &r.failure, params: r.params, z: r.z, solved_at: at, spectral: d }))?;
    }
    if !cfg.solver.u_sweep.is_empty() {
        let points = z_sweep(&dc, &cfg.solver.u_sweep, Exec::Parallel)?;
        write(dir, "z_sweep.csv", &z_sweep_csv(&points))?;
        let _ = writeln!(t, "z(U) scan over {} values written to z_sweep.csv", points.len());
    }
    write(dir, "report.txt", &t)?;
    print!("{t}");
    Ok(if r.converged { EXIT_OK } else { EXIT_UNCONVERGED })
}

pub fn dos(cfg: &RunConfig) -> Outcome {
    let p = cfg.params();
    let report = solve_spectrum(&p, &cfg.spectrum_options())?;
    let data = if cfg.solver.regularize { regularize(&report.data, &p.to_model())? } else { report.data.clone() };
    let mut t = format!("densities of states at fixed bath: {}\n", describe(cfg, &p));
    write_curves(cfg, &data, &p, &mut t)?;
    write(&cfg.output.dir, "spectral.json", &json(&data))?;
    write(&cfg.output.dir, "report.txt", &t)?;
    print!("{t}");
    Ok(if report.converged { EXIT_OK } else { EXIT_UNCONVERGED })
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let opts = VerifyOptions { draws: cfg.solver.draws, seed: cfg.seed(), fault: cfg.solver.fault, exec: Exec::Parallel };
    let r = run_verification(&opts)?;
    let mut t = r.to_text();
    if !r.passed() {
        let _ = writeln!(t, "failed: {}", r.failures().join(", "));
    }
    write(&cfg.output.dir, "report.txt", &t)?;
    print!("{t}");
    Ok(if r.passed() { EXIT_OK } else { EXIT_VERIFY })
}
