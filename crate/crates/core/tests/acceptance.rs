//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qdmft --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use qdmft::dmft::{run_general, run_ph_symmetric, z_sweep, DmftConfig};
use qdmft::greens::{dos_impurity, uniform_grid, GreensEvaluator};
use qdmft::hamiltonian::{build_two_site_hamiltonian, two_site_spin_z};
use qdmft::model::TwoSiteParams;
use qdmft::oracle::exact_spectral_data;
use qdmft::par::{self, Exec};
use qdmft::reduced::build_reduced_hamiltonian;
use qdmft::sim::sampling::{sample_counts, stream_rng};
use qdmft::sim::{apply_spam, expectation_sampled, spam_correct, EvalMode, ReadoutError, ShotConfig, SpamModel};
use qdmft::spectral::SpectralData;
use qdmft::verify::{run_verification, Fault, VerifyOptions};
use qdmft::vqe::{solve_spectrum, AnsatzKind, Method, SpectrumOptions, SpectrumReport};
use rand::Rng;

const V_U4: f64 = 0.745356;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact(p: &TwoSiteParams) -> SpectralData {
    exact_spectral_data(&build_two_site_hamiltonian(p).unwrap(), &two_site_spin_z(), &[0]).unwrap()
}

/// `(E0, E_{3,0}, E_{3,2}, lambda)` at half filling.
fn table_one(d: &SpectralData) -> [f64; 4] {
    [d.e0, d.e0 + d.particle[0].omega, d.e0 + d.particle[2].omega, d.particle[0].lambda[0]]
}

fn run_method(p: &TwoSiteParams, method: Method) -> SpectrumReport {
    let mut o = SpectrumOptions::new(method, EvalMode::Exact);
    o.full_ansatz = AnsatzKind::Pt4;
    solve_spectrum(p, &o).unwrap()
}

fn criterion_1() -> Outcome {
    let p = TwoSiteParams::half_filled(4.0, V_U4);
    let reference = [-1.795, -1.247, 1.247, 0.262];
    let oracle = table_one(&exact(&p));
    let mut worst: f64 = 0.0;
    for (a, b) in oracle.iter().zip(&reference) {
        worst = worst.max((a - b).abs());
    }
    let mut detail = format!("oracle vs table {worst:.1e}");
    for (name, method) in [("PT4", Method::Pt), ("CR2", Method::Cr)] {
        let r = run_method(&p, method);
        let got = table_one(&r.data);
        let err = got.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        detail += &format!(", {name} vs oracle {err:.1e}");
        worst = worst.max(err);
    }
    ensure(worst < 1e-3, detail)
}

fn criterion_2() -> Outcome {
    let p = TwoSiteParams::half_filled(4.0, V_U4);
    let h = build_two_site_hamiltonian(&p).unwrap();
    let oracle = table_one(&exact(&p));
    let mut lines = Vec::new();
    for (name, method) in [("PT4", Method::Pt), ("CR2", Method::Cr)] {
        let r = run_method(&p, method);
        // optimal-angle circuits with the operator each was optimized against
        let mut states = vec![(r.ground.clone(), oracle[0])];
        for (k, target) in [(0, oracle[1]), (2, oracle[2])] {
            let rec = r.excited.iter().find(|s| s.sector.n_electrons == 3 && s.index == k && !s.mirrored).unwrap();
            states.push((rec.clone(), target));
        }
        let ops: Vec<_> = states
            .iter()
            .map(|(s, _)| match method {
                Method::Pt => h.clone(),
                Method::Cr => build_reduced_hamiltonian(s.sector, &p).unwrap(),
            })
            .collect();
        let good = par::map_range(Exec::Parallel, 100, |seed| {
            states.iter().zip(&ops).all(|((s, target), op)| {
                let c = s.ansatz.build(&s.params).unwrap();
                let e = expectation_sampled(&c, op, &ShotConfig::new(5000, seed as u64)).unwrap();
                ((e - target) / target).abs() <= 0.03
            })
        })
        .into_iter()
        .filter(|&b| b)
        .count();
        lines.push((name, good));
    }
    let detail = lines.iter().map(|(n, g)| format!("{n} {g}/100 runs within 3%")).collect::<Vec<_>>().join(", ");
    ensure(lines.iter().all(|(_, g)| *g >= 95), detail)
}

fn criterion_3() -> Outcome {
    let r = run_ph_symmetric(&DmftConfig::ph(4.0)).unwrap();
    let n = r.iterations.len();
    let v = r.final_v();
    let mut ok = r.converged && n <= 10 && (v - V_U4).abs() < 0.01;
    let mut detail = format!("U=4: {n} iterations, V={v:.5}");

    let base = DmftConfig { eta: 1e-4, max_iters: 100, ..DmftConfig::ph(4.0) };
    let sweep = z_sweep(&base, &[1.0, 2.0, 3.0, 4.0, 5.0, 7.0], Exec::Parallel).unwrap();
    let mut worst: f64 = 0.0;
    for q in &sweep[..5] {
        worst = worst.max((q.z - (1.0 - (q.u / 6.0).powi(2))).abs());
        ok &= q.converged;
    }
    let v7 = sweep[5].v;
    ok &= worst < 0.01 && v7 < 0.05;
    detail += &format!(", max |z-(1-(U/6)^2)| = {worst:.1e}, U=7 V={v7:.1e}");
    ensure(ok, detail)
}

fn criterion_4() -> Outcome {
    let r = run_general(&DmftConfig::general(4.0, -0.16016)).unwrap();
    let last = r.iterations.last().unwrap();
    let (e2, v) = (r.params.eps2, r.params.v);
    let mut ok = r.converged && (e2 + 0.29764).abs() < 1e-3 && (v - 0.93709).abs() < 1e-3 && (last.n_imp - 0.5).abs() < 1e-3;
    let mut detail = format!("eps2={e2:.5}, V={v:.5}, n_imp={:.5}", last.n_imp);

    // energies carry the constant offset of the fermionic form
    let p = TwoSiteParams::new(4.0, -0.16016, -0.29764, 0.93709);
    let table: [[f64; 4]; 4] = [
        [-1.033, -1.033, 0.896, 0.896],
        [0.0, 0.217, 0.033, 0.0],
        [-0.624, -0.624, 4.212, 4.212],
        [0.644, 0.0, 0.106, 0.0],
    ];
    let entries = |d: &SpectralData| -> [[f64; 4]; 4] {
        let mut out = [[f64::NAN; 4]; 4];
        let shift = p.fermionic_offset();
        for q in &d.hole {
            if let (Some(s), Some(n)) = (q.sector, q.state) {
                if s.n_electrons == 1 && n < 4 {
                    out[0][n] = d.e0 - q.omega + shift;
                    out[1][n] = q.lambda[0];
                }
            }
        }
        for q in &d.particle {
            if let (Some(s), Some(n)) = (q.sector, q.state) {
                if s.n_electrons == 3 && n < 4 {
                    out[2][n] = d.e0 + q.omega + shift;
                    out[3][n] = q.lambda[0];
                }
            }
        }
        out
    };
    let gap = |x: f64, y: f64| if x.is_finite() && y.is_finite() { (x - y).abs() } else { f64::INFINITY };
    let strict = |a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]| a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| gap(*x, *y)).fold(0.0, f64::max);
    // spin partners (n, n+1) are exactly degenerate, so their order is a
    // labeling convention: compare each pair as an unordered set of (E, lambda)
    let paired = |a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]| {
        let mut worst: f64 = 0.0;
        for (e, l) in [(0, 1), (2, 3)] {
            for n in [0, 2] {
                let pair = |m: &[[f64; 4]; 4], i: usize| gap(a[e][n + i], m[e][n + i]).max(gap(a[l][n + i], m[l][n + i]));
                let same = pair(b, 0).max(pair(b, 1));
                let swapped = gap(a[e][n], b[e][n + 1]).max(gap(a[l][n], b[l][n + 1])).max(gap(a[e][n + 1], b[e][n])).max(gap(a[l][n + 1], b[l][n]));
                worst = worst.max(same.min(swapped));
            }
        }
        worst
    };
    let o = exact(&p);
    let oracle = entries(&o);
    let mut opts = SpectrumOptions::new(Method::Pt, EvalMode::Exact);
    opts.full_ansatz = AnsatzKind::Pt4x;
    let vqe = entries(&solve_spectrum(&p, &opts).unwrap().data);
    let (d_table, d_vqe) = (paired(&oracle, &table), strict(&vqe, &oracle));
    let e0 = o.e0 + p.fermionic_offset();
    ok &= d_table < 1e-3 && d_vqe < 1e-3 && (e0 + 1.837).abs() < 1e-3;
    detail += &format!("; 16 entries: oracle vs table {d_table:.1e} (label-by-label {:.1e}), PT4X vs oracle {d_vqe:.1e}; E0={e0:.4}", strict(&oracle, &table));
    ensure(ok, detail)
}

fn criterion_5() -> Outcome {
    let shots = |regularize: bool, seed: u64| DmftConfig {
        mode: EvalMode::Shots(ShotConfig::new(10000, seed)),
        regularize,
        ..DmftConfig::ph(4.0)
    };
    let raw = par::map_range(Exec::Parallel, 10, |s| run_ph_symmetric(&shots(false, s as u64)).map(|r| r.converged).unwrap_or(false));
    let failed = raw.iter().filter(|c| !**c).count();
    let reg = par::map_range(Exec::Parallel, 10, |s| {
        run_ph_symmetric(&shots(true, s as u64)).map(|r| r.converged && (r.final_v() - 0.745).abs() <= 0.03).unwrap_or(false)
    });
    let good = reg.iter().filter(|c| **c).count();
    ensure(failed >= 8 && good >= 9, format!("unregularized: {failed}/10 fail; regularized: {good}/10 converge near 0.745"))
}

fn criterion_6() -> Outcome {
    let r = run_verification(&VerifyOptions::default()).unwrap();
    let worst = r.suites.iter().map(|s| format!("{} {:.0e}", s.name, s.max_error)).collect::<Vec<_>>().join(", ");
    let faulty = run_verification(&VerifyOptions { draws: 3, fault: Fault::ZString, ..Default::default() }).unwrap();
    let caught = faulty.failures() == vec!["ladder identities"];
    ensure(r.passed() && caught && r.draws.len() == 20, format!("{worst}; injected fault caught: {caught}"))
}

fn criterion_7() -> Outcome {
    let r = run_ph_symmetric(&DmftConfig::ph(4.0)).unwrap();
    let lat = r.dos_lat.as_ref().unwrap();
    let peaks = lat.local_maxima();
    let free = r.dos_lat_free.as_ref().unwrap();
    let mu = r.params.mu;
    let support: Vec<f64> = free.omega.iter().zip(&free.values).filter(|(_, v)| **v > 1e-9).map(|(w, _)| *w).collect();
    let width = support.last().unwrap() - support.first().unwrap();
    let step = free.omega[1] - free.omega[0];

    let g = GreensEvaluator::new(r.spectral.clone().unwrap(), r.params.to_model(), 0.02).unwrap();
    let grid = uniform_grid(-12.0, 12.0, 24001).unwrap();
    let integral = dos_impurity(&g, &grid, 0.02).unwrap().trapezoid();

    let ok = peaks.len() == 3 && (free.argmax() + mu).abs() <= step && (width - 4.0).abs() <= 2.0 * step && ((integral - 2.0) / 2.0).abs() < 0.01;
    ensure(
        ok,
        format!(
            "lattice peaks at {:?}; U=0 max at {:.3} (-mu = {:.3}), width {width:.3}; impurity integral {integral:.4}",
            peaks.iter().map(|w| (w * 1e3).round() / 1e3).collect::<Vec<_>>(),
            free.argmax(),
            -mu
        ),
    )
}

fn criterion_8() -> Outcome {
    let model = SpamModel::Factorized(vec![
        ReadoutError { p01: 0.02, p10: 0.05 },
        ReadoutError { p01: 0.03, p10: 0.06 },
        ReadoutError { p01: 0.015, p10: 0.04 },
        ReadoutError { p01: 0.025, p10: 0.07 },
    ]);
    let l1 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>();
    let per = par::map_range(Exec::Parallel, 100, |seed| {
        let mut rng = stream_rng(0xACCE, seed as u64);
        let w: Vec<f64> = (0..16).map(|_| -rng.random_range(1e-12f64..1.0).ln()).collect();
        let s: f64 = w.iter().sum();
        let truth: Vec<f64> = w.iter().map(|x| x / s).collect();
        let noisy = apply_spam(&truth, &model).unwrap();
        let shots = 5000;
        let counts = sample_counts(&noisy, shots, &mut rng).unwrap();
        let raw: Vec<f64> = counts.iter().map(|&c| c as f64 / shots as f64).collect();
        let fixed = spam_correct(&raw, &model, false).unwrap();
        (l1(&raw, &truth), l1(&fixed, &truth))
    });
    let raw = per.iter().map(|p| p.0).sum::<f64>() / 100.0;
    let fixed = per.iter().map(|p| p.1).sum::<f64>() / 100.0;
    ensure(fixed < raw, format!("mean L1 to truth: raw {raw:.4}, corrected {fixed:.4}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exact-mode VQE energies and weight", criterion_1),
        ("5000-shot envelope at optimal angles", criterion_2),
        ("half-filled DMFT fixed point and z(U)", criterion_3),
        ("off-half-filling DMFT and full level table", criterion_4),
        ("regularization needed at 10000 shots", criterion_5),
        ("oracle property suites", criterion_6),
        ("density-of-states structure", criterion_7),
        ("readout-error correction", criterion_8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !filter.is_empty() && !filter.iter().any(|a| a == &id.to_string()) {
            continue;
        }
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("PASS criterion {id} ({name}): {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}): {d} [{secs:.1}s]")
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
