use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use qdmft::dmft::{z_sweep, DmftConfig};
use qdmft::greens::{dos_lattice, uniform_grid, GreensEvaluator};
use qdmft::hamiltonian::{build_two_site_hamiltonian, number_operator, two_site_spin_z};
use qdmft::model::TwoSiteParams;
use qdmft::oracle::exact_spectral_data;
use qdmft::par::Exec;
use qdmft::sim::{expectation_sampled, EvalMode, ShotConfig};
use qdmft::verify::{run_verification, VerifyOptions};
use qdmft::vqe::{find_ground_state, Ansatz, AnsatzKind, Labeling, VqeOptions};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn shot_sampling(c: &mut Criterion) {
    let p = TwoSiteParams::half_filled(4.0, 0.745356);
    let h = build_two_site_hamiltonian(&p).unwrap();
    let circuit = Ansatz::new(AnsatzKind::Pt4).build(&[0.3; 8]).unwrap();
    let mut g = c.benchmark_group("shot_sampling");
    for (name, exec) in MODES {
        let cfg = ShotConfig { exec, ..ShotConfig::new(100_000, 7) };
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| expectation_sampled(black_box(&circuit), &h, &cfg).unwrap()));
    }
    g.finish();
}

fn vqe_restarts(c: &mut Criterion) {
    let p = TwoSiteParams::half_filled(4.0, 0.745356);
    let h = build_two_site_hamiltonian(&p).unwrap();
    let (number, spin_z) = (number_operator(4), two_site_spin_z());
    let labeling = Labeling::Measure { number: &number, spin_z: &spin_z };
    let mut g = c.benchmark_group("vqe_restarts");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = VqeOptions { restarts: 8, exec, ..VqeOptions::default() };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| find_ground_state(&h, Ansatz::new(AnsatzKind::Pt4), &EvalMode::Exact, &opts, &labeling).unwrap())
        });
    }
    g.finish();
}

fn lattice_dos(c: &mut Criterion) {
    let p = TwoSiteParams::half_filled(4.0, 0.745356);
    let d = exact_spectral_data(&build_two_site_hamiltonian(&p).unwrap(), &two_site_spin_z(), &[0]).unwrap();
    let grid = uniform_grid(-6.0, 6.0, 20_001).unwrap();
    let mut grp = c.benchmark_group("lattice_dos");
    for (name, exec) in MODES {
        let mut g = GreensEvaluator::new(d.clone(), p.to_model(), 0.05).unwrap();
        g.exec = exec;
        grp.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| dos_lattice(&g, black_box(&grid)).unwrap()));
    }
    grp.finish();
}

fn z_sweep_batch(c: &mut Criterion) {
    let base = DmftConfig::ph(4.0);
    let us = [1.0, 2.0, 3.0, 4.0, 5.0, 5.5];
    let mut g = c.benchmark_group("z_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| z_sweep(&base, black_box(&us), exec).unwrap()));
    }
    g.finish();
}

fn verification(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_suites");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = VerifyOptions { draws: 20, exec, ..Default::default() };
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| run_verification(black_box(&opts)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, shot_sampling, vqe_restarts, lattice_dos, z_sweep_batch, verification);
criterion_main!(benches);
