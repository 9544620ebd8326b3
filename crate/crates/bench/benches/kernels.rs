use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rdmgeo::algebra::eigendecompose;
use rdmgeo::exact::{assemble_sector, compute_rdms, ground_state, SolverOptions};
use rdmgeo::fock::build_hubbard;
use rdmgeo::geometry::{default_bounds, Audit, DEFAULT_NULL_TOL};
use rdmgeo::sdp::SolverConfig;
use rdmgeo::vrdm::{assemble, variational_ground_state, ConditionSet};

fn exact(c: &mut Criterion) {
    let ham = build_hubbard(6, 1.0, 10.0, true).unwrap();
    c.bench_function("fci hubbard(6) assemble", |b| b.iter(|| assemble_sector(black_box(&ham), 6, Some(0)).unwrap()));
    let hs = assemble_sector(&ham, 6, Some(0)).unwrap();
    c.bench_function("fci hubbard(6) lanczos", |b| b.iter(|| ground_state(black_box(&hs), &SolverOptions::default()).unwrap()));
    let gs = ground_state(&hs, &SolverOptions::default()).unwrap();
    c.bench_function("rdms hubbard(6)", |b| b.iter(|| compute_rdms(black_box(&gs.wavefunction)).unwrap()));
    let r = compute_rdms(&gs.wavefunction).unwrap();
    c.bench_function("eigendecompose G(12)", |b| b.iter(|| eigendecompose(black_box(&r.g)).unwrap()));
}

fn variational(c: &mut Criterion) {
    let ham = build_hubbard(4, 1.0, 4.0, true).unwrap();
    let mut g = c.benchmark_group("vrdm hubbard(4)");
    g.sample_size(10);
    g.bench_function("assemble full", |b| b.iter(|| assemble(black_box(&ham), 4, &ConditionSet::full()).unwrap()));
    g.bench_function("solve dqg", |b| {
        b.iter(|| variational_ground_state(black_box(&ham), 4, &ConditionSet::dqg(), &SolverConfig::default()).unwrap())
    });
    g.bench_function("solve full", |b| {
        b.iter(|| variational_ground_state(black_box(&ham), 4, &ConditionSet::full(), &SolverConfig::default()).unwrap())
    });
    g.finish();
}

fn audit(c: &mut Criterion) {
    let ham = build_hubbard(4, 1.0, 4.0, true).unwrap();
    let v = variational_ground_state(&ham, 4, &ConditionSet::full(), &SolverConfig::default()).unwrap();
    let a = Audit::new(v.d, v.g, v.q, DEFAULT_NULL_TOL).unwrap();
    let bounds = default_bounds(8, 4).unwrap();
    let mut g = c.benchmark_group("audit hubbard(4)");
    g.sample_size(10);
    g.bench_function("descriptors", |b| b.iter(|| black_box(&a).descriptors()));
    g.bench_function("inequality grids", |b| b.iter(|| black_box(&a).inequality_conditions(&bounds).unwrap()));
    g.finish();
}

criterion_group!(benches, exact, variational, audit);
criterion_main!(benches);
