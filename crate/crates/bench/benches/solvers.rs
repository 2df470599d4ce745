use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mrint::bethe::{solve_m1, solve_m_general, EnergyMap, SolveOptions};
use mrint::dynamics::{evolve, photon_state, time_grid};
use mrint::lax::{check_ybe, vacuum_for, Chain};
use mrint::oracle::{diag_sector, sector_basis};
use mrint::{ModeKind, C64};
use mrint_bench::bs_model;

fn bethe(c: &mut Criterion) {
    let mut g = c.benchmark_group("bethe");
    let m2 = bs_model(2, 0.0, 8);
    let vac = vacuum_for(&m2.params, ModeKind::Su11Boson, 1).unwrap();
    let emap = EnergyMap::for_model(&m2.params, ModeKind::Su11Boson, 1, &vac).unwrap();
    g.bench_function("m1_two_atoms", |b| b.iter(|| solve_m1(black_box(&vac), Some(&emap)).unwrap()));
    let m1 = bs_model(1, 0.3, 16);
    let vac1 = vacuum_for(&m1.params, ModeKind::Su11Boson, 1).unwrap();
    for m in [2usize, 4] {
        g.bench_with_input(BenchmarkId::new("general_one_atom", m), &m, |b, &m| {
            b.iter(|| solve_m_general(&vac1, m, None, &SolveOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    let model = bs_model(2, 0.3, 16);
    for m in [1usize, 4, 6] {
        let basis = sector_basis(&model.spec, m).unwrap();
        g.bench_with_input(BenchmarkId::new("diag_sector", m), &basis, |b, basis| {
            b.iter(|| diag_sector(&model.h, basis, None).unwrap())
        });
    }
    g.finish();
}

fn integrability(c: &mut Criterion) {
    let model = bs_model(2, 0.2, 8);
    let chain = Chain::new(&model.params, ModeKind::Su11Boson, &model.spec).unwrap();
    c.bench_function("rtt_two_atoms", |b| {
        b.iter(|| check_ybe(&chain, black_box(C64::new(0.3, 0.1)), C64::new(-0.4, 0.2)).unwrap())
    });
}

fn dynamics(c: &mut Criterion) {
    let model = bs_model(2, 0.0, 12);
    let psi = photon_state(&model.spec, 1);
    let grid = time_grid(7.0, 2048);
    c.bench_function("rabi_evolution", |b| b.iter(|| evolve(&model.h, &model.spec, &psi, &[], &grid).unwrap()));
}

criterion_group!(benches, bethe, oracle, integrability, dynamics);
criterion_main!(benches);
