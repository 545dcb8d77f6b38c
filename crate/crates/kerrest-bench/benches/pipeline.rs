use criterion::{black_box, criterion_group, criterion_main, Criterion};

use kerrest::channels::{lossy_kerr_state, LossyKerrParams};
use kerrest::estimation::{qfim, quantum_info, DEFAULT_EPS_EIG};
use kerrest::fock::hermitian_eig;
use kerrest::measurements::{fim_homodyne, optimize_phase, PhaseCriterion, QuadSettings};
use kerrest_bench::{dephasing_model, lossy_model};
use num_complex::Complex64 as C64;

fn bench_state_construction(c: &mut Criterion) {
    let p = LossyKerrParams::new(0.5, 0.1, C64::new(2.0, 0.0)).unwrap();
    c.bench_function("lossy_kerr_state d=30", |b| {
        b.iter(|| lossy_kerr_state(black_box(&p), black_box(30)).unwrap())
    });
}

fn bench_eigendecomposition(c: &mut Criterion) {
    let rho = lossy_model(0.5, 0.1, 4.0).rho().clone();
    c.bench_function("hermitian_eig d=21", |b| {
        b.iter(|| hermitian_eig(black_box(&rho)).unwrap())
    });
}

fn bench_qfim(c: &mut Criterion) {
    c.bench_function("qfim lossy nbar=1", |b| {
        b.iter(|| {
            let model = lossy_model(0.5, 0.1, 1.0);
            qfim(black_box(&model), DEFAULT_EPS_EIG).unwrap()
        })
    });
    c.bench_function("quantum_info dephasing nbar=2", |b| {
        b.iter(|| {
            let model = dephasing_model(0.3, 0.1, 2.0);
            quantum_info(black_box(&model), DEFAULT_EPS_EIG).unwrap()
        })
    });
}

fn bench_homodyne_fim(c: &mut Criterion) {
    let model = lossy_model(0.5, 0.1, 1.0);
    let settings = QuadSettings::default();
    c.bench_function("fim_homodyne nbar=1", |b| {
        b.iter(|| fim_homodyne(black_box(&model), black_box(0.4), &settings).unwrap())
    });
}

fn bench_phase_optimization(c: &mut Criterion) {
    let model = lossy_model(0.5, 0.1, 0.5);
    let settings = QuadSettings::default();
    let mut group = c.benchmark_group("optimize_phase");
    group.sample_size(10);
    group.bench_function("criterion_a nbar=0.5", |b| {
        b.iter(|| optimize_phase(black_box(&model), PhaseCriterion::A, &settings).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_state_construction,
    bench_eigendecomposition,
    bench_qfim,
    bench_homodyne_fim,
    bench_phase_optimization,
);
criterion_main!(benches);
