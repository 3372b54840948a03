//! Timings of the numerical kernels behind the `hw` reports.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use hw_bench::{coefficients, qplus_samples};
use hw_core::bergman::BergmanTable;
use hw_core::linearized::rayleigh_sample;
use hw_core::spectral::ConvolutionPlan;
use hw_core::variational::{solve_qbeta, LaguerreGalerkin, QBetaConfig};

fn convolution(c: &mut Criterion) {
    let (grid, q) = qplus_samples();
    let plan = ConvolutionPlan::new(grid);
    c.bench_function("sigma_convolution", |b| {
        b.iter(|| plan.convolve(black_box(&q), black_box(&q)))
    });
    c.bench_function("sigma_l4_fourth", |b| b.iter(|| plan.l4_fourth(black_box(&q))));
}

fn galerkin(c: &mut Criterion) {
    let basis = Arc::new(LaguerreGalerkin::new(24, 8, 81).expect("basis"));
    let x = coefficients(basis.dim());
    let u = basis.synthesize(&x);
    c.bench_function("galerkin_synthesize", |b| b.iter(|| basis.synthesize(black_box(&x))));
    c.bench_function("galerkin_cubic", |b| b.iter(|| basis.cubic(black_box(&u))));
    let d = basis.form_weights(0.9);
    c.bench_function("galerkin_linearized_real", |b| {
        b.iter(|| basis.linearized_real(black_box(&u), &d))
    });
}

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solvers");
    group.sample_size(10);
    group.bench_function("bergman_table_41", |b| b.iter(|| BergmanTable::compute(black_box(41))));
    let config = QBetaConfig {
        nj: 12,
        nk: 4,
        order: 41,
        ..QBetaConfig::default()
    };
    group.bench_function("qbeta_0.9_small", |b| b.iter(|| solve_qbeta(black_box(0.9), &config)));
    group.bench_function("rayleigh_20", |b| b.iter(|| rayleigh_sample(black_box(20), 7)));
    group.finish();
}

criterion_group!(benches, convolution, galerkin, solvers);
criterion_main!(benches);
