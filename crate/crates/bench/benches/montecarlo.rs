use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qft_core::mc::{audit_moment_condition, estimate_tail, estimate_truncated_mgf, TailQuery};
use qft_core::*;

fn tail(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate_tail");
    g.sample_size(10);
    for kind in [NoiseKind::Gaussian, NoiseKind::Rademacher, NoiseKind::CenteredExponential] {
        let model = NoiseModel::new(kind, 10, 1);
        let q = TailQuery::l2(23.2, 100_000, 0.99, 0.14);
        g.bench_function(kind.as_str(), |b| b.iter(|| estimate_tail(&model, black_box(&q)).unwrap()));
    }
    g.finish();
}

fn mgf(c: &mut Criterion) {
    let mut g = c.benchmark_group("mc_moments");
    g.sample_size(10);
    let model = NoiseModel::new(NoiseKind::Gaussian, 5, 1);
    let s = quadform_spec(&linalg::Spectrum::new(vec![1.0, 0.8, 0.5, 0.2, 0.1]).unwrap()).unwrap();
    g.bench_function("truncated_mgf_1e5", |b| {
        b.iter(|| estimate_truncated_mgf(&model, &s, black_box(0.5), f64::INFINITY, 100_000).unwrap())
    });
    let rad = NoiseModel::new(NoiseKind::Rademacher, 5, 1);
    g.bench_function("audit_20x1e5", |b| b.iter(|| audit_moment_condition(&rad, 3.0, 20, 100_000).unwrap()));
    g.finish();
}

criterion_group!(benches, tail, mgf);
criterion_main!(benches);
