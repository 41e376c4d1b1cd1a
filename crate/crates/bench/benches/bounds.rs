use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qft_core::linalg::Spectrum;
use qft_core::*;

fn spec(p: usize) -> QuadFormSpec {
    let eigs: Vec<f64> = (0..p).map(|i| 1.0 / (1.0 + i as f64)).collect();
    quadform_spec(&Spectrum::new(eigs).unwrap()).unwrap()
}

fn roots(c: &mut Criterion) {
    c.bench_function("solve_w_c", |b| b.iter(|| solve_w_c(black_box(17.0), black_box(30.0)).unwrap()));
    let s = spec(200);
    c.bench_function("critical_quantities_bform_p200", |b| {
        b.iter(|| critical_quantities_bform(black_box(40.0), &s).unwrap())
    });
}

fn quantiles(c: &mut Criterion) {
    let prof = MomentProfile::standard(20.0).unwrap();
    c.bench_function("l2_quantile", |b| b.iter(|| l2_quantile(&prof, 30, black_box(3.0)).unwrap()));
    let s = spec(50);
    c.bench_function("bform_quantile_p50", |b| b.iter(|| bform_quantile(&prof, &s, black_box(3.0)).unwrap()));
    c.bench_function("bform_large_dev_tail_p50", |b| {
        b.iter(|| bform_large_dev_tail(&prof, &s, black_box(40.0)).unwrap())
    });
    let cons = NormConstraint::sup_norm(10.0, 100, 2.0).unwrap();
    c.bench_function("solve_z_s", |b| b.iter(|| solve_z_s(&cons, black_box(10)).unwrap()));
}

criterion_group!(benches, roots, quantiles);
criterion_main!(benches);
