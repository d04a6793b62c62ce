use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use roughvol::pricing::{black_scholes_call, mc_price, modified_turbo_price, turbo_price};
use roughvol::rng::{standard_normals, SeedSpec};
use roughvol::{ModelParams, PricingRequest};
use roughvol_bench::spx_batch;

fn estimators(c: &mut Criterion) {
    let params = ModelParams::spx();
    let model = spx_batch(1000, 252);
    let request = PricingRequest::new((8..=15).map(|k| 10.0 * k as f64).collect(), 1.0).unwrap();
    let mut group = c.benchmark_group("estimators");
    group.bench_function("standard", |b| b.iter(|| black_box(mc_price(&model, &request, 0.0).unwrap())));
    group.bench_function("turbo", |b| b.iter(|| black_box(turbo_price(&model, &request, &params).unwrap())));
    group.bench_function("modified_turbo", |b| {
        b.iter(|| black_box(modified_turbo_price(&model, &request, &params).unwrap()))
    });
    group.finish();
}

fn primitives(c: &mut Criterion) {
    c.bench_function("black_scholes_call", |b| {
        b.iter(|| black_scholes_call(black_box(100.0), black_box(105.0), black_box(0.04), 0.01, 1.0).unwrap())
    });
    c.bench_function("normals/10k", |b| b.iter(|| black_box(standard_normals(SeedSpec::new(1, 0), 10_000))));
}

criterion_group!(benches, estimators, primitives);
criterion_main!(benches);
