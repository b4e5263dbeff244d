use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use opmod_bench::fixture;
use opmod_core::calculus::{apply_function, power_real, spectrum};
use opmod_core::commuting::joint_calculus;
use opmod_core::tensor::tensor_op;
use opmod_core::{z_from_bounded, CommutingPair, CompatibleSet, JointFn, ScalarFn, DEFAULT_TOL};
use std::hint::black_box;

fn z_transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("z_transform");
    for rank in [2, 4, 8] {
        let fx = fixture(rank, 3, 1);
        let t = fx.general.to_bounded().unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(rank * 3), &t, |b, t| {
            b.iter(|| z_from_bounded(black_box(t)))
        });
    }
    group.finish();
}

fn calculus(c: &mut Criterion) {
    let mut group = c.benchmark_group("calculus");
    let plane = CompatibleSet::plane();
    for rank in [2, 4, 8] {
        let fx = fixture(rank, 3, 2);
        let n = rank * 3;
        group.bench_with_input(BenchmarkId::new("spectrum", n), &fx.normal, |b, t| {
            b.iter(|| spectrum(t, DEFAULT_TOL))
        });
        group.bench_with_input(BenchmarkId::new("exp", n), &fx.normal, |b, t| {
            b.iter(|| apply_function(&ScalarFn::exp(), t, &plane, DEFAULT_TOL))
        });
        group.bench_with_input(BenchmarkId::new("sqrt", n), &fx.positive, |b, t| {
            b.iter(|| power_real(t, 0.5, DEFAULT_TOL))
        });
    }
    group.finish();
}

fn products(c: &mut Criterion) {
    let fx = fixture(2, 2, 3);
    let pair =
        CommutingPair::certified(fx.positive.clone(), fx.positive.clone(), DEFAULT_TOL).unwrap();
    let plane = CompatibleSet::plane();
    let f = JointFn::tensor(&ScalarFn::exp(), &ScalarFn::square());
    c.bench_function("joint_calculus/4", |b| {
        b.iter(|| joint_calculus(&f, &pair, &plane, &plane, DEFAULT_TOL))
    });
    c.bench_function("tensor/4x4", |b| {
        b.iter(|| tensor_op(&fx.general, &fx.normal))
    });
}

criterion_group!(benches, z_transform, calculus, products);
criterion_main!(benches);
