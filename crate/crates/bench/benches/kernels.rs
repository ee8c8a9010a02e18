use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use epmod::ep::random_ep;
use epmod::linalg::factorize;
use epmod::products::ep_product_conditions;
use epmod::pseudoinverse::{default_schedule, mp_tikhonov};
use epmod::{is_ep, pinv, NumericalContext};
use epmod_bench::{commuting_pair, half_rank};

const SIZES: [usize; 3] = [4, 8, 16];

fn svd(c: &mut Criterion) {
    let mut group = c.benchmark_group("svd");
    for n in SIZES {
        let t = half_rank(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| b.iter(|| factorize(black_box(t))));
    }
    group.finish();
}

fn pseudoinverse(c: &mut Criterion) {
    let ctx = NumericalContext::default();
    let mut group = c.benchmark_group("pinv");
    for n in SIZES {
        let t = half_rank(n, 2);
        group.bench_with_input(BenchmarkId::new("svd", n), &t, |b, t| b.iter(|| pinv(black_box(t), &ctx)));
        let schedule = default_schedule();
        group.bench_with_input(BenchmarkId::new("tikhonov", n), &t, |b, t| {
            b.iter(|| mp_tikhonov(black_box(t), &schedule, &ctx))
        });
    }
    group.finish();
}

fn ep_test(c: &mut Criterion) {
    let ctx = NumericalContext::default();
    let mut group = c.benchmark_group("is_ep");
    for n in SIZES {
        let t = random_ep(n, n / 2, 3).expect("valid rank");
        group.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| b.iter(|| is_ep(black_box(t), &ctx)));
    }
    group.finish();
}

fn products(c: &mut Criterion) {
    let ctx = NumericalContext::default();
    let mut group = c.benchmark_group("product_conditions");
    for n in SIZES {
        let (t, s) = commuting_pair(n, 4);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(t, s), |b, (t, s)| {
            b.iter(|| ep_product_conditions(black_box(t), black_box(s), &ctx))
        });
    }
    group.finish();
}

criterion_group!(benches, svd, pseudoinverse, ep_test, products);
criterion_main!(benches);
