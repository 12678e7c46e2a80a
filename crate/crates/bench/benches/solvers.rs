use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use degwave::elliptic::solve_degenerate_poisson;
use degwave::estimators::{g_functional, theta_functional};
use degwave::wave::solve_weak;
use degwave_bench::{load, manufactured, solved};
use std::hint::black_box;

fn wave(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_weak");
    group.sample_size(10);
    for n in [128, 256, 512] {
        let (p, data) = manufactured(n, 1.5);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| solve_weak(black_box(&p), black_box(&data)).unwrap())
        });
    }
    group.finish();
}

fn elliptic(c: &mut Criterion) {
    let mut group = c.benchmark_group("degenerate_poisson");
    for alpha in [0.5, 1.5] {
        let g = load(4096, alpha);
        group.bench_with_input(BenchmarkId::from_parameter(alpha), &alpha, |b, _| {
            b.iter(|| solve_degenerate_poisson(black_box(&g)).unwrap())
        });
    }
    group.finish();
}

fn functionals(c: &mut Criterion) {
    let sol = solved(256, 1.0);
    c.bench_function("theta_functional", |b| {
        b.iter(|| theta_functional(black_box(&sol.u), 0.05).unwrap())
    });
    c.bench_function("g_functional", |b| {
        b.iter(|| g_functional(black_box(&sol.u), 0.05, None).unwrap())
    });
}

criterion_group!(benches, wave, elliptic, functionals);
criterion_main!(benches);
