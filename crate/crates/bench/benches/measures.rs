use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use refent::entropy::RenyiOrder;
use refent::prmi::{doubly_minimized_prmi, AltMinOptions};
use refent::reflected::{cc_reflected, min_reflected, minimized_reflected, renyi_reflected, MinimizeOptions};
use refent::Pmf;
use refent_bench::{workload, DIMS};

fn reflected(c: &mut Criterion) {
    let mut g = c.benchmark_group("reflected");
    for (d_a, d_b) in DIMS {
        let rho = workload(1, d_a, d_b);
        let id = format!("{d_a}x{d_b}");
        g.bench_with_input(BenchmarkId::new("min_reflected", &id), &rho, |b, r| {
            b.iter(|| min_reflected(black_box(r)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("renyi_m2_n2", &id), &rho, |b, r| {
            b.iter(|| renyi_reflected(black_box(r), 2.0, RenyiOrder::Finite(2.0)).unwrap())
        });
    }
    g.finish();
}

fn alternating(c: &mut Criterion) {
    let mut g = c.benchmark_group("doubly_minimized_prmi");
    let opts = AltMinOptions::default();
    for (d_a, d_b) in DIMS {
        let rho = workload(2, d_a, d_b);
        g.bench_with_input(BenchmarkId::new("alpha_half", format!("{d_a}x{d_b}")), &rho, |b, r| {
            b.iter(|| doubly_minimized_prmi(black_box(r), 0.5, &opts).unwrap())
        });
    }
    g.finish();
}

fn minimized(c: &mut Criterion) {
    let mut g = c.benchmark_group("minimized_reflected");
    g.sample_size(10);
    let opts = MinimizeOptions::default();
    let rho = workload(3, 2, 2);
    g.bench_function("n2_2x2", |b| {
        b.iter(|| minimized_reflected(black_box(&rho), RenyiOrder::Finite(2.0), &opts).unwrap())
    });
    g.finish();
}

fn classical(c: &mut Criterion) {
    let p = Pmf::random(4, 4, 4).unwrap();
    c.bench_function("cc_reflected_inf_4x4", |b| {
        b.iter(|| cc_reflected(black_box(&p), RenyiOrder::Infinity).unwrap())
    });
}

criterion_group!(benches, reflected, alternating, minimized, classical);
criterion_main!(benches);
