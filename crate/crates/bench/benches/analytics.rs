use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use outage_core::coding::{decoding_prob, gf_rank, optimize_redundancy, CodeParams, GfMatrix, Objective};
use outage_core::durations::diversity_poly;
use outage_core::{Durations, LinkParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn durations(c: &mut Criterion) {
    let params = LinkParams::new(1.0, 0.1, 4.0, 1.0, 1.0).unwrap();
    let d = Durations::new(&params);
    c.bench_function("diversity_poly n=200", |b| {
        b.iter(|| diversity_poly(black_box(200), 0.1, 0.5))
    });
    c.bench_function("joint_success n=1..50", |b| {
        b.iter(|| (1..=50).map(|n| d.joint_success(black_box(n))).sum::<f64>())
    });
    c.bench_function("expected_success_duration", |b| {
        b.iter(|| d.expected_success_duration(black_box(1e-10)).unwrap())
    });
    c.bench_function("success_count_distribution n=30", |b| {
        b.iter(|| d.success_count_distribution(black_box(30)).unwrap())
    });
    c.bench_function("outage_duration_pmf n=40", |b| {
        b.iter(|| d.outage_duration_pmf(black_box(40)).unwrap())
    });
}

fn coding(c: &mut Criterion) {
    let code = CodeParams::new(10, 30, 2).unwrap();
    c.bench_function("decoding_prob k=10 m=30", |b| {
        b.iter(|| decoding_prob(black_box(30), &code))
    });
    c.bench_function("optimize_redundancy k=5 n=5..30", |b| {
        b.iter(|| {
            optimize_redundancy(
                5,
                2,
                |n| LinkParams::new(0.1, n as f64 / 30.0, 4.0, 1.0, 1.0),
                5..=30,
                Objective::MinFailure,
                true,
            )
            .unwrap()
        })
    });
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let small = GfMatrix::random(5, 5, 2, &mut rng);
    let wide = GfMatrix::random(40, 40, 7, &mut rng);
    c.bench_function("gf_rank 5x5 q=2", |b| b.iter(|| gf_rank(black_box(&small), 2).unwrap()));
    c.bench_function("gf_rank 40x40 q=7", |b| b.iter(|| gf_rank(black_box(&wide), 7).unwrap()));
}

criterion_group!(benches, durations, coding);
criterion_main!(benches);
