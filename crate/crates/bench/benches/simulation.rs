use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use outage_core::coding::CodeParams;
use outage_core::montecarlo::{estimate_joint_success, simulate_link, simulate_rlnc};
use outage_core::{InterferenceMode, Scenario, SimConfig};

fn link(c: &mut Criterion) {
    let scenario = Scenario::new(1.0, 0.1, 4.0, 1.0, 1.0).unwrap();
    let cfg = SimConfig {
        radius: 50.0,
        slots: 200,
        reps: 100,
        seed: 1,
        kappa: 1.0,
    };
    let mut group = c.benchmark_group("simulate_link 100 reps x 200 slots");
    group.sample_size(10);
    for mode in [InterferenceMode::Static, InterferenceMode::Resampled] {
        group.bench_function(format!("{mode:?}"), |b| {
            b.iter(|| simulate_link(black_box(&scenario), &cfg, mode).unwrap())
        });
    }
    group.finish();

    let trace = simulate_link(&scenario, &cfg, InterferenceMode::Static).unwrap();
    c.bench_function("estimate_joint_success n=5", |b| {
        b.iter(|| estimate_joint_success(black_box(&trace), 5).unwrap())
    });
}

fn rlnc(c: &mut Criterion) {
    let scenario = Scenario::new(1.0, 0.1, 4.0, 1.0, 1.0).unwrap();
    let cfg = SimConfig {
        radius: 50.0,
        slots: 200,
        reps: 100,
        seed: 1,
        kappa: 1.0,
    };
    let code = CodeParams::new(5, 10, 2).unwrap();
    let mut group = c.benchmark_group("simulate_rlnc");
    group.sample_size(10);
    group.bench_function("k=5 n=10 q=2", |b| {
        b.iter(|| simulate_rlnc(black_box(&code), &scenario, &cfg, true).unwrap())
    });
    group.finish();
}

criterion_group!(benches, link, rlnc);
criterion_main!(benches);
