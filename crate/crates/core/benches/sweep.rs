use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use curvspec::config::RunConfig;
use curvspec::sweep::{run_sweep, run_sweep_sequential, tau_grid, Model, Orientation, Variant};

fn sweep(c: &mut Criterion) {
    let model = Model::from_config(&RunConfig::default()).unwrap();
    let taus = tau_grid(0.0, 2.0, 0.25).unwrap();
    let mut group = c.benchmark_group("tilted_sweep");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| run_sweep(black_box(&model), Orientation::TILTED_45, black_box(&taus), &Variant::STANDARD).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| run_sweep_sequential(black_box(&model), Orientation::TILTED_45, black_box(&taus), &Variant::STANDARD).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
