use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use covert_cusum::adversary;
use covert_cusum::report::commands::default_delta_grid;
use covert_cusum::simulator::{estimate_with, SimConfig};
use covert_cusum::{Execution, Mode};

fn monte_carlo(c: &mut Criterion) {
    let mut cfg = SimConfig::new(Mode::PostChange, 1.0, 1.0).unwrap();
    cfg.step = 1e-3;
    cfg.paths = 2_000;
    cfg.seed = 7;
    let mut group = c.benchmark_group("estimate_post_h1");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| b.iter(|| estimate_with(black_box(&cfg), exec).unwrap()));
    }
    group.finish();
}

fn damage_sweep(c: &mut Criterion) {
    let grid = default_delta_grid(0.005).unwrap();
    let mut group = c.benchmark_group("damage_argmax_1e12");
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| {
            b.iter(|| adversary::damage_argmax_with(black_box(1e12), &grid, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, damage_sweep);
criterion_main!(benches);
