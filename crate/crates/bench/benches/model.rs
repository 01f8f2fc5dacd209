// SPDX-License-Identifier: Apache-2.0

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use nop_explorer_bench::bundled;
use nop_explorer_core::{layer_cost, run_model, sweep, Strategy, StrategyChoice, SweepAxis, SystemConfig};

fn layer(c: &mut Criterion) {
    let resnet = bundled("resnet50.csv");
    let sys = SystemConfig::default();
    let mut group = c.benchmark_group("layer_cost");
    for st in Strategy::ALL {
        group.bench_with_input(BenchmarkId::from_parameter(st), &st, |b, &st| {
            b.iter(|| layer_cost(black_box(&resnet[1]), st, &sys).unwrap())
        });
    }
    group.finish();
}

fn end_to_end(c: &mut Criterion) {
    let sys = SystemConfig::default();
    let mut group = c.benchmark_group("run_model");
    for name in ["resnet50.csv", "unet.csv"] {
        let w = bundled(name);
        group.bench_function(name, |b| {
            b.iter(|| run_model(black_box(&w), StrategyChoice::Adaptive, &sys).unwrap())
        });
    }
    group.finish();
}

fn bandwidth_sweep(c: &mut Criterion) {
    let w = bundled("resnet50.csv");
    let sys = SystemConfig::default();
    let strategies: Vec<StrategyChoice> = Strategy::ALL.map(Into::into).to_vec();
    c.bench_function("sweep/bandwidth", |b| {
        b.iter(|| {
            sweep(
                black_box(&w),
                &sys,
                SweepAxis::DistributionBandwidth,
                &[8, 16, 32, 64, 128, 256],
                &strategies,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, layer, end_to_end, bandwidth_sweep);
criterion_main!(benches);
