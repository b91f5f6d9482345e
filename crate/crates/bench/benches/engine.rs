use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tacton_sim::pipeline::{simulate_point, AnalysisSettings};
use tacton_sim::presets::STANDARD_POINTS_MM;
use tacton_sim::synthesis::{FieldAggregate, DEFAULT_CARRIER_RATE_HZ, DEFAULT_SKIN_RATE_HZ};
use tacton_sim::{command_signal, field_grid, skin_signal, spectrum, FieldModel, Point2D};
use tacton_sim_bench::{am_stm_tacton, grid_tactons};

fn signals(c: &mut Criterion) {
    let t = am_stm_tacton();
    let model = FieldModel::default();
    let on_ring = Point2D::new(10.0, 0.0);

    c.bench_function("skin_signal_1s_20k", |b| {
        b.iter(|| skin_signal(black_box(&t), &model, on_ring, DEFAULT_SKIN_RATE_HZ).unwrap())
    });
    let w = skin_signal(&t, &model, on_ring, DEFAULT_SKIN_RATE_HZ).unwrap();
    c.bench_function("spectrum_20k", |b| {
        b.iter(|| spectrum(black_box(&w)).unwrap())
    });
    c.bench_function("command_signal_1s_320k", |b| {
        b.iter(|| command_signal(black_box(&t), DEFAULT_CARRIER_RATE_HZ).unwrap())
    });
}

fn grids(c: &mut Criterion) {
    let t = am_stm_tacton();
    let model = FieldModel::default();
    let mut group = c.benchmark_group("field_grid");
    group.sample_size(10);
    for spacing in [2.0, 1.0, 0.5] {
        group.bench_with_input(BenchmarkId::from_parameter(spacing), &spacing, |b, &s| {
            b.iter(|| field_grid(&t, &model, s, DEFAULT_SKIN_RATE_HZ, FieldAggregate::Rms).unwrap())
        });
    }
    group.finish();
}

fn measurement_grid(c: &mut Criterion) {
    let tactons = grid_tactons();
    let model = FieldModel::default();
    let mut group = c.benchmark_group("measurement_grid");
    group.sample_size(10);
    group.bench_function("15_tactons_x_5_points", |b| {
        b.iter(|| {
            for (_, t) in &tactons {
                for &p in &STANDARD_POINTS_MM {
                    black_box(
                        simulate_point(
                            t,
                            &model,
                            p,
                            DEFAULT_SKIN_RATE_HZ,
                            AnalysisSettings::default(),
                        )
                        .unwrap(),
                    );
                }
            }
        })
    });
    group.finish();
}

criterion_group!(benches, signals, grids, measurement_grid);
criterion_main!(benches);
