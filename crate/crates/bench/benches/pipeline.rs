use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tarclust_bench::{feature_matrix, reference_panel, simulation_config};
use tarclust_core::features::extract_features;
use tarclust_core::simlab::{run_replicate, ScenarioConfig};
use tarclust_core::spectral::select_cluster_count;
use tarclust_core::{fit_setar_grid, fit_setar_sequential, hansen_test, reference_dgm, simulate, SetarOptions};

fn setar(c: &mut Criterion) {
    let mut group = c.benchmark_group("setar");
    let serial = SetarOptions { parallel: false, ..SetarOptions::default() };
    for t in [400, 2000] {
        let s = simulate(&reference_dgm("ser07").unwrap(), t, 200, 1).unwrap();
        group.bench_with_input(BenchmarkId::new("grid_k3", t), &s, |b, s| {
            b.iter(|| fit_setar_grid(black_box(s), 3, &serial).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential_k3", t), &s, |b, s| {
            b.iter(|| fit_setar_sequential(black_box(s), 3, &serial).unwrap())
        });
    }
    let s = simulate(&reference_dgm("ser03").unwrap(), 400, 200, 2).unwrap();
    group.sample_size(10);
    group.bench_function("hansen_1v2_200reps", |b| {
        b.iter(|| hansen_test(black_box(&s), 1, 2, 200, 3, &serial).unwrap())
    });
    group.finish();
}

fn features(c: &mut Criterion) {
    let cfg = simulation_config();
    let panel = reference_panel(1, 400);
    c.bench_function("extract_features_t400", |b| {
        b.iter(|| extract_features(black_box(&panel[6]), &cfg).unwrap())
    });
}

fn spectral(c: &mut Criterion) {
    let cfg = simulation_config();
    let mut group = c.benchmark_group("spectral");
    for per in [5, 10] {
        let m = feature_matrix(per, 400);
        group.bench_with_input(BenchmarkId::new("select_c_2_to_15", m.n()), &m, |b, m| {
            b.iter(|| select_cluster_count(black_box(m), 2, 15, &cfg.spectral_options()).unwrap())
        });
    }
    group.finish();
}

fn scenario(c: &mut Criterion) {
    let cfg = ScenarioConfig {
        n_per_dgm: 5,
        replicates: 1,
        ..ScenarioConfig::default()
    };
    let mut group = c.benchmark_group("scenario");
    group.sample_size(10);
    group.bench_function("replicate_10x5x400", |b| b.iter(|| run_replicate(black_box(&cfg), 0).unwrap()));
    group.finish();
}

criterion_group!(benches, setar, features, spectral, scenario);
criterion_main!(benches);
