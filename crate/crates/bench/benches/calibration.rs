use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fedcal_bench::fixture;
use fedcal_core::{
    m0_heuristic, prob_stat_map, rc_update, stat_map_dataset, CrcConfig, GenerativeClassifier, Simulation, Topology,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn stat_maps(c: &mut Criterion) {
    let f = fixture(10, 200, 1);
    let params = f.model.param_map(&f.model.uniform_init(100.0).unwrap()).unwrap();
    c.bench_function("stat_map_dataset/2000", |b| {
        b.iter(|| stat_map_dataset(&f.model, black_box(&f.global)).unwrap())
    });
    c.bench_function("prob_stat_map/2000", |b| {
        b.iter(|| prob_stat_map(&f.model, black_box(&f.global), &params))
    });
}

fn rc_step(c: &mut Criterion) {
    let f = fixture(10, 200, 2);
    let stats = f.model.uniform_init(f.global.len() as f64).unwrap();
    let params = f.model.param_map(&stats).unwrap();
    c.bench_function("rc_update/2000", |b| {
        b.iter(|| rc_update(&f.model, black_box(&stats), &f.global, 0.05, &params).unwrap())
    });
}

fn crc_round(c: &mut Criterion) {
    let mut group = c.benchmark_group("crc_round");
    for &n in &[10usize, 50] {
        let f = fixture(n, 50, 3);
        let graph = Topology::Tree.generate(n, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        for parallel in [false, true] {
            let config = CrcConfig {
                m0: m0_heuristic(n * 50, 0.05, n),
                parallel,
                ..Default::default()
            };
            let label = if parallel { "parallel" } else { "sequential" };
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, _| {
                b.iter_batched(
                    || Simulation::new(&f.model, config.clone(), f.local.clone()).unwrap(),
                    |mut sim| {
                        sim.step(&graph).unwrap();
                        sim
                    },
                    criterion::BatchSize::LargeInput,
                )
            });
        }
    }
    group.finish();
}

criterion_group!(benches, stat_maps, rc_step, crc_round);
criterion_main!(benches);
