use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nlheat::wells::{classify_batch, sobolev_constant, SobolevConfig, DEFAULT_CLASSIFY_TOL};
use nlheat::{evolve_batch, DomainSpec, Execution, Field, FlowConfig, FlowParams, Grid, Scheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_fields(n: usize, count: usize, seed: u64) -> Vec<Field> {
    let grid = Grid::new(DomainSpec::interval(PI).unwrap(), n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Field::from_fn(grid.clone(), |x| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * ((k + 1) as f64 * x).sin())
                    .sum()
            })
            .unwrap()
        })
        .collect()
}

fn bench_evolve(c: &mut Criterion) {
    let params = FlowParams::new(1.0, 1.0, 1).unwrap();
    let cfg = FlowConfig::new(1e-3, 0.2, Scheme::MultiplierSemiImplicit).with_snapshot_every(50);
    let fields = random_fields(511, 16, 7);
    let mut group = c.benchmark_group("evolve_batch");
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| evolve_batch(&fields, &params, &cfg, exec))
        });
    }
    group.finish();
}

fn bench_classify(c: &mut Criterion) {
    let params = FlowParams::new(1.0, 1.0, 1).unwrap();
    let wc = sobolev_constant(DomainSpec::interval(PI).unwrap(), 1.0, &SobolevConfig::new(511)).unwrap();
    let fields = random_fields(511, 512, 11);
    let mut group = c.benchmark_group("classify_batch");
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| classify_batch(&fields, &params, &wc, DEFAULT_CLASSIFY_TOL, exec))
        });
    }
    group.finish();
}

fn bench_sobolev(c: &mut Criterion) {
    let mut group = c.benchmark_group("sobolev_two_grid");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let cfg = SobolevConfig { exec, ..SobolevConfig::new(255) };
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &cfg, |b, cfg| {
            b.iter(|| sobolev_constant(DomainSpec::interval(PI).unwrap(), 1.0, cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_evolve, bench_classify, bench_sobolev);
criterion_main!(benches);
