//! Sequential (one-thread pool) against the default rayon pool on the
//! batched stages: Lie algebra gradients, hyperplane line probes and
//! bivariate projections.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use linfactor::bivproj::factor_general;
use linfactor::hyper::factor_hyperplane;
use linfactor::lie::lie_algebra_basis;
use linfactor::verify::{generate_instance, InstanceSpec};
use linfactor::{PolyOracle, RandomSource};
use rayon::ThreadPoolBuilder;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("sequential", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn instance(spec: &InstanceSpec, seed: u64) -> PolyOracle {
    generate_instance(spec, &mut RandomSource::new(seed)).1
}

fn lie(c: &mut Criterion) {
    let mut group = c.benchmark_group("lie_algebra_basis");
    group.sample_size(10);
    for n in [4, 6] {
        let oracle = instance(&InstanceSpec::independent(n), 11);
        for (name, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(name, n), &oracle, |b, o| {
                b.iter(|| pool.install(|| lie_algebra_basis(o, &mut RandomSource::new(1)).unwrap()))
            });
        }
    }
    group.finish();
}

fn dependent(c: &mut Criterion) {
    let mut group = c.benchmark_group("dependent_forms");
    group.sample_size(10);
    let oracle = instance(&InstanceSpec::dependent(5, 8), 12);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::new("hyperplane", name), |b| {
            b.iter(|| pool.install(|| factor_hyperplane(&oracle, &mut RandomSource::new(2)).unwrap()))
        });
        group.bench_function(BenchmarkId::new("bivariate", name), |b| {
            b.iter(|| pool.install(|| factor_general(&oracle, &mut RandomSource::new(2)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, lie, dependent);
criterion_main!(benches);
