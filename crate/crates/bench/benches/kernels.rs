use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use skewlab_bench::{arrangement_alpha, ergodic_input, weyl_input};
use skewlab_core::dynamics::ergodic::ergodic_sum;
use skewlab_core::partition::TorusPartition;
use skewlab_core::probes::weyl_probe;

fn ergodic(c: &mut Criterion) {
    let (alpha, map, x) = ergodic_input().unwrap();
    let mut g = c.benchmark_group("ergodic-sum");
    for n in [10_000u64, 1_000_000] {
        g.throughput(Throughput::Elements(n));
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| ergodic_sum(&map, &alpha, x, n).unwrap()));
    }
    g.finish();
}

fn arrangement(c: &mut Criterion) {
    let alpha = arrangement_alpha().unwrap();
    let mut g = c.benchmark_group("arrangement");
    g.sample_size(10);
    for ell in [20usize, 60] {
        g.bench_with_input(BenchmarkId::from_parameter(ell), &ell, |b, &ell| b.iter(|| TorusPartition::build(&alpha, ell, true).unwrap().card()));
    }
    g.finish();
}

fn weyl(c: &mut Criterion) {
    let (alpha, map, fiber, panel) = weyl_input().unwrap();
    let mut g = c.benchmark_group("weyl");
    g.sample_size(10);
    let n = 10_000u64;
    g.throughput(Throughput::Elements(n * panel.len() as u64));
    g.bench_function(BenchmarkId::from_parameter(n), |b| b.iter(|| weyl_probe(&alpha, &map, &fiber, &panel, [0.123, 0.456], &[n]).unwrap()));
    g.finish();
}

criterion_group!(kernels, ergodic, arrangement, weyl);
criterion_main!(kernels);
