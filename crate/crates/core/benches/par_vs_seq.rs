use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stanley::injection::{injectivity_audit, ResidueClassSpec};
use stanley::partitions::classify_range;
use stanley::products::{f_series, verify_all_identities};
use stanley::{Execution, Length};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn series_product(c: &mut Criterion) {
    let mut group = c.benchmark_group("series_mul");
    for order in [500usize, 2000] {
        let a = f_series(0, order).unwrap();
        let b = f_series(1, order).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, order), &order, |bench, _| {
                bench.iter(|| black_box(a.mul_with(&b, exec)))
            });
        }
    }
    group.finish();
}

fn classification(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify_range");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 45), |bench| {
            bench.iter(|| black_box(classify_range(45, exec).unwrap()))
        });
    }
    group.finish();
}

fn audit(c: &mut Criterion) {
    let mut group = c.benchmark_group("injectivity_audit");
    group.sample_size(10);
    let spec = ResidueClassSpec::new(8, 3, Length::Finite(5)).unwrap();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 60), |bench| {
            bench.iter(|| black_box(injectivity_audit(60, &spec, exec).unwrap()))
        });
    }
    group.finish();
}

fn identities(c: &mut Criterion) {
    let mut group = c.benchmark_group("identities");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 1000), |bench| {
            bench.iter(|| black_box(verify_all_identities(1000, exec)))
        });
    }
    group.finish();
}

criterion_group!(benches, series_product, classification, audit, identities);
criterion_main!(benches);
