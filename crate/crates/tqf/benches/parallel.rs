//! Criterion benches comparing the rayon-parallel kernels against the same
//! code pinned to a single worker thread. The hot loops are the reduced
//! form sweep behind genus enumeration, a full per-level verification
//! round, and bulk table generation.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tqf::arith::Int;
use tqf::classtype::level_table;
use tqf::eisenstein::admissible_level;
use tqf::ternary::enumerate_reduced_by_disc;
use tqf::verify::verify_theta_identity;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool")
}

fn thread_counts() -> Vec<usize> {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    if available > 1 {
        vec![1, available]
    } else {
        vec![1]
    }
}

fn bench_reduced_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduced_form_sweep");
    group.sample_size(10);
    for threads in thread_counts() {
        group.bench_with_input(
            BenchmarkId::from_parameter(threads),
            &threads,
            |b, &threads| {
                let pool = pool(threads);
                b.iter(|| {
                    pool.install(|| {
                        // the S^0 genus discriminant of level 30
                        black_box(enumerate_reduced_by_disc(black_box(14_400)).len())
                    })
                });
            },
        );
    }
    group.finish();
}

fn bench_theta_identity(c: &mut Criterion) {
    let mut group = c.benchmark_group("theta_identity_level_23");
    group.sample_size(10);
    let level = admissible_level(23, 1).unwrap();
    for threads in thread_counts() {
        group.bench_with_input(
            BenchmarkId::from_parameter(threads),
            &threads,
            |b, &threads| {
                let pool = pool(threads);
                b.iter(|| {
                    pool.install(|| {
                        let report = verify_theta_identity(black_box(&level), 200, 20_000).unwrap();
                        assert!(report.passed());
                        report.checks.len()
                    })
                });
            },
        );
    }
    group.finish();
}

fn bench_level_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("table_to_200");
    group.sample_size(10);
    for threads in thread_counts() {
        group.bench_with_input(
            BenchmarkId::from_parameter(threads),
            &threads,
            |b, &threads| {
                let pool = pool(threads);
                b.iter(|| {
                    pool.install(|| {
                        let rows = level_table(black_box(200)).unwrap();
                        rows.iter().map(|&(_, _, _, h, t)| h + t).sum::<Int>()
                    })
                });
            },
        );
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_reduced_sweep,
    bench_theta_identity,
    bench_level_table
);
criterion_main!(benches);
