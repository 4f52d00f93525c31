use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gfr_bench::ex1_instance;
use gfr_core::{gfr_path, ActiveSetState, GfrOptions};

fn full_paths(c: &mut Criterion) {
    let (x, y) = ex1_instance(150, 500, 1);
    let mut group = c.benchmark_group("gfr_path");
    for j in [1, 2, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(j), &j, |b, &j| {
            b.iter(|| gfr_path(&x, &y, j, GfrOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn block_update(c: &mut Criterion) {
    let (x, y) = ex1_instance(150, 500, 2);
    let mut group = c.benchmark_group("add_columns");
    for size in [1, 4, 16] {
        let cols: Vec<usize> = (0..size).map(|k| 7 * k + 3).collect();
        group.bench_with_input(BenchmarkId::from_parameter(size), &cols, |b, cols| {
            b.iter_batched(
                || ActiveSetState::new(&x, &y).unwrap(),
                |mut state| state.add_columns(cols).unwrap(),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, full_paths, block_update);
criterion_main!(benches);
