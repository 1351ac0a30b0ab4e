use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use maxtree::{counting_sort, radix_sort};
use maxtree_bench::fixture;
use std::hint::black_box;

fn sorts(c: &mut Criterion) {
    let mut group = c.benchmark_group("sort");
    for bits in [8, 16, 17] {
        let img = fixture(0.5, bits, 3);
        group.bench_with_input(BenchmarkId::new("counting", bits), &img, |b, img| {
            b.iter(|| black_box(counting_sort(img, bits).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("radix", bits), &img, |b, img| {
            b.iter(|| black_box(radix_sort(img, bits).unwrap()))
        });
    }
    for bits in [20, 32] {
        let img = fixture(0.5, bits, 3);
        group.bench_with_input(BenchmarkId::new("radix", bits), &img, |b, img| {
            b.iter(|| black_box(radix_sort(img, bits).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, sorts);
criterion_main!(benches);
