use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qparity_core::gf2series::Gf2Series;

fn random_series(seed: u64, trunc: usize) -> Gf2Series {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Gf2Series::from_exponents((0..=trunc).filter(|_| rng.random::<bool>()), trunc)
}

fn bench_mul(c: &mut Criterion) {
    let mut group = c.benchmark_group("mul");
    for bits in [1usize << 13, 1 << 14, 1 << 16, 1 << 18] {
        let a = random_series(1, bits - 1);
        let b = random_series(2, bits - 1);
        group.bench_with_input(BenchmarkId::new("comb", bits), &bits, |bench, _| {
            bench.iter(|| black_box(&a).mul_with_threshold(black_box(&b), usize::MAX))
        });
        group.bench_with_input(BenchmarkId::new("karatsuba", bits), &bits, |bench, _| {
            bench.iter(|| black_box(&a).mul_with_threshold(black_box(&b), 1 << 14))
        });
    }
    group.finish();
}

fn bench_square_and_dilate(c: &mut Criterion) {
    let f = random_series(3, (1 << 18) - 1);
    c.bench_function("square_2^18", |b| b.iter(|| black_box(&f).square()));
    c.bench_function("dilate2_2^18", |b| b.iter(|| black_box(&f).dilate(2)));
}

fn bench_invert(c: &mut Criterion) {
    let mut group = c.benchmark_group("invert");
    group.sample_size(20);
    for bits in [1usize << 14, 1 << 17] {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = Gf2Series::from_exponents(
            std::iter::once(0).chain((1..bits).filter(|_| rng.random::<bool>())),
            bits - 1,
        );
        group.bench_with_input(BenchmarkId::from_parameter(bits), &bits, |bench, _| {
            bench.iter(|| black_box(&f).invert().unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_mul, bench_square_and_dilate, bench_invert);
criterion_main!(benches);
