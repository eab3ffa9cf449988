use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fockdeform::{operator_matrix, DeformedFields, KernelSpec};
use fockdeform_bench::{chiral_space, massive_space, sample_root, smooth_vector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn free_operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("free");
    for points in [4, 6, 8] {
        let space = massive_space(points, 3);
        let xi = smooth_vector(points);
        let psi = space.random_vector(&mut ChaCha8Rng::seed_from_u64(1), 3);
        group.bench_with_input(BenchmarkId::new("annihilate", points), &psi, |b, psi| {
            b.iter(|| space.annihilate(black_box(&xi), black_box(psi)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("create", points), &psi, |b, psi| {
            b.iter(|| space.create(black_box(&xi), black_box(psi)).unwrap())
        });
    }
    group.finish();
}

fn deformed_operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("deformed");
    for points in [4, 6, 8] {
        let space = massive_space(points, 3);
        let fields = DeformedFields::new(&space, KernelSpec::new(sample_root(), 1.0).unwrap()).unwrap();
        let xi = smooth_vector(points);
        let psi = space.random_vector(&mut ChaCha8Rng::seed_from_u64(2), 3);
        group.bench_with_input(BenchmarkId::new("annihilate", points), &psi, |b, psi| {
            b.iter(|| fields.annihilate(black_box(&xi), black_box(psi)).unwrap())
        });
    }
    let space = massive_space(6, 3);
    let fields = DeformedFields::new(&space, KernelSpec::new(sample_root(), 1.0).unwrap()).unwrap();
    let xi = smooth_vector(6);
    group.bench_function("dense-matrix/6", |b| {
        b.iter(|| operator_matrix(&space, |v| fields.annihilate(&xi, v)).unwrap())
    });
    group.finish();
}

fn chiral_maps(c: &mut Criterion) {
    let mut group = c.benchmark_group("chiral");
    let root = sample_root();
    for half in [3, 4] {
        let space = chiral_space(half, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bi = space.random_bi(&mut rng).unwrap();
        let psi = space.union().random_vector(&mut rng, 3);
        group.bench_with_input(BenchmarkId::new("apply_v", half), &bi, |b, bi| {
            b.iter(|| space.apply_v(black_box(bi)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("apply_v_inverse", half), &psi, |b, psi| {
            b.iter(|| space.apply_v_inverse(black_box(psi)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("apply_shat", half), &psi, |b, psi| {
            b.iter(|| space.apply_shat(&root, black_box(psi)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, free_operators, deformed_operators, chiral_maps);
criterion_main!(benches);
