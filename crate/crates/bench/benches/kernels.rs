use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use normlab_bench::{euclidean, random_points, rng, sup, unit_functionals};
use normlab_core::determinant::{dk_determinant, DeterminantInput};
use normlab_core::linalg;
use normlab_core::rotundity::{modulus_estimate, ModulusMode, ModulusQuery, SearchBudget};
use normlab_core::volume::{vk_volume, VolumeStrategy};

fn bench_determinant(c: &mut Criterion) {
    let mut r = rng(1);
    let space = euclidean(5);
    let points = random_points(&mut r, 5, 5);
    let fs = unit_functionals(&space, &mut r, 4);
    c.bench_function("dk_determinant_k4", |b| {
        b.iter(|| {
            let input = DeterminantInput::new(black_box(&points), black_box(&fs)).unwrap();
            black_box(dk_determinant(&input))
        })
    });
}

fn bench_volume(c: &mut Criterion) {
    let mut r = rng(2);
    let cube = sup(4);
    let points = random_points(&mut r, 4, 4);
    c.bench_function("vk_volume_exact_sup4_k3", |b| {
        b.iter(|| black_box(vk_volume(&cube, &points, 3, VolumeStrategy::Exact, 3).unwrap().value))
    });
    let eucl = euclidean(5);
    let e_points = random_points(&mut r, 4, 5);
    c.bench_function("vk_volume_gram_k3", |b| {
        b.iter(|| black_box(vk_volume(&eucl, &e_points, 3, VolumeStrategy::Exact, 3).unwrap().value))
    });
}

fn bench_distance(c: &mut Criterion) {
    let cube = sup(4);
    let mut r = rng(3);
    let x = random_points(&mut r, 1, 4).pop().unwrap();
    let basis = random_points(&mut r, 2, 4);
    c.bench_function("distance_subspace_lp_sup4", |b| {
        b.iter(|| {
            black_box(
                cube.distance_to_subspace(black_box(&x), black_box(&basis))
                    .unwrap()
                    .distance,
            )
        })
    });
    let smooth = normlab_core::Space::new(
        normlab_core::NormDescriptor::lp(3.0, 4).unwrap(),
    )
    .unwrap();
    c.bench_function("distance_subspace_newton_lp3", |b| {
        b.iter(|| {
            black_box(
                smooth
                    .distance_to_subspace(black_box(&x), black_box(&basis))
                    .unwrap()
                    .distance,
            )
        })
    });
    let _ = linalg::norm2(&x);
}

fn bench_modulus(c: &mut Criterion) {
    let space = euclidean(3);
    c.bench_function("modulus_kur_small_budget", |b| {
        b.iter(|| {
            let mut q = ModulusQuery::new(ModulusMode::KUr, 1, 1.0);
            q.budget = SearchBudget {
                multistarts: 4,
                local_steps: 100,
            };
            q.seed = 5;
            black_box(modulus_estimate(&space, &q).unwrap().value)
        })
    });
}

criterion_group!(
    benches,
    bench_determinant,
    bench_volume,
    bench_distance,
    bench_modulus
);
criterion_main!(benches);
