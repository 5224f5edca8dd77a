//! Shared instance builders for the benchmark targets.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use normlab_core::space::{Functional, NormDescriptor, Space};

pub fn rng(seed: u64) -> ChaCha8Rng {
    normlab_core::optim::rng_for(seed, 0xbe7c)
}

pub fn random_points(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

pub fn unit_functionals(space: &Space, rng: &mut ChaCha8Rng, count: usize) -> Vec<Functional> {
    (0..count)
        .map(|_| {
            let dir = normlab_core::optim::random_direction(rng, space.dim());
            space.unit_functional(&dir).expect("unit functional")
        })
        .collect()
}

pub fn euclidean(dim: usize) -> Space {
    Space::new(NormDescriptor::euclidean(dim)).unwrap()
}

pub fn sup(dim: usize) -> Space {
    Space::new(NormDescriptor::sup(dim)).unwrap()
}
