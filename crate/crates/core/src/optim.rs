//! Deterministic local-search and smooth-minimization primitives.
//!
//! Everything here is seeded explicitly; identical inputs produce
//! identical iterates regardless of thread scheduling.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::linalg;

/// Derive an independent stream from a base seed and a stream tag.
pub fn subseed(seed: u64, tag: u64) -> u64 {
    // splitmix64 step keeps streams decorrelated.
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(subseed(seed, tag))
}

/// Uniform direction on the Euclidean sphere.
pub fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let n = linalg::norm2(&v);
        if n > 1e-12 {
            return linalg::scale(&v, 1.0 / n);
        }
    }
}

pub struct PatternOptions {
    pub max_steps: usize,
    pub initial_step: f64,
    pub min_step: f64,
    /// Extra random poll directions per sweep (escapes coordinate jams
    /// on nonsmooth objectives).
    pub random_dirs: usize,
    pub seed: u64,
}

impl Default for PatternOptions {
    fn default() -> Self {
        Self {
            max_steps: 500,
            initial_step: 0.5,
            min_step: 1e-12,
            random_dirs: 4,
            seed: 0,
        }
    }
}

/// Coordinate pattern search (minimization) with step adaptation.
///
/// Accepts any objective; with a convex objective the shrinking poll
/// radius drives the iterate to the minimizer.
pub fn pattern_search<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &PatternOptions,
) -> (Vec<f64>, f64) {
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut step = opts.initial_step;
    let mut rng = rng_for(opts.seed, 0x7061_7474);
    for _ in 0..opts.max_steps {
        if step < opts.min_step {
            break;
        }
        let mut improved = false;
        for d in 0..dim {
            for sgn in [1.0, -1.0] {
                let mut y = x.clone();
                y[d] += sgn * step;
                let fy = f(&y);
                if fy < fx - 1e-18 {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        for _ in 0..opts.random_dirs {
            let dir = random_direction(&mut rng, dim);
            for sgn in [1.0, -1.0] {
                let mut y = x.clone();
                linalg::axpy(&mut y, sgn * step, &dir);
                let fy = f(&y);
                if fy < fx - 1e-18 {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        } else {
            step *= 1.5;
        }
    }
    (x, fx)
}

/// Newton minimization of a smooth convex objective with gradient and
/// Hessian callbacks; Armijo backtracking plus Levenberg damping.
pub fn newton_minimize<F, G, H>(
    mut f: F,
    mut grad: G,
    mut hess: H,
    x0: &[f64],
    grad_tol: f64,
    max_iter: usize,
) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
    H: FnMut(&[f64]) -> DMatrix<f64>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    if n == 0 {
        return x;
    }
    let mut fx = f(&x);
    for _ in 0..max_iter {
        let g = grad(&x);
        let gnorm = linalg::norm2(&g);
        if gnorm <= grad_tol {
            break;
        }
        let h = hess(&x);
        let gv = DVector::from_column_slice(&g);
        let mut lambda = 0.0f64;
        let dir = loop {
            let mut hd = h.clone();
            for i in 0..n {
                hd[(i, i)] += lambda;
            }
            match hd.cholesky() {
                Some(ch) => break ch.solve(&gv),
                None => {
                    lambda = if lambda == 0.0 { 1e-10 } else { lambda * 100.0 };
                    if lambda > 1e12 {
                        break gv.clone(); // gradient fallback
                    }
                }
            }
        };
        let dir: Vec<f64> = dir.iter().map(|v| -v).collect();
        let slope = linalg::dot(&g, &dir);
        if slope >= 0.0 {
            break;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let mut y = x.clone();
            linalg::axpy(&mut y, t, &dir);
            let fy = f(&y);
            if fy <= fx + 1e-4 * t * slope {
                x = y;
                fx = fy;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_search_quadratic() {
        let (x, fx) = pattern_search(
            |v| (v[0] - 1.0).powi(2) + (v[1] + 2.0).powi(2),
            &[5.0, 5.0],
            &PatternOptions {
                max_steps: 400,
                initial_step: 1.0,
                ..Default::default()
            },
        );
        assert!(fx < 1e-16);
        assert!((x[0] - 1.0).abs() < 1e-8 && (x[1] + 2.0).abs() < 1e-8);
    }

    #[test]
    fn pattern_search_nonsmooth() {
        // max(|x+y|, |x-y-3|) bottoms out at 0 on the diagonal kink (1.5, -1.5).
        let (x, fx) = pattern_search(
            |v| (v[0] + v[1]).abs().max((v[0] - v[1] - 3.0).abs()),
            &[4.0, -4.0],
            &PatternOptions {
                max_steps: 2000,
                initial_step: 1.0,
                random_dirs: 6,
                seed: 11,
                ..Default::default()
            },
        );
        assert!(fx < 1e-6, "fx = {fx} at {x:?}");
    }

    #[test]
    fn newton_rosenbrock_like_convex() {
        // f(x) = sum (x_i^2 + mu^2)^(3/2): smooth convex, minimum at 0.
        let f = |v: &[f64]| -> f64 { v.iter().map(|&t| (t * t + 1e-6).powf(1.5)).sum() };
        let g = |v: &[f64]| -> Vec<f64> {
            v.iter().map(|&t| 3.0 * t * (t * t + 1e-6).sqrt()).collect()
        };
        let h = |v: &[f64]| -> DMatrix<f64> {
            DMatrix::from_fn(v.len(), v.len(), |i, j| {
                if i == j {
                    let t = v[i];
                    let s = (t * t + 1e-6).sqrt();
                    3.0 * s + 3.0 * t * t / s
                } else {
                    0.0
                }
            })
        };
        let x = newton_minimize(f, g, h, &[2.0, -3.0], 1e-12, 100);
        assert!(linalg::norm2(&x) < 1e-6);
    }

    #[test]
    fn subseed_streams_differ() {
        assert_ne!(subseed(7, 1), subseed(7, 2));
        assert_eq!(subseed(7, 1), subseed(7, 1));
    }
}
