//! k-dimensional volumes: sup of the bordered determinant over tuples of
//! dual-sphere functionals, with exact and iterative strategies.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dd;
use crate::determinant::{dk_determinant, DeterminantInput, MAX_K};
use crate::error::{ensure_dim, Error, Result};
use crate::linalg;
use crate::optim;
use crate::space::{Functional, NormDescriptor, Space};

/// Cap on dual-vertex tuples for the exact enumeration.
const EXACT_COMBO_CAP: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeStrategy {
    Auto,
    Exact,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyTag {
    ExactExtremePoints,
    EuclideanGram,
    AlternatingMax,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeResult {
    pub value: f64,
    /// Functionals attaining (or approximately attaining) the supremum.
    pub certificate: Vec<Functional>,
    pub strategy: StrategyTag,
    /// True when the value is only a certified lower bound on the sup.
    pub lower_bound: bool,
    pub converged: bool,
}

impl VolumeResult {
    /// Re-evaluate the determinant at the certificate.
    pub fn check_certificate(&self, points: &[Vec<f64>]) -> Result<f64> {
        let input = DeterminantInput::new(points, &self.certificate)?;
        Ok(dk_determinant(&input).abs())
    }
}

fn validate_points(space: &Space, points: &[Vec<f64>], k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidArgument(format!(
            "order k must satisfy 1 <= k <= {MAX_K}, got {k}"
        )));
    }
    if points.len() != k + 1 {
        return Err(Error::TooFewPoints {
            needed: k + 1,
            got: points.len(),
        });
    }
    for p in points {
        ensure_dim(space.dim(), p.len())?;
        crate::error::ensure_finite(p)?;
    }
    Ok(())
}

/// Is the space (or the base of a quotient chain) the Euclidean l_2?
fn is_euclidean(space: &Space) -> bool {
    match space.descriptor() {
        NormDescriptor::Lp { p, .. } => p.get() == 2.0,
        NormDescriptor::Quotient { base, .. } => {
            matches!(&**base, NormDescriptor::Lp { p, .. } if p.get() == 2.0)
        }
        _ => false,
    }
}

/// V[(x_i)] = sup |D_k| over k-tuples of unit dual functionals.
pub fn vk_volume(
    space: &Space,
    points: &[Vec<f64>],
    k: usize,
    strategy: VolumeStrategy,
    seed: u64,
) -> Result<VolumeResult> {
    validate_points(space, points, k)?;
    match strategy {
        VolumeStrategy::Exact => {
            if is_euclidean(space) {
                euclidean_gram(space, points, k)
            } else if space.is_polyhedral() {
                exact_extreme(space, points, k)
            } else {
                Err(Error::UnsupportedStrategy(
                    "exact volume needs a polyhedral or Euclidean unit ball".into(),
                ))
            }
        }
        VolumeStrategy::Iterative => alternating_max(space, points, k, seed, 16, 200),
        VolumeStrategy::Auto => {
            if is_euclidean(space) {
                euclidean_gram(space, points, k)
            } else if space.is_polyhedral() {
                match exact_extreme(space, points, k) {
                    Ok(res) => Ok(res),
                    Err(Error::BudgetExhausted(_)) => {
                        alternating_max(space, points, k, seed, 16, 200)
                    }
                    Err(e) => Err(e),
                }
            } else {
                alternating_max(space, points, k, seed, 16, 200)
            }
        }
    }
}

fn exact_extreme(space: &Space, points: &[Vec<f64>], k: usize) -> Result<VolumeResult> {
    let duals = space.extreme_points(true)?;
    let combos = duals.len().checked_pow(k as u32).unwrap_or(usize::MAX);
    if combos > EXACT_COMBO_CAP {
        return Err(Error::BudgetExhausted(format!(
            "{combos} dual-vertex tuples exceed the exact enumeration cap"
        )));
    }
    // Precompute f(x_i) rows per dual vertex.
    let rows: Vec<Vec<f64>> = duals
        .iter()
        .map(|g| points.iter().map(|x| dd::dot(g, x).value()).collect())
        .collect();
    let indices: Vec<usize> = (0..duals.len()).collect();
    let best = indices
        .par_iter()
        .map(|&first| {
            let mut best_local = (0.0f64, vec![first; k]);
            let mut stack = vec![first; k];
            search_slots(&rows, &mut stack, 1, k, points.len(), &mut best_local);
            best_local
        })
        .reduce(
            || (0.0, vec![0; k]),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let certificate: Vec<Functional> = best
        .1
        .iter()
        .map(|&i| space.functional(duals[i].clone()))
        .collect::<Result<_>>()?;
    Ok(VolumeResult {
        value: best.0,
        certificate,
        strategy: StrategyTag::ExactExtremePoints,
        lower_bound: false,
        converged: true,
    })
}

fn search_slots(
    rows: &[Vec<f64>],
    stack: &mut Vec<usize>,
    depth: usize,
    k: usize,
    n_points: usize,
    best: &mut (f64, Vec<usize>),
) {
    if depth == k {
        let mut m = Vec::with_capacity(k + 1);
        m.push(vec![1.0; n_points]);
        for &i in stack.iter() {
            m.push(rows[i].clone());
        }
        let v = dd::det(&m).abs();
        if v > best.0 {
            *best = (v, stack.clone());
        }
        return;
    }
    for i in 0..rows.len() {
        stack[depth] = i;
        search_slots(rows, stack, depth + 1, k, n_points, best);
    }
}

fn euclidean_gram(space: &Space, points: &[Vec<f64>], k: usize) -> Result<VolumeResult> {
    let dim = space.dim();
    let diffs: Vec<Vec<f64>> = points[..k]
        .iter()
        .map(|x| linalg::sub(x, &points[k]))
        .collect();
    // Gram determinant in extended precision.
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| dd::dot(&diffs[i], &diffs[j]).value()).collect())
        .collect();
    let g = dd::det(&gram).max(0.0);
    let value = g.sqrt();
    // Certificate: orthonormal frame aligned with the difference span.
    let d = linalg::to_dmatrix_cols(&diffs);
    let qr = d.qr();
    let q = qr.q();
    let mut certificate = Vec::with_capacity(k);
    for j in 0..k {
        let col: Vec<f64> = (0..dim).map(|i| q[(i, j)]).collect();
        let n = linalg::norm2(&col);
        let col = if n > 1e-12 {
            linalg::scale(&col, 1.0 / n)
        } else {
            // rank-deficient difference family; pad with any unit vector
            let mut e = vec![0.0; dim];
            e[j.min(dim - 1)] = 1.0;
            e
        };
        certificate.push(space.functional(col)?);
    }
    Ok(VolumeResult {
        value,
        certificate,
        strategy: StrategyTag::EuclideanGram,
        lower_bound: false,
        converged: true,
    })
}

/// Alternating maximization: slot j of the functional tuple enters the
/// determinant linearly, so with the other slots fixed the optimum is the
/// support functional of the cofactor-weighted point combination from the
/// row-(j+1) expansion.
fn alternating_max(
    space: &Space,
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    n_starts: usize,
    max_rounds: usize,
) -> Result<VolumeResult> {
    let tol = crate::tol::Tolerances::default().volume_improvement;
    let starts: Vec<Vec<Functional>> = build_starts(space, k, seed, n_starts)?;
    let outcomes: Vec<(f64, Vec<Functional>, bool)> = starts
        .into_par_iter()
        .map(|mut fs| {
            let mut value = det_abs(points, &fs);
            let mut converged = false;
            for _ in 0..max_rounds {
                let before = value;
                for j in 0..k {
                    let w = cofactor_combination(points, &fs, j);
                    if linalg::norm2(&w) <= 1e-13 {
                        continue;
                    }
                    if let Ok(f_new) = space.support_functional(&w) {
                        let mut cand = fs.clone();
                        cand[j] = f_new;
                        let v = det_abs(points, &cand);
                        if v >= value {
                            fs = cand;
                            value = v;
                        }
                    }
                }
                if value - before < tol {
                    converged = true;
                    break;
                }
            }
            (value, fs, converged)
        })
        .collect();
    let mut best = outcomes
        .into_iter()
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .expect("at least one start");
    // Exactness for k = 1: the single slot is one support evaluation.
    let lower_bound = k > 1;
    best.0 = det_abs(points, &best.1);
    Ok(VolumeResult {
        value: best.0,
        certificate: best.1,
        strategy: StrategyTag::AlternatingMax,
        lower_bound,
        converged: best.2,
    })
}

fn build_starts(space: &Space, k: usize, seed: u64, n_starts: usize) -> Result<Vec<Vec<Functional>>> {
    let dim = space.dim();
    let mut starts = Vec::with_capacity(n_starts);
    let mut rng = optim::rng_for(seed, 0x766f_6c75);
    for s in 0..n_starts {
        let mut tuple = Vec::with_capacity(k);
        for j in 0..k {
            let coords = if s < dim {
                let mut e = vec![0.0; dim];
                e[(j + s) % dim] = if s % 2 == 0 { 1.0 } else { -1.0 };
                e
            } else {
                optim::random_direction(&mut rng, dim)
            };
            tuple.push(space.unit_functional(&coords)?);
        }
        starts.push(tuple);
    }
    Ok(starts)
}

fn det_abs(points: &[Vec<f64>], fs: &[Functional]) -> f64 {
    let input = DeterminantInput::new(points, fs).expect("validated upstream");
    dk_determinant(&input).abs()
}

/// w_j from expanding the bordered determinant along row j+1.
fn cofactor_combination(points: &[Vec<f64>], fs: &[Functional], j: usize) -> Vec<f64> {
    let matrix = crate::determinant::bordered_matrix(points, fs);
    let row = j + 1;
    let dim = points[0].len();
    let mut w = vec![0.0; dim];
    for (col, point) in points.iter().enumerate() {
        let minor: Vec<Vec<f64>> = matrix
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != row)
            .map(|(_, mrow)| {
                mrow.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let m = dd::det(&minor);
        let sign = if (row + col) % 2 == 0 { 1.0 } else { -1.0 };
        linalg::axpy(&mut w, sign * m, point);
    }
    w
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiamResult {
    pub value: f64,
    /// Indices of the witness (k+1)-subset.
    pub witness: Vec<usize>,
    pub volume: VolumeResult,
    /// True when subset enumeration was exhaustive.
    pub exhaustive: bool,
}

/// diam_k of a finite point set: max of vk_volume over (k+1)-subsets.
/// Exhaustive up to 25 points, greedy plus seeded random restarts beyond.
pub fn diam_k(
    space: &Space,
    points: &[Vec<f64>],
    k: usize,
    strategy: VolumeStrategy,
    seed: u64,
) -> Result<DiamResult> {
    if points.len() < k + 1 {
        return Err(Error::TooFewPoints {
            needed: k + 1,
            got: points.len(),
        });
    }
    for p in points {
        ensure_dim(space.dim(), p.len())?;
    }
    let n = points.len();
    let exhaustive = n <= 25;
    let subsets: Vec<Vec<usize>> = if exhaustive {
        (0..n).combinations(k + 1).collect()
    } else {
        sampled_subsets(n, k + 1, seed)
    };
    let evaluated: Vec<(Vec<usize>, VolumeResult)> = subsets
        .into_par_iter()
        .map(|subset| {
            let pts: Vec<Vec<f64>> = subset.iter().map(|&i| points[i].clone()).collect();
            let vol = vk_volume(space, &pts, k, strategy, seed)?;
            Ok((subset, vol))
        })
        .collect::<Result<_>>()?;
    let (witness, volume) = evaluated
        .into_iter()
        .max_by(|a, b| {
            a.1.value
                .partial_cmp(&b.1.value)
                .unwrap()
                .then_with(|| b.0.cmp(&a.0))
        })
        .expect("non-empty subset list");
    Ok(DiamResult {
        value: volume.value,
        witness,
        volume,
        exhaustive,
    })
}

fn sampled_subsets(n: usize, size: usize, seed: u64) -> Vec<Vec<usize>> {
    use rand::seq::SliceRandom;
    let mut rng = optim::rng_for(seed, 0x6469_616d);
    let mut subsets = Vec::with_capacity(600);
    let mut idx: Vec<usize> = (0..n).collect();
    for _ in 0..600 {
        idx.shuffle(&mut rng);
        let mut s = idx[..size].to_vec();
        s.sort_unstable();
        subsets.push(s);
    }
    subsets
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegeneracyReport {
    /// True iff some dual tuple gives a positive determinant.
    pub nondegenerate: bool,
    pub rank: usize,
    pub expected_rank: usize,
    /// Singular values of the difference matrix, largest first.
    pub singular_values: Vec<f64>,
}

/// Rank test of {x_i - x_{k+1}}: positive volume iff full rank k.
pub fn degeneracy_test(space: &Space, points: &[Vec<f64>], k: usize) -> Result<DegeneracyReport> {
    validate_points(space, points, k)?;
    let diffs: Vec<Vec<f64>> = points[..k]
        .iter()
        .map(|x| linalg::sub(x, &points[k]))
        .collect();
    let m = linalg::to_dmatrix_cols(&diffs);
    let rank = linalg::rank(&m, crate::tol::Tolerances::default().rank);
    Ok(DegeneracyReport {
        nondegenerate: rank == k,
        rank,
        expected_rank: k,
        singular_values: linalg::singular_values(&m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn space(d: &NormDescriptor) -> Space {
        Space::new(d.clone()).unwrap()
    }

    fn e(i: usize, d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    #[test]
    fn k1_volume_is_distance() {
        let s = space(&NormDescriptor::sup(3));
        let a = vec![0.2, -0.7, 0.4];
        let b = vec![-0.5, 0.3, 0.1];
        let res = vk_volume(&s, &[a.clone(), b.clone()], 1, VolumeStrategy::Auto, 5).unwrap();
        let dist = s.norm(&linalg::sub(&b, &a)).unwrap();
        assert!((res.value - dist).abs() < 1e-12);
    }

    #[test]
    fn euclidean_unit_square_volume() {
        let s = space(&NormDescriptor::euclidean(3));
        let pts = vec![vec![0.0; 3], e(0, 3), e(1, 3)];
        let res = vk_volume(&s, &pts, 2, VolumeStrategy::Auto, 5).unwrap();
        assert_eq!(res.strategy, StrategyTag::EuclideanGram);
        assert!((res.value - 1.0).abs() < 1e-12);
        // certificate reproduces the value
        let redo = res.check_certificate(&pts).unwrap();
        assert!((redo - res.value).abs() < 1e-8);
    }

    #[test]
    fn sup_norm_face_volume_exact() {
        // Points 0, 2e_2, ..., 2e_{k+1} in the sup norm: exact volume 2^k.
        for k in 1..=3usize {
            let d = k + 1;
            let s = space(&NormDescriptor::sup(d));
            let mut pts = vec![vec![0.0; d]];
            for i in 1..=k {
                pts.push(linalg::scale(&e(i, d), 2.0));
            }
            let res = vk_volume(&s, &pts, k, VolumeStrategy::Exact, 5).unwrap();
            assert_eq!(res.strategy, StrategyTag::ExactExtremePoints);
            assert!(
                (res.value - 2f64.powi(k as i32)).abs() < 1e-10,
                "k={k}: {}",
                res.value
            );
        }
    }

    #[test]
    fn iterative_matches_gram_on_random_euclidean() {
        let s = space(&NormDescriptor::euclidean(4));
        let mut rng = optim::rng_for(42, 9);
        for trial in 0..20 {
            let pts: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let exact = vk_volume(&s, &pts, 2, VolumeStrategy::Exact, trial).unwrap();
            let iter = vk_volume(&s, &pts, 2, VolumeStrategy::Iterative, trial).unwrap();
            let denom = exact.value.max(1e-9);
            assert!(
                (exact.value - iter.value).abs() / denom < 1e-4,
                "trial {trial}: exact {} vs iter {}",
                exact.value,
                iter.value
            );
        }
    }

    #[test]
    fn diam_of_square_vertices() {
        let s = space(&NormDescriptor::sup(2));
        let pts = vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ];
        let res = diam_k(&s, &pts, 2, VolumeStrategy::Exact, 3).unwrap();
        assert!(res.exhaustive);
        assert!((res.value - 4.0).abs() < 1e-10, "diam {}", res.value);
    }

    #[test]
    fn diam_k1_max_pairwise() {
        let s = space(&NormDescriptor::euclidean(2));
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]];
        let res = diam_k(&s, &pts, 1, VolumeStrategy::Auto, 3).unwrap();
        assert!((res.value - 3.0).abs() < 1e-9);
        assert_eq!(res.witness, vec![0, 2]);
    }

    #[test]
    fn degeneracy_collinear() {
        let s = space(&NormDescriptor::euclidean(3));
        let pts = vec![vec![0.0; 3], e(0, 3), linalg::scale(&e(0, 3), 2.0)];
        let rep = degeneracy_test(&s, &pts, 2).unwrap();
        assert!(!rep.nondegenerate);
        assert_eq!(rep.rank, 1);
        let vol = vk_volume(&s, &pts, 2, VolumeStrategy::Exact, 1).unwrap();
        assert!(vol.value < 1e-10);
    }

    #[test]
    fn identical_points_zero_diam() {
        let s = space(&NormDescriptor::euclidean(2));
        let pts = vec![vec![0.5, 0.5]; 4];
        let res = diam_k(&s, &pts, 1, VolumeStrategy::Auto, 3).unwrap();
        assert_eq!(res.value, 0.0);
    }
}
