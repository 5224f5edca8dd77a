//! Finite-dimensional normed spaces: evaluation, duality, composition.

mod descriptor;
mod smooth;

use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use descriptor::{NormDescriptor, PValue, WeightRule};

use crate::error::{ensure_dim, ensure_finite, Error, Result};
use crate::optim;
use crate::{linalg, lp};
use smooth::SmoothNorm;

/// A dual vector with its dual norm cached at construction.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Functional {
    pub coords: Vec<f64>,
    pub dual_norm: f64,
}

impl Functional {
    pub fn apply(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.coords, x)
    }

    /// Membership in the dual unit sphere.
    pub fn is_unit(&self, tol: f64) -> bool {
        (self.dual_norm - 1.0).abs() <= tol
    }
}

/// Result of a dual-norm evaluation, with the maximizing primal vector
/// whenever the strategy produces one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualNormEval {
    pub value: f64,
    pub maximizer: Option<Vec<f64>>,
    /// False only for the multi-start ascent fallback when it stops on
    /// budget rather than stationarity.
    pub converged: bool,
}

/// Distance from a point to the span of a basis, with certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceDistance {
    pub distance: f64,
    /// Nearest point of the subspace (same coordinates as the input).
    pub minimizer: Vec<f64>,
    /// Coefficients of the minimizer in the supplied basis.
    pub coefficients: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone)]
struct QuotientData {
    base: Box<Space>,
    m_basis: Vec<Vec<f64>>,
    /// Orthonormal complement of M; quotient coordinates are taken
    /// against these representatives.
    complement: Vec<Vec<f64>>,
    /// q x d matrix extracting quotient coordinates of a base vector.
    coord_proj: DMatrix<f64>,
}

#[derive(Debug, Clone)]
enum Realized {
    Lp { p: f64 },
    Sullivan { sel: Vec<usize> },
    SmithTurett { weights: Vec<f64> },
    Polyhedral { vertices: Vec<Vec<f64>>, polar: Vec<Vec<f64>> },
    Product { p: f64, factors: Vec<Space>, offsets: Vec<usize> },
    Quotient(QuotientData),
}

/// An immutable handle for a realized normed space. Safe to share across
/// threads; all operations are pure.
#[derive(Debug, Clone)]
pub struct Space {
    descriptor: NormDescriptor,
    dim: usize,
    realized: Realized,
    primal_extremes: OnceLock<Vec<Vec<f64>>>,
    dual_extremes: OnceLock<Vec<Vec<f64>>>,
}

/// Above this ambient dimension the Smith–Turett dual norm falls back to
/// multi-start ascent instead of exact support enumeration (3^dim work).
const ORTHANT_ENUM_MAX_DIM: usize = 12;

impl Space {
    /// Realize a descriptor (the spec's `make_space`).
    pub fn new(descriptor: NormDescriptor) -> Result<Self> {
        descriptor.validate(1e-9)?;
        let dim = descriptor.dim();
        let realized = match &descriptor {
            NormDescriptor::Lp { p, .. } => Realized::Lp { p: p.get() },
            NormDescriptor::SullivanSum { indices, .. } => Realized::Sullivan {
                sel: indices.iter().map(|&i| i - 1).collect(),
            },
            NormDescriptor::SmithTurett { dim, weight_rule } => Realized::SmithTurett {
                weights: weight_rule.weights(*dim),
            },
            NormDescriptor::Polyhedral { vertices } => {
                let rhs = vec![1.0; vertices.len()];
                let polar = lp::hpolytope_vertices(vertices, &rhs, 1e-9);
                if polar.is_empty() {
                    return Err(Error::InvalidDescriptor(
                        "failed to enumerate the polar unit ball".into(),
                    ));
                }
                Realized::Polyhedral {
                    vertices: vertices.clone(),
                    polar,
                }
            }
            NormDescriptor::Product { p, factors } => {
                let mut realized_factors = Vec::with_capacity(factors.len());
                let mut offsets = Vec::with_capacity(factors.len());
                let mut off = 0usize;
                for f in factors {
                    offsets.push(off);
                    off += f.dim();
                    realized_factors.push(Space::new(f.clone())?);
                }
                Realized::Product {
                    p: p.get(),
                    factors: realized_factors,
                    offsets,
                }
            }
            NormDescriptor::Quotient {
                base,
                subspace_basis,
            } => {
                let base_space = Space::new((**base).clone())?;
                let d = base_space.dim();
                let complement = linalg::orthonormal_complement(subspace_basis, d);
                let q = complement.len();
                // [W M] change of basis; top q rows of its inverse extract
                // the quotient coordinate.
                let mut cols = complement.clone();
                cols.extend(subspace_basis.iter().cloned());
                let wm = linalg::to_dmatrix_cols(&cols);
                let inv = wm
                    .try_inverse()
                    .ok_or(Error::DependentBasis)?;
                let coord_proj = inv.rows(0, q).into_owned();
                Realized::Quotient(QuotientData {
                    base: Box::new(base_space),
                    m_basis: subspace_basis.clone(),
                    complement,
                    coord_proj,
                })
            }
        };
        Ok(Space {
            descriptor,
            dim,
            realized,
            primal_extremes: OnceLock::new(),
            dual_extremes: OnceLock::new(),
        })
    }

    pub fn descriptor(&self) -> &NormDescriptor {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the unit ball (equivalently the dual ball) is a polytope
    /// this library can enumerate exactly.
    pub fn is_polyhedral(&self) -> bool {
        match &self.realized {
            Realized::Lp { p } => *p == 1.0 || p.is_infinite() || self.dim == 1,
            Realized::Sullivan { .. } | Realized::SmithTurett { .. } => self.dim == 1,
            Realized::Polyhedral { .. } => true,
            Realized::Product { p, factors, .. } => {
                (*p == 1.0 || p.is_infinite()) && factors.iter().all(Space::is_polyhedral)
            }
            Realized::Quotient(q) => q.base.is_polyhedral(),
        }
    }

    // ----- norm evaluation -------------------------------------------------

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        ensure_dim(self.dim, x.len())?;
        ensure_finite(x)?;
        Ok(self.norm_unchecked(x))
    }

    pub(crate) fn norm_unchecked(&self, x: &[f64]) -> f64 {
        match &self.realized {
            Realized::Lp { p } => lp_norm(x, *p),
            Realized::Sullivan { sel } => {
                let l: f64 = sel.iter().map(|&i| x[i].abs()).sum();
                let q: f64 = x
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !sel.contains(i))
                    .map(|(_, &v)| v * v)
                    .sum();
                (l * l + q).sqrt()
            }
            Realized::SmithTurett { weights } => {
                let l: f64 = x.iter().map(|v| v.abs()).sum();
                let q: f64 = x.iter().zip(weights).map(|(&v, &w)| (w * v) * (w * v)).sum();
                (l * l + q).sqrt()
            }
            Realized::Polyhedral { polar, .. } => polar
                .iter()
                .map(|g| linalg::dot(g, x))
                .fold(0.0, f64::max),
            Realized::Product { p, factors, offsets } => {
                let norms: Vec<f64> = factors
                    .iter()
                    .zip(offsets)
                    .map(|(f, &o)| f.norm_unchecked(&x[o..o + f.dim]))
                    .collect();
                lp_norm(&norms, *p)
            }
            Realized::Quotient(q) => {
                let rep = q.lift_vector(x);
                q.base
                    .distance_to_subspace_unchecked(&rep, &q.m_basis)
                    .distance
            }
        }
    }

    // ----- dual norm -------------------------------------------------------

    pub fn dual_norm(&self, f: &[f64]) -> Result<DualNormEval> {
        ensure_dim(self.dim, f.len())?;
        ensure_finite(f)?;
        Ok(self.dual_norm_unchecked(f))
    }

    pub fn dual_norm_value(&self, f: &[f64]) -> Result<f64> {
        Ok(self.dual_norm(f)?.value)
    }

    fn dual_norm_unchecked(&self, f: &[f64]) -> DualNormEval {
        match &self.realized {
            Realized::Lp { p } => {
                let q = PValue::new(*p).unwrap().conjugate().get();
                let value = lp_norm(f, q);
                let maximizer = holder_maximizer(f, *p, value);
                DualNormEval {
                    value,
                    maximizer,
                    converged: true,
                }
            }
            Realized::Sullivan { sel } => {
                // Dual of (l_1 on sel) +_2 (l_2 on rest):
                // sqrt(max_sel |f_i|^2 + sum_rest f_i^2).
                let (mut best_i, mut best) = (None, 0.0f64);
                for &i in sel {
                    if f[i].abs() > best {
                        best = f[i].abs();
                        best_i = Some(i);
                    }
                }
                let rest_sq: f64 = f
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !sel.contains(i))
                    .map(|(_, &v)| v * v)
                    .sum();
                let value = (best * best + rest_sq).sqrt();
                let maximizer = if value > 0.0 {
                    let mut x = vec![0.0; self.dim];
                    if let Some(i) = best_i {
                        x[i] = f[i].signum() * best / value;
                    }
                    for (i, v) in f.iter().enumerate() {
                        if !sel.contains(&i) {
                            x[i] = v / value;
                        }
                    }
                    Some(x)
                } else {
                    None
                };
                DualNormEval {
                    value,
                    maximizer,
                    converged: true,
                }
            }
            Realized::SmithTurett { weights } => {
                if self.dim <= ORTHANT_ENUM_MAX_DIM {
                    let (value, maximizer) = smith_turett_dual(f, weights, self);
                    DualNormEval {
                        value,
                        maximizer,
                        converged: true,
                    }
                } else {
                    self.dual_norm_ascent(f, 0)
                }
            }
            Realized::Polyhedral { vertices, .. } => {
                let (value, arg) = vertices
                    .iter()
                    .map(|v| (linalg::dot(f, v), v))
                    .fold((f64::NEG_INFINITY, None), |acc, (val, v)| {
                        if val > acc.0 {
                            (val, Some(v))
                        } else {
                            acc
                        }
                    });
                DualNormEval {
                    value,
                    maximizer: arg.cloned(),
                    converged: true,
                }
            }
            Realized::Product { p, factors, offsets } => {
                let evals: Vec<DualNormEval> = factors
                    .iter()
                    .zip(offsets)
                    .map(|(fac, &o)| fac.dual_norm_unchecked(&f[o..o + fac.dim]))
                    .collect();
                let duals: Vec<f64> = evals.iter().map(|e| e.value).collect();
                let q = PValue::new(*p).unwrap().conjugate().get();
                let value = lp_norm(&duals, q);
                let weights = holder_weights(&duals, *p, value);
                let maximizer = if evals.iter().all(|e| e.maximizer.is_some() || e.value == 0.0) {
                    let mut x = vec![0.0; self.dim];
                    for ((e, &o), w) in evals.iter().zip(offsets).zip(&weights) {
                        if let Some(mx) = &e.maximizer {
                            for (j, v) in mx.iter().enumerate() {
                                x[o + j] = w * v;
                            }
                        }
                    }
                    Some(x)
                } else {
                    None
                };
                DualNormEval {
                    value,
                    maximizer,
                    converged: evals.iter().all(|e| e.converged),
                }
            }
            Realized::Quotient(q) => {
                let lifted = q.lift_functional(f);
                let base_eval = q.base.dual_norm_unchecked(&lifted);
                let maximizer = base_eval
                    .maximizer
                    .as_ref()
                    .map(|x| q.project_vector(x));
                DualNormEval {
                    value: base_eval.value,
                    maximizer,
                    converged: base_eval.converged,
                }
            }
        }
    }

    /// Multi-start projected ascent on f(x)/||x|| (fallback strategy and
    /// cross-check for the structured dual norms).
    pub fn dual_norm_ascent(&self, f: &[f64], seed: u64) -> DualNormEval {
        let dim = self.dim;
        let mut starts: Vec<Vec<f64>> = Vec::new();
        for i in 0..dim.min(8) {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            starts.push(e.clone());
            e[i] = -1.0;
            starts.push(e);
        }
        let mut rng = optim::rng_for(seed, 0x6475_616c);
        while starts.len() < 16 {
            starts.push(optim::random_direction(&mut rng, dim));
        }
        let mut best_val = 0.0;
        let mut best_x: Option<Vec<f64>> = None;
        let mut converged = false;
        for x0 in starts {
            let ratio = |x: &[f64]| -> f64 {
                let n = self.norm_unchecked(x);
                if n <= 1e-14 {
                    return 0.0;
                }
                linalg::dot(f, x) / n
            };
            let (x, neg) = optim::pattern_search(
                |x| -ratio(x),
                &x0,
                &optim::PatternOptions {
                    max_steps: 400,
                    initial_step: 0.5,
                    min_step: 1e-11,
                    random_dirs: 4,
                    seed: optim::subseed(seed, 0x7261_7469),
                },
            );
            let val = -neg;
            if val > best_val {
                best_val = val;
                let n = self.norm_unchecked(&x);
                best_x = Some(linalg::scale(&x, 1.0 / n));
                converged = true;
            }
        }
        DualNormEval {
            value: best_val,
            maximizer: best_x,
            converged,
        }
    }

    /// Build a functional, computing and caching its dual norm.
    pub fn functional(&self, coords: Vec<f64>) -> Result<Functional> {
        let dual_norm = self.dual_norm_value(&coords)?;
        Ok(Functional { coords, dual_norm })
    }

    /// Build a functional scaled onto the dual unit sphere.
    pub fn unit_functional(&self, coords: &[f64]) -> Result<Functional> {
        let dn = self.dual_norm_value(coords)?;
        if dn <= 1e-14 {
            return Err(Error::ZeroVector);
        }
        let scaled = linalg::scale(coords, 1.0 / dn);
        let dual_norm = self.dual_norm_value(&scaled)?;
        Ok(Functional {
            coords: scaled,
            dual_norm,
        })
    }

    // ----- support functionals ----------------------------------------------

    /// A norm-attaining unit functional at `x`; flat faces resolve to the
    /// face barycenter.
    pub fn support_functional(&self, x: &[f64]) -> Result<Functional> {
        ensure_dim(self.dim, x.len())?;
        ensure_finite(x)?;
        let n = self.norm_unchecked(x);
        if n <= 1e-14 {
            return Err(Error::ZeroVector);
        }
        let coords = self.support_coords(x, n)?;
        self.functional(coords)
    }

    fn support_coords(&self, x: &[f64], n: f64) -> Result<Vec<f64>> {
        Ok(match &self.realized {
            Realized::Lp { p } => {
                if p.is_infinite() {
                    let m = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
                    let hits: Vec<usize> = (0..x.len())
                        .filter(|&i| x[i].abs() >= m * (1.0 - 1e-12))
                        .collect();
                    let w = 1.0 / hits.len() as f64;
                    let mut f = vec![0.0; x.len()];
                    for i in hits {
                        f[i] = w * x[i].signum();
                    }
                    f
                } else if *p == 1.0 {
                    x.iter()
                        .map(|&v| if v == 0.0 { 0.0 } else { v.signum() })
                        .collect()
                } else {
                    x.iter()
                        .map(|&v| {
                            if v == 0.0 {
                                0.0
                            } else {
                                v.signum() * (v.abs() / n).powf(p - 1.0)
                            }
                        })
                        .collect()
                }
            }
            Realized::Sullivan { sel } => {
                let l: f64 = sel.iter().map(|&i| x[i].abs()).sum();
                let mut f = vec![0.0; x.len()];
                for (i, &v) in x.iter().enumerate() {
                    if sel.contains(&i) {
                        if v != 0.0 {
                            f[i] = l * v.signum() / n;
                        }
                    } else {
                        f[i] = v / n;
                    }
                }
                f
            }
            Realized::SmithTurett { weights } => {
                let l: f64 = x.iter().map(|v| v.abs()).sum();
                x.iter()
                    .zip(weights)
                    .map(|(&v, &w)| {
                        let sign_part = if v == 0.0 { 0.0 } else { l * v.signum() };
                        (sign_part + w * w * v) / n
                    })
                    .collect()
            }
            Realized::Polyhedral { polar, .. } => {
                barycentric_argmax(polar, x, n)
            }
            Realized::Product { p, factors, offsets } => {
                let norms: Vec<f64> = factors
                    .iter()
                    .zip(offsets)
                    .map(|(f, &o)| f.norm_unchecked(&x[o..o + f.dim]))
                    .collect();
                let weights: Vec<f64> = if p.is_infinite() {
                    let m = norms.iter().cloned().fold(0.0, f64::max);
                    let hits: Vec<usize> = (0..norms.len())
                        .filter(|&i| norms[i] >= m * (1.0 - 1e-12))
                        .collect();
                    let w = 1.0 / hits.len() as f64;
                    (0..norms.len())
                        .map(|i| if hits.contains(&i) { w } else { 0.0 })
                        .collect()
                } else if *p == 1.0 {
                    norms.iter().map(|&ni| if ni > 0.0 { 1.0 } else { 0.0 }).collect()
                } else {
                    norms.iter().map(|&ni| (ni / n).powf(p - 1.0)).collect()
                };
                let mut f = vec![0.0; self.dim];
                for ((fac, &o), (&w, &ni)) in factors
                    .iter()
                    .zip(offsets)
                    .zip(weights.iter().zip(&norms))
                {
                    if w > 0.0 && ni > 1e-14 {
                        let sub = fac.support_coords(&x[o..o + fac.dim], ni)?;
                        for (j, v) in sub.iter().enumerate() {
                            f[o + j] = w * v;
                        }
                    }
                }
                f
            }
            Realized::Quotient(q) => {
                if q.base.is_polyhedral() {
                    let duals = self.extreme_points(true)?;
                    barycentric_argmax(&duals, x, n)
                } else {
                    let rep = q.lift_vector(x);
                    let d = q.base.distance_to_subspace_unchecked(&rep, &q.m_basis);
                    let v = linalg::sub(&rep, &d.minimizer);
                    let f_base = q.base.support_functional(&v)?;
                    let residual = q
                        .m_basis
                        .iter()
                        .map(|m| f_base.apply(m).abs())
                        .fold(0.0, f64::max);
                    if residual > 1e-7 {
                        return Err(Error::UnsupportedStrategy(
                            "support functional on this quotient lands on a nonsmooth face; \
                             no kernel-consistent subgradient found"
                                .into(),
                        ));
                    }
                    q.complement
                        .iter()
                        .map(|w| f_base.apply(w))
                        .collect()
                }
            }
        })
    }

    // ----- extreme points ---------------------------------------------------

    /// Vertices of the (dual) unit ball for polyhedral spaces.
    pub fn extreme_points(&self, dual: bool) -> Result<Vec<Vec<f64>>> {
        if !self.is_polyhedral() {
            return Err(Error::UnsupportedStrategy(format!(
                "extreme point enumeration requires a polyhedral ball; descriptor {:?} is not",
                variant_name(&self.descriptor)
            )));
        }
        let cache = if dual { &self.dual_extremes } else { &self.primal_extremes };
        Ok(cache.get_or_init(|| self.compute_extremes(dual)).clone())
    }

    fn compute_extremes(&self, dual: bool) -> Vec<Vec<f64>> {
        match &self.realized {
            Realized::Lp { p } => {
                if self.dim == 1 {
                    return vec![vec![1.0], vec![-1.0]];
                }
                let one_ball = |d: usize| -> Vec<Vec<f64>> {
                    let mut out = Vec::with_capacity(2 * d);
                    for i in 0..d {
                        let mut e = vec![0.0; d];
                        e[i] = 1.0;
                        out.push(e.clone());
                        e[i] = -1.0;
                        out.push(e);
                    }
                    out
                };
                let sup_ball = |d: usize| -> Vec<Vec<f64>> {
                    (0..1usize << d)
                        .map(|mask| {
                            (0..d)
                                .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
                                .collect()
                        })
                        .collect()
                };
                let is_one = *p == 1.0;
                match (is_one, dual) {
                    (true, false) | (false, true) => one_ball(self.dim),
                    (true, true) | (false, false) => sup_ball(self.dim),
                }
            }
            Realized::Sullivan { .. } | Realized::SmithTurett { .. } => {
                // Only reachable at dim == 1.
                let scale = 1.0 / self.norm_unchecked(&[1.0]);
                if dual {
                    vec![vec![1.0 / scale], vec![-1.0 / scale]]
                } else {
                    vec![vec![scale], vec![-scale]]
                }
            }
            Realized::Polyhedral { vertices, polar } => {
                if dual {
                    polar.clone()
                } else {
                    vertices.clone()
                }
            }
            Realized::Product { p, factors, offsets } => {
                let embed = |fac: &Space, o: usize, pts: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
                    pts.into_iter()
                        .map(|v| {
                            let mut x = vec![0.0; self.dim];
                            x[o..o + fac.dim].copy_from_slice(&v);
                            x
                        })
                        .collect()
                };
                // l_1 ball: union of embedded factor balls; l_inf ball:
                // cartesian product of factor balls. Duality swaps them.
                let union_style = (*p == 1.0) ^ dual;
                if union_style {
                    let mut out = Vec::new();
                    for (fac, &o) in factors.iter().zip(offsets) {
                        out.extend(embed(fac, o, fac.compute_extremes(dual)));
                    }
                    out
                } else {
                    let mut combos: Vec<Vec<f64>> = vec![vec![0.0; self.dim]];
                    for (fac, &o) in factors.iter().zip(offsets) {
                        let pts = fac.compute_extremes(dual);
                        let mut next = Vec::with_capacity(combos.len() * pts.len());
                        for c in &combos {
                            for v in &pts {
                                let mut x = c.clone();
                                x[o..o + fac.dim].copy_from_slice(v);
                                next.push(x);
                            }
                        }
                        combos = next;
                    }
                    combos
                }
            }
            Realized::Quotient(q) => {
                let base_primal = q.base.compute_extremes(false);
                let projected: Vec<Vec<f64>> =
                    base_primal.iter().map(|v| q.project_vector(v)).collect();
                if dual {
                    // Dual ball is the polar of the projected ball.
                    lp::hpolytope_vertices(&projected, &vec![1.0; projected.len()], 1e-9)
                } else {
                    let keep = lp::extreme_filter(&projected, 1e-9);
                    keep.into_iter().map(|i| projected[i].clone()).collect()
                }
            }
        }
    }

    // ----- distance to subspaces ---------------------------------------------

    /// d(x, span(basis)) with the nearest point as certificate.
    pub fn distance_to_subspace(
        &self,
        x: &[f64],
        basis: &[Vec<f64>],
    ) -> Result<SubspaceDistance> {
        ensure_dim(self.dim, x.len())?;
        ensure_finite(x)?;
        for b in basis {
            ensure_dim(self.dim, b.len())?;
            ensure_finite(b)?;
        }
        linalg::check_independent(basis, 1e-10)?;
        Ok(self.distance_to_subspace_unchecked(x, basis))
    }

    fn distance_to_subspace_unchecked(&self, x: &[f64], basis: &[Vec<f64>]) -> SubspaceDistance {
        if basis.is_empty() {
            return SubspaceDistance {
                distance: self.norm_unchecked(x),
                minimizer: vec![0.0; self.dim],
                coefficients: Vec::new(),
                converged: true,
            };
        }
        // In-span shortcut: a vanishing Euclidean residual certifies zero
        // distance in every norm.
        {
            let (c, proj) = linalg::least_squares(x, basis);
            let res = linalg::norm2(&linalg::sub(x, &proj));
            if res <= 1e-13 * linalg::norm2(x).max(1.0) {
                return SubspaceDistance {
                    distance: 0.0,
                    minimizer: x.to_vec(),
                    coefficients: c,
                    converged: true,
                };
            }
        }
        match &self.realized {
            Realized::Lp { p } if *p == 2.0 => {
                let (c, proj) = linalg::least_squares(x, basis);
                SubspaceDistance {
                    distance: linalg::norm2(&linalg::sub(x, &proj)),
                    minimizer: proj,
                    coefficients: c,
                    converged: true,
                }
            }
            Realized::Quotient(q) => {
                let rep = q.lift_vector(x);
                let mut lifted: Vec<Vec<f64>> = basis.iter().map(|b| q.lift_vector(b)).collect();
                let r = lifted.len();
                lifted.extend(q.m_basis.iter().cloned());
                let d = q.base.distance_to_subspace_unchecked(&rep, &lifted);
                let coefficients = d.coefficients[..r].to_vec();
                let mut minimizer = vec![0.0; self.dim];
                for (c, b) in coefficients.iter().zip(basis) {
                    linalg::axpy(&mut minimizer, *c, b);
                }
                SubspaceDistance {
                    distance: d.distance,
                    minimizer,
                    coefficients,
                    converged: d.converged,
                }
            }
            _ if self.is_polyhedral() => {
                let duals = self
                    .extreme_points(true)
                    .expect("polyhedral dual extremes");
                let (distance, c) = lp::minimax_distance(x, basis, &duals);
                let mut minimizer = vec![0.0; self.dim];
                for (ci, b) in c.iter().zip(basis) {
                    linalg::axpy(&mut minimizer, *ci, b);
                }
                SubspaceDistance {
                    distance,
                    minimizer,
                    coefficients: c,
                    converged: true,
                }
            }
            _ => {
                if let Some(sn) = self.smooth_surrogate() {
                    smooth_subspace_distance(self, &sn, x, basis)
                } else {
                    pattern_subspace_distance(self, x, basis)
                }
            }
        }
    }

    fn smooth_surrogate(&self) -> Option<SmoothNorm> {
        match &self.realized {
            Realized::Lp { p } if p.is_finite() && *p > 1.0 => Some(SmoothNorm::Lp { p: *p }),
            Realized::Sullivan { sel } => {
                let quad: Vec<f64> = (0..self.dim)
                    .map(|i| if sel.contains(&i) { 0.0 } else { 1.0 })
                    .collect();
                Some(SmoothNorm::SumSquare {
                    sel: sel.clone(),
                    quad,
                })
            }
            Realized::SmithTurett { weights } => Some(SmoothNorm::SumSquare {
                sel: (0..self.dim).collect(),
                quad: weights.clone(),
            }),
            Realized::Product { p, factors, offsets } if p.is_finite() && *p >= 1.0 => {
                let mut parts = Vec::with_capacity(factors.len());
                let mut dims = Vec::with_capacity(factors.len());
                for (fac, &o) in factors.iter().zip(offsets) {
                    // An l_1 factor smooths coordinatewise; a sup-norm
                    // factor has no usable surrogate and bails to the
                    // pattern fallback.
                    let sub = fac.smooth_surrogate().or_else(|| match &fac.realized {
                        Realized::Lp { p } if *p == 1.0 => Some(SmoothNorm::Lp { p: 1.0 }),
                        _ => None,
                    })?;
                    parts.push((o, sub));
                    dims.push(fac.dim);
                }
                Some(SmoothNorm::Product {
                    p: *p,
                    factors: parts,
                    dims,
                })
            }
            _ => None,
        }
    }

    // ----- misc helpers -------------------------------------------------------

    /// Random vector on the unit sphere of this norm.
    pub fn random_unit_vector(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        loop {
            let v = optim::random_direction(rng, self.dim);
            let n = self.norm_unchecked(&v);
            if n > 1e-9 {
                return linalg::scale(&v, 1.0 / n);
            }
        }
    }

    /// Project onto the unit sphere by radial scaling.
    pub fn radial_project(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.norm(x)?;
        if n <= 1e-14 {
            return Err(Error::ZeroVector);
        }
        Ok(linalg::scale(x, 1.0 / n))
    }

    /// Quotient-coordinate projection of a base-space vector (identity on
    /// non-quotient spaces).
    pub fn project_from_base(&self, x_base: &[f64]) -> Result<Vec<f64>> {
        match &self.realized {
            Realized::Quotient(q) => {
                ensure_dim(q.base.dim, x_base.len())?;
                Ok(q.project_vector(x_base))
            }
            _ => {
                ensure_dim(self.dim, x_base.len())?;
                Ok(x_base.to_vec())
            }
        }
    }

    /// Base-space representative of a quotient vector (identity otherwise).
    pub fn lift_to_base(&self, x: &[f64]) -> Result<Vec<f64>> {
        ensure_dim(self.dim, x.len())?;
        match &self.realized {
            Realized::Quotient(q) => Ok(q.lift_vector(x)),
            _ => Ok(x.to_vec()),
        }
    }

    /// For quotient spaces, the functional on the base space inducing `f`.
    pub fn lift_functional_to_base(&self, f: &[f64]) -> Result<Vec<f64>> {
        ensure_dim(self.dim, f.len())?;
        match &self.realized {
            Realized::Quotient(q) => Ok(q.lift_functional(f)),
            _ => Ok(f.to_vec()),
        }
    }

    /// Push a base-space functional down to quotient coordinates. The
    /// functional must annihilate the quotient subspace.
    pub fn descend_functional(&self, f_base: &[f64], tol: f64) -> Result<Vec<f64>> {
        match &self.realized {
            Realized::Quotient(q) => {
                ensure_dim(q.base.dim, f_base.len())?;
                let residual = q
                    .m_basis
                    .iter()
                    .map(|m| linalg::dot(f_base, m).abs() / linalg::norm2(m).max(1e-300))
                    .fold(0.0, f64::max);
                if residual > tol {
                    return Err(Error::KernelMismatch(residual));
                }
                Ok(q
                    .complement
                    .iter()
                    .map(|w| linalg::dot(f_base, w))
                    .collect())
            }
            _ => {
                ensure_dim(self.dim, f_base.len())?;
                Ok(f_base.to_vec())
            }
        }
    }
}

impl QuotientData {
    fn lift_vector(&self, c: &[f64]) -> Vec<f64> {
        let d = self.base.dim;
        let mut out = vec![0.0; d];
        for (ci, w) in c.iter().zip(&self.complement) {
            linalg::axpy(&mut out, *ci, w);
        }
        out
    }

    fn project_vector(&self, x: &[f64]) -> Vec<f64> {
        (0..self.coord_proj.nrows())
            .map(|i| {
                self.coord_proj
                    .row(i)
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn lift_functional(&self, g: &[f64]) -> Vec<f64> {
        let d = self.base.dim;
        (0..d)
            .map(|j| {
                g.iter()
                    .enumerate()
                    .map(|(i, gi)| gi * self.coord_proj[(i, j)])
                    .sum()
            })
            .collect()
    }
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().map(|v| v.abs()).fold(0.0, f64::max)
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        linalg::norm2(x)
    } else {
        let m = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if m == 0.0 {
            return 0.0;
        }
        let s: f64 = x.iter().map(|v| (v.abs() / m).powf(p)).sum();
        m * s.powf(1.0 / p)
    }
}

/// Hölder-equality maximizer of f over the l_p unit ball.
fn holder_maximizer(f: &[f64], p: f64, dual_value: f64) -> Option<Vec<f64>> {
    if dual_value <= 0.0 {
        return None;
    }
    if p.is_infinite() {
        // dual is l_1; maximizer is the sign vector.
        return Some(f.iter().map(|v| if *v == 0.0 { 0.0 } else { v.signum() }).collect());
    }
    if p == 1.0 {
        let (mut idx, mut best) = (0, 0.0);
        for (i, v) in f.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                idx = i;
            }
        }
        let mut x = vec![0.0; f.len()];
        x[idx] = f[idx].signum();
        return Some(x);
    }
    let q = p / (p - 1.0);
    let x: Vec<f64> = f
        .iter()
        .map(|&v| {
            if v == 0.0 {
                0.0
            } else {
                v.signum() * (v.abs() / dual_value).powf(q - 1.0)
            }
        })
        .collect();
    Some(x)
}

fn holder_weights(values: &[f64], p: f64, total: f64) -> Vec<f64> {
    if total <= 0.0 {
        return vec![0.0; values.len()];
    }
    if p.is_infinite() {
        return vec![1.0; values.len()];
    }
    if p == 1.0 {
        let (mut idx, mut best) = (0, 0.0);
        for (i, v) in values.iter().enumerate() {
            if *v > best {
                best = *v;
                idx = i;
            }
        }
        return (0..values.len())
            .map(|i| if i == idx { 1.0 } else { 0.0 })
            .collect();
    }
    let q = p / (p - 1.0);
    values
        .iter()
        .map(|&v| (v / total).powf(q - 1.0))
        .collect()
}

/// Barycenter of the dual-ball vertices attaining max g(x); exactly the
/// barycenter of the optimal dual face for polyhedral norms.
fn barycentric_argmax(duals: &[Vec<f64>], x: &[f64], n: f64) -> Vec<f64> {
    let vals: Vec<f64> = duals.iter().map(|g| linalg::dot(g, x)).collect();
    let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let hits: Vec<usize> = (0..duals.len())
        .filter(|&i| vals[i] >= best - 1e-9 * n.max(1.0))
        .collect();
    let w = 1.0 / hits.len() as f64;
    let dim = x.len();
    let mut f = vec![0.0; dim];
    for i in hits {
        linalg::axpy(&mut f, w, &duals[i]);
    }
    f
}

/// Exact Smith–Turett dual norm by enumerating supports and sign
/// patterns; each candidate solves (diag(w^2) + sigma sigma^T) u = f via
/// Sherman–Morrison and is scored as f(u)/||u||.
fn smith_turett_dual(f: &[f64], weights: &[f64], space: &Space) -> (f64, Option<Vec<f64>>) {
    let d = f.len();
    let mut best = 0.0f64;
    let mut best_x: Option<Vec<f64>> = None;
    let mut support: Vec<usize> = Vec::with_capacity(d);
    for mask in 1u32..(1 << d) {
        support.clear();
        for i in 0..d {
            if mask >> i & 1 == 1 {
                support.push(i);
            }
        }
        let k = support.len();
        for signs in 0u32..(1 << k) {
            // Solve (W^2 + sigma sigma^T) u = f_s on the support.
            let mut winv_f = vec![0.0; k];
            let mut winv_sigma = vec![0.0; k];
            let mut sigma_winv_f = 0.0;
            let mut sigma_winv_sigma = 0.0;
            for (j, &i) in support.iter().enumerate() {
                let s = if signs >> j & 1 == 1 { -1.0 } else { 1.0 };
                let w2 = weights[i] * weights[i];
                winv_f[j] = f[i] / w2;
                winv_sigma[j] = s / w2;
                sigma_winv_f += s * winv_f[j];
                sigma_winv_sigma += s * winv_sigma[j];
            }
            let denom = 1.0 + sigma_winv_sigma;
            let mut x = vec![0.0; d];
            let mut nonzero = false;
            for (j, &i) in support.iter().enumerate() {
                x[i] = winv_f[j] - winv_sigma[j] * sigma_winv_f / denom;
                nonzero |= x[i] != 0.0;
            }
            if !nonzero {
                continue;
            }
            let n = space.norm_unchecked(&x);
            if n > 1e-300 {
                let val = linalg::dot(f, &x) / n;
                if val > best {
                    best = val;
                    best_x = Some(linalg::scale(&x, 1.0 / n));
                }
            }
        }
    }
    (best, best_x)
}

fn smooth_subspace_distance(
    space: &Space,
    sn: &SmoothNorm,
    x: &[f64],
    basis: &[Vec<f64>],
) -> SubspaceDistance {
    let (c0, _) = linalg::least_squares(x, basis);
    let residual = |c: &[f64]| -> Vec<f64> {
        let mut v = x.to_vec();
        for (ci, b) in c.iter().zip(basis) {
            linalg::axpy(&mut v, -ci, b);
        }
        v
    };
    let mut c = c0;
    let scale = space.norm_unchecked(x).max(1.0);
    for mu_rel in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
        let mu = mu_rel * scale;
        c = optim::newton_minimize(
            |c| sn.value(&residual(c), mu),
            |c| {
                let v = residual(c);
                let g = sn.grad(&v, mu);
                basis.iter().map(|b| -linalg::dot(&g, b)).collect()
            },
            |c| {
                let v = residual(c);
                let h = sn.hess(&v, mu);
                let m = basis.len();
                DMatrix::from_fn(m, m, |i, j| {
                    let mut acc = 0.0;
                    for a in 0..v.len() {
                        for bidx in 0..v.len() {
                            acc += basis[i][a] * h[(a, bidx)] * basis[j][bidx];
                        }
                    }
                    acc
                })
            },
            &c,
            1e-13 * scale,
            80,
        );
    }
    let v = residual(&c);
    let mut minimizer = vec![0.0; space.dim];
    for (ci, b) in c.iter().zip(basis) {
        linalg::axpy(&mut minimizer, *ci, b);
    }
    SubspaceDistance {
        distance: space.norm_unchecked(&v),
        minimizer,
        coefficients: c,
        converged: true,
    }
}

fn pattern_subspace_distance(space: &Space, x: &[f64], basis: &[Vec<f64>]) -> SubspaceDistance {
    let (c0, _) = linalg::least_squares(x, basis);
    let obj = |c: &[f64]| -> f64 {
        let mut v = x.to_vec();
        for (ci, b) in c.iter().zip(basis) {
            linalg::axpy(&mut v, -ci, b);
        }
        space.norm_unchecked(&v)
    };
    let (c, d) = optim::pattern_search(
        obj,
        &c0,
        &optim::PatternOptions {
            max_steps: 4000,
            initial_step: 0.5,
            min_step: 1e-13,
            random_dirs: 6,
            seed: 0x6469_7374,
        },
    );
    let mut minimizer = vec![0.0; space.dim];
    for (ci, b) in c.iter().zip(basis) {
        linalg::axpy(&mut minimizer, *ci, b);
    }
    SubspaceDistance {
        distance: d,
        minimizer,
        coefficients: c,
        converged: false,
    }
}

fn variant_name(d: &NormDescriptor) -> &'static str {
    match d {
        NormDescriptor::Lp { .. } => "lp",
        NormDescriptor::SullivanSum { .. } => "sullivan_sum",
        NormDescriptor::SmithTurett { .. } => "smith_turett",
        NormDescriptor::Polyhedral { .. } => "polyhedral",
        NormDescriptor::Product { .. } => "product",
        NormDescriptor::Quotient { .. } => "quotient",
    }
}
