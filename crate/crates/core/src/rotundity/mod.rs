//! Rotundity moduli and classifier experiments: uniform and directional
//! (fixed-functional) moduli, rotundity witness search, quotient-moduli
//! sweeps and l_p-product witness constructions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinant::{dk_determinant, DeterminantInput};
use crate::error::{Error, Result};
use crate::linalg;
use crate::optim::{self, PatternOptions};
use crate::report::DecayVerdict;
use crate::space::{Functional, NormDescriptor, PValue, Space};
use crate::tol::Tolerances;
use crate::volume::{vk_volume, VolumeStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulusMode {
    /// Constraint V[(x_i)] >= eps over k+1 unit vectors.
    KUr,
    /// Constraint |D_k| >= eps at a fixed functional tuple.
    KWur,
    /// Anchored variant: first point fixed, k unit vectors free.
    KWlur,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SearchBudget {
    pub multistarts: usize,
    pub local_steps: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        // default for dim <= 6, k <= 3
        Self {
            multistarts: 64,
            local_steps: 500,
        }
    }
}

impl SearchBudget {
    pub fn small() -> Self {
        Self {
            multistarts: 16,
            local_steps: 200,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusQuery {
    pub mode: ModulusMode,
    pub k: usize,
    pub epsilon: f64,
    /// Required for KWur / KWlur.
    #[serde(default)]
    pub functionals: Vec<Functional>,
    /// Required for KWlur; must be a unit vector.
    #[serde(default)]
    pub anchor: Option<Vec<f64>>,
    #[serde(default)]
    pub budget: SearchBudget,
    #[serde(default)]
    pub seed: u64,
    /// Optional warm-start witnesses (tuples of free points).
    #[serde(default)]
    pub warm_starts: Vec<Vec<Vec<f64>>>,
}

impl ModulusQuery {
    pub fn new(mode: ModulusMode, k: usize, epsilon: f64) -> Self {
        Self {
            mode,
            k,
            epsilon,
            functionals: Vec::new(),
            anchor: None,
            budget: SearchBudget::default(),
            seed: 0,
            warm_starts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModulusEstimate {
    /// Certified upper bound of the modulus; 1.0 when no feasible tuple
    /// was found (the inf { {1} u ... } convention).
    pub value: f64,
    /// Free points of the best feasible witness (excludes the anchor).
    pub witness: Vec<Vec<f64>>,
    /// Constraint shortfall max(0, eps - C) at the witness.
    pub feasibility_gap: f64,
    pub converged: bool,
    /// True when the epsilon level admitted no feasible tuple at budget.
    pub infeasible: bool,
    /// Constraint value C at the witness (volume or |D_k|).
    pub constraint_value: f64,
}

fn unit_check(space: &Space, x: &[f64], tol: f64) -> Result<()> {
    let n = space.norm(x)?;
    if (n - 1.0).abs() > tol {
        return Err(Error::NonUnitInput(n));
    }
    Ok(())
}

/// Objective 1 - ||sum||/(k+1), with the anchor included for KWlur.
fn objective(space: &Space, anchor: Option<&[f64]>, points: &[Vec<f64>], k: usize) -> f64 {
    let mut sum = linalg::vec_sum(points);
    if let Some(a) = anchor {
        linalg::axpy(&mut sum, 1.0, a);
    }
    1.0 - space.norm_unchecked(&sum) / (k as f64 + 1.0)
}

/// Constraint evaluator: returns C(points) whose feasibility is C >= eps.
struct ConstraintEval<'a> {
    space: &'a Space,
    mode: ModulusMode,
    k: usize,
    functionals: &'a [Functional],
    anchor: Option<&'a [f64]>,
    seed: u64,
}

impl ConstraintEval<'_> {
    fn full_points(&self, free: &[Vec<f64>]) -> Vec<Vec<f64>> {
        match self.anchor {
            Some(a) => {
                let mut pts = Vec::with_capacity(free.len() + 1);
                pts.push(a.to_vec());
                pts.extend(free.iter().cloned());
                pts
            }
            None => free.to_vec(),
        }
    }

    /// Exact (or certified lower bound) constraint for final validation.
    fn validate(&self, free: &[Vec<f64>]) -> f64 {
        let pts = self.full_points(free);
        match self.mode {
            ModulusMode::KWur | ModulusMode::KWlur => {
                DeterminantInput::new(&pts, self.functionals)
                    .map(|input| dk_determinant(&input).abs())
                    .unwrap_or(0.0)
            }
            ModulusMode::KUr => vk_volume(
                self.space,
                &pts,
                self.k,
                VolumeStrategy::Auto,
                self.seed,
            )
            .map(|v| v.value)
            .unwrap_or(0.0),
        }
    }

    /// Cheap per-poll constraint. For KUr on spaces without a closed
    /// volume form this is |D_k| at a working dual tuple that the caller
    /// refreshes between rounds (a certified lower bound of V).
    fn cheap(&self, free: &[Vec<f64>], work_tuple: Option<&[Functional]>) -> f64 {
        let pts = self.full_points(free);
        match self.mode {
            ModulusMode::KWur | ModulusMode::KWlur => {
                DeterminantInput::new(&pts, self.functionals)
                    .map(|input| dk_determinant(&input).abs())
                    .unwrap_or(0.0)
            }
            ModulusMode::KUr => {
                if self.k == 1 {
                    return self
                        .space
                        .norm(&linalg::sub(&pts[1], &pts[0]))
                        .unwrap_or(0.0);
                }
                match work_tuple {
                    Some(fs) => DeterminantInput::new(&pts, fs)
                        .map(|input| dk_determinant(&input).abs())
                        .unwrap_or(0.0),
                    None => self.validate(free),
                }
            }
        }
    }

    /// Whether the cheap path needs a refreshed working tuple.
    fn needs_work_tuple(&self) -> bool {
        matches!(self.mode, ModulusMode::KUr)
            && self.k > 1
            && !(self.space.is_polyhedral() || euclidean_like(self.space))
    }

    fn refresh_work_tuple(&self, free: &[Vec<f64>]) -> Option<Vec<Functional>> {
        let pts = self.full_points(free);
        crate::volume::vk_volume(self.space, &pts, self.k, VolumeStrategy::Iterative, self.seed)
            .ok()
            .map(|v| v.certificate)
    }
}

fn euclidean_like(space: &Space) -> bool {
    match space.descriptor() {
        NormDescriptor::Lp { p, .. } => p.get() == 2.0,
        NormDescriptor::Quotient { base, .. } => {
            matches!(&**base, NormDescriptor::Lp { p, .. } if p.get() == 2.0)
        }
        _ => false,
    }
}

/// Upper-bound estimate of the modulus of Sullivan-type rotundity via
/// penalty-augmented multi-start local search over sphere tuples.
pub fn modulus_estimate(space: &Space, query: &ModulusQuery) -> Result<ModulusEstimate> {
    let tol = Tolerances::default();
    let k = query.k;
    if k == 0 || k > crate::determinant::MAX_K {
        return Err(Error::InvalidArgument(format!("bad order k = {k}")));
    }
    if query.epsilon <= 0.0 {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    match query.mode {
        ModulusMode::KWur | ModulusMode::KWlur => {
            if query.functionals.len() != k {
                return Err(Error::InvalidArgument(format!(
                    "mode needs exactly {k} functionals, got {}",
                    query.functionals.len()
                )));
            }
            for f in &query.functionals {
                if !f.is_unit(tol.dual_sphere) {
                    return Err(Error::NonUnitInput(f.dual_norm));
                }
            }
        }
        ModulusMode::KUr => {}
    }
    let anchor = match query.mode {
        ModulusMode::KWlur => {
            let a = query
                .anchor
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("KWlur needs an anchor".into()))?;
            unit_check(space, a, tol.dual_sphere)?;
            Some(a.as_slice())
        }
        _ => {
            if query.anchor.is_some() {
                return Err(Error::InvalidArgument(
                    "anchor is only meaningful for KWlur".into(),
                ));
            }
            None
        }
    };
    let n_free = match query.mode {
        ModulusMode::KWlur => k,
        _ => k + 1,
    };
    let dim = space.dim();
    let eval = ConstraintEval {
        space,
        mode: query.mode,
        k,
        functionals: &query.functionals,
        anchor,
        seed: query.seed,
    };

    // Seed stage: structured tuples evaluated directly.
    let pool = seed_pool(space, query.seed);
    let mut best: Option<(f64, Vec<Vec<f64>>, f64)> = None; // (value, witness, C)
    let consider = |points: &[Vec<f64>], best: &mut Option<(f64, Vec<Vec<f64>>, f64)>| {
        let c = eval.validate(points);
        if c >= query.epsilon {
            let val = objective(space, anchor, points, k).max(0.0);
            if best.as_ref().is_none_or(|b| val < b.0) {
                *best = Some((val, points.to_vec(), c));
            }
        }
    };
    let mut seed_tuples: Vec<Vec<Vec<f64>>> = query.warm_starts.clone();
    seed_tuples.extend(tuples_from_pool(&pool, n_free, 1500));
    for t in &seed_tuples {
        consider(t, &mut best);
    }

    // Local search stage.
    let margin = 1.0 + 1e-3;
    let start_points = search_starts(space, &pool, &seed_tuples, n_free, query, &eval);
    let results: Vec<Option<(f64, Vec<Vec<f64>>, f64)>> = start_points
        .into_par_iter()
        .enumerate()
        .map(|(si, start)| {
            let mut flat = flatten(&start);
            let steps_per_round = (query.budget.local_steps / 5).max(20);
            let mut work_tuple = if eval.needs_work_tuple() {
                eval.refresh_work_tuple(&start)
            } else {
                None
            };
            let mut lambda = 1.0;
            for round in 0..5 {
                let wt = work_tuple.clone();
                let f = |v: &[f64]| -> f64 {
                    let pts = unflatten(v, n_free, dim);
                    let obj = objective(space, anchor, &pts, k);
                    let mut pen = 0.0;
                    for p in &pts {
                        let d = space.norm_unchecked(p) - 1.0;
                        pen += d * d;
                    }
                    let c = eval.cheap(&pts, wt.as_deref());
                    let short = (query.epsilon * margin - c).max(0.0);
                    obj + lambda * (pen + short * short)
                };
                let (out, _) = optim::pattern_search(
                    f,
                    &flat,
                    &PatternOptions {
                        max_steps: steps_per_round,
                        initial_step: if round == 0 { 0.3 } else { 0.08 },
                        min_step: 1e-12,
                        random_dirs: 4,
                        seed: optim::subseed(query.seed, (si * 16 + round) as u64),
                    },
                );
                flat = out;
                lambda *= 10.0;
                if eval.needs_work_tuple() {
                    let pts = unflatten(&flat, n_free, dim);
                    if let Some(t) = eval.refresh_work_tuple(&pts) {
                        work_tuple = Some(t);
                    }
                }
            }
            // Radial projection, then exact validation.
            let pts = unflatten(&flat, n_free, dim);
            let projected: Option<Vec<Vec<f64>>> = pts
                .iter()
                .map(|p| space.radial_project(p).ok())
                .collect();
            let projected = projected?;
            let c = eval.validate(&projected);
            if c >= query.epsilon {
                let val = objective(space, anchor, &projected, k).max(0.0);
                Some((val, projected, c))
            } else {
                None
            }
        })
        .collect();
    for r in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| r.0 < b.0) {
            best = Some(r);
        }
    }

    Ok(match best {
        Some((value, witness, c)) => ModulusEstimate {
            value: value.min(1.0),
            witness,
            feasibility_gap: (query.epsilon - c).max(0.0),
            converged: true,
            infeasible: false,
            constraint_value: c,
        },
        None => ModulusEstimate {
            value: 1.0,
            witness: Vec::new(),
            feasibility_gap: query.epsilon,
            converged: false,
            infeasible: true,
            constraint_value: 0.0,
        },
    })
}

fn flatten(points: &[Vec<f64>]) -> Vec<f64> {
    points.iter().flatten().copied().collect()
}

fn unflatten(flat: &[f64], n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| flat[i * dim..(i + 1) * dim].to_vec()).collect()
}

/// Unit-vector pool: signed coordinate directions, polyhedral vertices
/// and seeded random directions.
fn seed_pool(space: &Space, seed: u64) -> Vec<Vec<f64>> {
    let dim = space.dim();
    let mut pool = Vec::new();
    for i in 0..dim {
        for sgn in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = sgn;
            if let Ok(u) = space.radial_project(&e) {
                pool.push(u);
            }
        }
    }
    if space.is_polyhedral() {
        if let Ok(verts) = space.extreme_points(false) {
            if verts.len() <= 64 {
                pool.extend(verts);
            }
        }
    }
    let mut rng = optim::rng_for(seed, 0x7365_6564);
    let target = (pool.len() + 8).max(2 * dim + 8);
    while pool.len() < target {
        pool.push(space.random_unit_vector(&mut rng));
    }
    pool
}

fn tuples_from_pool(pool: &[Vec<f64>], n_free: usize, cap: usize) -> Vec<Vec<Vec<f64>>> {
    use itertools::Itertools;
    let mut out = Vec::new();
    for combo in (0..pool.len()).combinations(n_free) {
        if out.len() >= cap {
            break;
        }
        out.push(combo.into_iter().map(|i| pool[i].clone()).collect());
    }
    out
}

fn search_starts(
    space: &Space,
    pool: &[Vec<f64>],
    seed_tuples: &[Vec<Vec<f64>>],
    n_free: usize,
    query: &ModulusQuery,
    eval: &ConstraintEval,
) -> Vec<Vec<Vec<f64>>> {
    // Rank seeds by penalized score so the local searches begin near
    // feasibility; top up with random tuples.
    let mut scored: Vec<(f64, &Vec<Vec<f64>>)> = seed_tuples
        .iter()
        .map(|t| {
            let c = eval.cheap(t, None);
            let anchor = query.anchor.as_deref();
            let obj = objective(space, anchor, t, query.k);
            let short = (query.epsilon - c).max(0.0);
            (obj + short * short, t)
        })
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut starts: Vec<Vec<Vec<f64>>> = scored
        .iter()
        .take(query.budget.multistarts / 2)
        .map(|(_, t)| (*t).clone())
        .collect();
    let mut rng = optim::rng_for(query.seed, 0x7374_6172);
    while starts.len() < query.budget.multistarts {
        let t: Vec<Vec<f64>> = (0..n_free)
            .map(|_| {
                if pool.is_empty() {
                    space.random_unit_vector(&mut rng)
                } else {
                    use rand::Rng;
                    let i = rng.random_range(0..pool.len());
                    let mut v = pool[i].clone();
                    let jitter = optim::random_direction(&mut rng, space.dim());
                    linalg::axpy(&mut v, 0.3, &jitter);
                    space
                        .radial_project(&v)
                        .unwrap_or_else(|_| space.random_unit_vector(&mut rng))
                }
            })
            .collect();
        starts.push(t);
    }
    starts
}

// ---------------------------------------------------------------------------
// k-rotundity classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// A unit tuple with mean-norm one and volume >= the declared floor
    /// exists: the space is NOT k-rotund (at witness resolution).
    WitnessFound,
    NoWitnessAtBudget,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub points: Vec<Vec<f64>>,
    pub functionals: Vec<Functional>,
    pub determinant: f64,
    pub norms: Vec<f64>,
    pub sum_norm: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchTelemetry {
    pub starts: usize,
    pub tuples_examined: usize,
    pub best_sum_norm: f64,
    pub best_feasible_volume: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotundityVerdict {
    pub classification: Classification,
    pub certificate: Option<WitnessCertificate>,
    pub telemetry: SearchTelemetry,
    /// Volume floor a witness must clear.
    pub volume_floor: f64,
}

/// Search for unit vectors with mean-norm one and volume at least
/// `volume_floor`. Flat faces of polyhedral balls are enumerated exactly;
/// otherwise seeds plus penalty search. Absence of a witness at budget is
/// evidence, not proof.
pub fn classify_k_rotund(
    space: &Space,
    k: usize,
    volume_floor: f64,
    budget: SearchBudget,
    seed: u64,
) -> Result<RotundityVerdict> {
    let tol = Tolerances::default();
    if space.dim() < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "classification needs dim >= k+1 (dim {}, k {k})",
            space.dim()
        )));
    }
    let kf = k as f64 + 1.0;
    let mut telemetry = SearchTelemetry {
        starts: 0,
        tuples_examined: 0,
        best_sum_norm: 0.0,
        best_feasible_volume: 0.0,
    };
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None; // (volume, points)

    let consider = |pts: &[Vec<f64>],
                        telemetry: &mut SearchTelemetry,
                        best: &mut Option<(f64, Vec<Vec<f64>>)>|
     -> Result<()> {
        telemetry.tuples_examined += 1;
        let sum_norm = space.norm(&linalg::vec_sum(pts))?;
        telemetry.best_sum_norm = telemetry.best_sum_norm.max(sum_norm);
        if sum_norm < kf * (1.0 - tol.witness_sum) {
            return Ok(());
        }
        let vol = vk_volume(space, pts, k, VolumeStrategy::Auto, seed)?;
        if vol.value >= volume_floor {
            telemetry.best_feasible_volume = telemetry.best_feasible_volume.max(vol.value);
            if best.as_ref().is_none_or(|b| vol.value > b.0) {
                *best = Some((vol.value, pts.to_vec()));
            }
        }
        Ok(())
    };

    if space.is_polyhedral() {
        // Flat-face boundary parametrization: tuples of vertices sharing
        // an exposing dual vertex automatically satisfy ||sum|| = k+1.
        let duals = space.extreme_points(true)?;
        let verts = space.extreme_points(false)?;
        for g in &duals {
            let face: Vec<&Vec<f64>> = verts
                .iter()
                .filter(|v| linalg::dot(g, v) >= 1.0 - 1e-9)
                .collect();
            if face.len() < k + 1 {
                continue;
            }
            use itertools::Itertools;
            for combo in face.iter().combinations(k + 1).take(2000) {
                let pts: Vec<Vec<f64>> = combo.into_iter().map(|v| (*v).clone()).collect();
                consider(&pts, &mut telemetry, &mut best)?;
            }
        }
    }

    // Seed tuples from the pool.
    let pool = seed_pool(space, seed);
    for pts in tuples_from_pool(&pool, k + 1, 1500) {
        consider(&pts, &mut telemetry, &mut best)?;
    }

    // Penalty search: maximize the volume proxy subject to the sphere and
    // sum conditions.
    if best.is_none() {
        let dim = space.dim();
        let starts: Vec<Vec<Vec<f64>>> = {
            let mut rng = optim::rng_for(seed, 0x636c_6173);
            (0..budget.multistarts)
                .map(|_| (0..k + 1).map(|_| space.random_unit_vector(&mut rng)).collect())
                .collect()
        };
        telemetry.starts = starts.len();
        let candidates: Vec<Vec<Vec<f64>>> = starts
            .into_par_iter()
            .enumerate()
            .map(|(si, start)| {
                let mut flat = flatten(&start);
                let mut work = vk_volume(space, &start, k, VolumeStrategy::Iterative, seed)
                    .map(|v| v.certificate)
                    .ok();
                let steps = (budget.local_steps / 5).max(20);
                let mut lambda = 1.0;
                for round in 0..5 {
                    let wt = work.clone();
                    let f = |v: &[f64]| -> f64 {
                        let pts = unflatten(v, k + 1, dim);
                        let c = match &wt {
                            Some(fs) => DeterminantInput::new(&pts, fs)
                                .map(|i| dk_determinant(&i).abs())
                                .unwrap_or(0.0),
                            None => 0.0,
                        };
                        let mut pen = 0.0;
                        for p in &pts {
                            let d = space.norm_unchecked(p) - 1.0;
                            pen += d * d;
                        }
                        let s = space.norm_unchecked(&linalg::vec_sum(&pts));
                        let gap = kf - s;
                        -c + lambda * (pen + gap * gap)
                    };
                    let (out, _) = optim::pattern_search(
                        f,
                        &flat,
                        &PatternOptions {
                            max_steps: steps,
                            initial_step: if round == 0 { 0.3 } else { 0.08 },
                            min_step: 1e-12,
                            random_dirs: 4,
                            seed: optim::subseed(seed, (si * 8 + round) as u64),
                        },
                    );
                    flat = out;
                    lambda *= 10.0;
                    let pts = unflatten(&flat, k + 1, dim);
                    if let Ok(v) = vk_volume(space, &pts, k, VolumeStrategy::Iterative, seed) {
                        work = Some(v.certificate);
                    }
                }
                let pts = unflatten(&flat, k + 1, dim);
                pts.iter()
                    .map(|p| space.radial_project(p))
                    .collect::<Result<Vec<_>>>()
            })
            .filter_map(|r| r.ok())
            .collect();
        for pts in candidates {
            consider(&pts, &mut telemetry, &mut best)?;
        }
    }

    match best {
        Some((volume, points)) => {
            let vol = vk_volume(space, &points, k, VolumeStrategy::Auto, seed)?;
            let det_input = DeterminantInput::new(&points, &vol.certificate)?;
            let determinant = dk_determinant(&det_input);
            let norms: Vec<f64> = points
                .iter()
                .map(|p| space.norm_unchecked(p))
                .collect();
            let sum_norm = space.norm(&linalg::vec_sum(&points))?;
            Ok(RotundityVerdict {
                classification: Classification::WitnessFound,
                certificate: Some(WitnessCertificate {
                    points,
                    functionals: vol.certificate,
                    determinant,
                    norms,
                    sum_norm,
                    volume,
                }),
                telemetry,
                volume_floor,
            })
        }
        None => Ok(RotundityVerdict {
            classification: Classification::NoWitnessAtBudget,
            certificate: None,
            telemetry,
            volume_floor,
        }),
    }
}

// ---------------------------------------------------------------------------
// Midpoint (WMLUR) sequence test
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WmlurReport {
    pub hypothesis_values: Vec<f64>,
    pub hypothesis_ok: bool,
    /// max |D_k| over the supplied functional tuples, per sequence index.
    pub det_sup_per_n: Vec<f64>,
    pub verdict: DecayVerdict,
    /// True when the midpoint hypothesis failed and the verdict is void.
    pub vacuous: bool,
}

/// Determinant decay report for midpoint-collapsing unit sequences:
/// checks ||(k+1)x - sum_i x_n^(i)|| -> 0, then tracks the determinants.
pub fn wmlur_sequence_test(
    space: &Space,
    k: usize,
    x: &[f64],
    sequences: &[Vec<Vec<f64>>],
    functional_tuples: &[Vec<Functional>],
    decay_tol: f64,
) -> Result<WmlurReport> {
    let tol = Tolerances::default();
    unit_check(space, x, 1e-6)?;
    if sequences.len() != k + 1 {
        return Err(Error::InvalidArgument(format!(
            "need k+1 = {} sequences, got {}",
            k + 1,
            sequences.len()
        )));
    }
    let n_len = sequences[0].len();
    if n_len == 0 || sequences.iter().any(|s| s.len() != n_len) {
        return Err(Error::InvalidArgument(
            "sequences must be non-empty and of equal length".into(),
        ));
    }
    for tuple in functional_tuples {
        if tuple.len() != k {
            return Err(Error::InvalidArgument(format!(
                "each functional tuple must have k = {k} entries"
            )));
        }
        for f in tuple {
            if !f.is_unit(tol.dual_sphere) {
                return Err(Error::NonUnitInput(f.dual_norm));
            }
        }
    }
    let kf = k as f64 + 1.0;
    let mut hypothesis_values = Vec::with_capacity(n_len);
    let mut det_sup = Vec::with_capacity(n_len);
    for n in 0..n_len {
        let pts: Vec<Vec<f64>> = sequences.iter().map(|s| s[n].clone()).collect();
        let mut target = linalg::scale(x, kf);
        let sum = linalg::vec_sum(&pts);
        linalg::axpy(&mut target, -1.0, &sum);
        hypothesis_values.push(space.norm(&target)?);
        let mut sup = 0.0f64;
        for tuple in functional_tuples {
            let input = DeterminantInput::new(&pts, tuple)?;
            sup = sup.max(dk_determinant(&input).abs());
        }
        det_sup.push(sup);
    }
    // Hypothesis: the midpoint deviation must have dropped essentially to
    // zero by the final index.
    let h_final = *hypothesis_values.last().unwrap();
    let h_initial = hypothesis_values[0].max(1e-12);
    let hypothesis_ok = h_final <= 0.05 * h_initial.max(0.02) || h_final <= 1e-9;
    let d_final = *det_sup.last().unwrap();
    let verdict = if !hypothesis_ok {
        DecayVerdict::Inconclusive
    } else if d_final <= decay_tol {
        DecayVerdict::DecaysBelowTol
    } else {
        DecayVerdict::StallsAboveFloor
    };
    Ok(WmlurReport {
        hypothesis_values,
        hypothesis_ok,
        det_sup_per_n: det_sup,
        verdict,
        vacuous: !hypothesis_ok,
    })
}

// ---------------------------------------------------------------------------
// Quotient modulus sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientSweepEntry {
    pub subspace_dim: usize,
    pub estimate: ModulusEstimate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientSweepResult {
    pub entries: Vec<QuotientSweepEntry>,
    /// Infimum of the per-quotient estimates.
    pub family_infimum: f64,
    /// Directional modulus of the base space at the same data.
    pub base_estimate: ModulusEstimate,
    /// Scope note: the theorem quantifies over all admissible subspaces,
    /// the sweep covers only the supplied finite family.
    pub note: String,
}

/// Evaluate the directional modulus on every quotient X/M of a finite
/// family of subspaces contained in the functionals' kernel intersection.
pub fn quotient_modulus_sweep(
    space: &Space,
    functionals: &[Functional],
    subspace_family: &[Vec<Vec<f64>>],
    epsilon: f64,
    budget: SearchBudget,
    seed: u64,
) -> Result<QuotientSweepResult> {
    let tol = Tolerances::default();
    let k = functionals.len();
    for f in functionals {
        if !f.is_unit(tol.dual_sphere) {
            return Err(Error::NonUnitInput(f.dual_norm));
        }
    }
    let mut entries = Vec::with_capacity(subspace_family.len());
    for basis in subspace_family {
        for b in basis {
            let scale = linalg::norm2(b).max(1e-300);
            for f in functionals {
                let r = f.apply(b).abs() / scale;
                if r > tol.kernel_containment {
                    return Err(Error::KernelMismatch(r));
                }
            }
        }
        let qdesc = NormDescriptor::Quotient {
            base: Box::new(space.descriptor().clone()),
            subspace_basis: basis.clone(),
        };
        let qspace = Space::new(qdesc)?;
        let mut qfa = Vec::with_capacity(k);
        for f in functionals {
            let coords = qspace.descend_functional(&f.coords, tol.kernel_containment * 10.0)?;
            qfa.push(qspace.unit_functional(&coords)?);
        }
        let mut query = ModulusQuery::new(ModulusMode::KWur, k, epsilon);
        query.functionals = qfa;
        query.budget = budget;
        query.seed = seed;
        let estimate = modulus_estimate(&qspace, &query)?;
        entries.push(QuotientSweepEntry {
            subspace_dim: basis.len(),
            estimate,
        });
    }
    let family_infimum = entries
        .iter()
        .map(|e| e.estimate.value)
        .fold(f64::INFINITY, f64::min);
    let mut base_query = ModulusQuery::new(ModulusMode::KWur, k, epsilon);
    base_query.functionals = functionals.to_vec();
    base_query.budget = budget;
    base_query.seed = seed;
    let base_estimate = modulus_estimate(space, &base_query)?;
    Ok(QuotientSweepResult {
        entries,
        family_infimum,
        base_estimate,
        note: "finite family sweep; the quotient characterization quantifies over all \
               admissible subspaces"
            .into(),
    })
}

// ---------------------------------------------------------------------------
// Product witness construction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub functional: Functional,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductWitnessResult {
    /// The staircase points z^(1), ..., z^(k+1) in the product space.
    pub points: Vec<Vec<f64>>,
    /// Slot-embedded functionals h_1, ..., h_k.
    pub functionals: Vec<Functional>,
    pub determinant: f64,
    /// k^(-k/p) * prod_i f_i(x_i - y_i).
    pub predicted: f64,
    pub identity_error: f64,
    pub point_norms: Vec<f64>,
}

/// Build the staircase witness tuple of the l_p-product from per-factor
/// witness pairs and verify the exact determinant product identity
/// |D_k| = k^(-k/p) * prod |f_i(x_i - y_i)|.
pub fn product_witness_build(
    factors: &[Space],
    witnesses: &[FactorWitness],
    p: PValue,
) -> Result<ProductWitnessResult> {
    let tol = Tolerances::default();
    let k = factors.len();
    if k == 0 || k > crate::determinant::MAX_K {
        return Err(Error::InvalidArgument(format!("bad factor count {k}")));
    }
    if witnesses.len() != k {
        return Err(Error::InvalidArgument(format!(
            "need one witness per factor ({k}), got {}",
            witnesses.len()
        )));
    }
    for (fac, w) in factors.iter().zip(witnesses) {
        unit_check(fac, &w.x, tol.dual_sphere)?;
        unit_check(fac, &w.y, tol.dual_sphere)?;
        let dn = fac.dual_norm_value(&w.functional.coords)?;
        if (dn - 1.0).abs() > tol.dual_sphere {
            return Err(Error::NonUnitInput(dn));
        }
    }
    let product = Space::new(NormDescriptor::Product {
        p,
        factors: factors.iter().map(|f| f.descriptor().clone()).collect(),
    })?;
    let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
    let offsets: Vec<usize> = dims
        .iter()
        .scan(0usize, |acc, d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let total: usize = dims.iter().sum();
    let scale = if p.is_infinite() {
        1.0
    } else {
        (k as f64).powf(-1.0 / p.get())
    };
    // z^(t) = scale * (y_1, ..., y_{t-1}, x_t, ..., x_k), t = 1..k+1
    let mut points = Vec::with_capacity(k + 1);
    for t in 1..=k + 1 {
        let mut z = vec![0.0; total];
        for (i, w) in witnesses.iter().enumerate() {
            let comp = if i + 1 <= t - 1 { &w.y } else { &w.x };
            for (j, v) in comp.iter().enumerate() {
                z[offsets[i] + j] = scale * v;
            }
        }
        points.push(z);
    }
    let mut functionals = Vec::with_capacity(k);
    for (i, w) in witnesses.iter().enumerate() {
        let mut h = vec![0.0; total];
        h[offsets[i]..offsets[i] + dims[i]].copy_from_slice(&w.functional.coords);
        functionals.push(product.functional(h)?);
    }
    let point_norms: Vec<f64> = points
        .iter()
        .map(|z| product.norm_unchecked(z))
        .collect();
    let input = DeterminantInput::new(&points, &functionals)?;
    let determinant = dk_determinant(&input);
    let factor_gaps: f64 = witnesses
        .iter()
        .map(|w| w.functional.apply(&linalg::sub(&w.x, &w.y)))
        .product();
    let predicted = scale.powi(k as i32) * factor_gaps;
    let identity_error = (determinant.abs() - predicted.abs()).abs();
    Ok(ProductWitnessResult {
        points,
        functionals,
        determinant,
        predicted,
        identity_error,
        point_norms,
    })
}

// ---------------------------------------------------------------------------
// Schur-property limit harness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchurSample {
    /// max |D_k| over the sampled functional tuples at index n.
    pub sampled_sup: f64,
    /// Volume estimate at index n.
    pub volume: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchurReport {
    pub samples: Vec<SchurSample>,
    /// Largest observed ratio volume / sampled_sup (the empirical
    /// envelope constant); None when all sampled sups are negligible.
    pub envelope_constant: Option<f64>,
}

/// Empirical check that sampled determinant smallness forces volume
/// smallness (trivial Schur property in finite dimension): reports the
/// per-index envelope.
pub fn schur_limit_harness(
    space: &Space,
    k: usize,
    sequences: &[Vec<Vec<f64>>],
    functional_samples: usize,
    seed: u64,
) -> Result<SchurReport> {
    if sequences.len() != k + 1 {
        return Err(Error::InvalidArgument(format!(
            "need k+1 = {} sequences",
            k + 1
        )));
    }
    let n_len = sequences[0].len();
    if sequences.iter().any(|s| s.len() != n_len) {
        return Err(Error::InvalidArgument("ragged sequences".into()));
    }
    // Functional sample: all dual-vertex tuples for polyhedral balls,
    // otherwise seeded random unit tuples.
    let tuples: Vec<Vec<Functional>> = if space.is_polyhedral() {
        let duals = space.extreme_points(true)?;
        if duals.len().pow(k as u32) <= 4096 {
            cartesian_tuples(space, &duals, k)?
        } else {
            random_tuples(space, k, functional_samples, seed)?
        }
    } else {
        random_tuples(space, k, functional_samples, seed)?
    };
    let mut samples = Vec::with_capacity(n_len);
    for n in 0..n_len {
        let pts: Vec<Vec<f64>> = sequences.iter().map(|s| s[n].clone()).collect();
        let mut sup = 0.0f64;
        for tuple in &tuples {
            let input = DeterminantInput::new(&pts, tuple)?;
            sup = sup.max(dk_determinant(&input).abs());
        }
        let volume = vk_volume(space, &pts, k, VolumeStrategy::Auto, seed)?.value;
        samples.push(SchurSample {
            sampled_sup: sup,
            volume,
        });
    }
    let envelope_constant = samples
        .iter()
        .filter(|s| s.sampled_sup > 1e-12)
        .map(|s| s.volume / s.sampled_sup)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
    Ok(SchurReport {
        samples,
        envelope_constant,
    })
}

fn cartesian_tuples(
    space: &Space,
    duals: &[Vec<f64>],
    k: usize,
) -> Result<Vec<Vec<Functional>>> {
    let fs: Vec<Functional> = duals
        .iter()
        .map(|g| space.functional(g.clone()))
        .collect::<Result<_>>()?;
    let mut tuples: Vec<Vec<Functional>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(tuples.len() * fs.len());
        for t in &tuples {
            for f in &fs {
                let mut t2 = t.clone();
                t2.push(f.clone());
                next.push(t2);
            }
        }
        tuples = next;
    }
    Ok(tuples)
}

fn random_tuples(
    space: &Space,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<Functional>>> {
    let mut rng = optim::rng_for(seed, 0x7363_6875);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut tuple = Vec::with_capacity(k);
        for _ in 0..k {
            let dir = optim::random_direction(&mut rng, space.dim());
            tuple.push(space.unit_functional(&dir)?);
        }
        out.push(tuple);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
