//! Best-approximation machinery: distances to sets, near-minimizer
//! sampling and Chebyshev-type determinant-decay diagnostics.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::determinant::{dk_determinant, DeterminantInput};
use crate::error::{ensure_dim, Error, Result};
use crate::linalg;
use crate::lp;
use crate::optim::{self, PatternOptions};
use crate::report::DecayVerdict;
use crate::space::{Functional, Space};
use crate::tol::Tolerances;
use crate::volume::{diam_k, VolumeStrategy};

/// Proximal target sets for projection diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SetDescriptor {
    UnitBall,
    ScaledSphere { r: f64 },
    Subspace { basis: Vec<Vec<f64>> },
    Polytope { vertices: Vec<Vec<f64>> },
    FinitePointSet { points: Vec<Vec<f64>> },
    /// Unit ball of the ambient norm restricted to a subspace (covers
    /// balls of subspaces, as in the product-space counterexample).
    SubspaceBall { basis: Vec<Vec<f64>> },
}

impl SetDescriptor {
    pub fn validate(&self, space: &Space) -> Result<()> {
        let dim = space.dim();
        match self {
            SetDescriptor::UnitBall => Ok(()),
            SetDescriptor::ScaledSphere { r } => {
                if *r > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidDescriptor("sphere radius must be positive".into()))
                }
            }
            SetDescriptor::Subspace { basis } | SetDescriptor::SubspaceBall { basis } => {
                for b in basis {
                    ensure_dim(dim, b.len())?;
                }
                linalg::check_independent(basis, 1e-10)
            }
            SetDescriptor::Polytope { vertices } => {
                if vertices.is_empty() {
                    return Err(Error::InvalidDescriptor("empty polytope".into()));
                }
                for v in vertices {
                    ensure_dim(dim, v.len())?;
                }
                Ok(())
            }
            SetDescriptor::FinitePointSet { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidDescriptor("empty point set".into()));
                }
                for p in points {
                    ensure_dim(dim, p.len())?;
                }
                Ok(())
            }
        }
    }

    /// Membership predicate at tolerance `tol`.
    pub fn contains(&self, space: &Space, x: &[f64], tol: f64) -> Result<bool> {
        Ok(match self {
            SetDescriptor::UnitBall => space.norm(x)? <= 1.0 + tol,
            SetDescriptor::ScaledSphere { r } => (space.norm(x)? - r).abs() <= tol * r.max(1.0),
            SetDescriptor::Subspace { basis } => {
                space.distance_to_subspace(x, basis)?.distance <= tol
            }
            SetDescriptor::Polytope { vertices } => lp::in_convex_hull(x, vertices, tol),
            SetDescriptor::FinitePointSet { points } => points
                .iter()
                .any(|p| space.norm_unchecked(&linalg::sub(x, p)) <= tol),
            SetDescriptor::SubspaceBall { basis } => {
                space.distance_to_subspace(x, basis)?.distance <= tol
                    && space.norm(x)? <= 1.0 + tol
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetDistance {
    pub distance: f64,
    pub nearest: Vec<f64>,
    pub converged: bool,
}

/// d(x, A) with a nearest-point certificate.
pub fn distance_to_set(space: &Space, x: &[f64], set: &SetDescriptor) -> Result<SetDistance> {
    set.validate(space)?;
    ensure_dim(space.dim(), x.len())?;
    match set {
        SetDescriptor::UnitBall => {
            let n = space.norm(x)?;
            if n <= 1.0 {
                Ok(SetDistance {
                    distance: 0.0,
                    nearest: x.to_vec(),
                    converged: true,
                })
            } else {
                Ok(SetDistance {
                    distance: n - 1.0,
                    nearest: linalg::scale(x, 1.0 / n),
                    converged: true,
                })
            }
        }
        SetDescriptor::ScaledSphere { r } => {
            let n = space.norm(x)?;
            let nearest = if n > 1e-14 {
                linalg::scale(x, r / n)
            } else {
                let mut e = vec![0.0; space.dim()];
                e[0] = 1.0;
                linalg::scale(&space.radial_project(&e)?, *r)
            };
            Ok(SetDistance {
                distance: (n - r).abs(),
                nearest,
                converged: true,
            })
        }
        SetDescriptor::Subspace { basis } => {
            let d = space.distance_to_subspace(x, basis)?;
            Ok(SetDistance {
                distance: d.distance,
                nearest: d.minimizer,
                converged: d.converged,
            })
        }
        SetDescriptor::FinitePointSet { points } => {
            let (best, dist) = points
                .iter()
                .map(|p| (p, space.norm_unchecked(&linalg::sub(x, p))))
                .fold((None, f64::INFINITY), |acc, (p, d)| {
                    if d < acc.1 {
                        (Some(p), d)
                    } else {
                        acc
                    }
                });
            Ok(SetDistance {
                distance: dist,
                nearest: best.expect("non-empty").clone(),
                converged: true,
            })
        }
        SetDescriptor::Polytope { vertices } => polytope_distance(space, x, vertices),
        SetDescriptor::SubspaceBall { basis } => subspace_ball_distance(space, x, basis),
    }
}

fn polytope_distance(space: &Space, x: &[f64], vertices: &[Vec<f64>]) -> Result<SetDistance> {
    let n = vertices.len();
    if space.is_polyhedral() {
        // min t s.t. g.(x - V lambda) <= t for all dual vertices g,
        //            sum lambda = 1, lambda >= 0.
        let duals = space.extreme_points(true)?;
        let mut constraints = Vec::with_capacity(duals.len() + 1);
        for g in &duals {
            let mut row: Vec<f64> = vertices.iter().map(|v| -linalg::dot(g, v)).collect();
            row.push(-1.0);
            constraints.push((row, lp::Cmp::Le, -linalg::dot(g, x)));
        }
        let mut sum_row = vec![1.0; n];
        sum_row.push(0.0);
        constraints.push((sum_row, lp::Cmp::Eq, 1.0));
        let mut objective = vec![0.0; n + 1];
        objective[n] = 1.0;
        let lp_problem = lp::Lp {
            objective,
            constraints,
            nonneg: vec![true; n + 1],
        };
        match lp::solve(&lp_problem) {
            lp::LpOutcome::Optimal { x: sol, value } => {
                let mut nearest = vec![0.0; space.dim()];
                for (l, v) in sol[..n].iter().zip(vertices) {
                    linalg::axpy(&mut nearest, *l, v);
                }
                Ok(SetDistance {
                    distance: value.max(0.0),
                    nearest,
                    converged: true,
                })
            }
            _ => Err(Error::BudgetExhausted("polytope distance LP failed".into())),
        }
    } else {
        // Pattern search over barycentric weights (clipped and renormalized).
        let weights_to_point = |w: &[f64]| -> Vec<f64> {
            let mut pos: Vec<f64> = w.iter().map(|v| v.max(0.0)).collect();
            let s: f64 = pos.iter().sum();
            if s <= 1e-12 {
                pos = vec![1.0 / n as f64; n];
            } else {
                for v in &mut pos {
                    *v /= s;
                }
            }
            let mut y = vec![0.0; space.dim()];
            for (l, v) in pos.iter().zip(vertices) {
                linalg::axpy(&mut y, *l, v);
            }
            y
        };
        let start = vec![1.0 / n as f64; n];
        let (w, d) = optim::pattern_search(
            |w| space.norm_unchecked(&linalg::sub(x, &weights_to_point(w))),
            &start,
            &PatternOptions {
                max_steps: 3000,
                initial_step: 0.5,
                min_step: 1e-12,
                random_dirs: 6,
                seed: 0x706f_6c79,
            },
        );
        Ok(SetDistance {
            distance: d,
            nearest: weights_to_point(&w),
            converged: false,
        })
    }
}

fn subspace_ball_distance(space: &Space, x: &[f64], basis: &[Vec<f64>]) -> Result<SetDistance> {
    // Feasible parametrization: c -> B c, radially clipped into the ball.
    let clip = |c: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; space.dim()];
        for (ci, b) in c.iter().zip(basis) {
            linalg::axpy(&mut y, *ci, b);
        }
        let n = space.norm_unchecked(&y);
        if n > 1.0 {
            linalg::scale(&y, 1.0 / n)
        } else {
            y
        }
    };
    let start = space.distance_to_subspace(x, basis)?.coefficients;
    let (c, d) = optim::pattern_search(
        |c| space.norm_unchecked(&linalg::sub(x, &clip(c))),
        &start,
        &PatternOptions {
            max_steps: 3000,
            initial_step: 0.5,
            min_step: 1e-12,
            random_dirs: 6,
            seed: 0x7362_616c,
        },
    );
    Ok(SetDistance {
        distance: d,
        nearest: clip(&c),
        converged: false,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionSample {
    pub distance: f64,
    pub nearest: Vec<f64>,
    /// Verified members of P_A(x, delta).
    pub points: Vec<Vec<f64>>,
}

/// Sample the near-minimizer set P_A(x, delta) = {y in A : ||x-y|| <=
/// d(x,A) + delta}. Face extreme points are enumerated for structured
/// sets; rejection sampling around the nearest point fills the budget.
pub fn near_projection_sample(
    space: &Space,
    x: &[f64],
    set: &SetDescriptor,
    delta: f64,
    budget: usize,
    seed: u64,
) -> Result<ProjectionSample> {
    if delta < 0.0 {
        return Err(Error::InvalidArgument("delta must be >= 0".into()));
    }
    let tol = Tolerances::default();
    let base = distance_to_set(space, x, set)?;
    let bound = base.distance + delta + tol.membership;
    let mut candidates: Vec<Vec<f64>> = vec![base.nearest.clone()];

    // Structured candidates.
    match set {
        SetDescriptor::UnitBall => {
            if space.is_polyhedral() {
                let verts = space.extreme_points(false)?;
                candidates.extend(verts.iter().cloned());
                // midpoints of vertex pairs probe the faces
                for pair in verts.iter().combinations(2).take(600) {
                    let mid = linalg::scale(&linalg::add(pair[0], pair[1]), 0.5);
                    candidates.push(mid);
                }
            }
        }
        SetDescriptor::Polytope { vertices } => {
            candidates.extend(vertices.iter().cloned());
            for pair in vertices.iter().combinations(2).take(600) {
                candidates.push(linalg::scale(&linalg::add(pair[0], pair[1]), 0.5));
            }
        }
        SetDescriptor::FinitePointSet { points } => {
            candidates.extend(points.iter().cloned());
        }
        _ => {}
    }

    // Rejection sampling around the nearest point, repaired into the set.
    let mut rng = optim::rng_for(seed, 0x7072_6f6a);
    let dim = space.dim();
    let radius = (delta + base.distance * 0.5).max(0.05);
    for _ in 0..budget.saturating_mul(8) {
        if candidates.len() >= budget + 16 {
            break;
        }
        let dir = optim::random_direction(&mut rng, dim);
        let mut y = base.nearest.clone();
        linalg::axpy(&mut y, radius, &dir);
        let repaired = repair_into(space, set, &y)?;
        if let Some(y) = repaired {
            candidates.push(y);
        }
    }

    // Verify membership and the distance bound.
    let mut points: Vec<Vec<f64>> = Vec::new();
    for y in candidates {
        if points.len() >= budget {
            break;
        }
        if !set.contains(space, &y, tol.membership * 10.0)? {
            continue;
        }
        let dist = space.norm_unchecked(&linalg::sub(x, &y));
        if dist <= bound {
            let dup = points
                .iter()
                .any(|p| space.norm_unchecked(&linalg::sub(p, &y)) <= 1e-12);
            if !dup {
                points.push(y);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::BudgetExhausted(
            "no verified sample in the near-projection set".into(),
        ));
    }
    Ok(ProjectionSample {
        distance: base.distance,
        nearest: base.nearest,
        points,
    })
}

fn repair_into(space: &Space, set: &SetDescriptor, y: &[f64]) -> Result<Option<Vec<f64>>> {
    Ok(match set {
        SetDescriptor::UnitBall => {
            let n = space.norm_unchecked(y);
            Some(if n > 1.0 { linalg::scale(y, 1.0 / n) } else { y.to_vec() })
        }
        SetDescriptor::ScaledSphere { r } => {
            let n = space.norm_unchecked(y);
            if n <= 1e-14 {
                None
            } else {
                Some(linalg::scale(y, r / n))
            }
        }
        SetDescriptor::Subspace { basis } => {
            let d = space.distance_to_subspace(y, basis)?;
            Some(d.minimizer)
        }
        SetDescriptor::SubspaceBall { basis } => {
            let d = space.distance_to_subspace(y, basis)?;
            let m = d.minimizer;
            let n = space.norm_unchecked(&m);
            Some(if n > 1.0 { linalg::scale(&m, 1.0 / n) } else { m })
        }
        SetDescriptor::Polytope { .. } | SetDescriptor::FinitePointSet { .. } => None,
    })
}

/// Per-delta decay data for the Chebyshev-style diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayReport {
    pub schedule: Vec<f64>,
    /// sup |D_k| over sampled tuples, per schedule step.
    pub sup_det: Vec<f64>,
    /// diam_k estimate of the sampled near-projection set, per step.
    pub diam: Vec<f64>,
    pub verdict: DecayVerdict,
    /// Certified stall level (determinant of the stored certificate
    /// tuple at the tightest delta), present for stall verdicts.
    pub stall_floor: Option<f64>,
    pub stall_certificate: Option<Vec<Vec<f64>>>,
    /// Proximinality of A is assumed when the distance certificate
    /// attains; recorded, not abstractly verified.
    pub proximinality_assumed: bool,
    pub note: String,
}

pub fn default_delta_schedule() -> Vec<f64> {
    (0..=12).map(|m| 2f64.powi(-m)).collect()
}

fn tuples_for(points: &[Vec<f64>], k: usize, cap: usize, seed: u64) -> Vec<Vec<usize>> {
    let n = points.len();
    if n < k + 1 {
        return Vec::new();
    }
    let total: usize = (0..n).combinations(k + 1).take(cap + 1).count();
    if total <= cap {
        (0..n).combinations(k + 1).collect()
    } else {
        use rand::seq::SliceRandom;
        let mut rng = optim::rng_for(seed, 0x7475_706c);
        let mut idx: Vec<usize> = (0..n).collect();
        let mut out = Vec::with_capacity(cap);
        for _ in 0..cap {
            idx.shuffle(&mut rng);
            let mut s = idx[..k + 1].to_vec();
            s.sort_unstable();
            out.push(s);
        }
        out
    }
}

struct StepStat {
    sup: f64,
    witness: Option<Vec<Vec<f64>>>,
    diam: f64,
}

fn step_statistic(
    space: &Space,
    sample: &ProjectionSample,
    k: usize,
    functionals: &[Functional],
    seed: u64,
) -> Result<StepStat> {
    let pts = &sample.points;
    let mut sup = 0.0f64;
    let mut witness = None;
    for tuple in tuples_for(pts, k, 2000, seed) {
        let chosen: Vec<Vec<f64>> = tuple.iter().map(|&i| pts[i].clone()).collect();
        let input = DeterminantInput::new(&chosen, functionals)?;
        let v = dk_determinant(&input).abs();
        if v > sup {
            sup = v;
            witness = Some(chosen);
        }
    }
    let diam = if pts.len() >= k + 1 {
        let capped: Vec<Vec<f64>> = pts.iter().take(12).cloned().collect();
        diam_k(space, &capped, k, VolumeStrategy::Auto, seed)?.value
    } else {
        0.0
    };
    Ok(StepStat { sup, witness, diam })
}

fn verdict_from(
    schedule: &[f64],
    sup_det: &[f64],
    witnesses: Vec<Option<Vec<Vec<f64>>>>,
    floor: f64,
) -> (DecayVerdict, Option<f64>, Option<Vec<Vec<f64>>>) {
    let Some(&final_sup) = sup_det.last() else {
        return (DecayVerdict::Inconclusive, None, None);
    };
    let _ = schedule;
    if final_sup <= floor {
        (DecayVerdict::DecaysBelowTol, None, None)
    } else if let Some(w) = witnesses.into_iter().next_back().flatten() {
        (DecayVerdict::StallsAboveFloor, Some(final_sup), Some(w))
    } else {
        (DecayVerdict::Inconclusive, None, None)
    }
}

/// Pointwise weak-Chebyshev diagnostic: determinant decay of tuples from
/// P_A(x, delta) at a fixed functional tuple as delta shrinks; the diam_k
/// column tracks the strong (volume) variant.
pub fn ksch_diagnostic(
    space: &Space,
    set: &SetDescriptor,
    x: &[f64],
    k: usize,
    functionals: &[Functional],
    schedule: &[f64],
    sample_budget: usize,
    seed: u64,
) -> Result<DecayReport> {
    kwusch_diagnostic(space, set, &[x.to_vec()], k, functionals, schedule, sample_budget, seed)
}

/// Uniform variant over a finite sample B of target points: the per-delta
/// statistic is the sup over x in B.
#[allow(clippy::too_many_arguments)]
pub fn kwusch_diagnostic(
    space: &Space,
    set: &SetDescriptor,
    b_points: &[Vec<f64>],
    k: usize,
    functionals: &[Functional],
    schedule: &[f64],
    sample_budget: usize,
    seed: u64,
) -> Result<DecayReport> {
    let tol = Tolerances::default();
    if b_points.is_empty() {
        return Err(Error::InvalidArgument("need at least one target point".into()));
    }
    if functionals.len() != k {
        return Err(Error::InvalidArgument(format!(
            "need k = {k} functionals, got {}",
            functionals.len()
        )));
    }
    for f in functionals {
        if !f.is_unit(tol.dual_sphere) {
            return Err(Error::NonUnitInput(f.dual_norm));
        }
    }
    if schedule.is_empty() || schedule.windows(2).any(|w| w[1] >= w[0]) || schedule[0] <= 0.0 {
        return Err(Error::InvalidArgument(
            "delta schedule must be strictly decreasing and positive".into(),
        ));
    }
    let mut sup_det = Vec::with_capacity(schedule.len());
    let mut diam = Vec::with_capacity(schedule.len());
    let mut witnesses = Vec::with_capacity(schedule.len());
    for (step, &delta) in schedule.iter().enumerate() {
        let mut sup = 0.0f64;
        let mut best_witness: Option<Vec<Vec<f64>>> = None;
        let mut dmax = 0.0f64;
        for (bi, x) in b_points.iter().enumerate() {
            let sample = near_projection_sample(
                space,
                x,
                set,
                delta,
                sample_budget,
                optim::subseed(seed, (step * 131 + bi) as u64),
            )?;
            let stat = step_statistic(space, &sample, k, functionals, seed)?;
            if stat.sup > sup {
                sup = stat.sup;
                best_witness = stat.witness;
            }
            dmax = dmax.max(stat.diam);
        }
        sup_det.push(sup);
        diam.push(dmax);
        witnesses.push(best_witness);
    }
    let (verdict, stall_floor, stall_certificate) =
        verdict_from(schedule, &sup_det, witnesses, tol.decay_floor);
    // Re-verify a stall certificate end to end.
    let (verdict, stall_floor, stall_certificate) = match (&verdict, &stall_certificate) {
        (DecayVerdict::StallsAboveFloor, Some(cert)) => {
            let mut ok = true;
            for y in cert {
                if !set.contains(space, y, tol.membership * 10.0)? {
                    ok = false;
                }
            }
            let input = DeterminantInput::new(cert, functionals)?;
            let recomputed = dk_determinant(&input).abs();
            if ok && (recomputed - stall_floor.unwrap()).abs() <= 1e-9 * recomputed.max(1.0) {
                (verdict, stall_floor, stall_certificate)
            } else {
                (DecayVerdict::Inconclusive, None, None)
            }
        }
        _ => (verdict, stall_floor, stall_certificate),
    };
    Ok(DecayReport {
        schedule: schedule.to_vec(),
        sup_det,
        diam,
        verdict,
        stall_floor,
        stall_certificate,
        proximinality_assumed: true,
        note: "sample-based diagnostic; stall certificates re-verified by direct evaluation"
            .into(),
    })
}

/// Report for the two-set (property-style) decay test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KwucReport {
    pub d_ab: f64,
    /// max_i | ||x_n^(i) - y_n|| - d(A,B) | per index n.
    pub hypothesis_gap: Vec<f64>,
    pub hypothesis_ok: bool,
    pub det_per_n: Vec<f64>,
    pub verdict: DecayVerdict,
    pub vacuous: bool,
    /// Final determinant level for stall verdicts.
    pub stall_constant: Option<f64>,
}

/// Property-style test for a pair (A, B): minimizing sequences between
/// the sets must force the fixed-functional determinant to collapse.
#[allow(clippy::too_many_arguments)]
pub fn property_kwuc_test(
    space: &Space,
    set_a: &SetDescriptor,
    set_b: &SetDescriptor,
    k: usize,
    functionals: &[Functional],
    x_sequences: &[Vec<Vec<f64>>],
    y_sequence: &[Vec<f64>],
    hypothesis_tol: f64,
) -> Result<KwucReport> {
    let tol = Tolerances::default();
    if x_sequences.len() != k + 1 {
        return Err(Error::InvalidArgument(format!(
            "need k+1 = {} sequences in A",
            k + 1
        )));
    }
    let n_len = y_sequence.len();
    if n_len == 0 || x_sequences.iter().any(|s| s.len() != n_len) {
        return Err(Error::InvalidArgument("ragged or empty sequences".into()));
    }
    if functionals.len() != k {
        return Err(Error::InvalidArgument(format!("need k = {k} functionals")));
    }
    for f in functionals {
        if !f.is_unit(tol.dual_sphere) {
            return Err(Error::NonUnitInput(f.dual_norm));
        }
    }
    // membership
    for s in x_sequences {
        for p in s {
            if !set_a.contains(space, p, tol.membership * 100.0)? {
                return Err(Error::InvalidArgument(
                    "an x-sequence point is not in A".into(),
                ));
            }
        }
    }
    for y in y_sequence {
        if !set_b.contains(space, y, tol.membership * 100.0)? {
            return Err(Error::InvalidArgument("a y-sequence point is not in B".into()));
        }
    }
    let d_ab = set_pair_distance(space, set_a, set_b)?;
    let mut hypothesis_gap = Vec::with_capacity(n_len);
    let mut det_per_n = Vec::with_capacity(n_len);
    for n in 0..n_len {
        let pts: Vec<Vec<f64>> = x_sequences.iter().map(|s| s[n].clone()).collect();
        let gap = pts
            .iter()
            .map(|p| (space.norm_unchecked(&linalg::sub(p, &y_sequence[n])) - d_ab).abs())
            .fold(0.0, f64::max);
        hypothesis_gap.push(gap);
        let input = DeterminantInput::new(&pts, functionals)?;
        det_per_n.push(dk_determinant(&input).abs());
    }
    let h_final = *hypothesis_gap.last().unwrap();
    let hypothesis_ok = h_final <= hypothesis_tol;
    let d_final = *det_per_n.last().unwrap();
    let (verdict, stall_constant, vacuous) = if !hypothesis_ok {
        (DecayVerdict::Inconclusive, None, true)
    } else if d_final <= tol.decay_floor {
        (DecayVerdict::DecaysBelowTol, None, false)
    } else {
        (DecayVerdict::StallsAboveFloor, Some(d_final), false)
    };
    Ok(KwucReport {
        d_ab,
        hypothesis_gap,
        hypothesis_ok,
        det_per_n,
        verdict,
        vacuous,
        stall_constant,
    })
}

/// d(A, B) for descriptor pairs: exact through finite sets and radial
/// structure, joint pattern search otherwise.
pub fn set_pair_distance(
    space: &Space,
    set_a: &SetDescriptor,
    set_b: &SetDescriptor,
) -> Result<f64> {
    use SetDescriptor::*;
    match (set_a, set_b) {
        (FinitePointSet { points }, _) => {
            let mut best = f64::INFINITY;
            for p in points {
                best = best.min(distance_to_set(space, p, set_b)?.distance);
            }
            Ok(best)
        }
        (_, FinitePointSet { points }) => {
            let mut best = f64::INFINITY;
            for p in points {
                best = best.min(distance_to_set(space, p, set_a)?.distance);
            }
            Ok(best)
        }
        // The sphere rS_X meets the ball for r <= 1, else sits r-1 away.
        (UnitBall, ScaledSphere { r }) | (ScaledSphere { r }, UnitBall) => Ok((r - 1.0).max(0.0)),
        _ => {
            // Joint minimization over both parametrized sets.
            let pa = set_parametrizer(space, set_a)?;
            let pb = set_parametrizer(space, set_b)?;
            let (na, nb) = (pa.n_params, pb.n_params);
            let start = vec![0.1; na + nb];
            let (_, d) = optim::pattern_search(
                |v| {
                    let ya = (pa.map)(&v[..na]);
                    let yb = (pb.map)(&v[na..]);
                    space.norm_unchecked(&linalg::sub(&ya, &yb))
                },
                &start,
                &PatternOptions {
                    max_steps: 3000,
                    initial_step: 0.5,
                    min_step: 1e-11,
                    random_dirs: 6,
                    seed: 0x6461_6262,
                },
            );
            Ok(d)
        }
    }
}

struct SetParam<'a> {
    n_params: usize,
    map: Box<dyn Fn(&[f64]) -> Vec<f64> + Sync + 'a>,
}

fn set_parametrizer<'a>(space: &'a Space, set: &'a SetDescriptor) -> Result<SetParam<'a>> {
    let dim = space.dim();
    Ok(match set {
        SetDescriptor::UnitBall => SetParam {
            n_params: dim,
            map: Box::new(move |c: &[f64]| {
                let n = space.norm_unchecked(c);
                if n > 1.0 {
                    linalg::scale(c, 1.0 / n)
                } else {
                    c.to_vec()
                }
            }),
        },
        SetDescriptor::ScaledSphere { r } => {
            let r = *r;
            SetParam {
                n_params: dim,
                map: Box::new(move |c: &[f64]| {
                    let n = space.norm_unchecked(c);
                    if n > 1e-12 {
                        linalg::scale(c, r / n)
                    } else {
                        let mut e = vec![0.0; dim];
                        e[0] = r;
                        e
                    }
                }),
            }
        }
        SetDescriptor::Subspace { basis } => SetParam {
            n_params: basis.len(),
            map: Box::new(move |c: &[f64]| {
                let mut y = vec![0.0; dim];
                for (ci, b) in c.iter().zip(basis) {
                    linalg::axpy(&mut y, *ci, b);
                }
                y
            }),
        },
        SetDescriptor::SubspaceBall { basis } => SetParam {
            n_params: basis.len(),
            map: Box::new(move |c: &[f64]| {
                let mut y = vec![0.0; dim];
                for (ci, b) in c.iter().zip(basis) {
                    linalg::axpy(&mut y, *ci, b);
                }
                let n = space.norm_unchecked(&y);
                if n > 1.0 {
                    linalg::scale(&y, 1.0 / n)
                } else {
                    y
                }
            }),
        },
        SetDescriptor::Polytope { vertices } => SetParam {
            n_params: vertices.len(),
            map: Box::new(move |w: &[f64]| {
                let mut pos: Vec<f64> = w.iter().map(|v| v.max(0.0)).collect();
                let s: f64 = pos.iter().sum();
                if s <= 1e-12 {
                    pos = vec![1.0 / vertices.len() as f64; vertices.len()];
                } else {
                    for v in &mut pos {
                        *v /= s;
                    }
                }
                let mut y = vec![0.0; dim];
                for (l, v) in pos.iter().zip(vertices) {
                    linalg::axpy(&mut y, *l, v);
                }
                y
            }),
        },
        SetDescriptor::FinitePointSet { .. } => {
            return Err(Error::InvalidArgument(
                "finite sets are handled enumeratively".into(),
            ))
        }
    })
}

#[cfg(test)]
mod tests;
