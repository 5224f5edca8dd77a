//! Named example spaces and compiled-in counterexample configurations,
//! addressable from the CLI.

use serde::{Deserialize, Serialize};

use crate::approximation::{
    default_delta_schedule, ksch_diagnostic, near_projection_sample, property_kwuc_test,
    DecayReport, KwucReport, SetDescriptor,
};
use crate::determinant::{dk_determinant, DeterminantInput};
use crate::error::{Error, Result};
use crate::linalg;
use crate::space::{Functional, NormDescriptor, PValue, Space, WeightRule};
use crate::volume::{diam_k, VolumeStrategy};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZooEntry {
    pub name: String,
    pub descriptor: NormDescriptor,
    pub blurb: String,
}

fn entry(name: &str, descriptor: NormDescriptor, blurb: &str) -> ZooEntry {
    ZooEntry {
        name: name.into(),
        descriptor,
        blurb: blurb.into(),
    }
}

/// The built-in example spaces.
pub fn zoo() -> Vec<ZooEntry> {
    vec![
        entry("euclid-3", NormDescriptor::euclidean(3), "Euclidean R^3"),
        entry("euclid-4", NormDescriptor::euclidean(4), "Euclidean R^4"),
        entry("l1-3", NormDescriptor::one(3), "l_1 on R^3"),
        entry("linf-2", NormDescriptor::sup(2), "sup norm on R^2"),
        entry("linf-3", NormDescriptor::sup(3), "sup norm on R^3"),
        entry(
            "lp1.5-3",
            NormDescriptor::lp(1.5, 3).unwrap(),
            "l_1.5 on R^3",
        ),
        entry("lp3-3", NormDescriptor::lp(3.0, 3).unwrap(), "l_3 on R^3"),
        entry(
            "sullivan-4",
            NormDescriptor::SullivanSum {
                dim: 4,
                indices: vec![1, 2],
            },
            "l_2 renormed with an l_1 block on coordinates 1,2",
        ),
        entry(
            "smith-3",
            NormDescriptor::SmithTurett {
                dim: 3,
                weight_rule: WeightRule::Dyadic,
            },
            "(||x||_1^2 + ||S x||_2^2)^(1/2) with dyadic weights",
        ),
        entry("hexagon", hexagon_descriptor(), "regular hexagon gauge on R^2"),
        entry(
            "prod-2-l1xe2",
            NormDescriptor::Product {
                p: PValue::new(2.0).unwrap(),
                factors: vec![NormDescriptor::one(2), NormDescriptor::euclidean(2)],
            },
            "l_2 product of l_1(R^2) and Euclidean R^2",
        ),
        entry(
            "prod-1-l1xlinf",
            NormDescriptor::Product {
                p: PValue::new(1.0).unwrap(),
                factors: vec![NormDescriptor::one(2), NormDescriptor::sup(2)],
            },
            "l_1 product of l_1(R^2) and sup(R^2), polyhedral",
        ),
        entry(
            "quot-e4",
            NormDescriptor::Quotient {
                base: Box::new(NormDescriptor::euclidean(4)),
                subspace_basis: vec![vec![0.0, 0.0, 0.0, 1.0]],
            },
            "Euclidean R^4 modulo span(e_4)",
        ),
        entry(
            "quot-linf3",
            NormDescriptor::Quotient {
                base: Box::new(NormDescriptor::sup(3)),
                subspace_basis: vec![vec![0.0, 0.0, 1.0]],
            },
            "sup-norm R^3 modulo span(e_3)",
        ),
    ]
}

pub fn hexagon_descriptor() -> NormDescriptor {
    let mut vertices = Vec::new();
    for a in 0..6 {
        let th = std::f64::consts::PI / 3.0 * a as f64;
        vertices.push(vec![th.cos(), th.sin()]);
    }
    NormDescriptor::Polyhedral { vertices }
}

pub fn zoo_lookup(name: &str) -> Option<NormDescriptor> {
    zoo().into_iter()
        .find(|z| z.name == name)
        .map(|z| z.descriptor)
}

/// Parse a space argument: inline JSON, `zoo:<name>` (or a bare zoo
/// name), or the shorthands `lp:<p>:<dim>`, `sullivan:<dim>:<i,j,...>`,
/// `smith:<dim>`, `hexagon`.
pub fn parse_space_arg(arg: &str) -> Result<NormDescriptor> {
    let trimmed = arg.trim();
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed)
            .map_err(|e| Error::InvalidDescriptor(format!("bad descriptor JSON: {e}")));
    }
    if let Some(name) = trimmed.strip_prefix("zoo:") {
        return zoo_lookup(name)
            .ok_or_else(|| Error::InvalidDescriptor(format!("unknown zoo space `{name}`")));
    }
    if let Some(d) = zoo_lookup(trimmed) {
        return Ok(d);
    }
    let parts: Vec<&str> = trimmed.split(':').collect();
    match parts.as_slice() {
        ["lp", p, dim] => {
            let p = if p.eq_ignore_ascii_case("inf") {
                f64::INFINITY
            } else {
                p.parse()
                    .map_err(|_| Error::InvalidDescriptor(format!("bad exponent `{p}`")))?
            };
            let dim = dim
                .parse()
                .map_err(|_| Error::InvalidDescriptor(format!("bad dimension `{dim}`")))?;
            NormDescriptor::lp(p, dim)
        }
        ["sullivan", dim, idx] => {
            let dim = dim
                .parse()
                .map_err(|_| Error::InvalidDescriptor(format!("bad dimension `{dim}`")))?;
            let indices = idx
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::InvalidDescriptor(format!("bad index list `{idx}`")))?;
            Ok(NormDescriptor::SullivanSum { dim, indices })
        }
        ["smith", dim] => {
            let dim = dim
                .parse()
                .map_err(|_| Error::InvalidDescriptor(format!("bad dimension `{dim}`")))?;
            Ok(NormDescriptor::SmithTurett {
                dim,
                weight_rule: WeightRule::Dyadic,
            })
        }
        ["hexagon"] => Ok(hexagon_descriptor()),
        _ => Err(Error::InvalidDescriptor(format!(
            "cannot parse space argument `{arg}`"
        ))),
    }
}

fn e(i: usize, d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

// ---------------------------------------------------------------------------
// cube-3e1: the sup-norm ball is not k-Chebyshev at 3e_1
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubePreset {
    pub k: usize,
    pub space: NormDescriptor,
    pub target: Vec<f64>,
    pub report: DecayReport,
    /// Determinant of the canonical corner tuple inside the nearest-point
    /// face; persists for every delta, so it certifies the stall level.
    pub canonical_floor: f64,
    pub canonical_points: Vec<Vec<f64>>,
    /// diam_k of the sampled metric-projection face (a lower bound).
    pub diam_lower_bound: f64,
}

/// Reproduce the sup-norm-cube counterexample: the unit ball of
/// (R^{k+1}, sup) viewed from x = 3 e_1. The nearest-point set is a whole
/// face, and the fixed coordinate functionals keep a determinant of 2^k
/// alive at every delta.
pub fn cube_preset(k: usize, sample_budget: usize, seed: u64) -> Result<CubePreset> {
    if k == 0 || k > 6 {
        return Err(Error::InvalidArgument("cube preset supports 1 <= k <= 6".into()));
    }
    let dim = k + 1;
    let descriptor = NormDescriptor::sup(dim);
    let space = Space::new(descriptor.clone())?;
    let x = linalg::scale(&e(0, dim), 3.0);
    let functionals: Vec<Functional> = (1..=k)
        .map(|j| space.unit_functional(&e(j, dim)))
        .collect::<Result<_>>()?;
    // Canonical corner staircase: y0 = (1, -1, ..., -1), y_i = y0 + 2 e_{i+1}.
    let mut y0 = vec![-1.0; dim];
    y0[0] = 1.0;
    let mut canonical_points = vec![y0.clone()];
    for i in 1..=k {
        let mut y = y0.clone();
        y[i] += 2.0;
        canonical_points.push(y);
    }
    let input = DeterminantInput::new(&canonical_points, &functionals)?;
    let canonical_floor = dk_determinant(&input).abs();
    let schedule = default_delta_schedule();
    let report = ksch_diagnostic(
        &space,
        &SetDescriptor::UnitBall,
        &x,
        k,
        &functionals,
        &schedule,
        sample_budget,
        seed,
    )?;
    // diam over the delta = 0 face sample plus the canonical corners.
    let sample = near_projection_sample(&space, &x, &SetDescriptor::UnitBall, 0.0, sample_budget, seed)?;
    let mut pts = canonical_points.clone();
    pts.extend(sample.points);
    pts.truncate(12);
    let diam = diam_k(&space, &pts, k, VolumeStrategy::Exact, seed)?;
    Ok(CubePreset {
        k,
        space: descriptor,
        target: x,
        report,
        canonical_floor,
        canonical_points,
        diam_lower_bound: diam.value,
    })
}

// ---------------------------------------------------------------------------
// pair-linf: minimizing sequences without determinant collapse
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KwucPreset {
    pub k: usize,
    pub space: NormDescriptor,
    pub set_a: SetDescriptor,
    pub set_b: SetDescriptor,
    pub report: KwucReport,
    /// Direct evaluation of the constant determinant along the sequences.
    pub expected_stall: f64,
}

/// Reproduce the sup-product counterexample: X = l_2(R^{k+1}) +_inf R,
/// A the Euclidean unit ball of the first block, B = {(2e_1, 0)} together
/// with the points (0, 1 + 1/n). The supplied sequences minimize the
/// distance d(A, B) = 1, yet the coordinate functionals keep |D_k| = 1.
pub fn kwuc_pair_preset(k: usize, n_max: usize) -> Result<KwucPreset> {
    if k == 0 || k > 6 {
        return Err(Error::InvalidArgument("pair preset supports 1 <= k <= 6".into()));
    }
    if n_max < 4 {
        return Err(Error::InvalidArgument("need n_max >= 4".into()));
    }
    let block = k + 1;
    let dim = block + 1;
    let descriptor = NormDescriptor::Product {
        p: PValue::INF,
        factors: vec![NormDescriptor::euclidean(block), NormDescriptor::euclidean(1)],
    };
    let space = Space::new(descriptor.clone())?;
    let set_a = SetDescriptor::SubspaceBall {
        basis: (0..block).map(|i| e(i, dim)).collect(),
    };
    let mut b_points = vec![linalg::scale(&e(0, dim), 2.0)];
    for n in 1..=n_max {
        let mut p = vec![0.0; dim];
        p[dim - 1] = 1.0 + 1.0 / n as f64;
        b_points.push(p);
    }
    let set_b = SetDescriptor::FinitePointSet {
        points: b_points.clone(),
    };
    // x_n^(i) = (e_i, 0) constant; y_n = (0, 1 + 1/n).
    let x_sequences: Vec<Vec<Vec<f64>>> = (0..block)
        .map(|i| vec![e(i, dim); n_max])
        .collect();
    let y_sequence: Vec<Vec<f64>> = (1..=n_max)
        .map(|n| {
            let mut p = vec![0.0; dim];
            p[dim - 1] = 1.0 + 1.0 / n as f64;
            p
        })
        .collect();
    let functionals: Vec<Functional> = (1..=k)
        .map(|j| space.unit_functional(&e(j, dim)))
        .collect::<Result<_>>()?;
    let pts: Vec<Vec<f64>> = (0..block).map(|i| e(i, dim)).collect();
    let input = DeterminantInput::new(&pts, &functionals)?;
    let expected_stall = dk_determinant(&input).abs();
    let hypothesis_tol = 2.0 / n_max as f64;
    let report = property_kwuc_test(
        &space,
        &set_a,
        &set_b,
        k,
        &functionals,
        &x_sequences,
        &y_sequence,
        hypothesis_tol,
    )?;
    Ok(KwucPreset {
        k,
        space: descriptor,
        set_a,
        set_b,
        report,
        expected_stall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::DecayVerdict;

    #[test]
    fn zoo_descriptors_realize() {
        for z in zoo() {
            let s = Space::new(z.descriptor.clone()).unwrap();
            assert!(s.dim() >= 1, "{}", z.name);
        }
    }

    #[test]
    fn parse_shorthands() {
        assert_eq!(parse_space_arg("lp:2:3").unwrap(), NormDescriptor::euclidean(3));
        assert_eq!(parse_space_arg("lp:inf:2").unwrap(), NormDescriptor::sup(2));
        assert_eq!(
            parse_space_arg("sullivan:4:1,2").unwrap(),
            NormDescriptor::SullivanSum {
                dim: 4,
                indices: vec![1, 2]
            }
        );
        assert!(parse_space_arg("euclid-3").is_ok());
        assert!(parse_space_arg(r#"{"variant":"lp","p":1.0,"dim":2}"#).is_ok());
        assert!(parse_space_arg("what:is:this").is_err());
    }

    #[test]
    fn cube_preset_k2() {
        let preset = cube_preset(2, 24, 7).unwrap();
        assert!((preset.canonical_floor - 4.0).abs() < 1e-12);
        assert_eq!(preset.report.verdict, DecayVerdict::StallsAboveFloor);
        assert!(preset.diam_lower_bound >= 4.0 - 1e-9);
        // the canonical tuple sits in the face at every delta
        for y in &preset.canonical_points {
            assert!((y[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kwuc_preset_stalls_at_one() {
        let preset = kwuc_pair_preset(2, 40).unwrap();
        assert!((preset.expected_stall - 1.0).abs() < 1e-12);
        assert!((preset.report.d_ab - 1.0).abs() < 1e-6);
        assert!(preset.report.hypothesis_ok);
        assert_eq!(preset.report.verdict, DecayVerdict::StallsAboveFloor);
        let stall = preset.report.stall_constant.unwrap();
        assert!((stall - preset.expected_stall).abs() < 1e-9);
    }
}
