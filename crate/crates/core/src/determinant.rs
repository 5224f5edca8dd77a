//! The bordered (k+1)x(k+1) determinants generated by k+1 points and k
//! functionals, their subfamily scans and the Sylvester reduction.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::dd;
use crate::error::{ensure_dim, ensure_finite, Error, Result};
use crate::space::Functional;

/// Largest admissible order parameter k (matrix order k+1 <= 9).
pub const MAX_K: usize = 8;

/// Points and functionals feeding one bordered determinant.
#[derive(Debug, Clone)]
pub struct DeterminantInput<'a> {
    pub points: &'a [Vec<f64>],
    pub functionals: &'a [Functional],
}

impl<'a> DeterminantInput<'a> {
    pub fn new(points: &'a [Vec<f64>], functionals: &'a [Functional]) -> Result<Self> {
        let k = functionals.len();
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
        let dim = points[0].len();
        for p in points {
            ensure_dim(dim, p.len())?;
            ensure_finite(p)?;
        }
        for f in functionals {
            ensure_dim(dim, f.coords.len())?;
            ensure_finite(&f.coords)?;
        }
        Ok(Self { points, functionals })
    }

    pub fn order(&self) -> usize {
        self.functionals.len()
    }
}

/// Bordered matrix: first row ones, row j+1 holds f_j applied to each point.
pub(crate) fn bordered_matrix(points: &[Vec<f64>], functionals: &[Functional]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut m = Vec::with_capacity(functionals.len() + 1);
    m.push(vec![1.0; n]);
    for f in functionals {
        m.push(
            points
                .iter()
                .map(|x| dd::dot(&f.coords, x).value())
                .collect(),
        );
    }
    m
}

/// D_k of the supplied input (extended-precision LU).
pub fn dk_determinant(input: &DeterminantInput) -> f64 {
    dd::det(&bordered_matrix(input.points, input.functionals))
}

/// Convenience wrapper validating and evaluating in one call.
pub fn dk(points: &[Vec<f64>], functionals: &[Functional]) -> Result<f64> {
    Ok(dk_determinant(&DeterminantInput::new(points, functionals)?))
}

/// One row of a subfamily scan: which points, which functionals, value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubfamilyEntry {
    /// 1-based indices of the k+1 points used.
    pub alpha: Vec<usize>,
    /// 1-based indices of the k functionals used.
    pub beta: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubfamilyScan {
    pub entries: Vec<SubfamilyEntry>,
    /// The order-(k+1) determinant of the full family.
    pub full_value: f64,
}

impl SubfamilyScan {
    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|e| e.value.abs()).fold(0.0, f64::max)
    }

    /// CSV rows `(alpha, beta, value)` plus a versioned header comment.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# normlab subfamily-scan csv v1: alpha;beta;value\n");
        out.push_str("alpha,beta,value\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{:.17e}\n",
                e.alpha.iter().join(";"),
                e.beta.iter().join(";"),
                e.value
            ));
        }
        out.push_str(&format!("full,,{:.17e}\n", self.full_value));
        out
    }
}

/// All order-k determinants of (k+1)-point subfamilies of k+2 points and
/// k-functional subfamilies of k+1 functionals, plus the full D_{k+1}.
pub fn subfamily_scan(points: &[Vec<f64>], functionals: &[Functional]) -> Result<SubfamilyScan> {
    let kp1 = functionals.len();
    if kp1 < 2 || kp1 > MAX_K {
        return Err(Error::InvalidArgument(format!(
            "subfamily scan needs 2 <= k+1 <= {MAX_K} functionals, got {kp1}"
        )));
    }
    if points.len() != kp1 + 1 {
        return Err(Error::TooFewPoints {
            needed: kp1 + 1,
            got: points.len(),
        });
    }
    let full = DeterminantInput::new(points, functionals)?;
    let full_value = dk_determinant(&full);
    let mut entries = Vec::new();
    for alpha in (0..points.len()).combinations(kp1) {
        let sub_points: Vec<Vec<f64>> = alpha.iter().map(|&i| points[i].clone()).collect();
        for beta in (0..functionals.len()).combinations(kp1 - 1) {
            let sub_fs: Vec<Functional> = beta.iter().map(|&j| functionals[j].clone()).collect();
            let value = dk_determinant(&DeterminantInput::new(&sub_points, &sub_fs)?);
            entries.push(SubfamilyEntry {
                alpha: alpha.iter().map(|&i| i + 1).collect(),
                beta: beta.iter().map(|&j| j + 1).collect(),
                value,
            });
        }
    }
    Ok(SubfamilyScan {
        entries,
        full_value,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SylvesterCheck {
    /// det(A) * D_{r-1}^(m-r), m = number of functionals.
    pub lhs: f64,
    /// Determinant of the bordered-minor matrix B.
    pub rhs: f64,
    pub relative_error: f64,
    pub pivot_value: f64,
}

/// Verify Sylvester's determinant identity on the bordered matrix of
/// `m+1` points and `m` functionals with leading pivot block of order `r`
/// (the block determinant is D_{r-1} of the first r points and r-1
/// functionals):
///
///   det(A) * D_{r-1}^(m-r) = det(B),
///   b_{s,t} = D_r[x_1..x_r, x_t; f_1..f_{r-1}, f_{s-1}].
pub fn sylvester_check(
    points: &[Vec<f64>],
    functionals: &[Functional],
    r: usize,
    pivot_floor: f64,
) -> Result<SylvesterCheck> {
    let m = functionals.len();
    let input = DeterminantInput::new(points, functionals)?;
    if r < 2 || r > m {
        return Err(Error::InvalidArgument(format!(
            "pivot order r must satisfy 2 <= r <= {m}, got {r}"
        )));
    }
    let lead_points: Vec<Vec<f64>> = points[..r].to_vec();
    let lead_fs: Vec<Functional> = functionals[..r - 1].to_vec();
    let pivot = dk_determinant(&DeterminantInput::new(&lead_points, &lead_fs)?);
    if pivot.abs() <= pivot_floor {
        return Err(Error::PivotDegenerate(pivot.abs()));
    }
    let det_a = dk_determinant(&input);
    let n = m + 1; // matrix order
    let size = n + 1 - (r + 1); // indices r+1..=n+1 in 1-based matrix terms
    let mut b = vec![vec![0.0; size]; size];
    for (si, s) in (r + 1..=n).enumerate() {
        // matrix row s corresponds to functional s-1
        let mut fs: Vec<Functional> = lead_fs.clone();
        fs.push(functionals[s - 2].clone());
        for (ti, t) in (r + 1..=n).enumerate() {
            let mut pts = lead_points.clone();
            pts.push(points[t - 1].clone());
            b[si][ti] = dk_determinant(&DeterminantInput::new(&pts, &fs)?);
        }
    }
    let rhs = dd::det(&b);
    let lhs = det_a * pivot.powi((m - r) as i32);
    let denom = lhs.abs().max(rhs.abs()).max(1e-300);
    Ok(SylvesterCheck {
        lhs,
        rhs,
        relative_error: (lhs - rhs).abs() / denom,
        pivot_value: pivot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{NormDescriptor, Space};
    use rand::Rng;

    fn unit_dual(space: &Space, coords: &[f64]) -> Functional {
        space.unit_functional(coords).unwrap()
    }

    fn e(i: usize, d: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    #[test]
    fn repeated_point_kills_determinant() {
        let s = Space::new(NormDescriptor::euclidean(2)).unwrap();
        let f = unit_dual(&s, &[1.0, 0.0]);
        let pts = vec![vec![0.3, 0.4], vec![0.3, 0.4]];
        assert_eq!(dk(&pts, &[f]).unwrap(), 0.0);
    }

    #[test]
    fn two_by_two_case() {
        let s = Space::new(NormDescriptor::euclidean(2)).unwrap();
        let f = unit_dual(&s, &[1.0, 0.0]);
        let pts = vec![vec![0.0, 0.0], e(0, 2)];
        assert!((dk(&pts, &[f]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_by_three_hand_expansion() {
        // Oracle: direct 3x3 expansion with points (0, e1, e2) and the
        // coordinate functionals gives exactly 1.
        let s = Space::new(NormDescriptor::euclidean(3)).unwrap();
        let f1 = unit_dual(&s, &e(0, 3));
        let f2 = unit_dual(&s, &e(1, 3));
        let pts = vec![vec![0.0; 3], e(0, 3), e(1, 3)];
        assert!((dk(&pts, &[f1, f2]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scan_consistent_with_base_op() {
        let mut rng = crate::optim::rng_for(3, 1);
        let d = 3;
        let s = Space::new(NormDescriptor::euclidean(d)).unwrap();
        let points: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let fs: Vec<Functional> = (0..3)
            .map(|_| {
                let c: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                unit_dual(&s, &c)
            })
            .collect();
        let scan = subfamily_scan(&points, &fs).unwrap();
        // k=2 here: 4 choose 3 alphas x 3 choose 2 betas
        assert_eq!(scan.entries.len(), 12);
        for entry in &scan.entries {
            let pts: Vec<Vec<f64>> =
                entry.alpha.iter().map(|&i| points[i - 1].clone()).collect();
            let efs: Vec<Functional> =
                entry.beta.iter().map(|&j| fs[j - 1].clone()).collect();
            let direct = dk(&pts, &efs).unwrap();
            assert!((direct - entry.value).abs() <= 1e-12);
        }
    }

    #[test]
    fn all_equal_points_scan_is_zero() {
        let s = Space::new(NormDescriptor::euclidean(3)).unwrap();
        let p = vec![0.2, -0.1, 0.9];
        let points = vec![p.clone(), p.clone(), p.clone(), p.clone()];
        let fs: Vec<Functional> = (0..3).map(|i| unit_dual(&s, &e(i, 3))).collect();
        let scan = subfamily_scan(&points, &fs).unwrap();
        assert_eq!(scan.max_abs_entry(), 0.0);
        assert_eq!(scan.full_value, 0.0);
    }

    #[test]
    fn sylvester_on_random_instances() {
        let mut rng = crate::optim::rng_for(17, 2);
        for trial in 0..50 {
            let k = 2 + trial % 3; // paper-order k in 2..=4
            let d = k + 2;
            let s = Space::new(NormDescriptor::euclidean(d)).unwrap();
            let points: Vec<Vec<f64>> = (0..k + 2)
                .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let fs: Vec<Functional> = (0..k + 1)
                .map(|_| {
                    let c: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                    unit_dual(&s, &c)
                })
                .collect();
            for r in 2..=k {
                match sylvester_check(&points, &fs, r, 1e-12) {
                    Ok(chk) => assert!(
                        chk.relative_error < 1e-10,
                        "rel err {} at k={k} r={r}",
                        chk.relative_error
                    ),
                    Err(Error::PivotDegenerate(_)) => {}
                    Err(e) => panic!("unexpected error {e}"),
                }
            }
        }
    }

    #[test]
    fn sylvester_pivot_degenerate_detected() {
        let s = Space::new(NormDescriptor::euclidean(4)).unwrap();
        // First two points equal: leading D_1 block vanishes.
        let p = vec![0.5, 0.5, 0.0, 0.0];
        let points = vec![p.clone(), p.clone(), e(1, 4), e(2, 4), e(3, 4)];
        let fs: Vec<Functional> = (0..4).map(|i| unit_dual(&s, &e(i, 4))).collect();
        assert!(matches!(
            sylvester_check(&points, &fs, 2, 1e-12),
            Err(Error::PivotDegenerate(_))
        ));
    }

    #[test]
    fn order_bounds_enforced() {
        let s = Space::new(NormDescriptor::euclidean(2)).unwrap();
        let f = unit_dual(&s, &[1.0, 0.0]);
        let pts = vec![vec![0.0, 0.0]; 3];
        assert!(DeterminantInput::new(&pts, &[f]).is_err());
    }
}
