//! Double-double arithmetic for extended-precision determinant work.
//!
//! A `Dd` value is an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits of significand. The matrices handled here are
//! at most 9x9, so a straightforward partial-pivot LU carried out in this
//! representation keeps the accumulated error many orders below the
//! 1e-10-class tolerances asserted by the determinant suites.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.value().abs()
    }

    #[inline]
    pub fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul(Dd::from(q1)));
        let q2 = r.hi / rhs.hi;
        let r2 = r.sub(rhs.mul(Dd::from(q2)));
        let q3 = r2.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }
}

/// Dot product of two f64 slices accumulated in double-double.
pub fn dot(a: &[f64], b: &[f64]) -> Dd {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Dd::ZERO;
    for (&x, &y) in a.iter().zip(b) {
        let (p, e) = two_prod(x, y);
        acc = acc.add(Dd { hi: p, lo: e });
    }
    acc
}

/// Determinant of a dense square matrix (row-major) by partial-pivot LU
/// carried out entirely in double-double arithmetic.
pub fn det(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    debug_assert!(matrix.iter().all(|r| r.len() == n));
    let mut a: Vec<Vec<Dd>> = matrix
        .iter()
        .map(|row| row.iter().map(|&x| Dd::from(x)).collect())
        .collect();
    let mut det = Dd::ONE;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .expect("finite pivots")
            })
            .unwrap();
        if a[pivot_row][col].abs() == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = det.neg();
        }
        let pivot = a[col][col];
        det = det.mul(pivot);
        for row in col + 1..n {
            let factor = a[row][col].div(pivot);
            for k in col..n {
                let delta = factor.mul(a[col][k]);
                a[row][k] = a[row][k].sub(delta);
            }
        }
    }
    det.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_determinants() {
        assert_eq!(det(&[vec![3.0]]), 3.0);
        assert_eq!(det(&[vec![1.0, 2.0], vec![3.0, 4.0]]), -2.0);
        let m = vec![
            vec![2.0, 0.0, 0.0],
            vec![0.0, 3.0, 0.0],
            vec![0.0, 0.0, 4.0],
        ];
        assert_eq!(det(&m), 24.0);
    }

    #[test]
    fn singular_matrix() {
        let m = vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![0.5, 1.0, -7.0],
        ];
        assert!(det(&m).abs() < 1e-25);
    }

    #[test]
    fn scaled_hilbert_4_is_exact() {
        // 420*H_4 has integer entries and determinant exactly
        // 420^4/6048000 = 5145; the input is exactly representable, so
        // the extended-precision LU should land on the integer.
        let h: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| (420 / (i + j + 1)) as f64).collect())
            .collect();
        let d = det(&h);
        assert!((d - 5145.0).abs() < 1e-9, "det {d}");
    }

    #[test]
    fn dot_compensates_cancellation() {
        let a = [1e16, 1.0, -1e16];
        let b = [1.0, 1.0, 1.0];
        assert_eq!(dot(&a, &b).value(), 1.0);
    }
}
