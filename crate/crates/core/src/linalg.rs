//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub fn to_dmatrix_cols(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let dim = cols.first().map_or(0, |c| c.len());
    DMatrix::from_fn(dim, cols.len(), |i, j| cols[j][i])
}

/// Numerical rank with a relative threshold on singular values.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let max_sv = svd.singular_values.max();
    if max_sv <= 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > rel_tol * max_sv)
        .count()
}

/// Singular values, largest first (rank certificates).
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Checks the columns are linearly independent.
pub fn check_independent(cols: &[Vec<f64>], rel_tol: f64) -> Result<()> {
    if cols.is_empty() {
        return Ok(());
    }
    let m = to_dmatrix_cols(cols);
    if rank(&m, rel_tol) == cols.len() {
        Ok(())
    } else {
        Err(Error::DependentBasis)
    }
}

/// Orthonormal basis of the nullspace of `f` viewed as a 1 x d matrix,
/// i.e. a basis of the hyperplane ker(f).
pub fn kernel_basis(f: &[f64]) -> Vec<Vec<f64>> {
    let m = DMatrix::from_row_slice(1, f.len(), f);
    nullspace(&m, 1e-12)
}

/// Orthonormal basis of the nullspace of `m` (columns returned as Vecs).
///
/// nalgebra's SVD is thin (V^T has min(m,n) rows), so the nullspace is
/// obtained by completing the row-space basis to an orthonormal basis of
/// R^n and keeping the completion.
pub fn nullspace(m: &DMatrix<f64>, rel_tol: f64) -> Vec<Vec<f64>> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let r = svd
        .singular_values
        .iter()
        .filter(|&&s| s > rel_tol * max_sv.max(1e-300))
        .count();
    let mut frame: Vec<Vec<f64>> = (0..r)
        .map(|i| vt.row(i).iter().copied().collect())
        .collect();
    let mut kernel = Vec::with_capacity(n - r);
    for i in 0..n {
        if frame.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        // two passes of Gram-Schmidt for orthogonality at machine level
        for _ in 0..2 {
            for b in &frame {
                let c = dot(&e, b);
                axpy(&mut e, -c, b);
            }
        }
        let nrm = norm2(&e);
        if nrm > 1e-9 {
            let e = scale(&e, 1.0 / nrm);
            frame.push(e.clone());
            kernel.push(e);
        }
    }
    kernel
}

/// Orthonormal complement of span(basis) in R^dim.
pub fn orthonormal_complement(basis: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    if basis.is_empty() {
        return (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                e
            })
            .collect();
    }
    let m = DMatrix::from_fn(basis.len(), dim, |i, j| basis[i][j]);
    nullspace(&m, 1e-12)
}

/// Least-squares minimizer of ||x - B c||_2 over c; returns (c, residual point B c).
pub fn least_squares(x: &[f64], basis_cols: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let b = to_dmatrix_cols(basis_cols);
    let xv = DVector::from_column_slice(x);
    let svd = b.clone().svd(true, true);
    let c = svd.solve(&xv, 1e-13).expect("svd solve");
    let proj = &b * &c;
    (c.iter().copied().collect(), proj.iter().copied().collect())
}

/// Solve the square system A c = rhs; None when singular at `rel_tol`.
pub fn solve_square(a: &DMatrix<f64>, rhs: &DVector<f64>, rel_tol: f64) -> Option<DVector<f64>> {
    let lu = a.clone().full_piv_lu();
    let max_diag = (0..a.nrows().min(a.ncols()))
        .map(|i| lu.u()[(i, i)].abs())
        .fold(0.0, f64::max);
    let min_diag = (0..a.nrows().min(a.ncols()))
        .map(|i| lu.u()[(i, i)].abs())
        .fold(f64::INFINITY, f64::min);
    if max_diag <= 0.0 || min_diag <= rel_tol * max_diag {
        return None;
    }
    lu.solve(rhs)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Sum of a family of vectors.
pub fn vec_sum(vs: &[Vec<f64>]) -> Vec<f64> {
    let dim = vs.first().map_or(0, |v| v.len());
    let mut out = vec![0.0; dim];
    for v in vs {
        axpy(&mut out, 1.0, v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_nullspace() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        assert_eq!(rank(&m, 1e-12), 2);
        let ns = nullspace(&m, 1e-12);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!((v[0] + v[2]).abs() < 1e-12);
        assert!((v[1] + v[2]).abs() < 1e-12);
    }

    #[test]
    fn complement_spans() {
        let basis = vec![vec![1.0, 0.0, 0.0]];
        let comp = orthonormal_complement(&basis, 3);
        assert_eq!(comp.len(), 2);
        for c in &comp {
            assert!(dot(c, &basis[0]).abs() < 1e-12);
            assert!((norm2(c) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn least_squares_projects() {
        let basis = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let (_, proj) = least_squares(&[2.0, 3.0, 4.0], &basis);
        assert!((proj[0] - 2.0).abs() < 1e-12);
        assert!((proj[1] - 3.0).abs() < 1e-12);
        assert!(proj[2].abs() < 1e-12);
    }
}
