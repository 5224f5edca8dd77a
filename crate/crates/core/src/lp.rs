//! Dense two-phase simplex and small polytope utilities.
//!
//! The solver targets the tiny LPs that show up in polyhedral norm work:
//! minimax distance problems, convex-hull membership and vertex
//! enumeration of low-dimensional H-polytopes. Bland's rule keeps the
//! pivoting cycle-free; problems here have at most a few dozen rows.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Lp {
    /// Objective coefficients, one per variable.
    pub objective: Vec<f64>,
    /// Rows `(coeffs, cmp, rhs)`.
    pub constraints: Vec<(Vec<f64>, Cmp, f64)>,
    /// Per-variable flag: true = x >= 0, false = free.
    pub nonneg: Vec<bool>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

/// Solve a small dense LP. Free variables are split internally.
pub fn solve(lp: &Lp) -> LpOutcome {
    let n_orig = lp.objective.len();
    // Map original variables to standard-form columns.
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n_orig);
    let mut n_std = 0usize;
    for &nn in &lp.nonneg {
        if nn {
            col_of.push((n_std, None));
            n_std += 1;
        } else {
            col_of.push((n_std, Some(n_std + 1)));
            n_std += 2;
        }
    }
    let expand = |row: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n_std];
        for (i, &v) in row.iter().enumerate() {
            let (p, m) = col_of[i];
            out[p] = v;
            if let Some(m) = m {
                out[m] = -v;
            }
        }
        out
    };

    // Normalize rows to b >= 0, then append slack and artificial columns.
    let m = lp.constraints.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs: Vec<f64> = Vec::with_capacity(m);
    let mut needs_slack: Vec<Option<bool>> = Vec::with_capacity(m); // Some(positive?)
    for (coeffs, cmp, b) in &lp.constraints {
        let mut r = expand(coeffs);
        let mut b = *b;
        let flipped = b < 0.0;
        if flipped {
            for v in &mut r {
                *v = -*v;
            }
            b = -b;
        }
        // Le rows keep a +1 slack (basic); flipped Le rows become Ge and
        // get a -1 surplus plus an artificial; Eq rows get an artificial.
        needs_slack.push(match (cmp, flipped) {
            (Cmp::Le, false) => Some(true),
            (Cmp::Le, true) => Some(false),
            (Cmp::Eq, _) => None,
        });
        rows.push(r);
        rhs.push(b);
    }

    let n_slack = needs_slack.iter().filter(|s| s.is_some()).count();
    let total = n_std + n_slack + m; // + artificials (one per row; unused ones stay zero)
    let mut tableau: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut slack_idx = 0usize;
    for i in 0..m {
        let mut row = vec![0.0; total + 1];
        row[..n_std].copy_from_slice(&rows[i]);
        let mut basic_col = None;
        if let Some(positive) = needs_slack[i] {
            let c = n_std + slack_idx;
            row[c] = if positive { 1.0 } else { -1.0 };
            if positive {
                basic_col = Some(c);
            }
            slack_idx += 1;
        }
        let art = n_std + n_slack + i;
        if basic_col.is_none() {
            row[art] = 1.0;
            basic_col = Some(art);
        }
        row[total] = rhs[i];
        tableau.push(row);
        basis.push(basic_col.unwrap());
    }

    // Phase 1: minimize the sum of artificial variables.
    let art_range = (n_std + n_slack)..total;
    let mut cost1 = vec![0.0; total];
    for c in art_range.clone() {
        cost1[c] = 1.0;
    }
    if run_simplex(&mut tableau, &mut basis, &cost1, total).is_none() {
        return LpOutcome::Infeasible; // phase 1 unbounded cannot happen
    }
    let phase1_val = objective_value(&tableau, &basis, &cost1, total);
    if phase1_val > FEAS_EPS {
        return LpOutcome::Infeasible;
    }
    // Drive any artificial variables out of the basis where possible.
    for i in 0..m {
        if art_range.contains(&basis[i]) {
            if let Some(col) = (0..n_std + n_slack)
                .find(|&c| tableau[i][c].abs() > PIVOT_EPS)
            {
                pivot(&mut tableau, &mut basis, i, col, total);
            }
        }
    }

    // Phase 2 on the real objective; keep artificial columns pinned at zero.
    let mut cost2 = vec![0.0; total];
    for (i, &c) in lp.objective.iter().enumerate() {
        let (p, mneg) = col_of[i];
        cost2[p] = c;
        if let Some(mneg) = mneg {
            cost2[mneg] = -c;
        }
    }
    for c in art_range.clone() {
        cost2[c] = 1e30; // forbid re-entry
    }
    if run_simplex(&mut tableau, &mut basis, &cost2, total).is_none() {
        return LpOutcome::Unbounded;
    }

    let mut x_std = vec![0.0; total];
    for (i, &b) in basis.iter().enumerate() {
        x_std[b] = tableau[i][total];
    }
    let mut x = vec![0.0; n_orig];
    for (i, &(p, mneg)) in col_of.iter().enumerate() {
        x[i] = x_std[p] - mneg.map_or(0.0, |c| x_std[c]);
    }
    let value = linalg::dot(&lp.objective, &x);
    LpOutcome::Optimal { x, value }
}

fn objective_value(tableau: &[Vec<f64>], basis: &[usize], cost: &[f64], total: usize) -> f64 {
    basis
        .iter()
        .enumerate()
        .map(|(i, &b)| cost[b] * tableau[i][total])
        .sum()
}

/// Bland-rule simplex; returns None on unboundedness.
fn run_simplex(
    tableau: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    total: usize,
) -> Option<()> {
    let m = tableau.len();
    let max_iter = 2000 + 50 * (total + m);
    for _ in 0..max_iter {
        // Reduced costs: c_j - c_B B^-1 A_j, computed against the tableau.
        let mut entering = None;
        for j in 0..total {
            let mut red = cost[j];
            for i in 0..m {
                red -= cost[basis[i]] * tableau[i][j];
            }
            if red < -PIVOT_EPS {
                entering = Some(j);
                break; // Bland: smallest index
            }
        }
        let Some(j) = entering else { return Some(()) };
        let mut leaving: Option<(usize, f64)> = None;
        for i in 0..m {
            if tableau[i][j] > PIVOT_EPS {
                let ratio = tableau[i][total] / tableau[i][j];
                let better = match leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - PIVOT_EPS || (ratio < lr + PIVOT_EPS && basis[i] < basis[li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leaving else { return None };
        pivot(tableau, basis, i, j, total);
    }
    Some(()) // iteration cap: treat as converged at current vertex
}

fn pivot(tableau: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize, total: usize) {
    let p = tableau[row][col];
    for v in tableau[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = tableau[row].clone();
    for (i, r) in tableau.iter_mut().enumerate() {
        if i != row && r[col].abs() > 0.0 {
            let f = r[col];
            for (rv, pv) in r.iter_mut().zip(&pivot_row) {
                *rv -= f * pv;
            }
        }
    }
    let _ = total;
    basis[row] = col;
}

/// Minimize `max_l g_l . (x - B c)` over coefficients `c`.
///
/// `duals` must be a symmetric generating set (dual-ball extreme points),
/// so the max equals the polyhedral norm of the residual. Returns the
/// optimal value and coefficients.
pub fn minimax_distance(x: &[f64], basis_cols: &[Vec<f64>], duals: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let m = basis_cols.len();
    if m == 0 {
        let v = duals
            .iter()
            .map(|g| linalg::dot(g, x))
            .fold(f64::NEG_INFINITY, f64::max);
        return (v.max(0.0), Vec::new());
    }
    // Variables: c (free) then t (nonneg). Constraints per dual g:
    // g.x - g.Bc <= t  <=>  -(g.B) c - t <= -g.x
    let mut constraints = Vec::with_capacity(duals.len());
    for g in duals {
        let mut row = Vec::with_capacity(m + 1);
        for b in basis_cols {
            row.push(-linalg::dot(g, b));
        }
        row.push(-1.0);
        constraints.push((row, Cmp::Le, -linalg::dot(g, x)));
    }
    let mut objective = vec![0.0; m + 1];
    objective[m] = 1.0;
    let mut nonneg = vec![false; m + 1];
    nonneg[m] = true;
    let lp = Lp {
        objective,
        constraints,
        nonneg,
    };
    match solve(&lp) {
        LpOutcome::Optimal { x: sol, value } => (value.max(0.0), sol[..m].to_vec()),
        _ => panic!("minimax distance LP must be feasible and bounded"),
    }
}

/// Is `p` contained in conv(points)? Feasibility LP.
pub fn in_convex_hull(p: &[f64], points: &[Vec<f64>], tol: f64) -> bool {
    let n = points.len();
    if n == 0 {
        return false;
    }
    let dim = p.len();
    let mut constraints = Vec::with_capacity(dim + 1);
    for d in 0..dim {
        let row: Vec<f64> = points.iter().map(|q| q[d]).collect();
        constraints.push((row, Cmp::Eq, p[d]));
    }
    constraints.push((vec![1.0; n], Cmp::Eq, 1.0));
    let lp = Lp {
        objective: vec![0.0; n],
        constraints,
        nonneg: vec![true; n],
    };
    let _ = tol;
    matches!(solve(&lp), LpOutcome::Optimal { .. })
}

/// Indices of the extreme points of a finite point set.
pub fn extreme_filter(points: &[Vec<f64>], tol: f64) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            let others: Vec<Vec<f64>> = points
                .iter()
                .enumerate()
                .filter(|&(j, q)| j != i && linalg::norm2(&linalg::sub(q, &points[i])) > tol)
                .map(|(_, q)| q.clone())
                .collect();
            !in_convex_hull(&points[i], &others, tol)
        })
        .collect()
}

/// Vertices of the H-polytope { y : a_l . y <= b_l } by combinatorial
/// enumeration of active sets. Suitable only for low dimension.
pub fn hpolytope_vertices(rows: &[Vec<f64>], rhs: &[f64], dedup_tol: f64) -> Vec<Vec<f64>> {
    let dim = rows.first().map_or(0, |r| r.len());
    let m = rows.len();
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    if dim == 0 || m < dim {
        return vertices;
    }
    for combo in (0..m).combinations(dim) {
        let a = DMatrix::from_fn(dim, dim, |i, j| rows[combo[i]][j]);
        let b = DVector::from_fn(dim, |i, _| rhs[combo[i]]);
        let Some(y) = linalg::solve_square(&a, &b, 1e-10) else {
            continue;
        };
        let feasible = rows
            .iter()
            .zip(rhs)
            .all(|(r, &b)| linalg::dot(r, y.as_slice()) <= b + 1e-9);
        if !feasible {
            continue;
        }
        let yv: Vec<f64> = y.iter().copied().collect();
        let dup = vertices
            .iter()
            .any(|v| linalg::norm2(&linalg::sub(v, &yv)) <= dedup_tol.max(1e-9));
        if !dup {
            vertices.push(yv);
        }
    }
    vertices
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_lp() {
        // min -x - y  s.t. x + y <= 1, x,y >= 0  -> value -1
        let lp = Lp {
            objective: vec![-1.0, -1.0],
            constraints: vec![(vec![1.0, 1.0], Cmp::Le, 1.0)],
            nonneg: vec![true, true],
        };
        match solve(&lp) {
            LpOutcome::Optimal { value, .. } => assert!((value + 1.0).abs() < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_lp() {
        let lp = Lp {
            objective: vec![1.0],
            constraints: vec![
                (vec![1.0], Cmp::Le, -1.0),
                (vec![-1.0], Cmp::Le, -1.0),
            ],
            nonneg: vec![true],
        };
        assert!(matches!(solve(&lp), LpOutcome::Infeasible));
    }

    #[test]
    fn minimax_linf_distance() {
        // d((2,0), span{(1,1)}) in the sup-norm = 1, minimizer t = 1.
        let duals = vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let (d, c) = minimax_distance(&[2.0, 0.0], &[vec![1.0, 1.0]], &duals);
        assert!((d - 1.0).abs() < 1e-9, "d = {d}");
        assert!((c[0] - 1.0).abs() < 1e-9, "c = {c:?}");
    }

    #[test]
    fn hull_membership() {
        let square = vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ];
        assert!(in_convex_hull(&[0.3, -0.2], &square, 1e-9));
        assert!(!in_convex_hull(&[1.2, 0.0], &square, 1e-9));
    }

    #[test]
    fn cross_polytope_vertices() {
        // Polar of the square [-1,1]^2 is the l1 cross-polytope.
        let rows = vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ];
        let verts = hpolytope_vertices(&rows, &[1.0; 4], 1e-9);
        assert_eq!(verts.len(), 4);
        for v in &verts {
            assert!((v[0].abs() + v[1].abs() - 1.0).abs() < 1e-9);
        }
    }
}
