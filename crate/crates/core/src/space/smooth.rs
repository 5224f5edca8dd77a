//! Smoothed surrogates of the non-polyhedral norms.
//!
//! Distance minimization replaces each absolute value by
//! sqrt(t^2 + mu^2) and follows a decreasing-mu continuation; the
//! surrogate dominates the norm and exceeds it by at most `gap(mu)`,
//! which bounds the error of the reported distance.

use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub(crate) enum SmoothNorm {
    Lp {
        p: f64,
    },
    /// (sum_{i in sel} |v_i|)^2 + sum_rest v_i^2 under the root.
    SumSquare {
        sel: Vec<usize>,
        /// quadratic weights per coordinate (1 for plain coordinates).
        quad: Vec<f64>,
    },
    Product {
        p: f64,
        factors: Vec<(usize, SmoothNorm)>, // (offset, factor)
        dims: Vec<usize>,
    },
}

fn s_mu(t: f64, mu: f64) -> f64 {
    (t * t + mu * mu).sqrt()
}

impl SmoothNorm {
    /// Smoothed norm value; >= the true norm, <= true norm + gap(mu).
    pub fn value(&self, v: &[f64], mu: f64) -> f64 {
        match self {
            SmoothNorm::Lp { p } => v
                .iter()
                .map(|&t| (t * t + mu * mu).powf(p / 2.0))
                .sum::<f64>()
                .powf(1.0 / p),
            SmoothNorm::SumSquare { sel, quad } => {
                let l: f64 = sel.iter().map(|&i| s_mu(v[i], mu)).sum();
                let q: f64 = v
                    .iter()
                    .zip(quad)
                    .map(|(&t, &w)| w * w * t * t)
                    .sum();
                (l * l + q).sqrt()
            }
            SmoothNorm::Product { p, factors, dims } => {
                let mut acc = 0.0;
                for ((off, f), d) in factors.iter().zip(dims) {
                    acc += f.value(&v[*off..off + d], mu).powf(*p);
                }
                acc.powf(1.0 / p)
            }
        }
    }

    pub fn grad(&self, v: &[f64], mu: f64) -> Vec<f64> {
        match self {
            SmoothNorm::Lp { p } => {
                let phi: f64 = v
                    .iter()
                    .map(|&t| (t * t + mu * mu).powf(p / 2.0))
                    .sum();
                let n = phi.powf(1.0 / p);
                let c = n / phi; // (1/p) Phi^{1/p - 1} * p = ... folded below
                v.iter()
                    .map(|&t| c * (t * t + mu * mu).powf(p / 2.0 - 1.0) * t)
                    .collect()
            }
            SmoothNorm::SumSquare { sel, quad } => {
                let l: f64 = sel.iter().map(|&i| s_mu(v[i], mu)).sum();
                let n = self.value(v, mu);
                let mut g: Vec<f64> = v
                    .iter()
                    .zip(quad)
                    .map(|(&t, &w)| w * w * t / n)
                    .collect();
                for &i in sel {
                    g[i] += l * v[i] / (s_mu(v[i], mu) * n);
                }
                g
            }
            SmoothNorm::Product { p, factors, dims } => {
                let n = self.value(v, mu);
                let mut g = vec![0.0; v.len()];
                for ((off, f), d) in factors.iter().zip(dims) {
                    let slice = &v[*off..off + d];
                    let ni = f.value(slice, mu);
                    let gi = f.grad(slice, mu);
                    let w = (ni / n).powf(p - 1.0);
                    for (j, gv) in gi.iter().enumerate() {
                        g[off + j] = w * gv;
                    }
                }
                g
            }
        }
    }

    pub fn hess(&self, v: &[f64], mu: f64) -> DMatrix<f64> {
        let dim = v.len();
        match self {
            SmoothNorm::Lp { p } => {
                let phi: f64 = v
                    .iter()
                    .map(|&t| (t * t + mu * mu).powf(p / 2.0))
                    .sum();
                let gphi: Vec<f64> = v
                    .iter()
                    .map(|&t| p * (t * t + mu * mu).powf(p / 2.0 - 1.0) * t)
                    .collect();
                let hphi_diag: Vec<f64> = v
                    .iter()
                    .map(|&t| {
                        let s2 = t * t + mu * mu;
                        p * s2.powf(p / 2.0 - 2.0) * ((p - 1.0) * t * t + mu * mu)
                    })
                    .collect();
                compose_power(phi, &gphi, &hphi_diag, 1.0 / p, dim)
            }
            SmoothNorm::SumSquare { sel, quad } => {
                let l: f64 = sel.iter().map(|&i| s_mu(v[i], mu)).sum();
                let n = self.value(v, mu);
                // G = L^2 + Q; N = sqrt(G)
                let mut g_grad = vec![0.0; dim];
                for (i, (&t, &w)) in v.iter().zip(quad).enumerate() {
                    g_grad[i] = 2.0 * w * w * t;
                }
                let mut l_grad = vec![0.0; dim];
                for &i in sel {
                    l_grad[i] = v[i] / s_mu(v[i], mu);
                    g_grad[i] += 2.0 * l * l_grad[i];
                }
                let mut h = DMatrix::<f64>::zeros(dim, dim);
                for (i, &w) in quad.iter().enumerate() {
                    h[(i, i)] += 2.0 * w * w;
                }
                for &i in sel {
                    let si = s_mu(v[i], mu);
                    h[(i, i)] += 2.0 * l * mu * mu / (si * si * si);
                }
                for &i in sel {
                    for &j in sel {
                        h[(i, j)] += 2.0 * l_grad[i] * l_grad[j];
                    }
                }
                // N = G^{1/2}: H_N = H_G/(2N) - g_G g_G^T / (4 N^3)
                let mut out = DMatrix::<f64>::zeros(dim, dim);
                for i in 0..dim {
                    for j in 0..dim {
                        out[(i, j)] =
                            h[(i, j)] / (2.0 * n) - g_grad[i] * g_grad[j] / (4.0 * n * n * n);
                    }
                }
                out
            }
            SmoothNorm::Product { p, factors, dims } => {
                // Phi = sum N_i^p, N = Phi^{1/p}
                let mut phi = 0.0;
                let mut gphi = vec![0.0; dim];
                let mut hphi = DMatrix::<f64>::zeros(dim, dim);
                for ((off, f), d) in factors.iter().zip(dims) {
                    let slice = &v[*off..off + d];
                    let ni = f.value(slice, mu);
                    let gi = f.grad(slice, mu);
                    let hi = f.hess(slice, mu);
                    phi += ni.powf(*p);
                    let w1 = p * ni.powf(p - 1.0);
                    let w2 = p * (p - 1.0) * ni.powf(p - 2.0);
                    for a in 0..*d {
                        gphi[off + a] = w1 * gi[a];
                        for b in 0..*d {
                            hphi[(off + a, off + b)] = w2 * gi[a] * gi[b] + w1 * hi[(a, b)];
                        }
                    }
                }
                compose_power(phi, &gphi, &hphi.diagonal().iter().copied().collect::<Vec<_>>(), 1.0 / p, dim)
                    + correction_offdiag(&hphi, phi, 1.0 / p)
            }
        }
    }

    /// Upper bound on `value(v, mu) - true norm(v)`.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn gap(&self, mu: f64, dim: usize) -> f64 {
        match self {
            SmoothNorm::Lp { .. } => mu * (dim as f64).max(1.0),
            SmoothNorm::SumSquare { sel, .. } => mu * sel.len() as f64,
            SmoothNorm::Product { factors, dims, .. } => factors
                .iter()
                .zip(dims)
                .map(|((_, f), d)| f.gap(mu, *d))
                .sum(),
        }
    }
}

/// Hessian of Phi^alpha given Phi, its gradient and a DIAGONAL Hessian.
fn compose_power(phi: f64, gphi: &[f64], hphi_diag: &[f64], alpha: f64, dim: usize) -> DMatrix<f64> {
    let a1 = alpha * phi.powf(alpha - 1.0);
    let a2 = alpha * (alpha - 1.0) * phi.powf(alpha - 2.0);
    DMatrix::from_fn(dim, dim, |i, j| {
        let mut v = a2 * gphi[i] * gphi[j];
        if i == j {
            v += a1 * hphi_diag[i];
        }
        v
    })
}

/// Off-diagonal part of alpha Phi^{alpha-1} H_Phi missed by
/// `compose_power`'s diagonal-only path.
fn correction_offdiag(hphi: &DMatrix<f64>, phi: f64, alpha: f64) -> DMatrix<f64> {
    let a1 = alpha * phi.powf(alpha - 1.0);
    let dim = hphi.nrows();
    DMatrix::from_fn(dim, dim, |i, j| if i == j { 0.0 } else { a1 * hphi[(i, j)] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(n: &SmoothNorm, v: &[f64], mu: f64) -> Vec<f64> {
        let h = 1e-6;
        (0..v.len())
            .map(|i| {
                let mut a = v.to_vec();
                let mut b = v.to_vec();
                a[i] += h;
                b[i] -= h;
                (n.value(&a, mu) - n.value(&b, mu)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradients_match_finite_differences() {
        let cases: Vec<(SmoothNorm, Vec<f64>)> = vec![
            (SmoothNorm::Lp { p: 3.0 }, vec![0.4, -1.2, 0.0]),
            (
                SmoothNorm::SumSquare {
                    sel: vec![0, 1],
                    quad: vec![0.0, 0.0, 1.0],
                },
                vec![0.7, -0.2, 1.1],
            ),
            (
                SmoothNorm::Product {
                    p: 2.5,
                    factors: vec![(0, SmoothNorm::Lp { p: 2.0 }), (2, SmoothNorm::Lp { p: 3.0 })],
                    dims: vec![2, 2],
                },
                vec![0.3, -0.8, 0.5, 0.9],
            ),
        ];
        for (n, v) in cases {
            let g = n.grad(&v, 1e-3);
            let fd = fd_grad(&n, &v, 1e-3);
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-6, "grad {a} vs fd {b}");
            }
        }
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let n = SmoothNorm::SumSquare {
            sel: vec![0, 2],
            quad: vec![0.0, 1.0, 0.0],
        };
        let v = [0.5, -0.4, 0.8];
        let h = n.hess(&v, 1e-2);
        let step = 1e-5;
        for i in 0..3 {
            let mut a = v.to_vec();
            let mut b = v.to_vec();
            a[i] += step;
            b[i] -= step;
            let ga = n.grad(&a, 1e-2);
            let gb = n.grad(&b, 1e-2);
            for j in 0..3 {
                let fd = (ga[j] - gb[j]) / (2.0 * step);
                assert!((h[(i, j)] - fd).abs() < 1e-5, "h[{i}{j}] {} vs {}", h[(i, j)], fd);
            }
        }
    }

    #[test]
    fn gap_dominates() {
        let n = SmoothNorm::Lp { p: 1.5 };
        let v = [0.3, 0.0, -2.0];
        let exact = v
            .iter()
            .map(|t: &f64| t.abs().powf(1.5))
            .sum::<f64>()
            .powf(1.0 / 1.5);
        for mu in [1e-2, 1e-6] {
            let s = n.value(&v, mu);
            assert!(s >= exact);
            assert!(s - exact <= n.gap(mu, 3) + 1e-15);
        }
    }
}
