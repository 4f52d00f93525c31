//! Independent reference implementations used by the integration tests.
//!
//! Everything here refits from scratch with a pseudo-inverse or a
//! hand-written Jacobi eigen solver, sharing no code paths with the
//! incremental engine.

#![allow(dead_code)]

use gfr_core::{DesignMatrix, ResponseVector};
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense Gaussian design and a response from a random sparse `beta`.
pub fn gaussian_instance(rng: &mut ChaCha8Rng, n: usize, p: usize) -> (DesignMatrix, ResponseVector) {
    let x = DesignMatrix::from_fn(n, p, |_, _| rng.sample(StandardNormal)).unwrap();
    let k = rng.random_range(1..=p.min(5));
    let support = sample(rng, p, k).into_vec();
    let coefs: Vec<f64> = support.iter().map(|_| rng.random_range(0.5..3.0)).collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let signal: f64 = support.iter().zip(&coefs).map(|(&j, b)| b * x.get(i, j)).sum();
            signal + rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    (x, ResponseVector::new(y).unwrap())
}

pub fn submatrix(x: &DesignMatrix, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.n(), cols.len(), |i, k| x.get(i, cols[k]))
}

/// `||y - X_M X_M^+ y||^2` by a full pseudo-inverse solve.
pub fn ssr(x: &DesignMatrix, cols: &[usize], y: &[f64]) -> f64 {
    let yv = DVector::from_column_slice(y);
    if cols.is_empty() {
        return yv.norm_squared();
    }
    let xm = submatrix(x, cols);
    let pinv = xm.clone().pseudo_inverse(1e-12).unwrap();
    (&yv - &xm * (pinv * &yv)).norm_squared()
}

/// `||P_M y||^2` by the same route.
pub fn explained(x: &DesignMatrix, cols: &[usize], y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>() - ssr(x, cols, y)
}

/// `SSR(M) - SSR(M + j)` from full refits, evaluated as
/// `(r_y' r_j)^2 / ||r_j||^2` with both residuals taken against `M` by
/// pseudo-inverse. Same quantity as the difference of two refit SSRs, but
/// free of the cancellation that difference suffers when the gain is tiny
/// relative to `SSR(M)`.
pub fn refit_gain(x: &DesignMatrix, cols: &[usize], j: usize, y: &[f64]) -> f64 {
    let yv = DVector::from_column_slice(y);
    let xj = DVector::from_column_slice(x.column(j));
    let (ry, rj) = if cols.is_empty() {
        (yv, xj)
    } else {
        let xm = submatrix(x, cols);
        let pinv = xm.clone().pseudo_inverse(1e-12).unwrap();
        (&yv - &xm * (&pinv * &yv), &xj - &xm * (&pinv * &xj))
    };
    ry.dot(&rj).powi(2) / rj.norm_squared()
}

/// Greedy forward regression by brute force: every candidate's gain is
/// `SSR(M) - SSR(M + j)` from two full refits; the `j` largest gains
/// (ties to the smaller index) enter together. Candidates whose residual
/// norm is below `1e-10` of their original norm are skipped.
pub fn naive_gfr(x: &DesignMatrix, y: &ResponseVector, j: usize, max_steps: usize) -> Vec<Vec<usize>> {
    let (n, p) = (x.n(), x.p());
    let y = y.as_slice();
    let y_sq: f64 = y.iter().map(|v| v * v).sum();
    let mut model: Vec<usize> = Vec::new();
    let mut steps = Vec::new();
    while steps.len() < max_steps && model.len() + j <= n {
        let base = ssr(x, &model, y);
        if base <= 1e-12 * y_sq {
            break;
        }
        let mut gains: Vec<(usize, f64)> = (0..p)
            .filter(|c| !model.contains(c))
            .filter(|&c| {
                let col = x.column(c);
                let orig: f64 = col.iter().map(|v| v * v).sum();
                ssr(x, &model, col) > 1e-10 * orig
            })
            .map(|c| {
                let mut with = model.clone();
                with.push(c);
                (c, base - ssr(x, &with, y))
            })
            .collect();
        if gains.is_empty() {
            break;
        }
        gains.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let chosen: Vec<usize> = gains.iter().take(j).map(|g| g.0).collect();
        model.extend(&chosen);
        steps.push(chosen);
    }
    steps
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let m = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&k| k != i).map(move |k| (i, k)))
            .map(|(i, k)| a[i][k] * a[i][k])
            .sum();
        if off < 1e-30 {
            break;
        }
        for i in 0..m {
            for k in i + 1..m {
                if a[i][k].abs() < 1e-300 {
                    continue;
                }
                let tau = (a[k][k] - a[i][i]) / (2.0 * a[i][k]);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for r in 0..m {
                    let (ari, ark) = (a[r][i], a[r][k]);
                    a[r][i] = c * ari - s * ark;
                    a[r][k] = s * ari + c * ark;
                }
                for r in 0..m {
                    let (air, akr) = (a[i][r], a[k][r]);
                    a[i][r] = c * air - s * akr;
                    a[k][r] = s * air + c * akr;
                }
            }
        }
    }
    (0..m).map(|i| a[i][i]).collect()
}

/// `X_A^T X_B / n` as nested vectors.
pub fn cross_gram(x: &DesignMatrix, a: &[usize], b: &[usize]) -> Vec<Vec<f64>> {
    let n = x.n() as f64;
    a.iter()
        .map(|&i| {
            b.iter()
                .map(|&k| x.column(i).iter().zip(x.column(k)).map(|(u, v)| u * v).sum::<f64>() / n)
                .collect()
        })
        .collect()
}

/// All `k`-subsets of `0..p` in lexicographic order.
pub fn subsets(p: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, p: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..p {
            cur.push(i);
            go(i + 1, p, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, p, k, &mut Vec::new(), &mut out);
    out
}
