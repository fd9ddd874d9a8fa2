#![allow(dead_code)]

use mcckf::linalg::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix<f64> {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// `Q diag(s) Qᵀ` with `Q` from Gram–Schmidt and log-uniform spectrum whose
/// ratio is exactly `cond`.
pub fn random_spd(rng: &mut impl Rng, n: usize, cond: f64) -> Matrix<f64> {
    let q = orthonormal(rng, n);
    let spectrum: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 || i == 0 {
                1.0
            } else if i == n - 1 {
                1.0 / cond
            } else {
                cond.powf(-rng.random_range(0.0..1.0))
            }
        })
        .collect();
    let scale: f64 = rng.random_range(0.1..10.0);
    let d = Matrix::from_diagonal(&spectrum);
    (&(&q * &d) * &q.transpose()).scale(scale).symmetrized()
}

pub fn orthonormal(rng: &mut impl Rng, n: usize) -> Matrix<f64> {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for c in &cols {
                let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-3 {
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn dense_inverse(a: &Matrix<f64>) -> Matrix<f64> {
    let n = a.rows();
    let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a[(i, j)]
        } else if j - n == i {
            1.0
        } else {
            0.0
        }
    });
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| aug[(x, c)].abs().total_cmp(&aug[(y, c)].abs()))
            .unwrap();
        for j in 0..2 * n {
            let t = aug[(c, j)];
            aug[(c, j)] = aug[(p, j)];
            aug[(p, j)] = t;
        }
        let piv = aug[(c, c)];
        for j in 0..2 * n {
            aug[(c, j)] /= piv;
        }
        for i in 0..n {
            if i != c {
                let f = aug[(i, c)];
                for j in 0..2 * n {
                    aug[(i, j)] -= f * aug[(c, j)];
                }
            }
        }
    }
    Matrix::from_fn(n, n, |i, j| aug[(i, j + n)])
}

pub fn rel_diff(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    let d = (a - b).norm_frobenius();
    let s = b.norm_frobenius();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

pub fn vec_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let s = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}
