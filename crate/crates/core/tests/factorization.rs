mod common;

use common::{dense_inverse, random_matrix, random_spd, rel_diff, rng};
use mcckf::linalg::{
    cholesky_lower, condition_estimate, lower_triangularize, triangular_inverse, triangular_solve,
    Matrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn cholesky_reconstructs_random_spd() {
    let mut rng = rng(1);
    for _ in 0..1000 {
        let n = rng.random_range(1..=10);
        let cond = 10f64.powf(rng.random_range(0.0..6.0));
        let a = random_spd(&mut rng, n, cond);
        let l = cholesky_lower(&a).unwrap();
        assert!(l.diagonal().iter().all(|&d| d > 0.0));
        assert!(rel_diff(&l.reconstruct(), &a) < 1e-12);
    }
}

#[test]
fn triangularization_preserves_gram() {
    let mut rng = rng(2);
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let extra = rng.random_range(0..=8);
        let a = random_matrix(&mut rng, n, n + extra);
        let l = lower_triangularize(&a).unwrap();
        assert!(l.diagonal().iter().all(|&d| d >= 0.0));
        assert!(rel_diff(&l.reconstruct(), &a.gram()) < 1e-12);
    }
}

#[test]
fn triangular_solve_round_trip() {
    let mut rng = rng(3);
    for _ in 0..500 {
        let n = rng.random_range(1..=10);
        let a = random_spd(&mut rng, n, 1e4);
        let l = cholesky_lower(&a).unwrap();
        let cols = rng.random_range(1..=4);
        let b = random_matrix(&mut rng, n, cols);
        for transposed in [false, true] {
            let x = triangular_solve(&l, &b, transposed).unwrap();
            let lhs = if transposed {
                &l.transpose() * &x
            } else {
                l.as_matrix() * &x
            };
            let bound = 1e-12 * condition_estimate(l.as_matrix()) * b.norm_frobenius();
            assert!((&lhs - &b).norm_frobenius() <= bound.max(1e-14));
        }
        let inv = triangular_inverse(&l).unwrap();
        assert!(rel_diff(inv.as_matrix(), &dense_inverse(l.as_matrix())) < 1e-9);
    }
}

#[test]
fn condition_estimate_brackets_spectral_ratio() {
    let mut rng = rng(4);
    for _ in 0..200 {
        let n = rng.random_range(2..=8);
        let a = random_spd(&mut rng, n, 1e5);
        let c = condition_estimate(&a);
        // ‖·‖₁ is within a factor n of ‖·‖₂ for both A and A⁻¹.
        let n = n as f64;
        assert!(c >= 1e5 / n / 1.001 && c <= 1e5 * n * 1.001, "{c}");
    }
}

proptest! {
    #[test]
    fn triangular_inputs_are_fixed_points(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = cholesky_lower(&random_spd(&mut rng, n, 100.0)).unwrap();
        let again = lower_triangularize(l.as_matrix()).unwrap();
        prop_assert!(rel_diff(again.as_matrix(), l.as_matrix()) < 1e-13);
    }

    #[test]
    fn column_order_does_not_change_gram(seed in any::<u64>(), n in 1usize..6, k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, n, n + k);
        let reversed = Matrix::from_fn(n, n + k, |i, j| a[(i, n + k - 1 - j)]);
        let l1 = lower_triangularize(&a).unwrap();
        let l2 = lower_triangularize(&reversed).unwrap();
        prop_assert!(rel_diff(l1.as_matrix(), l2.as_matrix()) < 1e-10);
    }

    #[test]
    fn indefinite_is_rejected(seed in any::<u64>(), n in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_spd(&mut rng, n, 10.0);
        let shift = Matrix::identity(n).scale(2.0 * a.norm_frobenius());
        prop_assert!(cholesky_lower(&(&a - &shift)).is_err());
    }

    #[test]
    fn scaling_commutes_with_factorization(seed in any::<u64>(), n in 1usize..7, s in 1e-3f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_spd(&mut rng, n, 1e3);
        let l = cholesky_lower(&a).unwrap();
        let ls = cholesky_lower(&a.scale(s * s)).unwrap();
        prop_assert!(rel_diff(ls.as_matrix(), &l.as_matrix().scale(s)) < 1e-11);
    }
}
