use crate::scalar::Scalar;

use super::{LinalgError, Matrix};

/// Square lower-triangular matrix with a nonnegative diagonal.
///
/// Entries strictly above the diagonal are exactly zero. All factors emitted by
/// [`cholesky_lower`](super::cholesky_lower) and
/// [`lower_triangularize`](super::lower_triangularize) follow the nonnegative
/// diagonal convention, so the factor of a fixed SPD matrix is unique.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular<T> {
    m: Matrix<T>,
}

impl<T: Scalar> LowerTriangular<T> {
    pub(crate) fn from_matrix_unchecked(m: Matrix<T>) -> Self {
        debug_assert!(m.is_square());
        Self { m }
    }

    /// Validates triangular shape and the diagonal sign convention.
    pub fn try_from_matrix(m: Matrix<T>) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare { shape: m.shape() });
        }
        if !m.is_finite() {
            return Err(LinalgError::NonFiniteInput);
        }
        let n = m.rows();
        for i in 0..n {
            if m[(i, i)] < T::zero() {
                return Err(LinalgError::NegativeDiagonal { index: i });
            }
            for j in (i + 1)..n {
                if m[(i, j)] != T::zero() {
                    return Err(LinalgError::NotLowerTriangular { row: i, col: j });
                }
            }
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: Matrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: Matrix::zeros(n, n),
        }
    }

    /// Diagonal factor from nonnegative entries.
    pub fn from_diagonal(diag: &[T]) -> Result<Self, LinalgError> {
        Self::try_from_matrix(Matrix::from_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.m
    }

    pub fn diagonal(&self) -> Vec<T> {
        self.m.diagonal()
    }

    /// `L·Lᵀ`.
    pub fn reconstruct(&self) -> Matrix<T> {
        self.m.gram()
    }

    pub fn transpose(&self) -> Matrix<T> {
        self.m.transpose()
    }

    /// Multiplies every entry by a nonnegative scalar.
    pub fn scaled(&self, s: T) -> Self {
        debug_assert!(s >= T::zero());
        Self { m: self.m.scale(s) }
    }

    fn check_invertible(&self) -> Result<(), LinalgError> {
        for (i, d) in self.m.diagonal().into_iter().enumerate() {
            if !d.is_normal() {
                return Err(LinalgError::SingularFactor { index: i });
            }
        }
        Ok(())
    }
}

/// Solves `l·x = b` (forward substitution) or `lᵀ·x = b` (back substitution)
/// for every column of `b`.
pub fn triangular_solve<T: Scalar>(
    l: &LowerTriangular<T>,
    b: &Matrix<T>,
    transposed: bool,
) -> Result<Matrix<T>, LinalgError> {
    let n = l.dim();
    if b.rows() != n {
        return Err(LinalgError::DimensionMismatch {
            op: "triangular_solve",
            left: (n, n),
            right: b.shape(),
        });
    }
    l.check_invertible()?;
    let lm = l.as_matrix();
    let mut x = b.clone();
    for col in 0..b.cols() {
        if transposed {
            for i in (0..n).rev() {
                let mut s = x[(i, col)];
                for k in (i + 1)..n {
                    s = s - lm[(k, i)] * x[(k, col)];
                }
                x[(i, col)] = s / lm[(i, i)];
            }
        } else {
            for i in 0..n {
                let mut s = x[(i, col)];
                for k in 0..i {
                    s = s - lm[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s / lm[(i, i)];
            }
        }
    }
    Ok(x)
}

/// Vector convenience wrapper around [`triangular_solve`].
pub fn triangular_solve_vec<T: Scalar>(
    l: &LowerTriangular<T>,
    b: &[T],
    transposed: bool,
) -> Result<Vec<T>, LinalgError> {
    Ok(triangular_solve(l, &Matrix::column(b), transposed)?
        .as_slice()
        .to_vec())
}

/// Inverse of a lower-triangular factor, itself lower triangular.
pub fn triangular_inverse<T: Scalar>(
    l: &LowerTriangular<T>,
) -> Result<LowerTriangular<T>, LinalgError> {
    // Forward substitution against identity columns leaves the upper part exactly zero.
    let inv = triangular_solve(l, &Matrix::identity(l.dim()), false)?;
    Ok(LowerTriangular::from_matrix_unchecked(inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l22() -> LowerTriangular<f64> {
        LowerTriangular::try_from_matrix(Matrix::from_rows(&[[2.0, 0.0], [1.0, 2f64.sqrt()]]))
            .unwrap()
    }

    #[test]
    fn identity_solve_is_noop() {
        let b = Matrix::from_rows(&[[1.0, -2.0], [3.5, 4.0], [0.25, 9.0]]);
        let x = triangular_solve(&LowerTriangular::identity(3), &b, false).unwrap();
        assert_eq!(x, b);
        let x = triangular_solve(&LowerTriangular::identity(3), &b, true).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn forward_substitution_by_hand() {
        // 2·x1 = 2 → x1 = 1; x1 + √2·x2 = 1 + √2 → x2 = 1
        let l = l22();
        let b = [2.0, 1.0 + 2f64.sqrt()];
        let x = triangular_solve_vec(&l, &b, false).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        let r = l.as_matrix().mul_vec(&x);
        let res = ((r[0] - b[0]).powi(2) + (r[1] - b[1]).powi(2)).sqrt();
        assert!(res <= 1e-12 * (b[0].hypot(b[1])));
    }

    #[test]
    fn transposed_solve_residual() {
        let l = l22();
        let b = Matrix::column(&[3.0, -1.0]);
        let x = triangular_solve(&l, &b, true).unwrap();
        let r = &l.transpose() * &x;
        assert!((&r - &b).norm_frobenius() <= 1e-12 * b.norm_frobenius());
    }

    #[test]
    fn radar_noise_factor_inverse() {
        let l = LowerTriangular::from_diagonal(&[1000.0_f64, 0.017]).unwrap();
        let x = triangular_solve(&l, &Matrix::identity(2), false).unwrap();
        assert!((x[(0, 0)] - 1e-3).abs() < 1e-18);
        assert!((x[(1, 1)] - 1.0 / 0.017).abs() < 1e-12);
        assert_eq!(x[(0, 1)], 0.0);
        assert_eq!(x[(1, 0)], 0.0);
    }

    #[test]
    fn singular_factor_detected() {
        let l = LowerTriangular::from_diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(
            triangular_solve_vec(&l, &[1.0, 1.0], false),
            Err(LinalgError::SingularFactor { index: 1 })
        );
        let sub = LowerTriangular::from_diagonal(&[1.0, f64::MIN_POSITIVE / 4.0]).unwrap();
        assert!(matches!(
            triangular_inverse(&sub),
            Err(LinalgError::SingularFactor { index: 1 })
        ));
    }

    #[test]
    fn inverse_examples() {
        let id = triangular_inverse(&LowerTriangular::<f64>::identity(3)).unwrap();
        assert_eq!(id, LowerTriangular::identity(3));

        let d = triangular_inverse(&LowerTriangular::from_diagonal(&[2.0, 4.0]).unwrap()).unwrap();
        assert_eq!(d.diagonal(), vec![0.5, 0.25]);

        let inv = triangular_inverse(&l22()).unwrap();
        let s2 = 2f64.sqrt();
        let expected = Matrix::from_rows(&[[0.5, 0.0], [-1.0 / (2.0 * s2), 1.0 / s2]]);
        assert!((inv.as_matrix() - &expected).norm_max() < 1e-15);
        let prod = l22().as_matrix() * inv.as_matrix();
        assert!((&prod - &Matrix::identity(2)).norm_max() < 1e-15);
    }

    #[test]
    fn rejects_malformed_factors() {
        let upper = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(
            LowerTriangular::try_from_matrix(upper),
            Err(LinalgError::NotLowerTriangular { row: 0, col: 1 })
        ));
        let neg = Matrix::from_rows(&[[-1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(
            LowerTriangular::try_from_matrix(neg),
            Err(LinalgError::NegativeDiagonal { index: 0 })
        ));
    }
}
