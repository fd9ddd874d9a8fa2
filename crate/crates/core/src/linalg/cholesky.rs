use crate::scalar::Scalar;

use super::{LinalgError, LowerTriangular, Matrix};

/// Relative asymmetry accepted before an input is rejected.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Pivot floor, in units of machine epsilon times the pivot row's 2-norm.
pub const PIVOT_FLOOR_EPS: f64 = 1e2;

/// Cholesky factorization `a = L·Lᵀ` with `L` lower triangular.
///
/// The input is symmetrized before factoring. No pivoting is performed. A pivot
/// at or below `PIVOT_FLOOR_EPS · ε · ‖row‖₂` raises
/// [`LinalgError::NotPositiveDefinite`] instead of producing a garbage factor.
pub fn cholesky_lower<T: Scalar>(a: &Matrix<T>) -> Result<LowerTriangular<T>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { shape: a.shape() });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFiniteInput);
    }
    let asym = a.asymmetry();
    if asym > T::lit(SYMMETRY_TOLERANCE) {
        return Err(LinalgError::NotSymmetric {
            relative_asymmetry: asym.to_f64().unwrap_or(f64::NAN),
        });
    }
    let a = a.symmetrized();
    let n = a.rows();
    let floor_scale = T::lit(PIVOT_FLOOR_EPS) * T::epsilon();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = a[(j, j)];
        for k in 0..j {
            pivot = pivot - l[(j, k)] * l[(j, k)];
        }
        let row_norm = a.row(j).iter().map(|&x| x * x).sum::<T>().sqrt();
        if pivot.partial_cmp(&(floor_scale * row_norm)) != Some(std::cmp::Ordering::Greater) {
            return Err(LinalgError::NotPositiveDefinite {
                index: j,
                pivot: pivot.to_f64().unwrap_or(f64::NAN),
            });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(LowerTriangular::from_matrix_unchecked(l))
}
