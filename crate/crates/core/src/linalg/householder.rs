use crate::scalar::Scalar;

use super::{LinalgError, LowerTriangular, Matrix};

/// Orthogonal lower-triangularization of a wide pre-array.
///
/// Applies Householder reflections from the right, `A·Q = [X, 0]`, and returns
/// the leading `rows × rows` block `X` with its diagonal normalized to be
/// nonnegative. `X·Xᵀ = A·Aᵀ` up to roundoff. A rank-deficient pre-array yields
/// zero diagonal entries.
pub fn lower_triangularize<T: Scalar>(
    pre_array: &Matrix<T>,
) -> Result<LowerTriangular<T>, LinalgError> {
    let (r, c) = pre_array.shape();
    if r > c {
        return Err(LinalgError::DimensionMismatch {
            op: "lower_triangularize",
            left: (r, c),
            right: (r, r),
        });
    }
    if !pre_array.is_finite() {
        return Err(LinalgError::NonFiniteInput);
    }
    let mut a = pre_array.clone();
    let mut v = vec![T::zero(); c];
    for i in 0..r {
        let len = c - i;
        let norm = scaled_norm(&a.row(i)[i..]);
        if norm == T::zero() {
            continue;
        }
        let x0 = a[(i, i)];
        let alpha = if x0 >= T::zero() { -norm } else { norm };
        let v = &mut v[..len];
        v.copy_from_slice(&a.row(i)[i..]);
        v[0] = x0 - alpha;
        let vtv: T = v.iter().map(|&x| x * x).sum();
        if vtv == T::zero() {
            continue;
        }
        let beta = T::lit(2.0) / vtv;
        a[(i, i)] = alpha;
        for j in (i + 1)..c {
            a[(i, j)] = T::zero();
        }
        for p in (i + 1)..r {
            let w: T = (0..len).map(|j| a[(p, i + j)] * v[j]).sum::<T>() * beta;
            if w == T::zero() {
                continue;
            }
            for j in 0..len {
                a[(p, i + j)] = a[(p, i + j)] - w * v[j];
            }
        }
    }
    let mut x = Matrix::from_fn(r, r, |i, j| if j <= i { a[(i, j)] } else { T::zero() });
    for j in 0..r {
        if x[(j, j)] < T::zero() {
            for i in j..r {
                x[(i, j)] = -x[(i, j)];
            }
        }
    }
    Ok(LowerTriangular::from_matrix_unchecked(x))
}

fn scaled_norm<T: Scalar>(x: &[T]) -> T {
    let scale = x.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    scale
        * x.iter()
            .map(|&v| (v / scale) * (v / scale))
            .sum::<T>()
            .sqrt()
}
