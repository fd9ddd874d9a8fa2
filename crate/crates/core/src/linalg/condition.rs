use crate::scalar::Scalar;

use super::Matrix;

/// 1-norm condition number `‖A‖₁·‖A⁻¹‖₁`, with the inverse taken by
/// Gaussian elimination with partial pivoting.
///
/// Returns `+∞` for singular, non-square, or non-finite input.
pub fn condition_estimate<T: Scalar>(m: &Matrix<T>) -> T {
    if !m.is_square() || !m.is_finite() {
        return T::infinity();
    }
    if m.rows() == 0 {
        return T::one();
    }
    match lu_inverse(m) {
        Some(inv) if inv.is_finite() => m.norm_one() * inv.norm_one(),
        _ => T::infinity(),
    }
}

fn lu_inverse<T: Scalar>(m: &Matrix<T>) -> Option<Matrix<T>> {
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = Matrix::identity(n);
    for col in 0..n {
        let (piv, best) = (col..n)
            .map(|i| (i, a[(i, col)].abs()))
            .fold((col, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == T::zero() {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(piv, j)];
                inv[(piv, j)] = t;
            }
        }
        let d = a[(col, col)];
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[(i, col)] / d;
            if f == T::zero() {
                continue;
            }
            for j in 0..n {
                a[(i, j)] = a[(i, j)] - f * a[(col, j)];
                inv[(i, j)] = inv[(i, j)] - f * inv[(col, j)];
            }
        }
    }
    for i in 0..n {
        let d = a[(i, i)];
        for j in 0..n {
            inv[(i, j)] = inv[(i, j)] / d;
        }
    }
    Some(inv)
}
