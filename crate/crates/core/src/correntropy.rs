//! Gaussian correntropy kernel and the scalar adjusting weight `λ_k`.

use thiserror::Error;

use crate::linalg::{triangular_solve_vec, LinalgError, LowerTriangular};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrentropyError {
    #[error("kernel bandwidth must be positive and finite")]
    InvalidBandwidth,
    #[error("adjusting weight denominator underflowed to zero")]
    DegenerateWeight,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Gaussian kernel with bandwidth `σ > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec<T> {
    sigma: T,
}

impl<T: Scalar> KernelSpec<T> {
    pub fn new(sigma: T) -> Result<Self, CorrentropyError> {
        if sigma > T::zero() && sigma.is_finite() {
            Ok(Self { sigma })
        } else {
            Err(CorrentropyError::InvalidBandwidth)
        }
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }
}

/// `exp(−d²/(2σ²))`. Underflows to exactly zero for extreme distances.
pub fn gaussian_kernel<T: Scalar>(spec: &KernelSpec<T>, distance: T) -> T {
    let z = distance / spec.sigma;
    (-(z * z) * T::lit(0.5)).exp()
}

/// `‖e‖_{W⁻¹} = √(eᵀW⁻¹e)` for `W = L·Lᵀ`, computed as `‖L⁻¹e‖₂` by forward
/// substitution. A zero residual has norm zero for any weight.
pub fn weighted_norm<T: Scalar>(
    residual: &[T],
    weight_factor: &LowerTriangular<T>,
) -> Result<T, LinalgError> {
    if residual.len() != weight_factor.dim() {
        return Err(LinalgError::DimensionMismatch {
            op: "weighted_norm",
            left: (weight_factor.dim(), weight_factor.dim()),
            right: (residual.len(), 1),
        });
    }
    if residual.iter().all(|&x| x == T::zero()) {
        return Ok(T::zero());
    }
    let z = triangular_solve_vec(weight_factor, residual, false)?;
    Ok(z.iter().map(|&x| x * x).sum::<T>().sqrt())
}

/// Inputs to the adjusting weight.
#[derive(Clone, Copy, Debug)]
pub struct LambdaInputs<'a, T> {
    /// `y_k − H_k x̂_{k|k−1}`.
    pub innovation: &'a [T],
    /// Cholesky factor of `R_k`.
    pub innovation_weight_factor: &'a LowerTriangular<T>,
    /// `x̂_{k|k−1} − F_{k−1} x̂_{k−1|k−1}`.
    pub prediction_residual: &'a [T],
    /// Cholesky factor of `P_{k|k−1}`.
    pub prediction_weight_factor: &'a LowerTriangular<T>,
}

/// `λ_k = k_σ(‖innovation‖_{R⁻¹}) / k_σ(‖prediction residual‖_{P⁻¹})`.
///
/// With a zero prediction residual the denominator is exactly one and the
/// weight lies in `[0, 1]`. A weight of zero (numerator underflow on a gross
/// outlier) is a valid result and rejects the measurement.
pub fn compute_lambda<T: Scalar>(
    spec: &KernelSpec<T>,
    inputs: &LambdaInputs<'_, T>,
) -> Result<T, CorrentropyError> {
    let num = gaussian_kernel(
        spec,
        weighted_norm(inputs.innovation, inputs.innovation_weight_factor)?,
    );
    let den = gaussian_kernel(
        spec,
        weighted_norm(inputs.prediction_residual, inputs.prediction_weight_factor)?,
    );
    if den == T::zero() {
        if num == T::zero() {
            return Ok(T::zero());
        }
        return Err(CorrentropyError::DegenerateWeight);
    }
    Ok(num / den)
}
