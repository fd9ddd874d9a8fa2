//! MCC-KF step functions and the filter driver.
//!
//! Each algorithm is split into a time update and a measurement update acting
//! on a [`FilterState`]. The conventional algorithm and the reference Kalman
//! filter carry a full covariance; the square-root algorithms carry a lower
//! Cholesky factor. No algorithm materializes an explicit inverse of a full
//! matrix; inverses are realized through triangular solves.

mod conventional;
mod reference;
mod run;
mod square_root;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::correntropy::{compute_lambda, CorrentropyError, KernelSpec, LambdaInputs};
use crate::linalg::{cholesky_lower, LinalgError, LowerTriangular, Matrix};
use crate::model::{InitialCondition, ValidationReport};
use crate::scalar::Scalar;

pub use conventional::{mcckf_measurement_update, mcckf_time_update};
pub use reference::{kf_reference_measurement_update, kf_reference_step};
pub use run::{filter_step, run_filter, FilterRun, RunStatus};
pub use square_root::{sr1a_measurement_update, sr1b_measurement_update, sr_time_update};

/// Estimate magnitude beyond which a run is declared diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Full covariance, Joseph stabilized update.
    Conventional,
    /// Square-root, information-form gain.
    Sr1a,
    /// Square-root, innovation-factor gain.
    Sr1b,
    /// Classical Kalman filter oracle (λ ≡ 1).
    KfReference,
}

impl Algorithm {
    pub const MCC: [Algorithm; 3] = [Algorithm::Conventional, Algorithm::Sr1a, Algorithm::Sr1b];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Conventional => "conventional",
            Algorithm::Sr1a => "sr1a",
            Algorithm::Sr1b => "sr1b",
            Algorithm::KfReference => "kf_reference",
        }
    }

    pub fn uses_factor(self) -> bool {
        matches!(self, Algorithm::Sr1a | Algorithm::Sr1b)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "conventional" | "1" => Ok(Algorithm::Conventional),
            "sr1a" | "1a" => Ok(Algorithm::Sr1a),
            "sr1b" | "1b" => Ok(Algorithm::Sr1b),
            "kf_reference" | "kf" => Ok(Algorithm::KfReference),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// Covariance representation carried by a filter.
#[derive(Clone, Debug, PartialEq)]
pub enum Covariance<T> {
    Full(Matrix<T>),
    Factor(LowerTriangular<T>),
}

impl<T: Scalar> Covariance<T> {
    /// The covariance matrix itself (`S·Sᵀ` for a factor).
    pub fn matrix(&self) -> Matrix<T> {
        match self {
            Covariance::Full(p) => p.clone(),
            Covariance::Factor(s) => s.reconstruct(),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Covariance::Full(p) => p.is_finite(),
            Covariance::Factor(s) => s.as_matrix().is_finite(),
        }
    }
}

/// Estimate and covariance at step `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterState<T> {
    pub step: usize,
    pub estimate: Vec<T>,
    pub covariance: Covariance<T>,
}

impl<T: Scalar> FilterState<T> {
    /// `x̂₀|₀ = x̄₀`, `P₀|₀ = Π₀`.
    pub fn initial_full(init: &InitialCondition<T>) -> Self {
        Self {
            step: 0,
            estimate: init.mean.clone(),
            covariance: Covariance::Full(init.covariance.clone()),
        }
    }

    /// `x̂₀|₀ = x̄₀`, `P₀|₀^{1/2} = Π₀^{1/2}`.
    pub fn initial_factor(init: &InitialCondition<T>) -> Result<Self, LinalgError> {
        Ok(Self {
            step: 0,
            estimate: init.mean.clone(),
            covariance: Covariance::Factor(cholesky_lower(&init.covariance)?),
        })
    }

    pub fn covariance_matrix(&self) -> Matrix<T> {
        self.covariance.matrix()
    }
}

/// Per-step byproducts of a measurement update.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport<T> {
    pub lambda: T,
    pub gain: Matrix<T>,
    pub innovation: Vec<T>,
}

/// How the adjusting weight `λ_k` is obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weighting<T> {
    /// Correntropy weight from the Gaussian kernel.
    Kernel(KernelSpec<T>),
    /// Fixed weight; `1` reduces every algorithm to the classical Kalman
    /// filter, `0` rejects every measurement.
    Pinned(T),
}

impl<T> From<KernelSpec<T>> for Weighting<T> {
    fn from(spec: KernelSpec<T>) -> Self {
        Weighting::Kernel(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DivergenceReason {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Correntropy(#[from] CorrentropyError),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("estimate magnitude {0:e} exceeds divergence threshold")]
    Overflow(f64),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FilterError {
    #[error("diverged at step {step}: {reason}")]
    Diverged {
        step: usize,
        reason: DivergenceReason,
    },
    #[error("{algorithm} expects a {expected} covariance representation")]
    Representation {
        algorithm: &'static str,
        expected: &'static str,
    },
    #[error("model rejected: {0}")]
    InvalidModel(ValidationReport),
}

impl FilterError {
    pub(crate) fn diverged(step: usize, reason: impl Into<DivergenceReason>) -> Self {
        FilterError::Diverged {
            step,
            reason: reason.into(),
        }
    }
}

/// Shared `λ_k` evaluation. The prediction residual is identically zero for
/// every algorithm here since `x̂_{k|k−1} = F x̂_{k−1|k−1}`.
pub(crate) fn adjusting_weight<T: Scalar>(
    weighting: &Weighting<T>,
    step: usize,
    innovation: &[T],
    r_sqrt: &LowerTriangular<T>,
    prediction_factor: &LowerTriangular<T>,
) -> Result<T, FilterError> {
    match weighting {
        Weighting::Pinned(l) => Ok(*l),
        Weighting::Kernel(spec) => {
            let zero = vec![T::zero(); prediction_factor.dim()];
            compute_lambda(
                spec,
                &LambdaInputs {
                    innovation,
                    innovation_weight_factor: r_sqrt,
                    prediction_residual: &zero,
                    prediction_weight_factor: prediction_factor,
                },
            )
            .map_err(|e| FilterError::diverged(step, e))
        }
    }
}

pub(crate) fn innovation<T: Scalar>(h: &Matrix<T>, x_pred: &[T], y: &[T]) -> Vec<T> {
    h.mul_vec(x_pred)
        .iter()
        .zip(y)
        .map(|(&hx, &y)| y - hx)
        .collect()
}

/// `x̂ + K·e`.
pub(crate) fn corrected_estimate<T: Scalar>(
    x_pred: &[T],
    gain: &Matrix<T>,
    innovation: &[T],
) -> Vec<T> {
    gain.mul_vec(innovation)
        .iter()
        .zip(x_pred)
        .map(|(&ke, &x)| x + ke)
        .collect()
}

/// Rejects non-finite or runaway states.
pub(crate) fn check_state<T: Scalar>(
    step: usize,
    estimate: &[T],
    covariance: &Covariance<T>,
) -> Result<(), FilterError> {
    let limit = T::lit(DIVERGENCE_THRESHOLD);
    for &x in estimate {
        if !x.is_finite() {
            return Err(FilterError::diverged(
                step,
                DivergenceReason::NonFinite("estimate"),
            ));
        }
        if x.abs() > limit {
            return Err(FilterError::diverged(
                step,
                DivergenceReason::Overflow(x.abs().to_f64().unwrap_or(f64::INFINITY)),
            ));
        }
    }
    if !covariance.is_finite() {
        return Err(FilterError::diverged(
            step,
            DivergenceReason::NonFinite("covariance"),
        ));
    }
    Ok(())
}

pub(crate) fn expect_full<'a, T>(
    state: &'a FilterState<T>,
    algorithm: &'static str,
) -> Result<&'a Matrix<T>, FilterError> {
    match &state.covariance {
        Covariance::Full(p) => Ok(p),
        Covariance::Factor(_) => Err(FilterError::Representation {
            algorithm,
            expected: "full",
        }),
    }
}

pub(crate) fn expect_factor<'a, T>(
    state: &'a FilterState<T>,
    algorithm: &'static str,
) -> Result<&'a LowerTriangular<T>, FilterError> {
    match &state.covariance {
        Covariance::Factor(s) => Ok(s),
        Covariance::Full(_) => Err(FilterError::Representation {
            algorithm,
            expected: "Cholesky factor",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for alg in [
            Algorithm::Conventional,
            Algorithm::Sr1a,
            Algorithm::Sr1b,
            Algorithm::KfReference,
        ] {
            assert_eq!(alg.name().parse::<Algorithm>().unwrap(), alg);
        }
        assert!("sr2".parse::<Algorithm>().is_err());
    }

    #[test]
    fn runaway_estimate_is_divergence() {
        let cov = Covariance::Full(Matrix::<f64>::identity(2));
        assert!(check_state(3, &[1.0, 2e12], &cov).is_err());
        assert!(check_state(3, &[1.0, f64::NAN], &cov).is_err());
        assert!(check_state(3, &[1.0, -1e11], &cov).is_ok());
    }
}
