use crate::linalg::{cholesky_lower, triangular_inverse, triangular_solve, Matrix};
use crate::model::{Measurement, ModelProvider, StateSpaceModel};
use crate::scalar::Scalar;

use super::{
    adjusting_weight, check_state, corrected_estimate, expect_full, innovation, Covariance,
    FilterError, FilterState, StepReport, Weighting,
};

const NAME: &str = "conventional";

/// `x̂_{k|k−1} = F x̂`, `P_{k|k−1} = F P Fᵀ + G Q Gᵀ` (symmetrized).
pub fn mcckf_time_update<T: Scalar>(
    model: &dyn ModelProvider<T>,
    prior: &FilterState<T>,
) -> Result<FilterState<T>, FilterError> {
    let p = expect_full(prior, NAME)?;
    let step = prior.step + 1;
    let sys = model.model_at(prior.step);
    let (estimate, covariance) = predict_full(sys, &prior.estimate, p);
    let covariance = Covariance::Full(covariance);
    check_state(step, &estimate, &covariance)?;
    Ok(FilterState {
        step,
        estimate,
        covariance,
    })
}

pub(crate) fn predict_full<T: Scalar>(
    sys: &StateSpaceModel<T>,
    x: &[T],
    p: &Matrix<T>,
) -> (Vec<T>, Matrix<T>) {
    let f = sys.f();
    let fp = f * p;
    let p_pred = &(&fp * &f.transpose()) + &sys.process_covariance();
    (f.mul_vec(x), p_pred.symmetrized())
}

/// Joseph stabilized covariance `(I − KH) P (I − KH)ᵀ + K R Kᵀ`, symmetrized.
pub(crate) fn joseph_full<T: Scalar>(
    p: &Matrix<T>,
    gain: &Matrix<T>,
    h: &Matrix<T>,
    r: &Matrix<T>,
) -> Matrix<T> {
    let a = &Matrix::identity(p.rows()) - &(gain * h);
    let apa = &(&a * p) * &a.transpose();
    let krk = &(gain * r) * &gain.transpose();
    (&apa + &krk).symmetrized()
}

/// Conventional MCC-KF measurement update.
///
/// The gain is `K = λ (P⁻¹ + λ Hᵀ R⁻¹ H)⁻¹ Hᵀ R⁻¹`. `P⁻¹` is formed from the
/// Cholesky factor of `P_{k|k−1}`, and the bracketed information matrix is
/// itself Cholesky-factored and applied through triangular solves.
pub fn mcckf_measurement_update<T: Scalar>(
    model: &dyn ModelProvider<T>,
    pred: &FilterState<T>,
    y: &Measurement<T>,
    weighting: &Weighting<T>,
) -> Result<(FilterState<T>, StepReport<T>), FilterError> {
    let p = expect_full(pred, NAME)?;
    let k = pred.step;
    let sys = model.model_at(y.step);
    let h = sys.h();
    let r_sqrt = sys.r_sqrt().map_err(|e| FilterError::diverged(k, e))?;
    let e = innovation(h, &pred.estimate, &y.value);

    let p_sqrt = cholesky_lower(p).map_err(|err| FilterError::diverged(k, err))?;
    let lambda = adjusting_weight(weighting, k, &e, r_sqrt, &p_sqrt)?;

    let p_sqrt_inv = triangular_inverse(&p_sqrt).map_err(|err| FilterError::diverged(k, err))?;
    let p_inv = p_sqrt_inv
        .as_matrix()
        .transpose()
        .try_mul(p_sqrt_inv.as_matrix())
        .expect("square");

    // R⁻¹H via two solves against R^{1/2}.
    let whitened =
        triangular_solve(r_sqrt, h, false).map_err(|err| FilterError::diverged(k, err))?;
    let r_inv_h =
        triangular_solve(r_sqrt, &whitened, true).map_err(|err| FilterError::diverged(k, err))?;
    let ht_r_inv = r_inv_h.transpose();

    let info = (&p_inv + &(&ht_r_inv * h).scale(lambda)).symmetrized();
    let info_sqrt = cholesky_lower(&info).map_err(|err| FilterError::diverged(k, err))?;
    let half = triangular_solve(&info_sqrt, &ht_r_inv, false)
        .map_err(|err| FilterError::diverged(k, err))?;
    let gain = triangular_solve(&info_sqrt, &half, true)
        .map_err(|err| FilterError::diverged(k, err))?
        .scale(lambda);

    let p_post = joseph_full(p, &gain, h, sys.r());
    let estimate = corrected_estimate(&pred.estimate, &gain, &e);
    let covariance = Covariance::Full(p_post);
    check_state(k, &estimate, &covariance)?;
    Ok((
        FilterState {
            step: k,
            estimate,
            covariance,
        },
        StepReport {
            lambda,
            gain,
            innovation: e,
        },
    ))
}
