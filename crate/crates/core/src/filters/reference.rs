use crate::linalg::{cholesky_lower, triangular_solve};
use crate::model::{Measurement, ModelProvider};
use crate::scalar::Scalar;

use super::conventional::{joseph_full, predict_full};
use super::{
    check_state, corrected_estimate, expect_full, innovation, Covariance, FilterError, FilterState,
    StepReport,
};

const NAME: &str = "kf_reference";

/// Textbook Kalman measurement update with dense arithmetic:
/// `K = P Hᵀ (H P Hᵀ + R)⁻¹` and the Joseph covariance update.
pub fn kf_reference_measurement_update<T: Scalar>(
    model: &dyn ModelProvider<T>,
    pred: &FilterState<T>,
    y: &Measurement<T>,
) -> Result<(FilterState<T>, StepReport<T>), FilterError> {
    let p = expect_full(pred, NAME)?;
    let k = pred.step;
    let sys = model.model_at(y.step);
    let h = sys.h();
    let e = innovation(h, &pred.estimate, &y.value);
    let hp = h * p;
    let s = (&(&hp * &h.transpose()) + sys.r()).symmetrized();
    let s_sqrt = cholesky_lower(&s).map_err(|err| FilterError::diverged(k, err))?;
    let half =
        triangular_solve(&s_sqrt, &hp, false).map_err(|err| FilterError::diverged(k, err))?;
    let gain = triangular_solve(&s_sqrt, &half, true)
        .map_err(|err| FilterError::diverged(k, err))?
        .transpose();
    let covariance = Covariance::Full(joseph_full(p, &gain, h, sys.r()));
    let estimate = corrected_estimate(&pred.estimate, &gain, &e);
    check_state(k, &estimate, &covariance)?;
    Ok((
        FilterState {
            step: k,
            estimate,
            covariance,
        },
        StepReport {
            lambda: T::one(),
            gain,
            innovation: e,
        },
    ))
}

/// One full classical Kalman filter step (prediction then correction).
pub fn kf_reference_step<T: Scalar>(
    model: &dyn ModelProvider<T>,
    prior: &FilterState<T>,
    y: &Measurement<T>,
) -> Result<(FilterState<T>, StepReport<T>), FilterError> {
    let p = expect_full(prior, NAME)?;
    let (estimate, p_pred) = predict_full(model.model_at(prior.step), &prior.estimate, p);
    let pred = FilterState {
        step: prior.step + 1,
        estimate,
        covariance: Covariance::Full(p_pred),
    };
    check_state(pred.step, &pred.estimate, &pred.covariance)?;
    kf_reference_measurement_update(model, &pred, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::model::StateSpaceModel;

    fn scalar(f: f64, q: f64, h: f64, r: f64) -> StateSpaceModel<f64> {
        StateSpaceModel::new(
            Matrix::from_diagonal(&[f]),
            Matrix::identity(1),
            Matrix::from_diagonal(&[h]),
            Matrix::from_diagonal(&[q]),
            Matrix::from_diagonal(&[r]),
        )
    }

    #[test]
    fn zero_measurement_matrix_is_pure_prediction() {
        let model = scalar(0.9, 0.5, 0.0, 1.0);
        let prior = FilterState {
            step: 0,
            estimate: vec![2.0],
            covariance: Covariance::Full(Matrix::from_diagonal(&[1.0])),
        };
        let y = Measurement {
            step: 1,
            value: vec![100.0],
        };
        let (post, _) = kf_reference_step(&model, &prior, &y).unwrap();
        assert!((post.estimate[0] - 1.8).abs() < 1e-15);
        assert!((post.covariance_matrix()[(0, 0)] - (0.81 + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn gain_converges_to_riccati_fixed_point() {
        let (f, q, h, r) = (0.95, 0.2, 1.0, 0.5);
        // Independent oracle: iterate the scalar Riccati recursion in closed form.
        let mut p = 1.0f64;
        let mut k_oracle = 0.0;
        for _ in 0..200 {
            let pp = f * f * p + q;
            k_oracle = pp * h / (h * h * pp + r);
            p = (1.0 - k_oracle * h) * pp;
        }
        let model = scalar(f, q, h, r);
        let mut state = FilterState {
            step: 0,
            estimate: vec![0.0],
            covariance: Covariance::Full(Matrix::from_diagonal(&[1.0])),
        };
        let mut gain = 0.0;
        for k in 1..=200 {
            let (next, rep) = kf_reference_step(
                &model,
                &state,
                &Measurement {
                    step: k,
                    value: vec![0.1],
                },
            )
            .unwrap();
            state = next;
            gain = rep.gain[(0, 0)];
        }
        assert!((gain - k_oracle).abs() < 1e-12, "{gain} vs {k_oracle}");
    }
}
