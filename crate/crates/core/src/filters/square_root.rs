//! Cholesky square-root MCC-KF variants.
//!
//! Both variants share the array-form time update and the Joseph-form factor
//! update; they differ in how the gain is obtained.

use crate::linalg::{
    lower_triangularize, triangular_inverse, triangular_solve, LowerTriangular, Matrix,
};
use crate::model::{Measurement, ModelProvider, StateSpaceModel};
use crate::scalar::Scalar;

use super::{
    adjusting_weight, check_state, corrected_estimate, expect_factor, innovation, Covariance,
    FilterError, FilterState, StepReport, Weighting,
};

/// Triangularizes `[F P^{1/2}, G Q^{1/2}]` to obtain `P_{k|k−1}^{1/2}`.
pub fn sr_time_update<T: Scalar>(
    model: &dyn ModelProvider<T>,
    prior: &FilterState<T>,
) -> Result<FilterState<T>, FilterError> {
    let s = expect_factor(prior, "square-root time update")?;
    let step = prior.step + 1;
    let sys = model.model_at(prior.step);
    let q_sqrt = sys.q_sqrt().map_err(|e| FilterError::diverged(step, e))?;
    let pre = (sys.f() * s.as_matrix())
        .hstack(&(sys.g() * q_sqrt.as_matrix()))
        .expect("F and G share a row count");
    let factor = lower_triangularize(&pre).map_err(|e| FilterError::diverged(step, e))?;
    let estimate = sys.f().mul_vec(&prior.estimate);
    let covariance = Covariance::Factor(factor);
    check_state(step, &estimate, &covariance)?;
    Ok(FilterState {
        step,
        estimate,
        covariance,
    })
}

/// Triangularizes `[(I − KH) P^{1/2}, K R^{1/2}]` to obtain `P_{k|k}^{1/2}`.
fn joseph_factor<T: Scalar>(
    step: usize,
    p_sqrt: &LowerTriangular<T>,
    gain: &Matrix<T>,
    h: &Matrix<T>,
    r_sqrt: &LowerTriangular<T>,
) -> Result<LowerTriangular<T>, FilterError> {
    let a = &Matrix::identity(p_sqrt.dim()) - &(gain * h);
    let pre = (&a * p_sqrt.as_matrix())
        .hstack(&(gain * r_sqrt.as_matrix()))
        .expect("gain has n rows");
    lower_triangularize(&pre).map_err(|e| FilterError::diverged(step, e))
}

fn finish<T: Scalar>(
    sys: &StateSpaceModel<T>,
    pred: &FilterState<T>,
    p_sqrt: &LowerTriangular<T>,
    r_sqrt: &LowerTriangular<T>,
    lambda: T,
    gain: Matrix<T>,
    e: Vec<T>,
) -> Result<(FilterState<T>, StepReport<T>), FilterError> {
    let k = pred.step;
    if !gain.is_finite() {
        return Err(FilterError::diverged(
            k,
            super::DivergenceReason::NonFinite("gain"),
        ));
    }
    let estimate = corrected_estimate(&pred.estimate, &gain, &e);
    let factor = joseph_factor(k, p_sqrt, &gain, sys.h(), r_sqrt)?;
    let covariance = Covariance::Factor(factor);
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

/// Square-root measurement update with an information-form gain.
///
/// The pre-array `[P^{−⊤/2}, λ^{1/2} Hᵀ R^{−⊤/2}]` is triangularized into `S`
/// with `S·Sᵀ = P̂⁻¹ = P⁻¹ + λ Hᵀ R⁻¹ H`, and the gain
/// `K = λ S^{−⊤} S⁻¹ Hᵀ R⁻¹` is applied through triangular solves. Inverting
/// the predicted factor is what makes this variant sensitive to conditioning.
pub fn sr1a_measurement_update<T: Scalar>(
    model: &dyn ModelProvider<T>,
    pred: &FilterState<T>,
    y: &Measurement<T>,
    weighting: &Weighting<T>,
) -> Result<(FilterState<T>, StepReport<T>), FilterError> {
    let p_sqrt = expect_factor(pred, "sr1a")?;
    let k = pred.step;
    let sys = model.model_at(y.step);
    let h = sys.h();
    let r_sqrt = sys.r_sqrt().map_err(|e| FilterError::diverged(k, e))?;
    let e = innovation(h, &pred.estimate, &y.value);
    let lambda = adjusting_weight(weighting, k, &e, r_sqrt, p_sqrt)?;

    let p_sqrt_inv = triangular_inverse(p_sqrt).map_err(|err| FilterError::diverged(k, err))?;
    // R^{−1/2} H, so that Hᵀ R^{−⊤/2} is its transpose.
    let whitened =
        triangular_solve(r_sqrt, h, false).map_err(|err| FilterError::diverged(k, err))?;
    let pre = p_sqrt_inv
        .transpose()
        .hstack(&whitened.transpose().scale(lambda.sqrt()))
        .expect("both blocks have n rows");
    let info_sqrt = lower_triangularize(&pre).map_err(|err| FilterError::diverged(k, err))?;

    let r_inv_h =
        triangular_solve(r_sqrt, &whitened, true).map_err(|err| FilterError::diverged(k, err))?;
    let half = triangular_solve(&info_sqrt, &r_inv_h.transpose(), false)
        .map_err(|err| FilterError::diverged(k, err))?;
    let gain = triangular_solve(&info_sqrt, &half, true)
        .map_err(|err| FilterError::diverged(k, err))?
        .scale(lambda);

    finish(sys, pred, p_sqrt, r_sqrt, lambda, gain, e)
}

/// Square-root measurement update that only inverts the `m×m` innovation
/// covariance factor.
///
/// The pre-array `[λ^{1/2} H P^{1/2}, R^{1/2}]` is triangularized into
/// `R_e^{1/2}`, and `K = λ P Hᵀ R_e^{−⊤/2} R_e^{−1/2}` is applied through two
/// `m`-dimensional triangular solves.
pub fn sr1b_measurement_update<T: Scalar>(
    model: &dyn ModelProvider<T>,
    pred: &FilterState<T>,
    y: &Measurement<T>,
    weighting: &Weighting<T>,
) -> Result<(FilterState<T>, StepReport<T>), FilterError> {
    let p_sqrt = expect_factor(pred, "sr1b")?;
    let k = pred.step;
    let sys = model.model_at(y.step);
    let h = sys.h();
    let r_sqrt = sys.r_sqrt().map_err(|e| FilterError::diverged(k, e))?;
    let e = innovation(h, &pred.estimate, &y.value);
    let lambda = adjusting_weight(weighting, k, &e, r_sqrt, p_sqrt)?;

    let hs = h * p_sqrt.as_matrix();
    let pre = hs
        .scale(lambda.sqrt())
        .hstack(r_sqrt.as_matrix())
        .expect("both blocks have m rows");
    let re_sqrt = lower_triangularize(&pre).map_err(|err| FilterError::diverged(k, err))?;

    // (λ P Hᵀ)ᵀ = λ H S Sᵀ
    let cross_t = (&hs * &p_sqrt.transpose()).scale(lambda);
    let half =
        triangular_solve(&re_sqrt, &cross_t, false).map_err(|err| FilterError::diverged(k, err))?;
    let gain = triangular_solve(&re_sqrt, &half, true)
        .map_err(|err| FilterError::diverged(k, err))?
        .transpose();

    finish(sys, pred, p_sqrt, r_sqrt, lambda, gain, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cholesky_lower;

    fn scalar_model() -> StateSpaceModel<f64> {
        let one = Matrix::identity(1);
        StateSpaceModel::new(one.clone(), one.clone(), one.clone(), one.clone(), one)
    }

    fn factor_state(step: usize, x: &[f64], p: &Matrix<f64>) -> FilterState<f64> {
        FilterState {
            step,
            estimate: x.to_vec(),
            covariance: Covariance::Factor(cholesky_lower(p).unwrap()),
        }
    }

    #[test]
    fn time_update_row_norm() {
        // pre-array [2·1, 1·√3] → √7
        let model = StateSpaceModel::new(
            Matrix::from_diagonal(&[2.0]),
            Matrix::identity(1),
            Matrix::identity(1),
            Matrix::from_diagonal(&[3.0]),
            Matrix::identity(1),
        );
        let out = sr_time_update(&model, &factor_state(0, &[1.0], &Matrix::identity(1))).unwrap();
        match out.covariance {
            Covariance::Factor(s) => assert!((s.diagonal()[0] - 7f64.sqrt()).abs() < 1e-15),
            _ => unreachable!(),
        }
        assert_eq!(out.estimate, vec![2.0]);
    }

    #[test]
    fn time_update_identity_without_noise_input() {
        let model = StateSpaceModel::new(
            Matrix::identity(2),
            Matrix::zeros(2, 1),
            Matrix::identity(2),
            Matrix::identity(1),
            Matrix::identity(2),
        );
        let p = Matrix::from_rows(&[[2.0, 0.5], [0.5, 1.0]]);
        let prior = factor_state(0, &[1.0, 2.0], &p);
        let out = sr_time_update(&model, &prior).unwrap();
        let (Covariance::Factor(a), Covariance::Factor(b)) = (&out.covariance, &prior.covariance)
        else {
            unreachable!()
        };
        assert!((a.as_matrix() - b.as_matrix()).norm_max() < 1e-15);
    }

    #[test]
    fn scalar_updates_match_closed_form() {
        let model = scalar_model();
        let pred = factor_state(1, &[0.0], &Matrix::identity(1));
        let y = Measurement {
            step: 1,
            value: vec![2.0],
        };
        for update in [
            sr1a_measurement_update::<f64>,
            sr1b_measurement_update::<f64>,
        ] {
            let (post, rep) = update(&model, &pred, &y, &Weighting::Pinned(1.0)).unwrap();
            assert!((rep.gain[(0, 0)] - 0.5).abs() < 1e-15);
            assert!((post.estimate[0] - 1.0).abs() < 1e-15);
            assert!((post.covariance_matrix()[(0, 0)] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_weight_rejects_measurement() {
        let model = StateSpaceModel::new(
            Matrix::identity(2),
            Matrix::identity(2),
            Matrix::from_rows(&[[1.0, 2.0]]),
            Matrix::identity(2),
            Matrix::from_diagonal(&[4.0]),
        );
        let p = Matrix::from_rows(&[[2.0, 0.5], [0.5, 1.0]]);
        let pred = factor_state(3, &[0.1, 0.2], &p);
        let y = Measurement {
            step: 3,
            value: vec![1e6],
        };
        for update in [
            sr1a_measurement_update::<f64>,
            sr1b_measurement_update::<f64>,
        ] {
            let (post, rep) = update(&model, &pred, &y, &Weighting::Pinned(0.0)).unwrap();
            assert_eq!(rep.gain.norm_max(), 0.0);
            assert_eq!(post.estimate, pred.estimate);
            assert!((&post.covariance_matrix() - &p).norm_max() < 1e-14);
        }
    }

    #[test]
    fn zero_measurement_matrix_gives_inverse_factor() {
        let model = StateSpaceModel::new(
            Matrix::identity(2),
            Matrix::identity(2),
            Matrix::zeros(1, 2),
            Matrix::identity(2),
            Matrix::identity(1),
        );
        let p = Matrix::from_rows(&[[2.0, 0.5], [0.5, 1.0]]);
        let pred = factor_state(1, &[0.5, 0.5], &p);
        let y = Measurement {
            step: 1,
            value: vec![3.0],
        };
        let (post, rep) =
            sr1a_measurement_update(&model, &pred, &y, &Weighting::Pinned(0.7)).unwrap();
        assert_eq!(rep.gain.norm_max(), 0.0);
        assert_eq!(post.estimate, pred.estimate);
        assert!((&post.covariance_matrix() - &p).norm_max() < 1e-14);
    }

    #[test]
    fn singular_prediction_factor_breaks_information_form_only() {
        let model = scalar_model();
        let pred = FilterState {
            step: 2,
            estimate: vec![0.0],
            covariance: Covariance::Factor(LowerTriangular::zeros(1)),
        };
        let y = Measurement {
            step: 2,
            value: vec![1.0],
        };
        assert!(matches!(
            sr1a_measurement_update(&model, &pred, &y, &Weighting::Pinned(1.0)),
            Err(FilterError::Diverged { step: 2, .. })
        ));
        let (post, rep) =
            sr1b_measurement_update(&model, &pred, &y, &Weighting::Pinned(1.0)).unwrap();
        assert_eq!(rep.gain[(0, 0)], 0.0);
        assert_eq!(post.estimate, vec![0.0]);
    }
}
