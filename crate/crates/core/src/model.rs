//! Linear discrete-time state-space models
//!
//! ```text
//! x_k = F_{k-1} x_{k-1} + G_{k-1} w_{k-1}
//! y_k = H_k x_k + v_k
//! ```
//!
//! with `w_k ~ (0, Q_k)`, `v_k ~ (0, R_k)` and `x_0 ~ (x̄₀, Π₀)`.

use std::fmt;
use std::sync::OnceLock;

use crate::linalg::{cholesky_lower, LinalgError, LowerTriangular, Matrix, SYMMETRY_TOLERANCE};
use crate::scalar::Scalar;

/// System matrices `F, G, H, Q, R` for one time step.
///
/// Cholesky factors of `Q` and `R` are computed on first use and cached.
#[derive(Clone, Debug)]
pub struct StateSpaceModel<T> {
    f: Matrix<T>,
    g: Matrix<T>,
    h: Matrix<T>,
    q: Matrix<T>,
    r: Matrix<T>,
    q_sqrt: OnceLock<Result<LowerTriangular<T>, LinalgError>>,
    r_sqrt: OnceLock<Result<LowerTriangular<T>, LinalgError>>,
}

impl<T: Scalar> StateSpaceModel<T> {
    /// Stores the matrices as given; use [`validate_model`] to check them.
    pub fn new(f: Matrix<T>, g: Matrix<T>, h: Matrix<T>, q: Matrix<T>, r: Matrix<T>) -> Self {
        Self {
            f,
            g,
            h,
            q,
            r,
            q_sqrt: OnceLock::new(),
            r_sqrt: OnceLock::new(),
        }
    }

    pub fn state_dim(&self) -> usize {
        self.f.rows()
    }

    pub fn noise_dim(&self) -> usize {
        self.g.cols()
    }

    pub fn measurement_dim(&self) -> usize {
        self.h.rows()
    }

    pub fn f(&self) -> &Matrix<T> {
        &self.f
    }

    pub fn g(&self) -> &Matrix<T> {
        &self.g
    }

    pub fn h(&self) -> &Matrix<T> {
        &self.h
    }

    pub fn q(&self) -> &Matrix<T> {
        &self.q
    }

    pub fn r(&self) -> &Matrix<T> {
        &self.r
    }

    /// `Q^{1/2}`.
    pub fn q_sqrt(&self) -> Result<&LowerTriangular<T>, LinalgError> {
        self.q_sqrt
            .get_or_init(|| cholesky_lower(&self.q))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `R^{1/2}`.
    pub fn r_sqrt(&self) -> Result<&LowerTriangular<T>, LinalgError> {
        self.r_sqrt
            .get_or_init(|| cholesky_lower(&self.r))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `G·Q·Gᵀ`.
    pub fn process_covariance(&self) -> Matrix<T> {
        &(&self.g * &self.q) * &self.g.transpose()
    }

    /// Copy of this model with a different measurement matrix and noise.
    pub fn with_measurement(&self, h: Matrix<T>, r: Matrix<T>) -> Self {
        Self::new(self.f.clone(), self.g.clone(), h, self.q.clone(), r)
    }
}

/// Source of system matrices for step `k`. Implementations must be
/// deterministic in `k`.
pub trait ModelProvider<T: Scalar>: Sync {
    fn model_at(&self, k: usize) -> &StateSpaceModel<T>;
}

impl<T: Scalar> ModelProvider<T> for StateSpaceModel<T> {
    fn model_at(&self, _k: usize) -> &StateSpaceModel<T> {
        self
    }
}

/// Time-varying model given as an explicit sequence; index `k` selects entry
/// `k`, and steps past the end reuse the last entry.
#[derive(Clone, Debug)]
pub struct PiecewiseModel<T> {
    models: Vec<StateSpaceModel<T>>,
}

impl<T: Scalar> PiecewiseModel<T> {
    pub fn new(models: Vec<StateSpaceModel<T>>) -> Option<Self> {
        if models.is_empty() {
            None
        } else {
            Some(Self { models })
        }
    }
}

impl<T: Scalar> ModelProvider<T> for PiecewiseModel<T> {
    fn model_at(&self, k: usize) -> &StateSpaceModel<T> {
        &self.models[k.min(self.models.len() - 1)]
    }
}

/// Initial mean `x̄₀` and covariance `Π₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialCondition<T> {
    pub mean: Vec<T>,
    pub covariance: Matrix<T>,
}

/// A measurement `y_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement<T> {
    pub step: usize,
    pub value: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Dimension {
        what: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    NotSymmetric(&'static str),
    NotPositiveDefinite(&'static str),
    NonFinite(&'static str),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension {
                what,
                expected,
                found,
            } => {
                write!(f, "{what} has shape {found:?}, expected {expected:?}")
            }
            Violation::NotSymmetric(what) => write!(f, "{what} not symmetric"),
            Violation::NotPositiveDefinite(what) => write!(f, "{what} not positive definite"),
            Violation::NonFinite(what) => write!(f, "{what} has non-finite entries"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Checks dimensions, symmetry and definiteness of a model and its initial
/// condition. `R` must be strictly positive definite. `Π₀` is only required to
/// be positive definite when `require_spd_init` is set.
pub fn validate_model<T: Scalar>(
    model: &StateSpaceModel<T>,
    init: &InitialCondition<T>,
    require_spd_init: bool,
) -> ValidationReport {
    let mut out = Vec::new();
    let n = model.f.rows();
    let q = model.g.cols();
    let m = model.h.rows();

    let mut dim = |what, expected: (usize, usize), found: (usize, usize)| {
        if expected != found {
            out.push(Violation::Dimension {
                what,
                expected,
                found,
            });
            false
        } else {
            true
        }
    };
    let f_ok = dim("F", (n, n), model.f.shape());
    let g_ok = dim("G", (n, q), model.g.shape());
    let h_ok = dim("H", (m, n), model.h.shape());
    let q_ok = dim("Q", (q, q), model.q.shape());
    let r_ok = dim("R", (m, m), model.r.shape());
    let mean_ok = dim("x0 mean", (n, 1), (init.mean.len(), 1));
    let pi_ok = dim("Pi0", (n, n), init.covariance.shape());

    for (what, mat, ok) in [
        ("F", &model.f, f_ok),
        ("G", &model.g, g_ok),
        ("H", &model.h, h_ok),
    ] {
        if ok && !mat.is_finite() {
            out.push(Violation::NonFinite(what));
        }
    }
    if mean_ok && init.mean.iter().any(|x| !x.is_finite()) {
        out.push(Violation::NonFinite("x0 mean"));
    }

    let mut check_spd = |what, mat: &Matrix<T>, need_pd: bool| {
        if !mat.is_finite() {
            out.push(Violation::NonFinite(what));
            return;
        }
        if mat.asymmetry() > T::lit(SYMMETRY_TOLERANCE) {
            out.push(Violation::NotSymmetric(what));
            return;
        }
        if need_pd {
            if cholesky_lower(mat).is_err() {
                out.push(Violation::NotPositiveDefinite(what));
            }
        } else if mat.diagonal().iter().any(|&d| d < T::zero()) {
            out.push(Violation::NotPositiveDefinite(what));
        }
    };
    if q_ok {
        check_spd("Q", &model.q, true);
    }
    if r_ok {
        check_spd("R", &model.r, true);
    }
    if pi_ok {
        check_spd("Pi0", &init.covariance, require_spd_init);
    }
    ValidationReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_model() -> (StateSpaceModel<f64>, InitialCondition<f64>) {
        let one = Matrix::identity(1);
        (
            StateSpaceModel::new(
                one.clone(),
                one.clone(),
                one.clone(),
                one.clone(),
                one.clone(),
            ),
            InitialCondition {
                mean: vec![0.0],
                covariance: one,
            },
        )
    }

    #[test]
    fn scalar_model_is_valid() {
        let (model, init) = scalar_model();
        assert!(validate_model(&model, &init, true).is_ok());
    }

    #[test]
    fn zero_process_noise_rejected() {
        let (model, init) = scalar_model();
        let bad = StateSpaceModel::new(
            model.f().clone(),
            model.g().clone(),
            model.h().clone(),
            Matrix::zeros(1, 1),
            model.r().clone(),
        );
        let report = validate_model(&bad, &init, true);
        assert_eq!(report.violations, vec![Violation::NotPositiveDefinite("Q")]);
        assert_eq!(report.to_string(), "Q not positive definite");
    }

    #[test]
    fn measurement_matrix_shape_mismatch() {
        let (model, init) = scalar_model();
        let bad = model.with_measurement(Matrix::zeros(2, 2), model.r().clone());
        let report = validate_model(&bad, &init, true);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Dimension { what: "H", .. })));
    }

    #[test]
    fn singular_initial_covariance_only_matters_when_required() {
        let (model, mut init) = scalar_model();
        init.covariance = Matrix::zeros(1, 1);
        assert!(validate_model(&model, &init, false).is_ok());
        assert_eq!(
            validate_model(&model, &init, true).violations,
            vec![Violation::NotPositiveDefinite("Pi0")]
        );
    }

    #[test]
    fn validation_is_pure() {
        let (model, init) = scalar_model();
        assert_eq!(
            validate_model(&model, &init, true),
            validate_model(&model, &init, true)
        );
    }

    #[test]
    fn piecewise_model_clamps() {
        let (a, _) = scalar_model();
        let b = StateSpaceModel::new(
            Matrix::from_diagonal(&[2.0]),
            a.g().clone(),
            a.h().clone(),
            a.q().clone(),
            a.r().clone(),
        );
        let pw = PiecewiseModel::new(vec![a, b]).unwrap();
        assert_eq!(pw.model_at(0).f()[(0, 0)], 1.0);
        assert_eq!(pw.model_at(5).f()[(0, 0)], 2.0);
        assert!(PiecewiseModel::<f64>::new(vec![]).is_none());
    }
}
