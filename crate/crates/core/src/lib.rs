//! Maximum correntropy criterion Kalman filtering.
//!
//! Three algebraically equivalent implementations of the MCC-KF are provided:
//!
//! * [`Algorithm::Conventional`]: full covariance recursion with the Joseph
//!   stabilized update.
//! * [`Algorithm::Sr1a`]: Cholesky square-root form whose gain is computed in
//!   information form (inverts the predicted covariance factor).
//! * [`Algorithm::Sr1b`]: Cholesky square-root form whose gain only needs the
//!   `m×m` innovation covariance factor.
//!
//! A dense classical Kalman filter ([`Algorithm::KfReference`]) is included as
//! an oracle. The [`sim`] and [`bench`] modules generate radar-tracking
//! trajectories with impulsive outliers and run Monte Carlo RMSE experiments
//! and ill-conditioning sweeps.
//!
//! All numerical code is generic over [`Scalar`]; the `f64` aliases below are
//! what the experiment harness uses.

pub mod bench;
pub mod correntropy;
pub mod filters;
pub mod linalg;
pub mod model;
mod scalar;
pub mod sim;

pub use correntropy::{
    compute_lambda, gaussian_kernel, weighted_norm, CorrentropyError, LambdaInputs,
};
pub use filters::{
    run_filter, Algorithm, FilterError, FilterRun, RunStatus, StepReport, Weighting,
};
pub use linalg::LinalgError;
pub use model::{validate_model, ModelProvider, ValidationReport};
pub use scalar::Scalar;

pub type Matrix = linalg::Matrix<f64>;
pub type LowerTriangular = linalg::LowerTriangular<f64>;
pub type StateSpaceModel = model::StateSpaceModel<f64>;
pub type InitialCondition = model::InitialCondition<f64>;
pub type Measurement = model::Measurement<f64>;
pub type KernelSpec = correntropy::KernelSpec<f64>;
pub type FilterState = filters::FilterState<f64>;
pub type Covariance = filters::Covariance<f64>;

pub type Matrix32 = linalg::Matrix<f32>;
pub type LowerTriangular32 = linalg::LowerTriangular<f32>;
pub type StateSpaceModel32 = model::StateSpaceModel<f32>;
pub type FilterState32 = filters::FilterState<f32>;
