use crate::model::{validate_model, InitialCondition, Measurement, ModelProvider};
use crate::scalar::Scalar;

use super::{
    kf_reference_step, mcckf_measurement_update, mcckf_time_update, sr1a_measurement_update,
    sr1b_measurement_update, sr_time_update, Algorithm, FilterError, FilterState, StepReport,
    Weighting,
};

/// How a filter run ended.
#[derive(Clone, Debug, PartialEq)]
pub enum RunStatus {
    Completed,
    /// First failing step and the reason.
    Diverged {
        step: usize,
        reason: String,
    },
    /// The model or initial condition failed validation; nothing was run.
    Rejected(String),
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

/// Trajectory produced by [`run_filter`]. `states[0]` is the initial state and
/// `states[i]` the filtered state after measurement `i`; `reports[i − 1]`
/// belongs to that same update.
#[derive(Clone, Debug)]
pub struct FilterRun<T> {
    pub algorithm: Algorithm,
    pub states: Vec<FilterState<T>>,
    pub reports: Vec<StepReport<T>>,
    pub status: RunStatus,
}

impl<T: Scalar> FilterRun<T> {
    /// Filtered estimates `x̂_{k|k}` for `k = 1..`, excluding the initial state.
    pub fn estimates(&self) -> impl Iterator<Item = &[T]> {
        self.states.iter().skip(1).map(|s| s.estimate.as_slice())
    }
}

/// One predict-correct cycle of `algorithm`. The reference Kalman filter
/// ignores `weighting`.
pub fn filter_step<T: Scalar>(
    algorithm: Algorithm,
    model: &dyn ModelProvider<T>,
    prior: &FilterState<T>,
    y: &Measurement<T>,
    weighting: &Weighting<T>,
) -> Result<(FilterState<T>, StepReport<T>), FilterError> {
    match algorithm {
        Algorithm::Conventional => {
            let pred = mcckf_time_update(model, prior)?;
            mcckf_measurement_update(model, &pred, y, weighting)
        }
        Algorithm::Sr1a => {
            let pred = sr_time_update(model, prior)?;
            sr1a_measurement_update(model, &pred, y, weighting)
        }
        Algorithm::Sr1b => {
            let pred = sr_time_update(model, prior)?;
            sr1b_measurement_update(model, &pred, y, weighting)
        }
        Algorithm::KfReference => kf_reference_step(model, prior, y),
    }
}

/// Runs `algorithm` over `measurements` (steps `1..=N` in order) and stops at
/// the first divergence, which is recorded in the returned status.
pub fn run_filter<T: Scalar>(
    algorithm: Algorithm,
    model: &dyn ModelProvider<T>,
    init: &InitialCondition<T>,
    measurements: &[Measurement<T>],
    weighting: &Weighting<T>,
) -> FilterRun<T> {
    let mut run = FilterRun {
        algorithm,
        states: Vec::with_capacity(measurements.len() + 1),
        reports: Vec::with_capacity(measurements.len()),
        status: RunStatus::Completed,
    };
    let report = validate_model(model.model_at(0), init, algorithm.uses_factor());
    if !report.is_ok() {
        run.status = RunStatus::Rejected(report.to_string());
        return run;
    }
    let initial = if algorithm.uses_factor() {
        match FilterState::initial_factor(init) {
            Ok(s) => s,
            Err(e) => {
                run.status = RunStatus::Diverged {
                    step: 0,
                    reason: e.to_string(),
                };
                return run;
            }
        }
    } else {
        FilterState::initial_full(init)
    };
    run.states.push(initial);
    for y in measurements {
        let prior = run.states.last().expect("initial state pushed");
        match filter_step(algorithm, model, prior, y, weighting) {
            Ok((state, rep)) => {
                run.states.push(state);
                run.reports.push(rep);
            }
            Err(FilterError::Diverged { step, reason }) => {
                run.status = RunStatus::Diverged {
                    step,
                    reason: reason.to_string(),
                };
                break;
            }
            Err(other) => {
                run.status = RunStatus::Diverged {
                    step: y.step,
                    reason: other.to_string(),
                };
                break;
            }
        }
    }
    run
}
