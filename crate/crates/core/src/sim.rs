//! Ground-truth and measurement simulation with optional impulsive (shot)
//! outliers.
//!
//! Every run draws from its own ChaCha stream derived from
//! `(master_seed, run_index)`, so runs are reproducible and independent of one
//! another. Gaussian noise and the two outlier schedules use separate streams:
//! the outlier placement never depends on model values, and turning shot noise
//! off leaves the Gaussian draws untouched.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cholesky_lower, LinalgError, LowerTriangular, Matrix};
use crate::model::{InitialCondition, Measurement, ModelProvider};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("cannot factor {what}: {source}")]
    Factor {
        what: &'static str,
        #[source]
        source: LinalgError,
    },
    #[error("invalid shot noise spec: {0}")]
    InvalidShotSpec(String),
    #[error("horizon must be at least one step")]
    EmptyHorizon,
}

/// Per-run random stream identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub run_index: u64,
}

const LANES: u64 = 4;
const LANE_GAUSSIAN: u64 = 0;
const LANE_PROCESS_SHOT: u64 = 1;
const LANE_MEASUREMENT_SHOT: u64 = 2;

impl SeedSpec {
    pub fn new(master_seed: u64, run_index: u64) -> Self {
        Self {
            master_seed,
            run_index,
        }
    }

    fn stream(&self, lane: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.run_index.wrapping_mul(LANES).wrapping_add(lane));
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShotTargets {
    Process,
    Measurement,
    Both,
}

impl ShotTargets {
    fn process(self) -> bool {
        matches!(self, ShotTargets::Process | ShotTargets::Both)
    }

    fn measurement(self) -> bool {
        matches!(self, ShotTargets::Measurement | ShotTargets::Both)
    }
}

/// Impulsive outlier injection.
///
/// In each targeted channel group, `round(corrupted_fraction · window length)`
/// distinct steps of the inclusive window are picked uniformly; every channel
/// of the group then receives an additive impulse whose magnitude is an integer
/// drawn uniformly from `magnitude_low..=magnitude_high`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotNoiseSpec {
    pub corrupted_fraction: f64,
    pub magnitude_low: i64,
    pub magnitude_high: i64,
    /// Inclusive step interval eligible for corruption.
    pub window: (usize, usize),
    pub targets: ShotTargets,
    /// Draw a random sign per impulse instead of always adding.
    #[serde(default)]
    pub random_sign: bool,
}

impl Default for ShotNoiseSpec {
    fn default() -> Self {
        Self {
            corrupted_fraction: 0.20,
            magnitude_low: 0,
            magnitude_high: 5,
            window: (21, 300),
            targets: ShotTargets::Both,
            random_sign: false,
        }
    }
}

impl ShotNoiseSpec {
    pub fn window_len(&self) -> usize {
        self.window.1 + 1 - self.window.0
    }

    /// Number of corrupted steps per channel group.
    pub fn corrupted_steps(&self) -> usize {
        (self.corrupted_fraction * self.window_len() as f64).round() as usize
    }

    pub fn validate(&self, horizon: usize) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidShotSpec(m.to_string()));
        if !(0.0..=1.0).contains(&self.corrupted_fraction) {
            return bad("corrupted_fraction must lie in [0, 1]");
        }
        if self.magnitude_low > self.magnitude_high {
            return bad("magnitude_low exceeds magnitude_high");
        }
        if self.window.0 < 1 || self.window.0 > self.window.1 || self.window.1 > horizon {
            return bad("window must satisfy 1 <= start <= end <= horizon");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Process(usize),
    Measurement(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outlier {
    pub step: usize,
    pub channel: Channel,
    pub magnitude: f64,
}

/// Simulated truth `x_1..x_N`, measurements `y_1..y_N`, and the outliers
/// actually injected. Process outliers at step `k` enter through `w_{k−1}`,
/// i.e. they first affect `x_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub horizon: usize,
    pub initial_state: Vec<f64>,
    pub truth: Vec<Vec<f64>>,
    pub measurements: Vec<Measurement<f64>>,
    pub outliers: Vec<Outlier>,
}

impl Trajectory {
    /// Distinct corrupted steps per channel group, as `(process, measurement)`.
    pub fn corrupted_step_counts(&self) -> (usize, usize) {
        let mut p: Vec<usize> = Vec::new();
        let mut m: Vec<usize> = Vec::new();
        for o in &self.outliers {
            match o.channel {
                Channel::Process(_) => p.push(o.step),
                Channel::Measurement(_) => m.push(o.step),
            }
        }
        p.dedup();
        m.dedup();
        (p.len(), m.len())
    }
}

/// `mean + factor·z` with `z` standard normal.
pub fn draw_gaussian<R: Rng + ?Sized>(
    rng: &mut R,
    mean: &[f64],
    factor: &LowerTriangular<f64>,
) -> Vec<f64> {
    let z: Vec<f64> = (0..factor.dim())
        .map(|_| rng.sample(StandardNormal))
        .collect();
    factor
        .as_matrix()
        .mul_vec(&z)
        .iter()
        .zip(mean)
        .map(|(&d, &m)| m + d)
        .collect()
}

fn noise_factor(what: &'static str, m: &Matrix<f64>) -> Result<LowerTriangular<f64>, SimError> {
    if m.as_slice().iter().all(|&x| x == 0.0) {
        return Ok(LowerTriangular::zeros(m.rows()));
    }
    cholesky_lower(m).map_err(|source| SimError::Factor { what, source })
}

/// Impulses per step for one channel group; `None` rows are clean steps.
fn shot_schedule(
    spec: &ShotNoiseSpec,
    mut rng: ChaCha20Rng,
    channels: usize,
    horizon: usize,
) -> Vec<Option<Vec<f64>>> {
    let mut out = vec![None; horizon + 1];
    let mut steps: Vec<usize> = sample(&mut rng, spec.window_len(), spec.corrupted_steps())
        .into_iter()
        .map(|i| spec.window.0 + i)
        .collect();
    steps.sort_unstable();
    for step in steps {
        let impulses = (0..channels)
            .map(|_| {
                let mag = rng.random_range(spec.magnitude_low..=spec.magnitude_high) as f64;
                if spec.random_sign && rng.random::<bool>() {
                    -mag
                } else {
                    mag
                }
            })
            .collect();
        out[step] = Some(impulses);
    }
    out
}

/// Forward-simulates the model for `horizon` steps.
pub fn simulate(
    model: &dyn ModelProvider<f64>,
    init: &InitialCondition<f64>,
    horizon: usize,
    seed: SeedSpec,
    shot: Option<&ShotNoiseSpec>,
) -> Result<Trajectory, SimError> {
    if horizon == 0 {
        return Err(SimError::EmptyHorizon);
    }
    if let Some(spec) = shot {
        spec.validate(horizon)?;
    }
    let q_dim = model.model_at(0).noise_dim();
    let m_dim = model.model_at(1).measurement_dim();
    let (process_shots, measurement_shots) = match shot {
        Some(spec) => (
            spec.targets
                .process()
                .then(|| shot_schedule(spec, seed.stream(LANE_PROCESS_SHOT), q_dim, horizon)),
            spec.targets
                .measurement()
                .then(|| shot_schedule(spec, seed.stream(LANE_MEASUREMENT_SHOT), m_dim, horizon)),
        ),
        None => (None, None),
    };

    let mut rng = seed.stream(LANE_GAUSSIAN);
    let pi0 = noise_factor("initial covariance", &init.covariance)?;
    let x0 = draw_gaussian(&mut rng, &init.mean, &pi0);

    let mut truth = Vec::with_capacity(horizon);
    let mut measurements = Vec::with_capacity(horizon);
    let mut outliers = Vec::new();
    let mut x = x0.clone();
    for k in 1..=horizon {
        let dyn_sys = model.model_at(k - 1);
        let q_sqrt = noise_factor("Q", dyn_sys.q())?;
        let mut w = draw_gaussian(&mut rng, &vec![0.0; dyn_sys.noise_dim()], &q_sqrt);
        if let Some(Some(imp)) = process_shots.as_ref().map(|s| &s[k]) {
            for (i, (wi, &a)) in w.iter_mut().zip(imp).enumerate() {
                *wi += a;
                outliers.push(Outlier {
                    step: k,
                    channel: Channel::Process(i),
                    magnitude: a,
                });
            }
        }
        let fx = dyn_sys.f().mul_vec(&x);
        let gw = dyn_sys.g().mul_vec(&w);
        x = fx.iter().zip(&gw).map(|(a, b)| a + b).collect();

        let meas_sys = model.model_at(k);
        let r_sqrt = noise_factor("R", meas_sys.r())?;
        let mut v = draw_gaussian(&mut rng, &vec![0.0; meas_sys.measurement_dim()], &r_sqrt);
        if let Some(Some(imp)) = measurement_shots.as_ref().map(|s| &s[k]) {
            for (i, (vi, &a)) in v.iter_mut().zip(imp).enumerate() {
                *vi += a;
                outliers.push(Outlier {
                    step: k,
                    channel: Channel::Measurement(i),
                    magnitude: a,
                });
            }
        }
        let y = meas_sys
            .h()
            .mul_vec(&x)
            .iter()
            .zip(&v)
            .map(|(a, b)| a + b)
            .collect();
        truth.push(x.clone());
        measurements.push(Measurement { step: k, value: y });
    }
    Ok(Trajectory {
        horizon,
        initial_state: x0,
        truth,
        measurements,
        outliers,
    })
}
