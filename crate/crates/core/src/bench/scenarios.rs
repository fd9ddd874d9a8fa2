use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::model::{InitialCondition, StateSpaceModel};
use crate::sim::ShotNoiseSpec;

/// Radar tracking constants.
///
/// State is `[r, ṙ, U¹, θ, θ̇, U²]`: range, range rate, range maneuver noise,
/// bearing, bearing rate, bearing maneuver noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Example1Constants {
    /// Maneuver correlation coefficient.
    pub rho: f64,
    /// Sampling period in seconds.
    pub sample_period: f64,
    /// Range measurement variance, m².
    pub sigma_r2: f64,
    /// Bearing measurement variance, rad².
    pub sigma_theta2: f64,
    /// Range maneuver noise variance.
    pub sigma1_sq: f64,
    /// Bearing maneuver noise variance.
    pub sigma2_sq: f64,
    pub horizon: usize,
    /// Replaces the built-in `Π₀` when present (row-major, 6×6).
    pub initial_covariance: Option<Vec<Vec<f64>>>,
}

impl Default for Example1Constants {
    fn default() -> Self {
        Self {
            rho: 0.5,
            sample_period: 10.0,
            sigma_r2: 1000.0 * 1000.0,
            sigma_theta2: 0.017 * 0.017,
            sigma1_sq: (103.0f64 / 3.0).powi(2),
            sigma2_sq: 1.3e-8,
            horizon: 300,
            initial_covariance: None,
        }
    }
}

impl Example1Constants {
    pub fn transition(&self) -> Matrix<f64> {
        let (t, rho) = (self.sample_period, self.rho);
        Matrix::from_rows(&[
            [1.0, t, 0.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, rho, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0, t, 0.0],
            [0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, rho],
        ])
    }

    /// Selects the two maneuver states driven by process noise.
    pub fn noise_input(&self) -> Matrix<f64> {
        let mut g = Matrix::zeros(6, 2);
        g[(2, 0)] = 1.0;
        g[(5, 1)] = 1.0;
        g
    }

    pub fn process_noise(&self) -> Matrix<f64> {
        Matrix::from_diagonal(&[self.sigma1_sq, self.sigma2_sq])
    }

    /// Initial covariance. The bearing block uses `σ_θ` (not `σ_θ²`) and the
    /// range-maneuver variance `σ₁²` in both diagonal blocks, as tabulated for
    /// this benchmark.
    pub fn initial_covariance(&self) -> Matrix<f64> {
        if let Some(rows) = &self.initial_covariance {
            return Matrix::from_rows(rows);
        }
        let t = self.sample_period;
        let sr2 = self.sigma_r2;
        let st = self.sigma_theta2.sqrt();
        let s1 = self.sigma1_sq;
        let mut p = Matrix::zeros(6, 6);
        p[(0, 0)] = sr2;
        p[(0, 1)] = sr2 / t;
        p[(1, 0)] = sr2 / t;
        p[(1, 1)] = 2.0 * sr2 / (t * t) + s1;
        p[(2, 2)] = s1;
        p[(3, 3)] = st;
        p[(3, 4)] = st / t;
        p[(4, 3)] = st / t;
        p[(4, 4)] = 2.0 * st / (t * t) + s1;
        p[(5, 5)] = self.sigma2_sq;
        p
    }
}

/// A model, its initial condition, the horizon and optional outliers.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub model: StateSpaceModel<f64>,
    pub init: InitialCondition<f64>,
    pub horizon: usize,
    pub shot: Option<ShotNoiseSpec>,
}

/// Radar tracking with range/bearing measurements and shot noise on both
/// noise channels.
pub fn build_example1(
    c: &Example1Constants,
) -> (StateSpaceModel<f64>, InitialCondition<f64>, ShotNoiseSpec) {
    let h = Matrix::from_rows(&[
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
    ]);
    let model = StateSpaceModel::new(
        c.transition(),
        c.noise_input(),
        h,
        c.process_noise(),
        Matrix::from_diagonal(&[c.sigma_r2, c.sigma_theta2]),
    );
    let init = InitialCondition {
        mean: vec![0.0; 6],
        covariance: c.initial_covariance(),
    };
    let shot = ShotNoiseSpec {
        window: (21, c.horizon),
        ..ShotNoiseSpec::default()
    };
    (model, init, shot)
}

/// Same dynamics observed through two nearly collinear sums of the state,
/// `H = [1 1 1 1 1 1; 1 1 1 1 1 1+δ]`, with `R = δ² I`, `Π₀ = I`.
pub fn build_example2(
    delta: f64,
    c: &Example1Constants,
) -> (StateSpaceModel<f64>, InitialCondition<f64>) {
    let mut h = Matrix::from_fn(2, 6, |_, _| 1.0);
    h[(1, 5)] = 1.0 + delta;
    let model = StateSpaceModel::new(
        c.transition(),
        c.noise_input(),
        h,
        c.process_noise(),
        Matrix::from_diagonal(&[delta * delta, delta * delta]),
    );
    let init = InitialCondition {
        mean: vec![0.0; 6],
        covariance: Matrix::identity(6),
    };
    (model, init)
}

impl Scenario {
    /// Radar tracking with the default outlier injection.
    pub fn example1(c: &Example1Constants) -> Self {
        let (model, init, shot) = build_example1(c);
        Self {
            model,
            init,
            horizon: c.horizon,
            shot: Some(shot),
        }
    }

    /// Radar tracking with a custom outlier spec, or Gaussian noise only.
    pub fn example1_with(c: &Example1Constants, shot: Option<ShotNoiseSpec>) -> Self {
        Self {
            shot,
            ..Self::example1(c)
        }
    }

    pub fn example2(delta: f64, c: &Example1Constants) -> Self {
        let (model, init) = build_example2(delta, c);
        Self {
            model,
            init,
            horizon: c.horizon,
            shot: None,
        }
    }
}
