//! Experiment configuration, one section per experiment ingredient.
//!
//! Every section except `kernel` has defaults. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::correntropy::{CorrentropyError, KernelSpec};
use crate::filters::{Algorithm, Weighting};
use crate::sim::{ShotNoiseSpec, ShotTargets};

use super::{default_delta_grid, Example1Constants};

/// Radar-experiment bandwidth used when no configuration file is given. The
/// initial bearing-rate uncertainty makes normalized bearing innovations of
/// order 10⁴ on the first steps, so smaller bandwidths reject every
/// measurement from the start.
pub const DEFAULT_EXAMPLE1_SIGMA: f64 = 1e5;

/// Sweep bandwidth. Innovations normalized by `R = δ²I` grow like `1/δ`, so
/// keeping `λ ≈ 1` down to `δ = 10⁻¹⁴` needs a bandwidth far above `10¹⁷`.
pub const DEFAULT_SWEEP_SIGMA: f64 = 1e20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub model: Example1Constants,
    pub kernel: KernelConfig,
    #[serde(default)]
    pub shot_noise: ShotNoiseConfig,
    #[serde(default)]
    pub monte_carlo: MonteCarloConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    /// Kernel bandwidth for the radar tracking experiment.
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShotNoiseConfig {
    pub enabled: bool,
    pub fraction: f64,
    pub magnitude_low: i64,
    pub magnitude_high: i64,
    pub window_start: usize,
    /// Clipped to the model horizon.
    pub window_end: usize,
    pub targets: ShotTargets,
    pub random_sign: bool,
}

impl Default for ShotNoiseConfig {
    fn default() -> Self {
        let spec = ShotNoiseSpec::default();
        Self {
            enabled: true,
            fraction: spec.corrupted_fraction,
            magnitude_low: spec.magnitude_low,
            magnitude_high: spec.magnitude_high,
            window_start: spec.window.0,
            window_end: spec.window.1,
            targets: spec.targets,
            random_sign: spec.random_sign,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloConfig {
    pub runs: usize,
    pub seed: u64,
    pub algorithms: Vec<String>,
    /// Relative tolerance for the equivalence check.
    pub tolerance: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            runs: 100,
            seed: 2021,
            algorithms: Algorithm::MCC.iter().map(|a| a.to_string()).collect(),
            tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub deltas: Vec<f64>,
    pub runs: usize,
    /// Kernel bandwidth for the ill-conditioned scenario; it must be large
    /// enough that `λ ≈ 1` over the whole grid so that only numerical
    /// behavior differs between algorithms.
    pub sigma: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            deltas: default_delta_grid(),
            runs: 20,
            sigma: DEFAULT_SWEEP_SIGMA,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::with_sigma(DEFAULT_EXAMPLE1_SIGMA)
    }
}

impl ExperimentConfig {
    /// Defaults with the given radar-experiment bandwidth.
    pub fn with_sigma(sigma: f64) -> Self {
        Self {
            model: Example1Constants::default(),
            kernel: KernelConfig { sigma },
            shot_noise: ShotNoiseConfig::default(),
            monte_carlo: MonteCarloConfig::default(),
            sweep: SweepConfig::default(),
        }
    }

    pub fn example1_weighting(&self) -> Result<Weighting<f64>, CorrentropyError> {
        Ok(Weighting::Kernel(KernelSpec::new(self.kernel.sigma)?))
    }

    pub fn sweep_weighting(&self) -> Result<Weighting<f64>, CorrentropyError> {
        Ok(Weighting::Kernel(KernelSpec::new(self.sweep.sigma)?))
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>, String> {
        self.monte_carlo
            .algorithms
            .iter()
            .map(|s| s.parse())
            .collect()
    }

    /// Semantic checks that the type system does not capture.
    pub fn validate(&self) -> Result<(), String> {
        let algorithms = self.algorithms()?;
        if algorithms.is_empty() {
            return Err("monte_carlo.algorithms is empty".into());
        }
        if self.monte_carlo.runs == 0 {
            return Err("monte_carlo.runs must be at least 1".into());
        }
        if self.monte_carlo.tolerance.is_nan() || self.monte_carlo.tolerance < 0.0 {
            return Err("monte_carlo.tolerance must be nonnegative".into());
        }
        if self.sweep.runs == 0 {
            return Err("sweep.runs must be at least 1".into());
        }
        if self.sweep.deltas.is_empty() {
            return Err("sweep.deltas is empty".into());
        }
        if self.model.horizon == 0 {
            return Err("model.horizon must be at least 1".into());
        }
        if let Some(rows) = &self.model.initial_covariance {
            if rows.len() != 6 || rows.iter().any(|r| r.len() != 6) {
                return Err("model.initial_covariance must be 6x6".into());
            }
        }
        self.example1_weighting()
            .map_err(|e| format!("kernel.sigma: {e}"))?;
        self.sweep_weighting()
            .map_err(|e| format!("sweep.sigma: {e}"))?;
        if let Some(spec) = self.shot_spec() {
            spec.validate(self.model.horizon)
                .map_err(|e| format!("shot_noise: {e}"))?;
        }
        Ok(())
    }

    /// Outlier spec with its window clipped to the configured horizon.
    pub fn shot_spec(&self) -> Option<ShotNoiseSpec> {
        let s = &self.shot_noise;
        s.enabled.then(|| ShotNoiseSpec {
            corrupted_fraction: s.fraction,
            magnitude_low: s.magnitude_low,
            magnitude_high: s.magnitude_high,
            window: (s.window_start, s.window_end.min(self.model.horizon)),
            targets: s.targets,
            random_sign: s.random_sign,
        })
    }
}
