//! Radar tracking scenarios, Monte Carlo RMSE evaluation, and the
//! ill-conditioning sweep.

mod config;
mod monte_carlo;
mod output;
mod scenarios;
mod sweep;

pub use config::{
    ExperimentConfig, KernelConfig, MonteCarloConfig, ShotNoiseConfig, SweepConfig,
    DEFAULT_EXAMPLE1_SIGMA, DEFAULT_SWEEP_SIGMA,
};
pub use monte_carlo::{run_monte_carlo, FailedRun, MonteCarloResult, RmseAccumulator, RmseReport};
pub use output::{
    format_real, read_rmse_csv, read_sweep_csv, write_meta, write_rmse_csv, write_sweep_csv,
    write_trajectory_csv, OutputError, SweepRow,
};
pub use scenarios::{build_example1, build_example2, Example1Constants, Scenario};
pub use sweep::{
    default_delta_grid, run_conditioning_sweep, CellStatus, SweepCell, SweepError, SweepReport,
    BLOWUP_FACTOR,
};
