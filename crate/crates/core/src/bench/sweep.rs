use std::fmt;

use thiserror::Error;

use crate::filters::{Algorithm, Weighting};
use crate::sim::SimError;

use super::{run_monte_carlo, Example1Constants, Scenario};

/// Blow-up factor relative to the same algorithm's RMSE at the largest δ.
pub const BLOWUP_FACTOR: f64 = 1e3;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("delta grid is empty")]
    EmptyGrid,
    #[error("delta grid must be strictly decreasing and positive")]
    BadGrid,
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// `{10⁻¹, 10⁻², …, 10⁻¹⁴}`.
pub fn default_delta_grid() -> Vec<f64> {
    (1..=14).map(|e| 10f64.powi(-e)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellStatus {
    Healthy,
    /// Finite RMSE above the blow-up threshold.
    BlownUp,
    /// At least one run diverged.
    Diverged {
        runs: usize,
    },
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellStatus::Healthy => f.write_str("ok"),
            CellStatus::BlownUp => f.write_str("blown_up"),
            CellStatus::Diverged { runs } => write!(f, "diverged:{runs}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub delta: f64,
    pub algorithm: Algorithm,
    pub scalar_rmse: f64,
    pub status: CellStatus,
}

impl SweepCell {
    pub fn broken(&self) -> bool {
        self.status != CellStatus::Healthy
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub delta_grid: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    /// Ordered by δ (grid order), then by algorithm (input order).
    pub cells: Vec<SweepCell>,
    /// Largest δ at which each algorithm broke down, `None` if it never did.
    pub breakdown: Vec<(Algorithm, Option<f64>)>,
}

impl SweepReport {
    pub fn breakdown_delta(&self, algorithm: Algorithm) -> Option<f64> {
        self.breakdown
            .iter()
            .find(|(a, _)| *a == algorithm)
            .and_then(|(_, d)| *d)
    }

    pub fn cell(&self, delta: f64, algorithm: Algorithm) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.delta == delta && c.algorithm == algorithm)
    }

    /// True when `a` breaks down strictly later (at a smaller δ, or never)
    /// than `b`.
    pub fn breaks_later(&self, a: Algorithm, b: Algorithm) -> bool {
        match (self.breakdown_delta(a), self.breakdown_delta(b)) {
            (None, Some(_)) => true,
            (Some(da), Some(db)) => da < db,
            _ => false,
        }
    }
}

/// Builds the δ-parameterized scenario for each grid point, runs the Monte
/// Carlo experiment, and classifies each (δ, algorithm) cell.
///
/// A cell is broken when any run diverges or its scalar RMSE is non-finite or
/// exceeds `BLOWUP_FACTOR` times the same algorithm's RMSE at the first grid
/// point.
pub fn run_conditioning_sweep(
    algorithms: &[Algorithm],
    delta_grid: &[f64],
    runs: usize,
    master_seed: u64,
    weighting: &Weighting<f64>,
    constants: &Example1Constants,
) -> Result<SweepReport, SweepError> {
    if delta_grid.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    if delta_grid.iter().any(|&d| d.is_nan() || d <= 0.0)
        || delta_grid.windows(2).any(|w| w[1].is_nan() || w[1] >= w[0])
    {
        return Err(SweepError::BadGrid);
    }
    let mut cells = Vec::with_capacity(delta_grid.len() * algorithms.len());
    let mut baseline: Vec<Option<f64>> = vec![None; algorithms.len()];
    for &delta in delta_grid {
        let scenario = Scenario::example2(delta, constants);
        let mc = run_monte_carlo(algorithms, &scenario, runs, master_seed, weighting)?;
        for (i, rep) in mc.reports.iter().enumerate() {
            let base = *baseline[i].get_or_insert(rep.scalar_summary);
            let status = if !rep.failed_runs.is_empty() {
                CellStatus::Diverged {
                    runs: rep.failed_runs.len(),
                }
            } else if !rep.scalar_summary.is_finite() || rep.scalar_summary > BLOWUP_FACTOR * base {
                CellStatus::BlownUp
            } else {
                CellStatus::Healthy
            };
            cells.push(SweepCell {
                delta,
                algorithm: rep.algorithm,
                scalar_rmse: rep.scalar_summary,
                status,
            });
        }
    }
    let breakdown = algorithms
        .iter()
        .map(|&alg| {
            let first = cells
                .iter()
                .filter(|c| c.algorithm == alg && c.broken())
                .map(|c| c.delta)
                .fold(None, |acc: Option<f64>, d| {
                    Some(acc.map_or(d, |a| a.max(d)))
                });
            (alg, first)
        })
        .collect();
    Ok(SweepReport {
        delta_grid: delta_grid.to_vec(),
        algorithms: algorithms.to_vec(),
        cells,
        breakdown,
    })
}
