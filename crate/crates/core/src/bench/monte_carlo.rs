use rayon::prelude::*;

use crate::filters::{run_filter, Algorithm, RunStatus, Weighting};
use crate::sim::{simulate, SeedSpec, SimError};

use super::Scenario;

/// A Monte Carlo run that was excluded from the RMSE average.
#[derive(Clone, Debug, PartialEq)]
pub struct FailedRun {
    pub run: usize,
    pub status: RunStatus,
}

/// Monte Carlo accuracy of one algorithm.
///
/// `per_component[k][i]` is `RMSE_{x_i}(t_{k+1})` over the completed runs and
/// `total[k]` is the 2-norm of that row. Cells are NaN when no run completed.
#[derive(Clone, Debug, PartialEq)]
pub struct RmseReport {
    pub algorithm: Algorithm,
    pub per_component: Vec<Vec<f64>>,
    pub total: Vec<f64>,
    /// Time mean of `total`.
    pub scalar_summary: f64,
    pub completed_runs: usize,
    pub failed_runs: Vec<FailedRun>,
}

impl RmseReport {
    pub fn horizon(&self) -> usize {
        self.total.len()
    }

    pub fn state_dim(&self) -> usize {
        self.per_component.first().map_or(0, Vec::len)
    }
}

/// Accumulates squared errors run by run, in run order.
#[derive(Clone, Debug)]
pub struct RmseAccumulator {
    sums: Vec<Vec<f64>>,
    completed: usize,
    failed: Vec<FailedRun>,
}

impl RmseAccumulator {
    pub fn new(state_dim: usize, horizon: usize) -> Self {
        Self {
            sums: vec![vec![0.0; state_dim]; horizon],
            completed: 0,
            failed: Vec::new(),
        }
    }

    /// Adds one completed run; `truth[k]` and `estimates[k]` belong to step `k + 1`.
    pub fn add_run<'a>(
        &mut self,
        truth: &[Vec<f64>],
        estimates: impl IntoIterator<Item = &'a [f64]>,
    ) {
        let mut steps = 0;
        for ((row, x), xh) in self.sums.iter_mut().zip(truth).zip(estimates) {
            for ((s, a), b) in row.iter_mut().zip(x).zip(xh) {
                *s += (a - b) * (a - b);
            }
            steps += 1;
        }
        assert_eq!(steps, self.sums.len(), "run shorter than horizon");
        self.completed += 1;
    }

    pub fn add_failure(&mut self, run: usize, status: RunStatus) {
        self.failed.push(FailedRun { run, status });
    }

    pub fn finish(self, algorithm: Algorithm) -> RmseReport {
        let m = self.completed as f64;
        let per_component: Vec<Vec<f64>> = self
            .sums
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&s| {
                        if self.completed == 0 {
                            f64::NAN
                        } else {
                            (s / m).sqrt()
                        }
                    })
                    .collect()
            })
            .collect();
        let total: Vec<f64> = per_component
            .iter()
            .map(|row| row.iter().map(|r| r * r).sum::<f64>().sqrt())
            .collect();
        let scalar_summary = if total.is_empty() {
            f64::NAN
        } else {
            total.iter().sum::<f64>() / total.len() as f64
        };
        RmseReport {
            algorithm,
            per_component,
            total,
            scalar_summary,
            completed_runs: self.completed,
            failed_runs: self.failed,
        }
    }
}

/// Reports per algorithm plus cross-algorithm estimate agreement.
#[derive(Clone, Debug)]
pub struct MonteCarloResult {
    pub reports: Vec<RmseReport>,
    /// Largest `|x̂_a − x̂_b|` over runs, steps and components, taken over every
    /// pair of algorithms that completed the same run. Zero with one algorithm.
    pub max_estimate_gap: f64,
}

impl MonteCarloResult {
    pub fn report(&self, algorithm: Algorithm) -> Option<&RmseReport> {
        self.reports.iter().find(|r| r.algorithm == algorithm)
    }
}

struct RunOutcome {
    truth: Vec<Vec<f64>>,
    estimates: Vec<Result<Vec<Vec<f64>>, RunStatus>>,
}

/// Runs every algorithm on the same simulated trajectory for each run index.
///
/// Runs execute in parallel; aggregation follows run order, so the result is
/// deterministic for a given `master_seed`.
pub fn run_monte_carlo(
    algorithms: &[Algorithm],
    scenario: &Scenario,
    runs: usize,
    master_seed: u64,
    weighting: &Weighting<f64>,
) -> Result<MonteCarloResult, SimError> {
    let outcomes: Vec<RunOutcome> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let traj = simulate(
                &scenario.model,
                &scenario.init,
                scenario.horizon,
                SeedSpec::new(master_seed, run as u64),
                scenario.shot.as_ref(),
            )?;
            let estimates = algorithms
                .iter()
                .map(|&alg| {
                    let fr = run_filter(
                        alg,
                        &scenario.model,
                        &scenario.init,
                        &traj.measurements,
                        weighting,
                    );
                    if fr.status.is_completed() {
                        Ok(fr.estimates().map(<[f64]>::to_vec).collect())
                    } else {
                        Err(fr.status)
                    }
                })
                .collect();
            Ok(RunOutcome {
                truth: traj.truth,
                estimates,
            })
        })
        .collect::<Result<_, SimError>>()?;

    let n = scenario.model.state_dim();
    let mut accs: Vec<RmseAccumulator> = algorithms
        .iter()
        .map(|_| RmseAccumulator::new(n, scenario.horizon))
        .collect();
    let mut gap = 0.0f64;
    for (run, outcome) in outcomes.into_iter().enumerate() {
        let ok: Vec<&Vec<Vec<f64>>> = outcome
            .estimates
            .iter()
            .filter_map(|e| e.as_ref().ok())
            .collect();
        for (i, a) in ok.iter().enumerate() {
            for b in &ok[i + 1..] {
                for (xa, xb) in a.iter().zip(b.iter()) {
                    for (p, q) in xa.iter().zip(xb) {
                        gap = gap.max((p - q).abs());
                    }
                }
            }
        }
        for (acc, est) in accs.iter_mut().zip(outcome.estimates) {
            match est {
                Ok(xs) => acc.add_run(&outcome.truth, xs.iter().map(Vec::as_slice)),
                Err(status) => acc.add_failure(run, status),
            }
        }
    }
    Ok(MonteCarloResult {
        reports: accs
            .into_iter()
            .zip(algorithms)
            .map(|(acc, &alg)| acc.finish(alg))
            .collect(),
        max_estimate_gap: gap,
    })
}
