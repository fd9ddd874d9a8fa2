use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use mcckf::bench::{
    format_real, run_conditioning_sweep, run_monte_carlo, write_meta, write_rmse_csv,
    write_sweep_csv, write_trajectory_csv, MonteCarloResult, Scenario, SweepReport,
};
use mcckf::sim::{self, SeedSpec};
use mcckf::Algorithm;

use crate::settings::Settings;

pub type Outcome = Result<u8, String>;

fn prepare(settings: &Settings) -> Result<&Path, String> {
    fs::create_dir_all(&settings.out).map_err(|e| format!("{}: {e}", settings.out.display()))?;
    let path = settings.out.join("effective_config.toml");
    fs::write(&path, &settings.canonical).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(&settings.out)
}

fn meta(settings: &Settings, command: &str, extra: Vec<(&str, String)>) -> Result<(), String> {
    let c = &settings.config;
    let mut entries = vec![
        ("command", command.to_string()),
        ("version", env!("CARGO_PKG_VERSION").to_string()),
        ("config_sha256", settings.config_hash.clone()),
        ("seed", c.monte_carlo.seed.to_string()),
    ];
    entries.extend(extra);
    write_meta(&settings.out.join("meta.txt"), &entries).map_err(|e| e.to_string())
}

fn scenario(settings: &Settings) -> Scenario {
    let c = &settings.config;
    Scenario::example1_with(&c.model, c.shot_spec())
}

fn monte_carlo(settings: &Settings, algorithms: &[Algorithm]) -> Result<MonteCarloResult, String> {
    let c = &settings.config;
    let weighting = c.example1_weighting().map_err(|e| e.to_string())?;
    info!(
        "radar tracking: {} runs, seed {}, sigma {}",
        c.monte_carlo.runs, c.monte_carlo.seed, c.kernel.sigma
    );
    run_monte_carlo(
        algorithms,
        &scenario(settings),
        c.monte_carlo.runs,
        c.monte_carlo.seed,
        &weighting,
    )
    .map_err(|e| e.to_string())
}

fn write_reports(out: &Path, mc: &MonteCarloResult) -> Result<Vec<PathBuf>, String> {
    mc.reports
        .iter()
        .map(|rep| {
            let path = out.join(format!("rmse_{}.csv", rep.algorithm));
            write_rmse_csv(rep, &path).map_err(|e| e.to_string())?;
            info!("wrote {}", path.display());
            Ok(path)
        })
        .collect()
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn equivalence(settings: &Settings) -> Outcome {
    let c = &settings.config;
    let algorithms = c.algorithms()?;
    if algorithms.len() < 2 {
        return Err("equivalence needs at least two algorithms".into());
    }
    let out = prepare(settings)?;
    let mc = monte_carlo(settings, &algorithms)?;
    write_reports(out, &mc)?;

    let pairs: Vec<(usize, usize)> = (0..algorithms.len())
        .flat_map(|i| (i + 1..algorithms.len()).map(move |j| (i, j)))
        .collect();
    let mut rows = Vec::new();
    let mut header = vec!["step".to_string()];
    header.extend(
        pairs
            .iter()
            .map(|&(i, j)| format!("{}_vs_{}", algorithms[i], algorithms[j])),
    );
    rows.push(header.join(","));
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for rep in &mc.reports {
        if !rep.failed_runs.is_empty() {
            failed.push(format!(
                "{} ({} runs)",
                rep.algorithm,
                rep.failed_runs.len()
            ));
        }
    }
    for k in 0..c.model.horizon {
        let mut row = vec![(k + 1).to_string()];
        for &(i, j) in &pairs {
            let d = relative_gap(mc.reports[i].total[k], mc.reports[j].total[k]);
            worst = if d.is_nan() {
                f64::INFINITY
            } else {
                worst.max(d)
            };
            row.push(format_real(d));
        }
        rows.push(row.join(","));
    }
    let diff_path = out.join("diff.csv");
    fs::write(&diff_path, rows.join("\n") + "\n")
        .map_err(|e| format!("{}: {e}", diff_path.display()))?;

    let tolerance = c.monte_carlo.tolerance;
    let pass = failed.is_empty() && worst < tolerance;
    meta(
        settings,
        "equivalence",
        vec![
            ("kernel_sigma", format_real(c.kernel.sigma)),
            ("runs", c.monte_carlo.runs.to_string()),
            ("tolerance", format_real(tolerance)),
            ("max_relative_rmse_difference", format_real(worst)),
            ("max_estimate_gap", format_real(mc.max_estimate_gap)),
        ],
    )?;
    println!("max relative RMSE-curve difference: {worst:.3e} (tolerance {tolerance:.1e})");
    println!(
        "max per-step estimate gap:          {:.3e}",
        mc.max_estimate_gap
    );
    if !failed.is_empty() {
        println!("diverged: {}", failed.join(", "));
    }
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { 1 })
}

pub fn example1(settings: &Settings) -> Outcome {
    let c = &settings.config;
    let algorithms = c.algorithms()?;
    let out = prepare(settings)?;
    let mc = monte_carlo(settings, &algorithms)?;
    write_reports(out, &mc)?;
    meta(
        settings,
        "example1",
        vec![
            ("kernel_sigma", format_real(c.kernel.sigma)),
            ("runs", c.monte_carlo.runs.to_string()),
        ],
    )?;
    println!(
        "{:<14} {:>16} {:>10}",
        "algorithm", "mean total RMSE", "diverged"
    );
    for rep in &mc.reports {
        println!(
            "{:<14} {:>16.6e} {:>10}",
            rep.algorithm.to_string(),
            rep.scalar_summary,
            rep.failed_runs.len()
        );
    }
    Ok(0)
}

/// The newest square-root form must break down strictly after every other
/// algorithm, or never while some other algorithm does not break either.
fn ordering_holds(report: &SweepReport) -> bool {
    let Some(last) = report.breakdown.iter().find(|(a, _)| *a == Algorithm::Sr1b) else {
        return true;
    };
    report
        .breakdown
        .iter()
        .filter(|(a, _)| *a != Algorithm::Sr1b)
        .all(|&(_, other)| match (last.1, other) {
            (None, _) => true,
            (Some(d), Some(o)) => d < o,
            (Some(_), None) => false,
        })
}

fn delta_label(d: Option<f64>) -> String {
    d.map_or_else(|| "none".to_string(), |d| format!("{d:.0e}"))
}

pub fn sweep(settings: &Settings) -> Outcome {
    let c = &settings.config;
    let algorithms = c.algorithms()?;
    let weighting = c.sweep_weighting().map_err(|e| e.to_string())?;
    let out = prepare(settings)?;
    info!(
        "sweep: {} deltas, {} runs, seed {}, sigma {}",
        c.sweep.deltas.len(),
        c.sweep.runs,
        c.monte_carlo.seed,
        c.sweep.sigma
    );
    let report = run_conditioning_sweep(
        &algorithms,
        &c.sweep.deltas,
        c.sweep.runs,
        c.monte_carlo.seed,
        &weighting,
        &c.model,
    )
    .map_err(|e| e.to_string())?;
    write_sweep_csv(&report, &out.join("sweep.csv")).map_err(|e| e.to_string())?;
    let holds = ordering_holds(&report);
    let mut extra = vec![
        ("sweep_sigma", format_real(c.sweep.sigma)),
        ("runs", c.sweep.runs.to_string()),
    ];
    let labels: Vec<String> = report
        .breakdown
        .iter()
        .map(|(a, d)| format!("{a}={}", delta_label(*d)))
        .collect();
    extra.push(("breakdown", labels.join(" ")));
    meta(settings, "sweep", extra)?;

    println!("{:<14} {:>12}", "algorithm", "breakdown δ");
    for (alg, d) in &report.breakdown {
        println!("{:<14} {:>12}", alg.to_string(), delta_label(*d));
    }
    println!("{}", if holds { "PASS" } else { "FAIL" });
    Ok(if holds { 0 } else { 1 })
}

pub fn simulate(settings: &Settings, run: u64) -> Outcome {
    let c = &settings.config;
    let out = prepare(settings)?;
    let sc = scenario(settings);
    let traj = sim::simulate(
        &sc.model,
        &sc.init,
        sc.horizon,
        SeedSpec::new(c.monte_carlo.seed, run),
        sc.shot.as_ref(),
    )
    .map_err(|e| e.to_string())?;
    let path = out.join("trajectory.csv");
    write_trajectory_csv(&traj, sc.model.noise_dim(), &path).map_err(|e| e.to_string())?;
    let (p, m) = traj.corrupted_step_counts();
    meta(
        settings,
        "simulate",
        vec![
            ("run", run.to_string()),
            ("corrupted_process_steps", p.to_string()),
            ("corrupted_measurement_steps", m.to_string()),
        ],
    )?;
    println!(
        "wrote {} ({} steps, {p} + {m} corrupted steps)",
        path.display(),
        traj.horizon
    );
    Ok(0)
}
