use std::collections::BTreeSet;

use mcckf::bench::{Example1Constants, Scenario};
use mcckf::sim::{simulate, Channel, SeedSpec, ShotNoiseSpec, ShotTargets};
use mcckf::{run_filter, Algorithm, Weighting};

#[test]
fn radar_outlier_schedule() {
    let sc = Scenario::example1(&Example1Constants::default());
    let spec = sc.shot.clone().unwrap();
    assert_eq!(spec.corrupted_steps(), 56);
    for run in 0..100 {
        let traj = simulate(
            &sc.model,
            &sc.init,
            sc.horizon,
            SeedSpec::new(2021, run),
            Some(&spec),
        )
        .unwrap();
        let mut process = BTreeSet::new();
        let mut measurement = BTreeSet::new();
        for o in &traj.outliers {
            assert!((21..=300).contains(&o.step), "step {}", o.step);
            assert!(o.magnitude.fract() == 0.0 && (0.0..=5.0).contains(&o.magnitude));
            match o.channel {
                Channel::Process(i) => {
                    assert!(i < 2);
                    process.insert(o.step);
                }
                Channel::Measurement(i) => {
                    assert!(i < 2);
                    measurement.insert(o.step);
                }
            }
        }
        assert_eq!(process.len(), 56);
        assert_eq!(measurement.len(), 56);
        assert_eq!(traj.corrupted_step_counts(), (56, 56));
        assert_eq!(traj.outliers.len(), 4 * 56);
    }
}

#[test]
fn zero_fraction_matches_clean_run() {
    let sc = Scenario::example1(&Example1Constants::default());
    let spec = ShotNoiseSpec {
        corrupted_fraction: 0.0,
        ..sc.shot.clone().unwrap()
    };
    for run in 0..5 {
        let seed = SeedSpec::new(9, run);
        let clean = simulate(&sc.model, &sc.init, sc.horizon, seed, None).unwrap();
        let zero = simulate(&sc.model, &sc.init, sc.horizon, seed, Some(&spec)).unwrap();
        assert_eq!(clean, zero);
    }
}

#[test]
fn schedule_ignores_model_values() {
    let c = Example1Constants::default();
    let scaled = Example1Constants {
        sigma_r2: 4.0 * c.sigma_r2,
        sigma1_sq: 0.5 * c.sigma1_sq,
        ..c.clone()
    };
    let a = Scenario::example1(&c);
    let b = Scenario::example1(&scaled);
    let seed = SeedSpec::new(5, 3);
    let ta = simulate(&a.model, &a.init, a.horizon, seed, a.shot.as_ref()).unwrap();
    let tb = simulate(&b.model, &b.init, b.horizon, seed, b.shot.as_ref()).unwrap();
    let key = |t: &mcckf::sim::Trajectory| {
        t.outliers
            .iter()
            .map(|o| (o.step, o.channel, o.magnitude as i64))
            .collect::<Vec<_>>()
    };
    assert_eq!(key(&ta), key(&tb));
}

#[test]
fn targets_select_channel_groups() {
    let sc = Scenario::example1(&Example1Constants::default());
    let spec = ShotNoiseSpec {
        targets: ShotTargets::Measurement,
        ..sc.shot.clone().unwrap()
    };
    let traj = simulate(
        &sc.model,
        &sc.init,
        sc.horizon,
        SeedSpec::new(1, 0),
        Some(&spec),
    )
    .unwrap();
    assert_eq!(traj.corrupted_step_counts(), (0, 56));
    let both = simulate(
        &sc.model,
        &sc.init,
        sc.horizon,
        SeedSpec::new(1, 0),
        sc.shot.as_ref(),
    )
    .unwrap();
    let meas = |t: &mcckf::sim::Trajectory| {
        t.outliers
            .iter()
            .filter(|o| matches!(o.channel, Channel::Measurement(_)))
            .copied()
            .collect::<Vec<_>>()
    };
    assert_eq!(meas(&traj), meas(&both));
}

#[test]
fn seeds_are_reproducible_and_distinct() {
    let sc = Scenario::example1(&Example1Constants::default());
    let a = simulate(
        &sc.model,
        &sc.init,
        sc.horizon,
        SeedSpec::new(3, 7),
        sc.shot.as_ref(),
    )
    .unwrap();
    let b = simulate(
        &sc.model,
        &sc.init,
        sc.horizon,
        SeedSpec::new(3, 7),
        sc.shot.as_ref(),
    )
    .unwrap();
    let c = simulate(
        &sc.model,
        &sc.init,
        sc.horizon,
        SeedSpec::new(3, 8),
        sc.shot.as_ref(),
    )
    .unwrap();
    assert_eq!(a, b);
    assert_ne!(a.truth, c.truth);
}

/// Innovations of a Kalman filter matched to the simulating model are white.
#[test]
fn reference_innovations_are_white() {
    let sc = Scenario::example1_with(&Example1Constants::default(), None);
    let mut rho = [0.0; 2];
    let runs = 100;
    for run in 0..runs {
        let traj = simulate(
            &sc.model,
            &sc.init,
            sc.horizon,
            SeedSpec::new(77, run),
            None,
        )
        .unwrap();
        let fr = run_filter(
            Algorithm::KfReference,
            &sc.model,
            &sc.init,
            &traj.measurements,
            &Weighting::Pinned(1.0),
        );
        assert!(fr.status.is_completed());
        for (i, r) in rho.iter_mut().enumerate() {
            let e: Vec<f64> = fr.reports.iter().map(|s| s.innovation[i]).collect();
            let num: f64 = e.windows(2).map(|w| w[0] * w[1]).sum();
            let den: f64 = e.iter().map(|x| x * x).sum();
            *r += num / den / runs as f64;
        }
    }
    for r in rho {
        assert!(r.abs() < 0.1, "lag-1 autocorrelation {r}");
    }
}
