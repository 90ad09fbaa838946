use nodedp::NoiseMode;
use nodedp_harness::config::{DegreeRule, EstimatorParams, EstimatorSpec, ExperimentConfig, OutputSpec, SbmSpec};
use nodedp_harness::{io, run_sweep, TrialStatus};

fn ef_config(eps: Vec<f64>, seeds: Vec<u64>) -> ExperimentConfig {
    ExperimentConfig {
        scenario: "test".into(),
        sbm: SbmSpec { n: 200, b: vec![vec![0.5, 0.05], vec![0.05, 0.5]], weights: None },
        estimator: EstimatorSpec { id: "ef".into(), params: EstimatorParams::default() },
        reduction: None,
        boost: None,
        eps,
        delta: vec![0.0],
        degree: None,
        seeds,
        master_seed: 3,
        outputs: OutputSpec::default(),
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len().is_multiple_of(2) {
        0.5 * (xs[m - 1] + xs[m])
    } else {
        xs[m]
    }
}

#[test]
fn single_point_single_seed_gives_one_record() {
    let recs = run_sweep(&ef_config(vec![2.0], vec![5]), NoiseMode::On, Some(1)).unwrap();
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert_eq!((r.trial, r.seed, r.eps, r.status), (0, 5, 2.0, TrialStatus::Ok));
    let (lo, lw) = (r.loss_overall.unwrap(), r.loss_worst_case.unwrap());
    assert!((0.0..=2.0).contains(&lo) && (0.0..=2.0).contains(&lw) && lo <= lw + 1e-12);
    assert_eq!(r.budget_eps, Some(2.0));
    assert!(r.budget_chain.contains("randomized_response"));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let cfg = ef_config(vec![0.5, 2.0], vec![1, 2, 3, 4]);
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, threads) in [1, 4, 1].into_iter().enumerate() {
        let recs = run_sweep(&cfg, NoiseMode::On, Some(threads)).unwrap();
        let p = dir.path().join(format!("r{i}.csv"));
        io::write_records(&p, &recs).unwrap();
        files.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);
}

#[test]
fn records_round_trip_through_csv() {
    let recs = run_sweep(&ef_config(vec![1.0], vec![1, 2]), NoiseMode::On, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.csv");
    io::write_records(&p, &recs).unwrap();
    let back = io::read_records(&p).unwrap();
    let zeroed: Vec<_> = recs
        .into_iter()
        .map(|mut r| {
            r.runtime_ms = 0.0;
            r
        })
        .collect();
    assert_eq!(back, zeroed);
}

#[test]
fn edge_flip_grid_has_nonincreasing_medians() {
    let eps = vec![0.25, 0.5, 1.0, 2.0, 4.0];
    let seeds: Vec<u64> = (0..20).collect();
    let recs = run_sweep(&ef_config(eps.clone(), seeds), NoiseMode::On, None).unwrap();
    assert_eq!(recs.len(), 100);
    let medians: Vec<f64> = eps
        .iter()
        .map(|&e| median(recs.iter().filter(|r| r.eps == e).map(|r| r.loss_overall.unwrap()).collect()))
        .collect();
    assert!(medians.windows(2).all(|w| w[1] <= w[0]), "{medians:?}");
    assert!(medians[0] > medians[4]);
}

#[test]
fn trial_errors_become_failure_rows() {
    // B₁₁ < B₁₂ is rejected inside the convex estimator, not by config validation.
    let mut cfg = ef_config(vec![1.0, 2.0], vec![1, 2]);
    cfg.estimator = EstimatorSpec {
        id: "tc".into(),
        params: EstimatorParams { b11: Some(0.01), b12: Some(0.5), ..Default::default() },
    };
    cfg.delta = vec![1e-6];
    let recs = run_sweep(&cfg, NoiseMode::On, None).unwrap();
    assert_eq!(recs.len(), 4);
    for r in &recs {
        assert_eq!(r.status, TrialStatus::Failed);
        assert_eq!(r.error_class, "invalid_input");
        assert!(r.loss_overall.is_none() && r.loss_worst_case.is_none());
    }
}

#[test]
fn boosting_without_a_witness_is_a_failure_row() {
    let mut cfg = ef_config(vec![0.01], vec![1, 2, 3]);
    cfg.boost = Some(nodedp_harness::config::BoostSpec { t: 3, xi: 0.05 });
    let recs = run_sweep(&cfg, NoiseMode::On, None).unwrap();
    assert_eq!(recs.len(), 3);
    assert!(recs.iter().any(|r| r.error_class == "no_majority"), "{recs:?}");
}

#[test]
fn noise_off_is_watermarked() {
    let recs = run_sweep(&ef_config(vec![0.1], vec![1]), NoiseMode::Off, None).unwrap();
    assert!(recs[0].noise_off);
    assert!(recs[0].diagnostics.contains("\"noise_off\":true"));
    assert_eq!(recs[0].budget_eps, None);
    assert_eq!(recs[0].loss_overall, Some(0.0));
}

#[test]
fn reduction_records_carry_the_node_budget() {
    let mut cfg = ef_config(vec![1e5], vec![1]);
    cfg.reduction = Some(nodedp_harness::config::ReductionSpec { eps1: 1.0, delta1: 1e-3 });
    cfg.degree = Some(DegreeRule::MultipleOfD(3.0));
    let recs = run_sweep(&cfg, NoiseMode::On, None).unwrap();
    let r = &recs[0];
    assert_eq!(r.degree, Some(300));
    assert_eq!(r.status, TrialStatus::Ok);
    assert!((r.budget_eps.unwrap() - (1.0 + 1e5)).abs() < 1e-6);
    assert!(r.budget_chain.ends_with("}]") && r.budget_chain.contains("truncation_reduction"));
    assert!(r.diagnostics.contains("l_hat"));
}

#[test]
fn config_validation_rejects_bad_inputs() {
    let mut cfg = ef_config(vec![1.0], vec![1]);
    cfg.estimator.id = "nope".into();
    assert!(cfg.validate().is_err());
    assert!(ef_config(vec![], vec![1]).validate().is_err());
    assert!(ef_config(vec![1.0], vec![]).validate().is_err());
    let mut cfg = ef_config(vec![1.0], vec![1]);
    cfg.estimator.id = "pca".into();
    assert!(cfg.validate().is_err(), "pca without a degree rule");
    cfg.degree = Some(DegreeRule::Absolute(10));
    assert!(cfg.validate().is_ok());
    let mut cfg = ef_config(vec![1.0], vec![1]);
    cfg.boost = Some(nodedp_harness::config::BoostSpec { t: 2, xi: 0.05 });
    assert!(cfg.validate().is_err());
}

#[test]
fn shipped_configs_parse_and_validate() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");
    let mut ids = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let cfg = ExperimentConfig::load(&entry.unwrap().path()).unwrap();
        ids.push(cfg.estimator.id);
    }
    for id in nodedp_harness::config::ESTIMATOR_IDS {
        assert!(ids.iter().any(|i| i == id), "no example config for {id}");
    }
}
