//! Fast sanity checks behind `nodedp selftest`.

use nodedp::accounting::group_dp_values;
use nodedp::boosting::hgr_thinned_bernoulli;
use nodedp::bounds::{lb_stable, LowerBoundQuery};
use nodedp::lp::degree_truncate;
use nodedp::mechanisms::flip_probability;
use nodedp::metrics::loss_overall;
use nodedp::rng::seeded;
use nodedp::{Graph, LabelAssignment, NoiseMode};
use rand::Rng;

use crate::config::{DegreeRule, EstimatorSpec, ExperimentConfig, OutputSpec, SbmSpec};
use crate::sweep::run_sweep;

type Check = (&'static str, bool, String);

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn loss_invariance() -> Check {
    let mut rng = seeded(1);
    let truth = LabelAssignment::balanced(30, 3).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut perm = vec![0, 1, 2];
        perm.swap(0, rng.random_range(0..3));
        worst = worst.max(loss_overall(&truth.relabeled(&perm), &truth).unwrap());
    }
    ("loss_relabel_invariance", worst == 0.0, format!("max loss {worst}"))
}

fn flip() -> Check {
    let p = flip_probability(1.0);
    ("flip_probability", close(p, 1.0 / (1.0 + 1f64.exp())), format!("p(1) = {p}"))
}

fn group_privacy() -> Check {
    let (e, d) = group_dp_values(0.5, 1e-6, 4);
    let ok = close(e, 2.0) && close(d, 4e-6 * 1.5f64.exp());
    ("group_dp", ok, format!("({e}, {d:e})"))
}

fn truncation_identity() -> Check {
    let g = Graph::path(20);
    match degree_truncate(&g, 2) {
        Ok((t, d_t)) => ("truncation_identity", t == g && d_t == 0.0, format!("d_T = {d_t}")),
        Err(e) => ("truncation_identity", false, e.to_string()),
    }
}

fn hgr() -> Check {
    let v = hgr_thinned_bernoulli(0.5, 0.5).unwrap_or(f64::NAN);
    ("hgr_thinned_bernoulli", close(v, 1.0 / 3.0), format!("{v}"))
}

fn stable_bound() -> Check {
    let q = LowerBoundQuery { n: 100, k: 2, xi: 0.1, eta: 0.1, delta: 0.0 };
    let v = lb_stable(&q).unwrap_or(f64::NAN);
    ("lb_stable", close(v, 2f64.ln()), format!("{v}"))
}

fn sweep_determinism() -> Check {
    let cfg = ExperimentConfig {
        scenario: "selftest".into(),
        sbm: SbmSpec { n: 40, b: vec![vec![0.6, 0.05], vec![0.05, 0.6]], weights: None },
        estimator: EstimatorSpec { id: "ef".into(), params: Default::default() },
        reduction: None,
        boost: None,
        eps: vec![1.0, 4.0],
        delta: vec![0.0],
        degree: Some(DegreeRule::MultipleOfD(3.0)),
        seeds: vec![1, 2, 3],
        master_seed: 7,
        outputs: OutputSpec::default(),
    };
    let strip = |mut r: Vec<crate::TrialRecord>| {
        r.iter_mut().for_each(|x| x.runtime_ms = 0.0);
        r
    };
    match (run_sweep(&cfg, NoiseMode::On, Some(1)), run_sweep(&cfg, NoiseMode::On, Some(4))) {
        (Ok(a), Ok(b)) => {
            let n = a.len();
            ("sweep_determinism", strip(a) == strip(b) && n == 6, format!("{n} records, 1 vs 4 threads"))
        }
        (Err(e), _) | (_, Err(e)) => ("sweep_determinism", false, e.to_string()),
    }
}

pub fn run_all() -> Vec<Check> {
    vec![loss_invariance(), flip(), group_privacy(), truncation_identity(), hgr(), stable_bound(), sweep_determinism()]
}
