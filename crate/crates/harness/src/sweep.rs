use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use anyhow::{Context, Result};
use nodedp::graph::{sample_sbm, sample_weighted_sbm};
use nodedp::metrics::{loss_overall, loss_worst_case};
use nodedp::rng::derive;
use nodedp::{LabelAssignment, NoiseMode, SbmParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::registry::{error_class, run_estimator, RunSpec, TrialGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    Failed,
}

/// One row of `records.csv`. Runtime is kept out of the CSV so reruns are
/// byte-identical; it goes to the timings file instead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub scenario: String,
    pub estimator: String,
    pub seed: u64,
    pub eps: f64,
    pub delta: f64,
    pub degree: Option<usize>,
    pub status: TrialStatus,
    pub error_class: String,
    pub error: String,
    pub loss_overall: Option<f64>,
    pub loss_worst_case: Option<f64>,
    pub budget_eps: Option<f64>,
    pub budget_delta: Option<f64>,
    pub noise_off: bool,
    /// JSON of the pipeline diagnostics.
    pub diagnostics: String,
    /// JSON of the budget derivation chain, empty when no budget is claimed.
    pub budget_chain: String,
    #[serde(skip)]
    pub runtime_ms: f64,
}

fn sample(params: &SbmParams, seed: u64) -> nodedp::Result<TrialGraph> {
    let mut rng = derive(seed, 0);
    Ok(if params.weight_model.is_some() {
        TrialGraph::Weighted(sample_weighted_sbm(params, &mut rng)?)
    } else {
        TrialGraph::Plain(sample_sbm(params, &mut rng)?)
    })
}

struct Outcome {
    losses: (f64, f64),
    output: nodedp::estimators::EstimatorOutput,
}

fn evaluate(
    spec: &RunSpec,
    g: &TrialGraph,
    truth: &LabelAssignment,
    rng_seed: (u64, u64),
) -> Result<Outcome, (String, String)> {
    let mut rng = derive(rng_seed.0, rng_seed.1);
    let run = catch_unwind(AssertUnwindSafe(|| run_estimator(spec, g, &mut rng)));
    let output = match run {
        Ok(Ok(o)) => o,
        Ok(Err(e)) => return Err((error_class(&e).into(), e.to_string())),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            return Err(("panic".into(), msg));
        }
    };
    let lo = loss_overall(&output.labels, truth).map_err(|e| (error_class(&e).to_string(), e.to_string()))?;
    let lw = loss_worst_case(&output.labels, truth).map_err(|e| (error_class(&e).to_string(), e.to_string()))?;
    Ok(Outcome { losses: (lo, lw), output })
}

/// Runs every (grid point × seed) trial. Trial `i` draws its mechanism
/// randomness from `derive(master_seed, i)` and its graph from
/// `derive(seed, 0)`, so output is independent of thread count.
pub fn run_sweep(cfg: &ExperimentConfig, noise: NoiseMode, threads: Option<usize>) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let params = cfg.sbm.params()?;
    let degree = cfg.degree.map(|r| r.resolve(&params));
    let grid = cfg.grid();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().context("building the worker pool")?;
    pool.install(|| {
        let graphs: Vec<nodedp::Result<TrialGraph>> = cfg.seeds.par_iter().map(|&s| sample(&params, s)).collect();
        let jobs: Vec<(usize, usize, usize)> = grid
            .iter()
            .enumerate()
            .flat_map(|(gi, _)| (0..cfg.seeds.len()).map(move |si| (gi, si)))
            .enumerate()
            .map(|(i, (gi, si))| (i, gi, si))
            .collect();
        let records = jobs
            .par_iter()
            .map(|&(trial, gi, si)| {
                let (eps, delta) = grid[gi];
                let spec = RunSpec { cfg, sbm: &params, eps, delta, degree, noise };
                let mut rec = TrialRecord {
                    trial,
                    scenario: cfg.scenario.clone(),
                    estimator: cfg.estimator.id.clone(),
                    seed: cfg.seeds[si],
                    eps,
                    delta,
                    degree,
                    status: TrialStatus::Failed,
                    error_class: String::new(),
                    error: String::new(),
                    loss_overall: None,
                    loss_worst_case: None,
                    budget_eps: None,
                    budget_delta: None,
                    noise_off: noise.is_off(),
                    diagnostics: String::new(),
                    budget_chain: String::new(),
                    runtime_ms: 0.0,
                };
                let start = Instant::now();
                let result = match &graphs[si] {
                    Ok(g) => evaluate(&spec, g, &params.theta, (cfg.master_seed, trial as u64)),
                    Err(e) => Err((error_class(e).into(), e.to_string())),
                };
                rec.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                match result {
                    Ok(o) => {
                        rec.status = TrialStatus::Ok;
                        (rec.loss_overall, rec.loss_worst_case) = (Some(o.losses.0), Some(o.losses.1));
                        rec.noise_off |= o.output.diagnostics.noise_off;
                        rec.diagnostics = serde_json::to_string(&o.output.diagnostics).expect("diagnostics serialize");
                        if let Some(b) = &o.output.budget {
                            if let Some((e, d)) = b.eps_delta() {
                                (rec.budget_eps, rec.budget_delta) = (Some(e), Some(d));
                            }
                            rec.budget_chain = serde_json::to_string(&b.chain).expect("chain serializes");
                        }
                    }
                    Err((class, msg)) => {
                        rec.error_class = class;
                        rec.error = msg;
                    }
                }
                rec
            })
            .collect();
        Ok(records)
    })
}
