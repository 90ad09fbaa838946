//! Maps estimator ids and config knobs onto pipeline calls.

use nodedp::boosting::{graph_boost, BoostConfig};
use nodedp::estimators::*;
use nodedp::{Error, Graph, NoiseMode, Result, SbmParams, SeedRng, WeightedGraph};

use crate::config::{EstimatorParams, ExperimentConfig};

/// Input graph of one trial.
#[derive(Clone, Debug)]
pub enum TrialGraph {
    Plain(Graph),
    Weighted(WeightedGraph),
}

/// Everything a single estimator run needs besides the graph.
#[derive(Clone, Debug)]
pub struct RunSpec<'a> {
    pub cfg: &'a ExperimentConfig,
    pub sbm: &'a SbmParams,
    pub eps: f64,
    pub delta: f64,
    pub degree: Option<usize>,
    pub noise: NoiseMode,
}

/// Short error class used in failure rows.
pub fn error_class(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::LpInfeasible => "lp_infeasible",
        Error::LpUnbounded => "lp_unbounded",
        Error::LpNumerical(_) => "lp_numerical",
        Error::RejectionCapExceeded { .. } => "rejection_cap_exceeded",
        Error::NotConverged { .. } => "not_converged",
        Error::InadmissiblePrivacy(_) => "inadmissible_privacy",
        Error::NoMajority => "no_majority",
        Error::Parse(_) => "parse",
    }
}

fn need_degree(spec: &RunSpec) -> Result<usize> {
    spec.degree.ok_or_else(|| Error::InvalidInput(format!("{} needs a degree D", spec.cfg.estimator.id)))
}

fn convex_blocks(p: &EstimatorParams, sbm: &SbmParams) -> (f64, f64) {
    (p.b11.unwrap_or(sbm.b[0][0]), p.b12.unwrap_or(if sbm.k > 1 { sbm.b[0][1] } else { 0.0 }))
}

fn subspace_params(p: &EstimatorParams) -> SubspaceParams {
    p.subspace.clone().unwrap_or_default()
}

/// Bounded-degree form of the configured estimator, for the reduction.
fn bounded(spec: &RunSpec, d: usize) -> Result<Box<dyn BoundedDegreeEstimator>> {
    let p = &spec.cfg.estimator.params;
    let (k, kmeans, noise) = (spec.sbm.k, p.kmeans(), spec.noise);
    Ok(match spec.cfg.estimator.id.as_str() {
        "ef" => Box::new(EfBase { k, d, kmeans, noise }),
        "deflation" => Box::new(DeflationBase { k, d, kmeans, noise }),
        "tc" => {
            let (b11, b12) = convex_blocks(p, spec.sbm);
            Box::new(TcBase { b11, b12, d, solver: p.solver.unwrap_or_default(), noise })
        }
        "me" => Box::new(MeBase { k, d, iterations: p.iterations, kmeans, noise }),
        "se" => Box::new(se_base(spec, d)),
        id => return Err(Error::InvalidInput(format!("{id} has no bounded-degree form"))),
    })
}

fn se_base(spec: &RunSpec, d: usize) -> SeBase {
    let p = &spec.cfg.estimator.params;
    SeBase {
        k: spec.sbm.k,
        d,
        zeta: p.zeta.unwrap_or(0.1),
        params: subspace_params(p),
        kmeans: p.kmeans(),
        noise: spec.noise,
    }
}

/// The configured estimator without reduction or boosting.
fn direct(spec: &RunSpec, g: &Graph, rng: &mut SeedRng) -> Result<EstimatorOutput> {
    let p = &spec.cfg.estimator.params;
    let (k, kmeans, noise) = (spec.sbm.k, p.kmeans(), spec.noise);
    let (eps, delta) = (spec.eps, spec.delta);
    match spec.cfg.estimator.id.as_str() {
        "ef" => ef_spectral(g, k, eps, &kmeans, noise, rng),
        "pca" => private_pca_lipschitz(g, need_degree(spec)?, eps, &kmeans, noise, rng),
        "deflation" => {
            let ext = p.extension.unwrap_or(true);
            eigvec_deflation_cluster(g, k, need_degree(spec)?, eps, ext, &kmeans, noise, rng)
        }
        "tc" => {
            let (b11, b12) = convex_blocks(p, spec.sbm);
            two_community_convex(g, b11, b12, eps, delta, p.solver.unwrap_or_default(), noise, rng)
        }
        "me" => matrix_estimation(g, k, eps, delta, &kmeans, p.iterations, noise, rng),
        "se" => subspace_estimation(g, k, eps, delta, p.zeta.unwrap_or(0.1), &subspace_params(p), &kmeans, noise, rng),
        id => Err(Error::InvalidInput(format!("unknown estimator {id}"))),
    }
}

/// One unweighted run, optionally under the reduction; no boosting.
fn single(spec: &RunSpec, g: &Graph, rng: &mut SeedRng) -> Result<EstimatorOutput> {
    match spec.cfg.reduction {
        None => direct(spec, g, rng),
        Some(r) => {
            let d = need_degree(spec)?;
            let base = bounded(spec, d)?;
            let rc = ReductionConfig {
                d,
                eps1: r.eps1,
                delta1: r.delta1,
                eps2: spec.eps,
                delta2: spec.delta,
                noise: spec.noise,
                lhat_override: None,
            };
            Ok(reduce_to_node_private(g, base.as_ref(), &rc, rng)?.output)
        }
    }
}

/// Runs the configured pipeline on one graph.
pub fn run_estimator(spec: &RunSpec, g: &TrialGraph, rng: &mut SeedRng) -> Result<EstimatorOutput> {
    match g {
        TrialGraph::Plain(g) => match spec.cfg.boost {
            None => single(spec, g, rng),
            Some(b) => {
                let bc = BoostConfig { t: b.t, xi: b.xi, k: spec.sbm.k };
                let base = |h: &Graph, r: &mut SeedRng| single(spec, h, r);
                graph_boost(g, &bc, &base, rng)
            }
        },
        TrialGraph::Weighted(w) => {
            if spec.cfg.estimator.id != "se" {
                return Err(Error::InvalidInput("weighted graphs need the se estimator".into()));
            }
            let p = &spec.cfg.estimator.params;
            match spec.cfg.reduction {
                None => subspace_estimation_matrix(
                    &w.matrix(),
                    spec.sbm.k,
                    spec.eps,
                    spec.delta,
                    p.zeta.unwrap_or(0.1),
                    &subspace_params(p),
                    &p.kmeans(),
                    spec.noise,
                    rng,
                ),
                Some(r) => {
                    let d = need_degree(spec)?;
                    let rc = ReductionConfig {
                        d,
                        eps1: r.eps1,
                        delta1: r.delta1,
                        eps2: spec.eps,
                        delta2: spec.delta,
                        noise: spec.noise,
                        lhat_override: None,
                    };
                    Ok(reduce_weighted_to_node_private(w, &se_base(spec, d), &rc, rng)?.output)
                }
            }
        }
    }
}
