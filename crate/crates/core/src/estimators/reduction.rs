use serde::{Deserialize, Serialize};

use super::convex::{two_community_convex, ConvexSolver};
use super::deflation::eigvec_deflation_cluster;
use super::ef::ef_spectral;
use super::matrix_est::matrix_estimation;
use super::subspace::{subspace_estimation, subspace_estimation_matrix, SubspaceParams};
use super::{BoundedDegreeEstimator, Diagnostics, EstimatorOutput, PrivacyForm};
use crate::accounting::{
    group_dp, group_zcdp, reduction_budgets, reduction_total_approx, reduction_total_pure, zcdp_to_dp, BudgetKind,
    PrivacyBudget, Scope,
};
use crate::clustering::KMeansConfig;
use crate::error::{Error, Result};
use crate::graph::{Graph, WeightedGraph};
use crate::lp::{degree_truncate_detail, private_sensitivity_bound, weighted_degree_truncate};
use crate::mechanisms::NoiseMode;
use crate::rng::SeedRng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig {
    pub d: usize,
    pub eps1: f64,
    pub delta1: f64,
    pub eps2: f64,
    pub delta2: f64,
    #[serde(default)]
    pub noise: NoiseMode,
    /// Replaces the released `L̂` (test use only; recorded in diagnostics).
    #[serde(default)]
    pub lhat_override: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionOutput {
    pub l_hat: f64,
    pub d_t: f64,
    /// Maximum degree of `T_D(G)`.
    pub truncated_max_degree: usize,
    /// Budgets `(ε, δ)` handed to the base estimator.
    pub base_budget: (f64, f64),
    pub output: EstimatorOutput,
    /// Node-level guarantee of the whole pair `(L̂, output)`.
    pub total: Option<PrivacyBudget>,
}

fn check_config(cfg: &ReductionConfig) -> Result<()> {
    if cfg.d == 0 {
        return Err(Error::InvalidInput("D must be at least 1".into()));
    }
    if !(cfg.eps2 > 0.0 && cfg.eps2.is_finite()) {
        return Err(Error::InvalidInput(format!("eps2={} must be positive and finite", cfg.eps2)));
    }
    if !(cfg.delta2 >= 0.0 && cfg.delta2 < 1.0) {
        return Err(Error::InvalidInput(format!("delta2={} must lie in [0,1)", cfg.delta2)));
    }
    Ok(())
}

fn release_lhat(cfg: &ReductionConfig, d_t: f64, diag: &mut Diagnostics, rng: &mut SeedRng) -> Result<f64> {
    match cfg.lhat_override {
        Some(l) => {
            diag.note(format!("L_hat fixed at {l}"));
            diag.noise_off = true;
            Ok(l)
        }
        None => private_sensitivity_bound(d_t, cfg.eps1, cfg.delta1, cfg.noise, rng),
    }
}

fn total_budget(form: PrivacyForm, cfg: &ReductionConfig, base: &EstimatorOutput) -> Result<Option<PrivacyBudget>> {
    if cfg.noise.is_off() || cfg.lhat_override.is_some() {
        return Ok(None);
    }
    let Some(b) = &base.budget else { return Ok(None) };
    let (kind, detail) = match form {
        PrivacyForm::Pure => {
            let (e, d) = reduction_total_pure(cfg.eps1, cfg.delta1, cfg.eps2);
            (
                BudgetKind::Approx { eps: e, delta: d },
                format!("eps1={} delta1={} eps2={}", cfg.eps1, cfg.delta1, cfg.eps2),
            )
        }
        PrivacyForm::Approx => {
            let (e, d) = reduction_total_approx(cfg.eps1, cfg.delta1, cfg.eps2, cfg.delta2);
            (
                BudgetKind::Approx { eps: e, delta: d.min(1.0) },
                format!("eps1={} delta1={} eps2={} delta2={}", cfg.eps1, cfg.delta1, cfg.eps2, cfg.delta2),
            )
        }
    };
    Ok(Some(b.derive(kind, Scope::Node, "truncation_reduction", detail)))
}

/// Truncates `g` to `T_D(g)`, releases `L̂`, and runs `base` on the truncated
/// graph at `(ε₂/L̂, δ₂/L̂)`.
pub fn reduce_to_node_private(
    g: &Graph,
    base: &dyn BoundedDegreeEstimator,
    cfg: &ReductionConfig,
    rng: &mut SeedRng,
) -> Result<ReductionOutput> {
    check_config(cfg)?;
    if base.degree() != cfg.d {
        return Err(Error::InvalidInput(format!(
            "base estimator is private on degree {} graphs, reduction uses D={}",
            base.degree(),
            cfg.d
        )));
    }
    let mut diag = Diagnostics::new(cfg.noise);
    let tr = degree_truncate_detail(g, cfg.d)?;
    let l_hat = release_lhat(cfg, tr.d_t, &mut diag, rng)?;
    let (e, d) = reduction_budgets(cfg.eps2, cfg.delta2, l_hat)?;
    let mut output = base.run(&tr.graph, e, d, rng)?;
    let total = total_budget(base.form(), cfg, &output)?;
    diag.set("l_hat", l_hat);
    diag.set("d_t", tr.d_t);
    diag.set("lp_iterations", tr.lp_iterations as f64);
    diag.absorb(&format!("{}.", base.name()), &output.diagnostics);
    output.diagnostics = diag;
    output.budget = total.clone();
    Ok(ReductionOutput {
        l_hat,
        d_t: tr.d_t,
        truncated_max_degree: tr.graph.max_degree(),
        base_budget: (e, d),
        output,
        total,
    })
}

/// Weighted variant: truncation acts on the support, weights survive on kept
/// edges, and the base sees `(ε₂/(L̂+1), δ₂/(L̂+1))` since a node change can
/// also alter weights on its own edges.
pub fn reduce_weighted_to_node_private(
    g: &WeightedGraph,
    base: &SeBase,
    cfg: &ReductionConfig,
    rng: &mut SeedRng,
) -> Result<ReductionOutput> {
    check_config(cfg)?;
    let mut diag = Diagnostics::new(cfg.noise);
    let (tg, d_t) = weighted_degree_truncate(g, cfg.d)?;
    let l_hat = release_lhat(cfg, d_t, &mut diag, rng)?;
    let (e, d) = reduction_budgets(cfg.eps2, cfg.delta2, l_hat + 1.0)?;
    let mut output = base.run_weighted(&tg, e, d, rng)?;
    let total = total_budget(PrivacyForm::Approx, cfg, &output)?;
    diag.set("l_hat", l_hat);
    diag.set("d_t", d_t);
    diag.absorb("se.", &output.diagnostics);
    output.diagnostics = diag;
    output.budget = total.clone();
    Ok(ReductionOutput {
        l_hat,
        d_t,
        truncated_max_degree: tg.binarize().max_degree(),
        base_budget: (e, d),
        output,
        total,
    })
}

/// Edge-private zCDP output lifted to `(·, δ)` node privacy on 𝒢_{n,2D}:
/// group privacy over `group` edges, then conversion.
fn lift_zcdp(out: &mut EstimatorOutput, group: usize, d: usize, delta: f64) -> Result<()> {
    if let Some(b) = &out.budget {
        let grouped = group_zcdp(b, group, Scope::BoundedNode { max_degree: 2 * d })?;
        out.budget = Some(zcdp_to_dp(&grouped, delta)?);
    }
    Ok(())
}

/// Edge-flip spectral clustering run at `ε/(4D)`, which is `(ε, 0)` node
/// private on graphs of degree at most `2D`.
#[derive(Clone, Debug)]
pub struct EfBase {
    pub k: usize,
    pub d: usize,
    pub kmeans: KMeansConfig,
    pub noise: NoiseMode,
}

impl BoundedDegreeEstimator for EfBase {
    fn name(&self) -> &str {
        "ef"
    }
    fn form(&self) -> PrivacyForm {
        PrivacyForm::Pure
    }
    fn degree(&self) -> usize {
        self.d
    }
    fn run(&self, g: &Graph, eps: f64, _delta: f64, rng: &mut SeedRng) -> Result<EstimatorOutput> {
        let group = 4 * self.d;
        let mut out = ef_spectral(g, self.k, eps / group as f64, &self.kmeans, self.noise, rng)?;
        if let Some(b) = &out.budget {
            out.budget = Some(group_dp(b, group, Scope::BoundedNode { max_degree: 2 * self.d })?);
        }
        Ok(out)
    }
}

/// Eigenvector deflation without the extension, each draw at `ε/(2k)`.
#[derive(Clone, Debug)]
pub struct DeflationBase {
    pub k: usize,
    pub d: usize,
    pub kmeans: KMeansConfig,
    pub noise: NoiseMode,
}

impl BoundedDegreeEstimator for DeflationBase {
    fn name(&self) -> &str {
        "deflation"
    }
    fn form(&self) -> PrivacyForm {
        PrivacyForm::Pure
    }
    fn degree(&self) -> usize {
        self.d
    }
    fn run(&self, g: &Graph, eps: f64, _delta: f64, rng: &mut SeedRng) -> Result<EstimatorOutput> {
        let per_draw = eps / (2.0 * self.k as f64);
        eigvec_deflation_cluster(g, self.k, self.d, per_draw, false, &self.kmeans, self.noise, rng)
    }
}

/// Convex two-community recovery at edge budget `ε/(4D)`.
#[derive(Clone, Debug)]
pub struct TcBase {
    pub b11: f64,
    pub b12: f64,
    pub d: usize,
    pub solver: ConvexSolver,
    pub noise: NoiseMode,
}

impl BoundedDegreeEstimator for TcBase {
    fn name(&self) -> &str {
        "tc"
    }
    fn form(&self) -> PrivacyForm {
        PrivacyForm::Approx
    }
    fn degree(&self) -> usize {
        self.d
    }
    fn run(&self, g: &Graph, eps: f64, delta: f64, rng: &mut SeedRng) -> Result<EstimatorOutput> {
        let group = 4 * self.d;
        let mut out =
            two_community_convex(g, self.b11, self.b12, eps / group as f64, delta, self.solver, self.noise, rng)?;
        lift_zcdp(&mut out, group, self.d, delta)?;
        Ok(out)
    }
}

/// Noisy-power-method clustering at edge budget `ε/(4D)`.
#[derive(Clone, Debug)]
pub struct MeBase {
    pub k: usize,
    pub d: usize,
    pub iterations: Option<usize>,
    pub kmeans: KMeansConfig,
    pub noise: NoiseMode,
}

impl BoundedDegreeEstimator for MeBase {
    fn name(&self) -> &str {
        "me"
    }
    fn form(&self) -> PrivacyForm {
        PrivacyForm::Approx
    }
    fn degree(&self) -> usize {
        self.d
    }
    fn run(&self, g: &Graph, eps: f64, delta: f64, rng: &mut SeedRng) -> Result<EstimatorOutput> {
        let group = 4 * self.d;
        let mut out =
            matrix_estimation(g, self.k, eps / group as f64, delta, &self.kmeans, self.iterations, self.noise, rng)?;
        lift_zcdp(&mut out, group, self.d, delta)?;
        Ok(out)
    }
}

/// Subspace-estimation clustering at edge budget `ε/(5D)`.
#[derive(Clone, Debug)]
pub struct SeBase {
    pub k: usize,
    pub d: usize,
    pub zeta: f64,
    pub params: SubspaceParams,
    pub kmeans: KMeansConfig,
    pub noise: NoiseMode,
}

impl SeBase {
    fn group(&self) -> usize {
        5 * self.d
    }

    pub fn run_weighted(&self, g: &WeightedGraph, eps: f64, delta: f64, rng: &mut SeedRng) -> Result<EstimatorOutput> {
        let e = eps / self.group() as f64;
        let mut out = subspace_estimation_matrix(
            &g.matrix(),
            self.k,
            e,
            delta,
            self.zeta,
            &self.params,
            &self.kmeans,
            self.noise,
            rng,
        )?;
        lift_zcdp(&mut out, self.group(), self.d, delta)?;
        Ok(out)
    }
}

impl BoundedDegreeEstimator for SeBase {
    fn name(&self) -> &str {
        "se"
    }
    fn form(&self) -> PrivacyForm {
        PrivacyForm::Approx
    }
    fn degree(&self) -> usize {
        self.d
    }
    fn run(&self, g: &Graph, eps: f64, delta: f64, rng: &mut SeedRng) -> Result<EstimatorOutput> {
        let e = eps / self.group() as f64;
        let mut out = subspace_estimation(g, self.k, e, delta, self.zeta, &self.params, &self.kmeans, self.noise, rng)?;
        lift_zcdp(&mut out, self.group(), self.d, delta)?;
        Ok(out)
    }
}
