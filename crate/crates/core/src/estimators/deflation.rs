use super::{Diagnostics, EstimatorOutput};
use crate::accounting::{PrivacyBudget, Scope};
use crate::clustering::{approx_kmeans, KMeansConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::DenseMatrix;
use crate::lp::LipschitzScorer;
use crate::mechanisms::noise::laplace;
use crate::mechanisms::{top_eigenvector, BinghamSampler, NoiseMode};
use crate::rng::SeedRng;

#[derive(Clone, Debug)]
pub struct DeflationOutput {
    pub vectors: Vec<Vec<f64>>,
    /// Released eigenvalue estimates `σ̂_1, …, σ̂_{k−1}`.
    pub sigmas: Vec<f64>,
    /// `A_k`, the matrix after the last deflation.
    pub final_matrix: DenseMatrix<f64>,
    /// Rejection trials per draw (zero when noise is off).
    pub trials: Vec<u64>,
    pub budget: Option<PrivacyBudget>,
    pub diagnostics: Diagnostics,
}

/// Repeated exponential-mechanism draws with deflation, starting from `a1`.
///
/// Each draw has density `∝ exp(ε/(6D²)·s_i(v))` where `s_i(v) = vᵀA_i v`,
/// or, when `extension` is given, its Lipschitz-extended counterpart
/// `ŝ(v) − vᵀ(Σ σ̂_j v̂_j v̂_jᵀ)v`. Released eigenvalues are
/// `clamp(v̂ᵀA_i v̂, −D², D²) + Lap(2D²/ε)`, capped at `n²` when `cap_n2`.
#[allow(clippy::too_many_arguments)]
pub fn deflate_matrix(
    a1: &DenseMatrix<f64>,
    k: usize,
    d: f64,
    eps: f64,
    cap_n2: bool,
    extension: Option<&LipschitzScorer>,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<DeflationOutput> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if !(d > 0.0) {
        return Err(Error::InvalidInput("D must be positive".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("eps={eps} must be positive and finite")));
    }
    let n = a1.rows();
    let d2 = d * d;
    let kappa = eps / (6.0 * d2);
    let mut diag = Diagnostics::new(noise);
    diag.set("concentration", kappa);
    let mut a = a1.clone();
    let mut vectors = Vec::with_capacity(k);
    let mut sigmas = Vec::with_capacity(k.saturating_sub(1));
    let mut trials = Vec::with_capacity(k);
    for i in 0..k {
        let v = if noise.is_off() {
            trials.push(0);
            top_eigenvector(&a)?
        } else {
            let sampler = BinghamSampler::new(&a, kappa)?;
            let s = match extension {
                Some(sc) if !sc.is_bounded() => sampler.sample_filtered(rng, |v, _| {
                    // ŝ_i(v) − (vᵀA_i v + 𝟏ᵀA²𝟏) = ŝ(v) − s(v) since A_i = A² − deflations.
                    let vm = DenseMatrix::from_vec(n, 1, v.to_vec());
                    Ok((kappa * (sc.score_lp(&vm)? - sc.plain_score(&vm))).min(0.0))
                })?,
                _ => sampler.sample(rng)?,
            };
            trials.push(s.accepted_after);
            s.v
        };
        if i + 1 < k {
            let q = a.quad_form(&v).clamp(-d2, d2);
            let lap = if noise.is_off() { 0.0 } else { laplace(2.0 * d2 / eps, rng)? };
            let mut sigma = q + lap;
            if cap_n2 {
                sigma = sigma.min((n * n) as f64);
            }
            a.rank_one_update(-sigma, &v, &v);
            a.symmetrize_in_place();
            sigmas.push(sigma);
        }
        vectors.push(v);
    }
    let total_trials: u64 = trials.iter().sum();
    diag.set("rejection_trials", total_trials as f64);
    Ok(DeflationOutput { vectors, sigmas, final_matrix: a, trials, budget: None, diagnostics: diag })
}

/// Eigenvector deflation on `A²`. With `use_lipschitz` the draws use the
/// extended score and the `n²` cap, giving `(2kε, 0)` node privacy on all
/// graphs; otherwise the guarantee `(2kε, 0)` holds on graphs of degree at
/// most `2D`.
#[allow(clippy::too_many_arguments)]
pub fn eigvec_deflation(
    g: &Graph,
    k: usize,
    d: usize,
    eps: f64,
    use_lipschitz: bool,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<DeflationOutput> {
    let df = d as f64;
    let scorer = LipschitzScorer::new(g, df)?;
    let a1 = scorer.a_squared().clone();
    let ext = if use_lipschitz { Some(&scorer) } else { None };
    let mut out = deflate_matrix(&a1, k, df, eps, use_lipschitz, ext, noise, rng)?;
    if !noise.is_off() {
        let scope = if use_lipschitz { Scope::Node } else { Scope::BoundedNode { max_degree: 2 * d } };
        let rule = if use_lipschitz { "lipschitz_deflation" } else { "bounded_degree_deflation" };
        out.budget = Some(PrivacyBudget::pure(2.0 * k as f64 * eps, scope, rule)?);
    }
    Ok(out)
}

/// Deflation draws used as a spectral embedding, followed by k-means.
#[allow(clippy::too_many_arguments)]
pub fn eigvec_deflation_cluster(
    g: &Graph,
    k: usize,
    d: usize,
    eps: f64,
    use_lipschitz: bool,
    cfg: &KMeansConfig,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<EstimatorOutput> {
    let out = eigvec_deflation(g, k, d, eps, use_lipschitz, noise, rng)?;
    let emb = DenseMatrix::from_columns(&out.vectors);
    let labels = approx_kmeans(&emb, k, cfg, rng)?.membership;
    let mut diag = out.diagnostics;
    for (i, s) in out.sigmas.iter().enumerate() {
        diag.set(&format!("sigma_hat_{}", i + 1), *s);
    }
    Ok(EstimatorOutput { labels, budget: out.budget, diagnostics: diag })
}
