use super::{Diagnostics, EstimatorOutput};
use crate::accounting::{PrivacyBudget, Scope};
use crate::clustering::{approx_kmeans, KMeansConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{normalize, DenseMatrix};
use crate::lp::LipschitzScorer;
use crate::mechanisms::noise::laplace;
use crate::mechanisms::{top_eigenvector, BinghamSampler, NoiseMode};
use crate::rng::SeedRng;

/// Two-community private PCA through the Lipschitz-extended score.
///
/// Releases `σ̂ = clamp(𝟏ᵀA𝟏/n + Lap(2/ε), 0, n)`, samples `u ∝
/// exp(ε/(6D²)·(ŝ(v) − σ̂²/n·vᵀJv))`, removes the all-ones direction and
/// clusters `[𝟏/√n, u]`. `(2ε, 0)` node private.
pub fn private_pca_lipschitz(
    g: &Graph,
    d: usize,
    eps: f64,
    cfg: &KMeansConfig,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<EstimatorOutput> {
    if d == 0 {
        return Err(Error::InvalidInput("D must be at least 1".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("eps={eps} must be positive and finite")));
    }
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidInput("need at least two nodes".into()));
    }
    let nf = n as f64;
    let mut diag = Diagnostics::new(noise);
    let total_degree = 2.0 * g.edge_count() as f64;
    let lap = if noise.is_off() { 0.0 } else { laplace(2.0 / eps, rng)? };
    let sigma_hat = (total_degree / nf + lap).clamp(0.0, nf);
    diag.set("sigma_hat", sigma_hat);

    let df = d as f64;
    let scorer = LipschitzScorer::new(g, df)?;
    let shift = sigma_hat * sigma_hat / nf;
    // Upper quadratic of the score: A² − (σ̂²/n) J.
    let upper = scorer.a_squared().map(|x| x - shift);
    let kappa = eps / (6.0 * df * df);
    diag.set("concentration", kappa);
    diag.set("bounded_degree", if scorer.is_bounded() { 1.0 } else { 0.0 });

    let u0 = if noise.is_off() {
        top_eigenvector(&upper)?
    } else {
        let sampler = BinghamSampler::new(&upper, kappa)?;
        let sample = if scorer.is_bounded() {
            sampler.sample(rng)?
        } else {
            // The Bingham proposal already carries exp(κ(vᵀA²v − σ̂²/n·vᵀJv));
            // the extension only lowers the score below vᵀA²v + 𝟏ᵀA²𝟏.
            sampler.sample_filtered(rng, |v, _| {
                let vm = DenseMatrix::from_vec(n, 1, v.to_vec());
                Ok(kappa * (scorer.score_lp(&vm)? - scorer.plain_score(&vm)).min(0.0))
            })?
        };
        diag.set("rejection_trials", sample.accepted_after as f64);
        sample.v
    };
    // Project off the all-ones direction.
    let mean = u0.iter().sum::<f64>() / nf;
    let mut u2: Vec<f64> = u0.iter().map(|x| x - mean).collect();
    if normalize(&mut u2) == 0.0 {
        diag.note("sampled vector was parallel to the all-ones vector");
    }
    let inv = 1.0 / nf.sqrt();
    let emb = DenseMatrix::from_fn(n, 2, |i, c| if c == 0 { inv } else { u2[i] });
    let labels = approx_kmeans(&emb, 2, cfg, rng)?.membership;
    let budget =
        if noise.is_off() { None } else { Some(PrivacyBudget::pure(2.0 * eps, Scope::Node, "lipschitz_pca")?) };
    Ok(EstimatorOutput { labels, budget, diagnostics: diag })
}
