use super::{Diagnostics, EstimatorOutput};
use crate::accounting::{PrivacyBudget, Scope};
use crate::clustering::{spectral_cluster, KMeansConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mechanisms::{debias_flip, edge_flip, flip_probability, NoiseMode};
use crate::rng::SeedRng;

/// Randomized response on the edges, debiasing, then spectral clustering on
/// the `k` leading eigenvectors by absolute value. `(ε, 0)` edge private.
pub fn ef_spectral(
    g: &Graph,
    k: usize,
    eps: f64,
    cfg: &KMeansConfig,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<EstimatorOutput> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidInput(format!("eps={eps} must be nonnegative")));
    }
    let eff = if noise.is_off() { f64::INFINITY } else { eps };
    let flipped = edge_flip(g, eff, rng);
    let m = debias_flip(&flipped.adjacency::<f64>(), eff);
    let labels = spectral_cluster(&m, k, cfg, rng)?;
    let mut diag = Diagnostics::new(noise);
    diag.set("flip_probability", flip_probability(eff));
    diag.set("eps_edge", eps);
    let budget =
        if noise.is_off() { None } else { Some(PrivacyBudget::pure(eps, Scope::Edge, "randomized_response")?) };
    Ok(EstimatorOutput { labels, budget, diagnostics: diag })
}
