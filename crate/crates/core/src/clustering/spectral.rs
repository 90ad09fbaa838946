use super::kmeans::{approx_kmeans, KMeansConfig};
use crate::error::Result;
use crate::graph::LabelAssignment;
use crate::linalg::{sym_eigs, DenseMatrix};
use crate::rng::SeedRng;
use crate::scalar::Scalar;

/// Embeds with the `k` leading eigenvectors by absolute eigenvalue and
/// clusters the rows.
pub fn spectral_cluster<T: Scalar>(
    m: &DenseMatrix<T>,
    k: usize,
    cfg: &KMeansConfig,
    rng: &mut SeedRng,
) -> Result<LabelAssignment> {
    let (_, u) = sym_eigs(m, k, true)?;
    Ok(approx_kmeans(&u, k, cfg, rng)?.membership)
}

/// Clusters the rows of an existing embedding.
pub fn cluster_embedding<T: Scalar>(
    u: &DenseMatrix<T>,
    k: usize,
    cfg: &KMeansConfig,
    rng: &mut SeedRng,
) -> Result<LabelAssignment> {
    Ok(approx_kmeans(u, k, cfg, rng)?.membership)
}
