//! Spectral embeddings and k-means.

pub mod kmeans;
pub mod spectral;

pub use crate::linalg::sym_eigs;
pub use kmeans::{approx_kmeans, kmeans_cost, KMeansConfig, KMeansResult};
pub use spectral::{cluster_embedding, spectral_cluster};
