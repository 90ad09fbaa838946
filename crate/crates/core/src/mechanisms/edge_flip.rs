use rand::Rng;

use crate::graph::Graph;
use crate::linalg::DenseMatrix;
use crate::rng::SeedRng;

/// Probability that randomized response flips a pair at level `eps`.
pub fn flip_probability(eps: f64) -> f64 {
    if eps == f64::INFINITY {
        0.0
    } else {
        1.0 / (1.0 + eps.exp())
    }
}

/// Symmetric randomized response: every pair `i<j` is flipped independently
/// with probability `1/(1+e^ε)`. `ε = ∞` returns the input.
pub fn edge_flip(g: &Graph, eps: f64, rng: &mut SeedRng) -> Graph {
    assert!(eps >= 0.0, "eps must be nonnegative");
    if eps == f64::INFINITY {
        return g.clone();
    }
    let p = flip_probability(eps);
    let n = g.n();
    let mut out = g.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                out.set_edge(i, j, !g.has_edge(i, j));
            }
        }
    }
    out
}

/// `M − (e^ε + 1)^{-1}(𝟏𝟏ᵀ − I)`; identity at `ε = ∞`.
pub fn debias_flip(m: &DenseMatrix<f64>, eps: f64) -> DenseMatrix<f64> {
    if eps == f64::INFINITY {
        return m.clone();
    }
    let c = flip_probability(eps);
    DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| if i == j { m[(i, j)] } else { m[(i, j)] - c })
}
