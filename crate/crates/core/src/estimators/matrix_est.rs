use super::{Diagnostics, EstimatorOutput};
use crate::accounting::{PrivacyBudget, Scope};
use crate::clustering::{approx_kmeans, KMeansConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{thin_qr, thin_svd, DenseMatrix};
use crate::mechanisms::noise::std_normal;
use crate::mechanisms::NoiseMode;
use crate::rng::SeedRng;

/// Result of noisy subspace iteration. `Â = X_{L−1} Y_Lᵀ` factors as
/// `left · diag(singular_values) · rightᵀ`.
#[derive(Clone, Debug)]
pub struct PpmOutput {
    pub left: DenseMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub right: DenseMatrix<f64>,
    pub iterations: usize,
    pub noise_sd: f64,
}

impl PpmOutput {
    /// The rank-`2k` estimate as a dense matrix.
    pub fn approximation(&self) -> DenseMatrix<f64> {
        let mut ls = self.left.clone();
        for i in 0..ls.rows() {
            for (j, s) in self.singular_values.iter().enumerate() {
                ls[(i, j)] *= *s;
            }
        }
        ls.matmul_t(&self.right)
    }
}

/// Default iteration count `⌈12 log n⌉`.
pub fn default_iterations(n: usize) -> usize {
    (12.0 * (n.max(2) as f64).ln()).ceil() as usize
}

/// `L` rounds of `Y_l = A X_{l−1} + G_l`, `X_l = QR(Y_l).Q` on `n × p` blocks
/// with i.i.d. `N(0, noise_sd²)` entries in `G_l`.
pub fn noisy_power_method(
    a: &DenseMatrix<f64>,
    p: usize,
    iterations: usize,
    noise_sd: f64,
    rng: &mut SeedRng,
) -> Result<PpmOutput> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch("power method needs a square matrix".into()));
    }
    if p == 0 || p > n {
        return Err(Error::InvalidInput(format!("block width {p} must lie in 1..={n}")));
    }
    if iterations == 0 {
        return Err(Error::InvalidInput("need at least one iteration".into()));
    }
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::InvalidInput(format!("noise sd {noise_sd} must be nonnegative and finite")));
    }
    let g0 = DenseMatrix::from_fn(n, p, |_, _| std_normal(rng));
    let mut x = thin_qr(&g0)?.q;
    let mut x_prev = x.clone();
    let mut y = x.clone();
    for _ in 0..iterations {
        y = a.matmul(&x);
        if noise_sd > 0.0 {
            for v in y.as_mut_slice() {
                *v += noise_sd * std_normal(rng);
            }
        }
        x_prev = x;
        x = thin_qr(&y)?.q;
    }
    // X_{L−1} Y_Lᵀ = (X_{L−1} V) S Uᵀ for Y_L = U S Vᵀ, and X_{L−1} V is orthonormal.
    let svd = thin_svd(&y);
    let left = x_prev.matmul(&svd.v);
    Ok(PpmOutput { left, singular_values: svd.s, right: svd.u, iterations, noise_sd })
}

/// Spectral clustering on the top `k` left singular vectors of the
/// noisy-power-method estimate of `A`. `ε²/(4 log(1/δ))`-zCDP for edges.
#[allow(clippy::too_many_arguments)]
pub fn matrix_estimation(
    g: &Graph,
    k: usize,
    eps: f64,
    delta: f64,
    cfg: &KMeansConfig,
    iterations: Option<usize>,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<EstimatorOutput> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta={delta} must lie in (0,1)")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("eps={eps} must be positive and finite")));
    }
    let n = g.n();
    if 2 * k > n {
        return Err(Error::InvalidInput(format!("need n ≥ 2k, got n={n}, k={k}")));
    }
    let l = iterations.unwrap_or_else(|| default_iterations(n));
    let sd = if noise.is_off() { 0.0 } else { (4.0 * k as f64 * l as f64 * (1.0 / delta).ln()).sqrt() / eps };
    let a = g.adjacency::<f64>();
    let ppm = noisy_power_method(&a, 2 * k, l, sd, rng)?;
    let emb = ppm.left.leading_columns(k);
    let labels = approx_kmeans(&emb, k, cfg, rng)?.membership;
    let mut diag = Diagnostics::new(noise);
    diag.set("iterations", l as f64);
    diag.set("noise_sd", sd);
    let budget = if noise.is_off() {
        None
    } else {
        Some(PrivacyBudget::zcdp(eps * eps / (4.0 * (1.0 / delta).ln()), Scope::Edge, "noisy_power_method")?)
    };
    Ok(EstimatorOutput { labels, budget, diagnostics: diag })
}
