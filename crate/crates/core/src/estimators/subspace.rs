use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::good_center::good_center;
use super::{Diagnostics, EstimatorOutput};
use crate::accounting::{PrivacyBudget, Scope};
use crate::clustering::{approx_kmeans, KMeansConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{sym_eigs, thin_svd, DenseMatrix};
use crate::mechanisms::noise::std_normal;
use crate::mechanisms::NoiseMode;
use crate::rng::SeedRng;

/// Tunable constants of the subspace-estimation pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SubspaceParams {
    /// `C⁽¹⁾` in the chunk count.
    pub c1: f64,
    /// `C′` in `q = C′k`.
    pub c_prime: f64,
    /// Upper feasibility exponent: the chunk count may not exceed `n^β₀`.
    pub beta0: f64,
    /// Scales the truncation radius.
    pub r_multiplier: f64,
    /// Overrides the chunk count, skipping the feasibility check.
    pub force_t: Option<usize>,
}

impl Default for SubspaceParams {
    fn default() -> Self {
        Self { c1: 1.0, c_prime: 3.0, beta0: 0.75, r_multiplier: 1.0, force_t: None }
    }
}

impl SubspaceParams {
    /// `q = max(1, round(C′k))`.
    pub fn reference_points(&self, k: usize) -> usize {
        ((self.c_prime * k as f64).round() as usize).max(1)
    }

    /// Unrounded chunk count `C⁽¹⁾√(n log n log(1/δ))/ε`.
    pub fn chunk_count_real(&self, n: usize, eps: f64, delta: f64) -> f64 {
        let nf = n as f64;
        self.c1 * (nf * nf.ln() * (1.0 / delta).ln()).sqrt() / eps
    }

    /// Range of ε for which `2 ≤ t ≤ n^β₀`.
    pub fn admissible_eps(&self, n: usize, delta: f64) -> (f64, f64) {
        let nf = n as f64;
        let c = self.c1 * (nf * nf.ln() * (1.0 / delta).ln()).sqrt();
        (c / nf.powf(self.beta0), c / 2.0)
    }
}

/// Truncation radius, before the multiplier.
pub fn truncation_radius(n: usize, eps: f64, delta: f64) -> f64 {
    let nf = n as f64;
    let ln = nf.ln();
    let ld = (1.0 / delta).ln();
    ln.sqrt() / (nf * nf * nf.sqrt())
        + (ld.powf(0.25) / (ln.powf(2.5) * eps.sqrt()) + ld.sqrt() / (ln.powi(5) * eps)) * ln
}

/// Subspace-estimation clustering of an unweighted graph.
#[allow(clippy::too_many_arguments)]
pub fn subspace_estimation(
    g: &Graph,
    k: usize,
    eps: f64,
    delta: f64,
    zeta: f64,
    params: &SubspaceParams,
    cfg: &KMeansConfig,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<EstimatorOutput> {
    subspace_estimation_matrix(&g.adjacency::<f64>(), k, eps, delta, zeta, params, cfg, noise, rng)
}

/// Subspace-estimation clustering of a (possibly weighted) adjacency matrix.
/// `ε²/(4 log(1/δ))`-zCDP with respect to one edge.
#[allow(clippy::too_many_arguments)]
pub fn subspace_estimation_matrix(
    a: &DenseMatrix<f64>,
    k: usize,
    eps: f64,
    delta: f64,
    zeta: f64,
    params: &SubspaceParams,
    cfg: &KMeansConfig,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<EstimatorOutput> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("adjacency must be square".into()));
    }
    let n = a.rows();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k={k} must lie in 1..={n}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta={delta} must lie in (0,1)")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("eps={eps} must be positive and finite")));
    }
    if !(zeta > 0.0 && zeta < 1.0 / 3.0) {
        return Err(Error::InvalidInput(format!("zeta={zeta} must lie in (0,1/3)")));
    }
    if 3.0 * (k as f64) < (2.0 / zeta).ln() {
        return Err(Error::InadmissiblePrivacy(format!("need 3k ≥ log(2/ζ), got k={k}, ζ={zeta}")));
    }
    let mut diag = Diagnostics::new(noise);
    let t_real = params.chunk_count_real(n, eps, delta);
    diag.set("t_real", t_real);
    let t = match params.force_t {
        Some(t) => t,
        None if noise.is_off() => 1,
        None => {
            let upper = (n as f64).powf(params.beta0);
            if !(2.0..=upper).contains(&t_real) {
                let (lo, hi) = params.admissible_eps(n, delta);
                return Err(Error::InadmissiblePrivacy(format!(
                    "chunk count {t_real:.3} outside [2, n^β₀={upper:.3}]; admissible eps range is [{lo:.6}, {hi:.6}]"
                )));
            }
            t_real.floor() as usize
        }
    };
    if t == 0 || t > n {
        return Err(Error::InvalidInput(format!("chunk count {t} must lie in 1..={n}")));
    }
    if n / t < k {
        return Err(Error::InadmissiblePrivacy(format!("chunks of {} rows cannot carry rank {k}", n / t)));
    }
    diag.set("t", t as f64);
    let q = params.reference_points(k);
    diag.set("q", q as f64);

    // Random row split into near-equal chunks.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let (base, extra) = (n / t, n % t);
    let mut bases = Vec::with_capacity(t);
    let mut start = 0;
    for j in 0..t {
        let len = base + usize::from(j < extra);
        let rows = &perm[start..start + len];
        start += len;
        let aj = a.select_rows(rows);
        // Π_j from the top k eigenvectors of A_j A_jᵀ; the row space of Π_j A_j
        // is that of U_jᵀA_j.
        let (_, uj) = sym_eigs(&aj.matmul_t(&aj), k, false)?;
        let reduced = uj.t_matmul(&aj);
        let svd = thin_svd(&reduced.transpose());
        bases.push(svd.u.leading_columns(k));
    }

    let nf = n as f64;
    let ln = nf.ln();
    let r_max = nf.sqrt() * ln;
    let r_min = nf.powi(-3);
    let rho = eps * eps / (32.0 * q as f64 * (1.0 / delta).ln());
    let r = params.r_multiplier * truncation_radius(n, eps, delta);
    let sigma = if noise.is_off() { 0.0 } else { 2.0 * r / (t as f64 * (2.0 * rho).sqrt()) };
    diag.set("rho", rho);
    diag.set("radius", r);
    diag.set("noise_sd", sigma);

    let mut z_hat = DenseMatrix::zeros(n, q);
    let mut truncated = 0usize;
    for i in 0..q {
        let z: Vec<f64> = (0..n).map(|_| std_normal(rng)).collect();
        let projected: Vec<Vec<f64>> = bases
            .iter()
            .map(|b| {
                let c = b.transpose().matvec(&z);
                b.matvec(&c)
            })
            .collect();
        let grid = DenseMatrix::from_fn(t, n, |j, c| (projected[j][c].clamp(-ln, ln) / r_min).round() * r_min);
        let ball = good_center(&grid, &vec![0.0; n], r_max, r_min / 2.0, zeta / q as f64, rho, noise, rng)?;
        let mut mean = vec![0.0; n];
        for p in &projected {
            let d: f64 = p.iter().zip(&ball.center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>().sqrt();
            let shrink = if d > r && !noise.is_off() {
                truncated += 1;
                r / d
            } else {
                1.0
            };
            for (m, (x, c)) in mean.iter_mut().zip(p.iter().zip(&ball.center)) {
                *m += c + shrink * (x - c);
            }
        }
        for (row, m) in mean.iter().enumerate() {
            z_hat[(row, i)] = m / t as f64 + if sigma > 0.0 { sigma * std_normal(rng) } else { 0.0 };
        }
    }
    diag.set("truncated_points", truncated as f64);
    let svd = thin_svd(&z_hat);
    let emb = svd.u.leading_columns(k);
    let labels = approx_kmeans(&emb, k, cfg, rng)?.membership;
    let budget = if noise.is_off() {
        None
    } else {
        Some(PrivacyBudget::zcdp(eps * eps / (4.0 * (1.0 / delta).ln()), Scope::Edge, "subspace_estimation")?)
    };
    Ok(EstimatorOutput { labels, budget, diagnostics: diag })
}
