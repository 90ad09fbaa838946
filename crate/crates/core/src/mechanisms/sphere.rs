//! Exact sampling on the unit sphere from densities `∝ exp(κ·score(v))`.
//!
//! Quadratic scores are handled by rejection from an angular central Gaussian
//! envelope. Writing the target as `exp(−xᵀAx)` with `A = κ(λ_max I − M) ⪰ 0`,
//! the envelope has `Ω = I + 2A/b` where `b` solves `Σ 1/(b + 2λ_i) = 1`; the
//! density ratio is then bounded by `exp(−(n−b)/2)(n/b)^{n/2}`.
//! Proposals are drawn in the eigenbasis of `A`, so a rejected trial costs O(n).

use serde::{Deserialize, Serialize};

use super::noise::std_normal;
use crate::error::{Error, Result};
use crate::linalg::{leading, sym_eigen, DenseMatrix};
use crate::rng::SeedRng;
use rand::Rng;

/// Default per-sample trial cap.
pub const DEFAULT_TRIAL_CAP: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereSample {
    pub v: Vec<f64>,
    /// Number of proposals drawn, including the accepted one.
    pub accepted_after: u64,
}

/// Precomputed envelope for `exp(κ vᵀMv)`.
#[derive(Clone, Debug)]
pub struct BinghamSampler {
    /// Eigenvectors of `M` as columns.
    basis: DenseMatrix<f64>,
    /// Eigenvalues of `A` (nonnegative).
    lambda: Vec<f64>,
    /// Proposal standard deviations in the eigenbasis.
    sd: Vec<f64>,
    b: f64,
    log_bound: f64,
    /// `κ λ_max(M)`, so that `κ vᵀMv = shift − vᵀAv`.
    shift: f64,
    cap: u64,
}

impl BinghamSampler {
    pub fn new(m: &DenseMatrix<f64>, concentration: f64) -> Result<Self> {
        if !(concentration >= 0.0 && concentration.is_finite()) {
            return Err(Error::InvalidInput(format!("concentration {concentration} must be finite and nonnegative")));
        }
        if !m.is_square() {
            return Err(Error::DimensionMismatch("score matrix must be square".into()));
        }
        let n = m.rows();
        if n == 0 {
            return Err(Error::InvalidInput("sphere dimension must be positive".into()));
        }
        let mut ms = m.clone();
        ms.symmetrize_in_place();
        let eig = sym_eigen(&ms)?;
        let lmax = *eig.values.last().expect("nonempty");
        let lambda: Vec<f64> = eig.values.iter().map(|&mu| (concentration * (lmax - mu)).max(0.0)).collect();
        let nf = n as f64;
        let b = solve_b(&lambda, nf);
        let sd = lambda.iter().map(|&l| (1.0 / (1.0 + 2.0 * l / b)).sqrt()).collect();
        let log_bound = -(nf - b) / 2.0 + nf / 2.0 * (nf / b).ln();
        Ok(Self { basis: eig.vectors, lambda, sd, b, log_bound, shift: concentration * lmax, cap: DEFAULT_TRIAL_CAP })
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// `b` parameter of the envelope.
    pub fn envelope_b(&self) -> f64 {
        self.b
    }

    /// Log of the density-ratio bound; `exp(−log_bound)` bounds the
    /// acceptance rate from below only in the well-conditioned case.
    pub fn log_bound(&self) -> f64 {
        self.log_bound
    }

    /// One proposal, returned in eigen-coordinates with its log acceptance
    /// ratio and the value `κ wᵀMw` of the target exponent.
    fn propose(&self, rng: &mut SeedRng) -> (Vec<f64>, f64, f64) {
        let n = self.lambda.len();
        let mut w: Vec<f64> = (0..n).map(|i| self.sd[i] * std_normal(rng)).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in w.iter_mut() {
            *x /= norm;
        }
        let quad: f64 = w.iter().zip(&self.lambda).map(|(x, l)| l * x * x).sum();
        let omega = 1.0 + 2.0 * quad / self.b;
        let log_ratio = -quad + (n as f64) / 2.0 * omega.ln() - self.log_bound;
        (w, log_ratio, self.shift - quad)
    }

    fn to_ambient(&self, w: &[f64]) -> Vec<f64> {
        let mut v = self.basis.matvec(w);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        v
    }

    /// Exact draw from `∝ exp(κ vᵀMv)`.
    pub fn sample(&self, rng: &mut SeedRng) -> Result<SphereSample> {
        self.sample_filtered(rng, |_, _| Ok(0.0))
    }

    /// Draws from `∝ exp(κ vᵀMv + g(v))` for a user term `g ≤ 0`, given as a
    /// closure of `(v, κ vᵀMv)` returning `g(v)`.
    pub fn sample_filtered(
        &self,
        rng: &mut SeedRng,
        mut extra_log: impl FnMut(&[f64], f64) -> Result<f64>,
    ) -> Result<SphereSample> {
        let mut trials = 0u64;
        loop {
            if trials >= self.cap {
                return Err(Error::RejectionCapExceeded { cap: self.cap });
            }
            trials += 1;
            let (w, log_ratio, exponent) = self.propose(rng);
            let u: f64 = rng.random::<f64>();
            if u.ln() >= log_ratio.min(0.0) {
                continue;
            }
            let v = self.to_ambient(&w);
            let g = extra_log(&v, exponent)?;
            if g > 1e-9 {
                return Err(Error::InvalidInput(format!("score exceeded its quadratic upper bound by {g:e}")));
            }
            if g < 0.0 {
                let u2: f64 = rng.random::<f64>();
                if u2.ln() >= g {
                    continue;
                }
            }
            return Ok(SphereSample { v, accepted_after: trials });
        }
    }

    /// Deterministic stand-in used when noise is disabled: the top eigenvector
    /// of `M`.
    pub fn mode(&self) -> Vec<f64> {
        let n = self.lambda.len();
        (0..n).map(|i| self.basis[(i, n - 1)]).collect()
    }
}

/// Largest root of `Σ 1/(b + 2λ_i) = 1` on `(0, n]`, by bisection.
fn solve_b(lambda: &[f64], n: f64) -> f64 {
    let f = |b: f64| lambda.iter().map(|&l| 1.0 / (b + 2.0 * l)).sum::<f64>() - 1.0;
    if f(n) >= 0.0 {
        return n;
    }
    let (mut lo, mut hi) = (0.0f64, n);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Draws `v` with density `∝ exp(κ vᵀMv)` on the unit sphere.
pub fn sample_sphere_exp(m: &DenseMatrix<f64>, concentration: f64, rng: &mut SeedRng) -> Result<SphereSample> {
    BinghamSampler::new(m, concentration)?.sample(rng)
}

/// Draws `v` with density `∝ exp(κ·score(v))`, given `score(v) ≤ vᵀUv + offset`
/// for every unit `v`. A Bingham draw for `U` is accepted with probability
/// `exp(κ(score(v) − vᵀUv − offset))`.
pub fn sample_lipschitz_exp(
    mut score: impl FnMut(&[f64]) -> Result<f64>,
    upper_bound_quadratic: &DenseMatrix<f64>,
    offset: f64,
    concentration: f64,
    rng: &mut SeedRng,
) -> Result<SphereSample> {
    let sampler = BinghamSampler::new(upper_bound_quadratic, concentration)?;
    sampler.sample_filtered(rng, |v, _| {
        let s = score(v)?;
        let bound = upper_bound_quadratic.quad_form(v) + offset;
        Ok(concentration * (s - bound))
    })
}

/// Top eigenvector of a symmetric matrix (used by noise-off runs).
pub fn top_eigenvector(m: &DenseMatrix<f64>) -> Result<Vec<f64>> {
    let eig = sym_eigen(m)?;
    let (_, v) = leading(&eig, 1, false);
    Ok(v.column(0))
}
