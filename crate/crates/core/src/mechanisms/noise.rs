use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::SeedRng;

/// Laplace draw with the given scale, by inverse CDF on a 64-bit uniform.
pub fn laplace(scale: f64, rng: &mut SeedRng) -> Result<f64> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidInput(format!("Laplace scale {scale} must be positive and finite")));
    }
    Ok(laplace_unchecked(scale, rng))
}

pub(crate) fn laplace_unchecked(scale: f64, rng: &mut SeedRng) -> f64 {
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        if u > -0.5 {
            return -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln();
        }
    }
}

/// `dim` i.i.d. `N(0, σ²)` coordinates; `σ = 0` yields the zero vector.
pub fn gaussian_vec(dim: usize, sigma: f64, rng: &mut SeedRng) -> Result<Vec<f64>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidInput(format!("Gaussian sigma {sigma} must be nonnegative and finite")));
    }
    if sigma == 0.0 {
        return Ok(vec![0.0; dim]);
    }
    Ok((0..dim).map(|_| sigma * std_normal(rng)).collect::<Vec<f64>>())
}

#[inline]
pub(crate) fn std_normal(rng: &mut SeedRng) -> f64 {
    StandardNormal.sample(rng)
}
