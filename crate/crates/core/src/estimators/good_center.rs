use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::mechanisms::noise::std_normal;
use crate::mechanisms::NoiseMode;
use crate::rng::SeedRng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Stage at which the loop stopped.
    pub stage: usize,
    /// True if the noisy count test fired before the radius floor.
    pub early_exit: bool,
}

impl Ball {
    pub fn contains(&self, p: &[f64]) -> bool {
        dist(p, &self.center) <= self.radius
    }

    pub fn coverage(&self, points: &DenseMatrix<f64>) -> usize {
        (0..points.rows()).filter(|&i| self.contains(points.row(i))).count()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Number of halving stages and the count threshold `Y`.
pub fn good_center_schedule(r_max: f64, r_min: f64, zeta: f64, rho: f64) -> (usize, f64) {
    let s = (r_max / r_min).log2().ceil().max(0.0) as usize + 1;
    let sf = s as f64;
    let y = (2.0 * sf * (4.0 * sf / zeta).ln() / rho).sqrt();
    (s, y)
}

/// Noisy halving search for a ball holding a large share of `points`
/// (one point per row). `ρ`-zCDP with respect to replacing one point.
///
/// The noisy sum is taken over offsets `x − θ^s`, which keeps its
/// sensitivity at `2 r_cur`; the center estimate is `θ^s + (Σ(x − θ^s) + Δ)/n_cur`.
/// With noise off the threshold is one point and no noise is drawn.
#[allow(clippy::too_many_arguments)]
pub fn good_center(
    points: &DenseMatrix<f64>,
    theta0: &[f64],
    r_max: f64,
    r_min: f64,
    zeta: f64,
    rho: f64,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<Ball> {
    let (t, n) = (points.rows(), points.cols());
    if theta0.len() != n {
        return Err(Error::DimensionMismatch(format!("theta0 has length {}, points have dimension {n}", theta0.len())));
    }
    if t == 0 {
        return Err(Error::InvalidInput("GoodCenter needs at least one point".into()));
    }
    if !(r_min > 0.0 && r_max >= r_min && r_max.is_finite()) {
        return Err(Error::InvalidInput(format!("radii must satisfy 0 < r_min ≤ r_max, got {r_min}, {r_max}")));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::InvalidInput(format!("zeta={zeta} must lie in (0,1)")));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidInput(format!("rho={rho} must be positive")));
    }
    let (stages, y_raw) = good_center_schedule(r_max, r_min, zeta, rho);
    let off = noise.is_off();
    let y = if off { 0.0 } else { y_raw };
    let threshold = if off { 1.0 } else { y };
    let sigma = (stages as f64 / rho).sqrt();

    let mut active: Vec<usize> = (0..t).collect();
    let mut theta = theta0.to_vec();
    let mut n_cur = t as f64;
    let mut r_cur = r_max;
    for s in 0..stages {
        active.retain(|&i| dist(points.row(i), &theta) <= r_cur);
        if n_cur < 1.0 {
            // The shrinking count ran out; keep the last ball.
            return Ok(Ball { center: theta, radius: r_cur, stage: s, early_exit: true });
        }
        let mut sum = vec![0.0; n];
        for &i in &active {
            for (acc, (x, c)) in sum.iter_mut().zip(points.row(i).iter().zip(&theta)) {
                *acc += x - c;
            }
        }
        if !off {
            let sd = 2.0 * r_cur * sigma;
            for v in sum.iter_mut() {
                *v += sd * std_normal(rng);
            }
        }
        let mu: Vec<f64> = theta.iter().zip(&sum).map(|(c, v)| c + v / n_cur).collect();
        let outside = active.iter().filter(|&&i| dist(points.row(i), &mu) > r_cur / 2.0).count() as f64;
        let count_noise = if off { 0.0 } else { sigma * std_normal(rng) };
        if outside + count_noise >= threshold {
            return Ok(Ball { center: theta, radius: r_cur, stage: s, early_exit: true });
        }
        r_cur /= 2.0;
        n_cur -= 2.0 * y;
        theta = mu;
    }
    Ok(Ball { center: theta, radius: r_cur, stage: stages, early_exit: false })
}
