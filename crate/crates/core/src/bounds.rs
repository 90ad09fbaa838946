//! Lower bounds on ε for private community recovery.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundQuery {
    pub n: usize,
    pub k: usize,
    /// Loss target.
    pub xi: f64,
    /// Failure probability.
    pub eta: f64,
    pub delta: f64,
}

/// Returned by [`lb_stable`] when the bound is vacuous.
pub const VACUOUS: f64 = f64::NEG_INFINITY;

fn check_two(q: &LowerBoundQuery) -> Result<()> {
    if q.k != 2 {
        return Err(Error::InvalidInput(format!("this bound is stated for k=2, got k={}", q.k)));
    }
    if q.n == 0 || !(q.xi * q.n as f64 >= 1.0 - 1e-12) {
        return Err(Error::InvalidInput(format!("need ξ ≥ 1/n, got ξ={} n={}", q.xi, q.n)));
    }
    if !(q.eta > 0.0) {
        return Err(Error::InvalidInput(format!("eta={} must be positive", q.eta)));
    }
    if !(q.delta >= 0.0) {
        return Err(Error::InvalidInput(format!("delta={} must be nonnegative", q.delta)));
    }
    Ok(())
}

/// Right-hand side of the packing bound evaluated at `eps_guess`:
/// `log(max{1, (1 − η − 4δξn e^{4εξn})((4eξ)^{−ξn}/2 − 1)/η}) / (4ξn)`.
pub fn lb_packing(q: &LowerBoundQuery, eps_guess: f64) -> Result<f64> {
    check_two(q)?;
    let m = q.xi * q.n as f64;
    let lead = 1.0 - q.eta - 4.0 * q.delta * m * (4.0 * eps_guess * m).exp();
    let packing = (4.0 * std::f64::consts::E * q.xi).powf(-m) / 2.0 - 1.0;
    let arg = (lead * packing / q.eta).max(1.0);
    Ok(arg.ln() / (4.0 * m))
}

/// Smallest `ε ≥ 0` with `ε ≥ lb_packing(q, ε)`, to within `1e-6`.
pub fn lb_packing_solve(q: &LowerBoundQuery) -> Result<f64> {
    let f0 = lb_packing(q, 0.0)?;
    if f0 == 0.0 {
        return Ok(0.0);
    }
    // ε − f(ε) is increasing, nonpositive at 0 and nonnegative at f(0).
    let (mut lo, mut hi) = (0.0, f0);
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if mid - lb_packing(q, mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `log(1/(4eξ))/4 + log(1/(8η))/(4ξn)`.
pub fn lb_pure(q: &LowerBoundQuery) -> Result<f64> {
    check_two(q)?;
    if q.eta > 0.5 {
        return Err(Error::InvalidInput(format!("need η ≤ 1/2, got {}", q.eta)));
    }
    let m = q.xi * q.n as f64;
    Ok((1.0 / (4.0 * std::f64::consts::E * q.xi)).ln() / 4.0 + (1.0 / (8.0 * q.eta)).ln() / (4.0 * m))
}

/// `½ log((1 − a)/a) + ½ log(k − 1)` with `a = η + ξ + 2kδ`, or [`VACUOUS`]
/// when `a ≥ 1 − a`.
pub fn lb_stable(q: &LowerBoundQuery) -> Result<f64> {
    if q.k < 2 || q.n < 6 * q.k {
        return Err(Error::InvalidInput(format!("need k ≥ 2 and n/k ≥ 6, got n={} k={}", q.n, q.k)));
    }
    if !(q.xi > 0.0 && q.xi < 1.0 / 3.0) {
        return Err(Error::InvalidInput(format!("xi={} must lie in (0,1/3)", q.xi)));
    }
    if !(q.eta >= 0.0 && q.delta >= 0.0) {
        return Err(Error::InvalidInput("eta and delta must be nonnegative".into()));
    }
    let a = q.eta + q.xi + 2.0 * q.k as f64 * q.delta;
    if a >= 1.0 - a {
        return Ok(VACUOUS);
    }
    Ok(0.5 * ((1.0 - a) / a).ln() + 0.5 * ((q.k - 1) as f64).ln())
}

/// Largest success probability of a symmetric `(ε, δ)` node-private
/// estimator reaching loss `ξ`:
/// `1/((1−ξ)(1 + (k−1)e^{−2ε})) + 2(k−1)δ/(1−ξ)`, clamped to `[0, 1]`.
pub fn stability_success_cap(k: usize, eps: f64, delta: f64, xi: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if !(0.0..1.0 / 3.0).contains(&xi) {
        return Err(Error::InvalidInput(format!("xi={xi} must lie in [0,1/3)")));
    }
    if eps.is_nan() || eps < 0.0 || !(delta >= 0.0) {
        return Err(Error::InvalidInput("eps and delta must be nonnegative".into()));
    }
    let km1 = (k - 1) as f64;
    let v = 1.0 / ((1.0 - xi) * (1.0 + km1 * (-2.0 * eps).exp())) + 2.0 * km1 * delta / (1.0 - xi);
    Ok(v.clamp(0.0, 1.0))
}
