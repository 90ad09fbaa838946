//! Smooth degree truncation and its privately released sensitivity bound.

use serde::{Deserialize, Serialize};

use super::simplex::{solve_lp, LpProblem, Relation, Sense};
use crate::error::{Error, Result};
use crate::graph::{Graph, WeightedGraph};
use crate::mechanisms::noise::laplace;
use crate::mechanisms::NoiseMode;
use crate::rng::SeedRng;

/// Output of the truncation step together with the released bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationCertificate {
    pub truncated: Graph,
    pub d_t: f64,
    pub l_hat: f64,
    /// `(ε₁, δ₁)` spent on releasing `l_hat`.
    pub budget_used: (f64, f64),
}

/// Truncated graph, `d_T`, and the LP node weights `x*` (empty when the LP
/// was skipped because the degree bound already held).
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationDetail {
    pub graph: Graph,
    pub d_t: f64,
    pub x: Vec<f64>,
    pub lp_iterations: usize,
}

/// Solves `min Σ x_u` subject to `w_uv + x_u + x_v ≥ 1` on every edge,
/// `Σ_v w_uv ≤ D` at every node, `0 ≤ w ≤ 1`, `x ≥ 0`, then deletes edge
/// `(u, v)`, `u < v`, when `x_u > 1/4` or `x_v ≥ 1/4`.
pub fn degree_truncate_detail(g: &Graph, d: usize) -> Result<TruncationDetail> {
    if d == 0 {
        return Err(Error::InvalidInput("D must be at least 1".into()));
    }
    if g.max_degree() <= d {
        // x = 0 is feasible with w = A, so the optimum is 0 and nothing is removed.
        return Ok(TruncationDetail { graph: g.clone(), d_t: 0.0, x: Vec::new(), lp_iterations: 0 });
    }
    let n = g.n();
    let edges = g.edges();
    let ne = edges.len();
    // Variables: x_0..x_{n-1}, then one w per edge. Pairs that are not edges
    // force w = 0 and their rows hold trivially, so they are omitted.
    let mut lp = LpProblem::new(n + ne, Sense::Minimize);
    let mut hint = vec![0.0; n + ne];
    for u in 0..n {
        lp.objective[u] = 1.0;
        // x ≤ 1 never cuts off the optimal value and gives a feasible start.
        lp.bounds[u] = (0.0, 1.0);
        hint[u] = 1.0;
    }
    let mut incident: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        let w = n + e;
        lp.bounds[w] = (0.0, 1.0);
        lp.add_constraint(vec![(w, 1.0), (u, 1.0), (v, 1.0)], Relation::Ge, 1.0);
        incident[u].push((w, 1.0));
        incident[v].push((w, 1.0));
    }
    for row in incident.into_iter().filter(|r| !r.is_empty()) {
        lp.add_constraint(row, Relation::Le, d as f64);
    }
    lp.hint = Some(hint);
    let sol = solve_lp(&lp)?.into_optimal()?;
    let x: Vec<f64> = sol.x[..n].to_vec();
    let mut out = g.clone();
    for &(u, v) in &edges {
        if x[u] > 0.25 || x[v] >= 0.25 {
            out.remove_edge(u, v);
        }
    }
    let d_t = 4.0 * x.iter().sum::<f64>();
    Ok(TruncationDetail { graph: out, d_t, x, lp_iterations: sol.iterations })
}

/// `(T_D(G), d_T(G))`.
pub fn degree_truncate(g: &Graph, d: usize) -> Result<(Graph, f64)> {
    let t = degree_truncate_detail(g, d)?;
    Ok((t.graph, t.d_t))
}

/// Binarizes, truncates, and restores the original weights on surviving edges.
pub fn weighted_degree_truncate(g: &WeightedGraph, d: usize) -> Result<(WeightedGraph, f64)> {
    let (mask, d_t) = degree_truncate(&g.binarize(), d)?;
    Ok((g.masked(&mask), d_t))
}

/// `max{1/2, 5 + 2 d_T + Lap(8/ε₁) + 8 log(1/δ₁)/ε₁}`.
pub fn private_sensitivity_bound(d_t: f64, eps1: f64, delta1: f64, noise: NoiseMode, rng: &mut SeedRng) -> Result<f64> {
    if !(eps1 > 0.0 && eps1.is_finite()) {
        return Err(Error::InvalidInput(format!("eps1={eps1} must be positive and finite")));
    }
    if !(delta1 > 0.0 && delta1 < 1.0) {
        return Err(Error::InvalidInput(format!("delta1={delta1} must lie in (0,1)")));
    }
    let lap = if noise.is_off() { 0.0 } else { laplace(8.0 / eps1, rng)? };
    Ok(sensitivity_bound_value(d_t, eps1, delta1, lap))
}

/// The bound for a given Laplace draw.
pub fn sensitivity_bound_value(d_t: f64, eps1: f64, delta1: f64, lap: f64) -> f64 {
    (5.0 + 2.0 * d_t + lap + 8.0 * (1.0 / delta1).ln() / eps1).max(0.5)
}

/// Runs the truncation and releases `L̂`.
pub fn truncation_certificate(
    g: &Graph,
    d: usize,
    eps1: f64,
    delta1: f64,
    noise: NoiseMode,
    rng: &mut SeedRng,
) -> Result<TruncationCertificate> {
    let (truncated, d_t) = degree_truncate(g, d)?;
    let l_hat = private_sensitivity_bound(d_t, eps1, delta1, noise, rng)?;
    Ok(TruncationCertificate { truncated, d_t, l_hat, budget_used: (eps1, delta1) })
}
