//! Graph-based boosting of a node-private estimator.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::accounting::{BudgetKind, PrivacyBudget};
use crate::error::{Error, Result};
use crate::estimators::{Diagnostics, Estimator, EstimatorOutput};
use crate::graph::{thin_graph, Graph, LabelAssignment};
use crate::metrics::align;
use crate::rng::{split, SeedRng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    /// Number of thinned copies; odd.
    pub t: usize,
    /// Per-copy loss target, below `1/(8k)`.
    pub xi: f64,
    pub k: usize,
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 || self.t.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("T={} must be odd and positive", self.t)));
        }
        if self.k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        let cap = 1.0 / (8.0 * self.k as f64);
        if !(self.xi > 0.0 && self.xi < cap) {
            return Err(Error::InvalidInput(format!("xi={} must lie in (0, {cap})", self.xi)));
        }
        Ok(())
    }
}

/// Combination step of the booster, with the chosen witness index.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostCombination {
    pub labels: LabelAssignment,
    pub witness: usize,
    /// Indices that were valid witnesses.
    pub candidates: Vec<usize>,
    /// Rows whose vote was tied.
    pub tied_rows: usize,
}

fn estimate_distance(a: &LabelAssignment, b: &LabelAssignment, perm: &[usize]) -> f64 {
    let wrong = a.labels().iter().zip(b.labels()).filter(|(&x, &y)| perm[x] != y).count();
    2.0 * wrong as f64 / a.len() as f64
}

/// Picks a witness `j*` whose estimate is within `2ξ` of at least
/// `(T+1)/2` estimates (itself included), aligns every estimate to it, and
/// takes a per-node majority vote.
pub fn combine_estimates(
    estimates: &[LabelAssignment],
    cfg: &BoostConfig,
    rng: &mut SeedRng,
) -> Result<BoostCombination> {
    cfg.validate()?;
    if estimates.len() != cfg.t {
        return Err(Error::DimensionMismatch(format!("expected {} estimates, got {}", cfg.t, estimates.len())));
    }
    let n = estimates[0].len();
    for e in estimates {
        if e.len() != n || e.k() != cfg.k {
            return Err(Error::DimensionMismatch("estimates must share length and k".into()));
        }
    }
    let t = cfg.t;
    let mut close = vec![vec![false; t]; t];
    for i in 0..t {
        close[i][i] = true;
        for j in (i + 1)..t {
            let perm = align(&estimates[j], &estimates[i])?;
            let c = estimate_distance(&estimates[j], &estimates[i], &perm) <= 2.0 * cfg.xi;
            close[i][j] = c;
            close[j][i] = c;
        }
    }
    let need = t.div_ceil(2);
    let candidates: Vec<usize> = (0..t).filter(|&i| close[i].iter().filter(|&&c| c).count() >= need).collect();
    if candidates.is_empty() {
        return Err(Error::NoMajority);
    }
    let witness = candidates[rng.random_range(0..candidates.len())];
    let star = &estimates[witness];
    let perms: Vec<Vec<usize>> = estimates.iter().map(|e| align(e, star)).collect::<Result<_>>()?;
    let mut labels = vec![0usize; n];
    let mut tied_rows = 0;
    let mut votes = vec![0usize; cfg.k];
    for (node, out) in labels.iter_mut().enumerate() {
        votes.iter_mut().for_each(|v| *v = 0);
        for (e, p) in estimates.iter().zip(&perms) {
            votes[p[e.labels()[node]]] += 1;
        }
        let top = *votes.iter().max().expect("k ≥ 1");
        let tied: Vec<usize> = (0..cfg.k).filter(|&c| votes[c] == top).collect();
        *out = if tied.len() == 1 {
            tied[0]
        } else {
            tied_rows += 1;
            let own = star.labels()[node];
            if tied.contains(&own) {
                own
            } else {
                tied[0]
            }
        };
    }
    Ok(BoostCombination { labels: LabelAssignment::new(labels, cfg.k)?, witness, candidates, tied_rows })
}

/// `T` times the per-run budget: `(Tε, Tδ)` or `Tρ`.
pub fn boost_budget(base: &PrivacyBudget, t: usize) -> PrivacyBudget {
    let tf = t as f64;
    let kind = match base.kind {
        BudgetKind::Pure { eps } => BudgetKind::Pure { eps: tf * eps },
        BudgetKind::Approx { eps, delta } => BudgetKind::Approx { eps: tf * eps, delta: (tf * delta).min(1.0) },
        BudgetKind::Zcdp { rho } => BudgetKind::Zcdp { rho: tf * rho },
    };
    base.derive(kind, base.scope, "boosting_composition", format!("T={t}"))
}

/// Thins `g` into `T` subgraphs, runs `base` on each with its own generator,
/// and combines the estimates. A missing witness is reported as
/// [`Error::NoMajority`].
pub fn graph_boost(g: &Graph, cfg: &BoostConfig, base: &dyn Estimator, rng: &mut SeedRng) -> Result<EstimatorOutput> {
    cfg.validate()?;
    let subgraphs = thin_graph(g, cfg.t, cfg.t, rng)?;
    let mut children: Vec<SeedRng> = (0..cfg.t).map(|_| split(rng)).collect();
    let mut diag = Diagnostics::default();
    let mut estimates = Vec::with_capacity(cfg.t);
    let mut budget = None;
    for (j, (h, child)) in subgraphs.iter().zip(children.iter_mut()).enumerate() {
        let out = base.estimate(h, child)?;
        diag.absorb(&format!("run{j}."), &out.diagnostics);
        if j == 0 {
            budget = out.budget.clone();
        }
        estimates.push(out.labels);
    }
    let comb = combine_estimates(&estimates, cfg, rng)?;
    diag.set("witness", comb.witness as f64);
    diag.set("candidates", comb.candidates.len() as f64);
    diag.set("tied_rows", comb.tied_rows as f64);
    Ok(EstimatorOutput { labels: comb.labels, budget: budget.map(|b| boost_budget(&b, cfg.t)), diagnostics: diag })
}

/// HGR maximal correlation of `(Z R₁, Z R₂)` for `Z ~ Ber(q)`, `R_i ~ Ber(p)`.
pub fn hgr_thinned_bernoulli(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidInput(format!("p={p}, q={q} must lie in [0,1]")));
    }
    if p * q >= 1.0 {
        return Err(Error::InvalidInput("need pq < 1".into()));
    }
    Ok(p * (1.0 - q) / (1.0 - p * q))
}
