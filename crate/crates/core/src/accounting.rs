//! Privacy budget algebra with an audit trail.
//!
//! Every budget carries the chain of rules that produced it, so a pipeline's
//! final guarantee can be replayed step by step from the logs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which neighboring relation a guarantee is stated for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Edge,
    Node,
    /// Node privacy restricted to graphs of maximum degree at most `max_degree`.
    BoundedNode {
        max_degree: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BudgetKind {
    Pure { eps: f64 },
    Approx { eps: f64, delta: f64 },
    Zcdp { rho: f64 },
}

impl BudgetKind {
    /// `(ε, δ)` view of a DP budget; `None` for zCDP.
    pub fn eps_delta(&self) -> Option<(f64, f64)> {
        match *self {
            BudgetKind::Pure { eps } => Some((eps, 0.0)),
            BudgetKind::Approx { eps, delta } => Some((eps, delta)),
            BudgetKind::Zcdp { .. } => None,
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match *self {
            BudgetKind::Zcdp { rho } => Some(rho),
            _ => None,
        }
    }
}

/// One step of a budget derivation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceStep {
    /// Rule identifier, e.g. `zcdp_composition` or `group_dp`.
    pub rule: String,
    /// Free-form parameters of the rule application.
    pub detail: String,
    pub result: BudgetKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub kind: BudgetKind,
    pub scope: Scope,
    pub chain: Vec<ProvenanceStep>,
}

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidInput(format!("{name}={x} must be nonnegative")));
    }
    Ok(())
}

fn check_prob(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("{name}={x} must lie in [0,1]")));
    }
    Ok(())
}

impl PrivacyBudget {
    fn origin(kind: BudgetKind, scope: Scope, rule: &str, detail: String) -> Self {
        Self { kind, scope, chain: vec![ProvenanceStep { rule: rule.into(), detail, result: kind }] }
    }

    pub fn pure(eps: f64, scope: Scope, source: &str) -> Result<Self> {
        check_nonneg("eps", eps)?;
        Ok(Self::origin(BudgetKind::Pure { eps }, scope, source, format!("eps={eps}")))
    }

    pub fn approx(eps: f64, delta: f64, scope: Scope, source: &str) -> Result<Self> {
        check_nonneg("eps", eps)?;
        check_prob("delta", delta)?;
        Ok(Self::origin(BudgetKind::Approx { eps, delta }, scope, source, format!("eps={eps} delta={delta}")))
    }

    pub fn zcdp(rho: f64, scope: Scope, source: &str) -> Result<Self> {
        check_nonneg("rho", rho)?;
        Ok(Self::origin(BudgetKind::Zcdp { rho }, scope, source, format!("rho={rho}")))
    }

    /// Appends a derivation step and returns the new budget.
    pub fn derive(&self, kind: BudgetKind, scope: Scope, rule: &str, detail: String) -> Self {
        let mut chain = self.chain.clone();
        chain.push(ProvenanceStep { rule: rule.into(), detail, result: kind });
        Self { kind, scope, chain }
    }

    pub fn eps_delta(&self) -> Option<(f64, f64)> {
        self.kind.eps_delta()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("budget serializes")
    }
}

/// `ρ = Σ ρ_i` for zCDP budgets.
pub fn compose_zcdp_values(rhos: &[f64]) -> f64 {
    rhos.iter().sum()
}

/// `T² ρ`.
pub fn group_zcdp_value(rho: f64, t: usize) -> f64 {
    (t * t) as f64 * rho
}

/// `ε = ρ + √(4ρ log(1/δ))`.
pub fn zcdp_to_dp_value(rho: f64, delta: f64) -> f64 {
    rho + (4.0 * rho * (1.0 / delta).ln()).sqrt()
}

/// `(Tε, Tδ e^{(T−1)ε})`.
pub fn group_dp_values(eps: f64, delta: f64, t: usize) -> (f64, f64) {
    let tf = t as f64;
    (tf * eps, tf * delta * ((tf - 1.0) * eps).exp())
}

/// `ε̃ = Tε(e^ε − 1) + ε√(2T log(1/slack))`, `δ̃ = min(Tδ + slack, 1)`.
pub fn adaptive_compose_values(eps: f64, delta: f64, t: usize, slack: f64) -> (f64, f64) {
    let tf = t as f64;
    let e = tf * eps * eps.exp_m1() + eps * (2.0 * tf * (1.0 / slack).ln()).sqrt();
    (e, (tf * delta + slack).min(1.0))
}

pub fn compose_zcdp(budgets: &[PrivacyBudget]) -> Result<PrivacyBudget> {
    let first = budgets.first().ok_or_else(|| Error::InvalidInput("nothing to compose".into()))?;
    let mut rhos = Vec::with_capacity(budgets.len());
    for b in budgets {
        let rho = b.kind.rho().ok_or_else(|| Error::InvalidInput("zCDP composition needs zCDP budgets".into()))?;
        if b.scope != first.scope {
            return Err(Error::InvalidInput("cannot compose budgets with different scopes".into()));
        }
        rhos.push(rho);
    }
    let rho = compose_zcdp_values(&rhos);
    let mut chain = Vec::new();
    for b in budgets {
        chain.extend(b.chain.iter().cloned());
    }
    let kind = BudgetKind::Zcdp { rho };
    chain.push(ProvenanceStep { rule: "zcdp_composition".into(), detail: format!("rhos={rhos:?}"), result: kind });
    Ok(PrivacyBudget { kind, scope: first.scope, chain })
}

/// Group privacy for zCDP. `scope` is the relation of the resulting guarantee.
pub fn group_zcdp(b: &PrivacyBudget, t: usize, scope: Scope) -> Result<PrivacyBudget> {
    if t == 0 {
        return Err(Error::InvalidInput("group size must be positive".into()));
    }
    let rho = b.kind.rho().ok_or_else(|| Error::InvalidInput("group_zcdp needs a zCDP budget".into()))?;
    let r = group_zcdp_value(rho, t);
    Ok(b.derive(BudgetKind::Zcdp { rho: r }, scope, "zcdp_group_privacy", format!("T={t}")))
}

pub fn zcdp_to_dp(b: &PrivacyBudget, delta: f64) -> Result<PrivacyBudget> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!("delta={delta} must lie in (0,1)")));
    }
    let rho = b.kind.rho().ok_or_else(|| Error::InvalidInput("zcdp_to_dp needs a zCDP budget".into()))?;
    let eps = zcdp_to_dp_value(rho, delta);
    Ok(b.derive(BudgetKind::Approx { eps, delta }, b.scope, "zcdp_to_dp", format!("delta={delta}")))
}

pub fn group_dp(b: &PrivacyBudget, t: usize, scope: Scope) -> Result<PrivacyBudget> {
    if t == 0 {
        return Err(Error::InvalidInput("group size must be positive".into()));
    }
    let (eps, delta) = b.eps_delta().ok_or_else(|| Error::InvalidInput("group_dp needs a DP budget".into()))?;
    let (e, d) = group_dp_values(eps, delta, t);
    let kind = if d == 0.0 { BudgetKind::Pure { eps: e } } else { BudgetKind::Approx { eps: e, delta: d.min(1.0) } };
    Ok(b.derive(kind, scope, "group_dp", format!("T={t}")))
}

/// Advanced composition of `T` adaptively chosen `(ε, δ)` mechanisms.
pub fn adaptive_compose_dp(eps: f64, delta: f64, t: usize, slack: f64, scope: Scope) -> Result<PrivacyBudget> {
    check_nonneg("eps", eps)?;
    check_prob("delta", delta)?;
    if t == 0 {
        return Err(Error::InvalidInput("T must be positive".into()));
    }
    if !(slack > 0.0 && slack <= 1.0) {
        return Err(Error::InvalidInput(format!("slack={slack} must lie in (0,1]")));
    }
    let (e, d) = adaptive_compose_values(eps, delta, t, slack);
    let base = PrivacyBudget::approx(eps, delta, scope, "mechanism")?;
    Ok(base.derive(
        BudgetKind::Approx { eps: e, delta: d },
        scope,
        "adaptive_composition",
        format!("T={t} slack={slack}"),
    ))
}

/// Per-run budgets handed to the base estimator: `(ε₂/L̂, δ₂/L̂)`.
pub fn reduction_budgets(eps2: f64, delta2: f64, lhat: f64) -> Result<(f64, f64)> {
    if !(lhat >= 0.5) {
        return Err(Error::InvalidInput(format!("L_hat={lhat} must be at least 1/2")));
    }
    Ok((eps2 / lhat, delta2 / lhat))
}

/// Total guarantee of the reduction around a pure `(ε₂, 0)` base:
/// `(ε₁ + ε₂, e^{ε₁} δ₁)`.
pub fn reduction_total_pure(eps1: f64, delta1: f64, eps2: f64) -> (f64, f64) {
    (eps1 + eps2, eps1.exp() * delta1)
}

/// Total guarantee around an approximate base: `(ε₁ + 2ε₂, e^{ε₁}(δ₂e^{2ε₂} + δ₁))`.
pub fn reduction_total_approx(eps1: f64, delta1: f64, eps2: f64, delta2: f64) -> (f64, f64) {
    (eps1 + 2.0 * eps2, eps1.exp() * (delta2 * (2.0 * eps2).exp() + delta1))
}
