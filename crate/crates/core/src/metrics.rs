//! Misclassification losses under the best label permutation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LabelAssignment;

/// Largest community count for which permutations are enumerated.
pub const MAX_PERMUTATION_K: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub overall: f64,
    pub worst_case: f64,
    /// Permutation attaining `overall`: estimated label `l` maps to `best_permutation[l]`.
    pub best_permutation: Vec<usize>,
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

fn check(a: &LabelAssignment, b: &LabelAssignment) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("label lengths {} and {}", a.len(), b.len())));
    }
    if a.k() != b.k() {
        return Err(Error::DimensionMismatch(format!("community counts {} and {}", a.k(), b.k())));
    }
    if a.k() > MAX_PERMUTATION_K {
        return Err(Error::InvalidInput(format!("k={} exceeds the permutation guard {MAX_PERMUTATION_K}", a.k())));
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("empty label assignment".into()));
    }
    Ok(a.k())
}

/// `conf[a][b]` = number of nodes with estimated label `a` and true label `b`.
fn confusion(est: &LabelAssignment, truth: &LabelAssignment) -> Vec<Vec<usize>> {
    let k = est.k();
    let mut c = vec![vec![0usize; k]; k];
    for (&a, &b) in est.labels().iter().zip(truth.labels()) {
        c[a][b] += 1;
    }
    c
}

/// Minimum over permutations of `(2/n) · #{i : σ(θ̂_i) ≠ θ_i}`.
pub fn loss_overall(theta_hat: &LabelAssignment, theta: &LabelAssignment) -> Result<f64> {
    check(theta_hat, theta)?;
    let wrong = aligned_disagreements(theta_hat, theta)?;
    Ok(2.0 * wrong as f64 / theta.len() as f64)
}

/// Minimum over permutations of the largest per-community error
/// `(2/|C_j|) · #{i ∈ C_j : σ(θ̂_i) ≠ j}`.
pub fn loss_worst_case(theta_hat: &LabelAssignment, theta: &LabelAssignment) -> Result<f64> {
    Ok(loss_report(theta_hat, theta)?.worst_case)
}

pub fn loss_report(theta_hat: &LabelAssignment, theta: &LabelAssignment) -> Result<LossReport> {
    let k = check(theta_hat, theta)?;
    let n = theta.len();
    let sizes = theta.counts();
    if sizes.contains(&0) {
        return Err(Error::InvalidInput("every true community must be nonempty".into()));
    }
    let conf = confusion(theta_hat, theta);
    let mut best_wrong = usize::MAX;
    let mut best_perm = Vec::new();
    let mut worst = f64::INFINITY;
    for perm in permutations(k) {
        // correct_j = nodes of true community j labelled a with perm[a] = j.
        let mut correct = vec![0usize; k];
        for a in 0..k {
            correct[perm[a]] += conf[a][perm[a]];
        }
        let wrong = n - correct.iter().sum::<usize>();
        if wrong < best_wrong {
            best_wrong = wrong;
            best_perm = perm.clone();
        }
        let w = (0..k).map(|j| 2.0 * (sizes[j] - correct[j]) as f64 / sizes[j] as f64).fold(0.0f64, f64::max);
        worst = worst.min(w);
    }
    Ok(LossReport { overall: 2.0 * best_wrong as f64 / n as f64, worst_case: worst, best_permutation: best_perm })
}

/// Permutation `σ` minimizing the disagreements between `σ(θ_a)` and `θ_b`;
/// among ties the lexicographically smallest is returned.
pub fn align(theta_a: &LabelAssignment, theta_b: &LabelAssignment) -> Result<Vec<usize>> {
    let k = check(theta_a, theta_b)?;
    let conf = confusion(theta_a, theta_b);
    let mut best = (0usize, Vec::new());
    let mut first = true;
    for perm in permutations(k) {
        let agree: usize = (0..k).map(|a| conf[a][perm[a]]).sum();
        if first || agree > best.0 {
            best = (agree, perm);
            first = false;
        }
    }
    Ok(best.1)
}

/// Number of nodes on which `σ(θ_a)` and `θ_b` disagree for the aligning `σ`.
pub fn aligned_disagreements(theta_a: &LabelAssignment, theta_b: &LabelAssignment) -> Result<usize> {
    let perm = align(theta_a, theta_b)?;
    Ok(theta_a.labels().iter().zip(theta_b.labels()).filter(|(&a, &b)| perm[a] != b).count())
}
