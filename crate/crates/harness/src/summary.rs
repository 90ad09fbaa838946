use serde::{Deserialize, Serialize};

use crate::sweep::{TrialRecord, TrialStatus};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
}

/// Statistics of one grid point. Loss fields are `None` when every trial failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub eps: f64,
    pub delta: f64,
    pub degree: Option<usize>,
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub loss_overall: Option<Quantiles>,
    pub loss_worst_case: Option<Quantiles>,
    pub noise_off: bool,
}

/// Linear-interpolation quantile of sorted data (the "type 7" rule).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn quantiles(mut xs: Vec<f64>) -> Option<Quantiles> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    Some(Quantiles { median: quantile(&xs, 0.5), q10: quantile(&xs, 0.1), q90: quantile(&xs, 0.9) })
}

/// Groups records by (ε, δ, D) in first-seen order.
pub fn summarize(records: &[TrialRecord]) -> Vec<GroupSummary> {
    let mut keys: Vec<(f64, f64, Option<usize>)> = Vec::new();
    for r in records {
        let k = (r.eps, r.delta, r.degree);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(eps, delta, degree)| {
            let group: Vec<&TrialRecord> =
                records.iter().filter(|r| (r.eps, r.delta, r.degree) == (eps, delta, degree)).collect();
            let ok: Vec<&&TrialRecord> = group.iter().filter(|r| r.status == TrialStatus::Ok).collect();
            let failures = group.len() - ok.len();
            GroupSummary {
                eps,
                delta,
                degree,
                trials: group.len(),
                failures,
                failure_rate: failures as f64 / group.len() as f64,
                loss_overall: quantiles(ok.iter().filter_map(|r| r.loss_overall).collect()),
                loss_worst_case: quantiles(ok.iter().filter_map(|r| r.loss_worst_case).collect()),
                noise_off: group.iter().any(|r| r.noise_off),
            }
        })
        .collect()
}
