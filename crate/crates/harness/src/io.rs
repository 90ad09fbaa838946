use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::summary::GroupSummary;
use crate::sweep::TrialRecord;

pub fn write_records(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_timings(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["trial", "runtime_ms"])?;
    for r in records {
        w.write_record([r.trial.to_string(), format!("{:.3}", r.runtime_ms)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    scenario: &'a str,
    estimator: &'a str,
    noise_off: bool,
    groups: &'a [GroupSummary],
}

pub fn write_summary(path: &Path, scenario: &str, estimator: &str, groups: &[GroupSummary]) -> Result<()> {
    let doc = SummaryDoc { scenario, estimator, noise_off: groups.iter().any(|g| g.noise_off), groups };
    fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(())
}

#[derive(Serialize)]
struct PlotRow<'a> {
    scenario: &'a str,
    estimator: &'a str,
    eps: f64,
    delta: f64,
    degree: Option<usize>,
    seed: u64,
    metric: &'a str,
    value: f64,
    noise_off: bool,
}

/// Tidy long format: one row per (trial, metric).
pub fn write_plotdata(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        let failed = if r.loss_overall.is_none() { 1.0 } else { 0.0 };
        let metrics =
            [("loss_overall", r.loss_overall), ("loss_worst_case", r.loss_worst_case), ("failed", Some(failed))];
        for (metric, value) in metrics {
            if let Some(value) = value {
                w.serialize(PlotRow {
                    scenario: &r.scenario,
                    estimator: &r.estimator,
                    eps: r.eps,
                    delta: r.delta,
                    degree: r.degree,
                    seed: r.seed,
                    metric,
                    value,
                    noise_off: r.noise_off,
                })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
