//! Experiment plumbing: JSON configs, seeded sweeps, summaries and CSV/JSON output.

pub mod config;
pub mod io;
pub mod registry;
pub mod selftest;
pub mod summary;
pub mod sweep;

pub use config::ExperimentConfig;
pub use summary::{summarize, GroupSummary, Quantiles};
pub use sweep::{run_sweep, TrialRecord, TrialStatus};
