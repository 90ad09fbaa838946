use std::path::Path;

use anyhow::{bail, Context, Result};
use nodedp::clustering::KMeansConfig;
use nodedp::estimators::{ConvexSolver, SubspaceParams};
use nodedp::graph::WeightModel;
use nodedp::SbmParams;
use serde::{Deserialize, Serialize};

pub const ESTIMATOR_IDS: [&str; 6] = ["ef", "pca", "deflation", "tc", "me", "se"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub sbm: SbmSpec,
    pub estimator: EstimatorSpec,
    /// Wrap the estimator in the degree-truncation reduction.
    #[serde(default)]
    pub reduction: Option<ReductionSpec>,
    #[serde(default)]
    pub boost: Option<BoostSpec>,
    pub eps: Vec<f64>,
    #[serde(default = "default_delta")]
    pub delta: Vec<f64>,
    #[serde(default)]
    pub degree: Option<DegreeRule>,
    pub seeds: Vec<u64>,
    /// Stream for mechanism randomness; `--seed` overrides it.
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub outputs: OutputSpec,
}

fn default_delta() -> Vec<f64> {
    vec![0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SbmSpec {
    pub n: usize,
    pub b: Vec<Vec<f64>>,
    #[serde(default)]
    pub weights: Option<WeightModel>,
}

impl SbmSpec {
    pub fn params(&self) -> nodedp::Result<SbmParams> {
        let p = SbmParams::new(self.n, self.b.clone())?;
        match &self.weights {
            Some(w) => p.with_weights(w.clone()),
            None => Ok(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub id: String,
    #[serde(default)]
    pub params: EstimatorParams,
}

/// Hyperparameters; each estimator reads the ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorParams {
    pub kmeans: Option<KMeansConfig>,
    /// Deflation: use the Lipschitz extension (direct runs only).
    pub extension: Option<bool>,
    pub solver: Option<ConvexSolver>,
    /// `B₁₁`, `B₁₂` handed to the convex estimator; defaults read from the SBM.
    pub b11: Option<f64>,
    pub b12: Option<f64>,
    pub iterations: Option<usize>,
    pub zeta: Option<f64>,
    pub subspace: Option<SubspaceParams>,
}

impl EstimatorParams {
    pub fn kmeans(&self) -> KMeansConfig {
        self.kmeans.unwrap_or_default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionSpec {
    pub eps1: f64,
    pub delta1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostSpec {
    pub t: usize,
    pub xi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeRule {
    Absolute(usize),
    /// `D = ⌈c·d⌉` with `d = n·max B`.
    MultipleOfD(f64),
}

impl DegreeRule {
    pub fn resolve(&self, params: &SbmParams) -> usize {
        match *self {
            DegreeRule::Absolute(d) => d,
            DegreeRule::MultipleOfD(c) => ((c * params.d()).ceil() as usize).max(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub records: String,
    pub timings: String,
    pub summary: String,
    pub plotdata: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            records: "records.csv".into(),
            timings: "timings.csv".into(),
            summary: "summary.json".into(),
            plotdata: "plotdata.csv".into(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !ESTIMATOR_IDS.contains(&self.estimator.id.as_str()) {
            bail!("unknown estimator id {:?}; expected one of {:?}", self.estimator.id, ESTIMATOR_IDS);
        }
        if self.eps.is_empty() || self.delta.is_empty() || self.seeds.is_empty() {
            bail!("eps, delta and seeds must be non-empty");
        }
        if self.eps.iter().any(|e| !(*e >= 0.0)) || self.delta.iter().any(|d| !(0.0..1.0).contains(d)) {
            bail!("eps must be nonnegative and delta in [0,1)");
        }
        let params = self.sbm.params()?;
        let needs_degree = self.reduction.is_some() || matches!(self.estimator.id.as_str(), "pca" | "deflation");
        if needs_degree && self.degree.is_none() {
            bail!("estimator {} needs a degree rule", self.estimator.id);
        }
        if let Some(rule) = self.degree {
            if rule.resolve(&params) == 0 {
                bail!("degree rule resolves to D=0");
            }
        }
        if self.reduction.is_some() && self.estimator.id == "pca" {
            bail!("pca is node private on its own and has no bounded-degree form");
        }
        if self.sbm.weights.is_some() && self.estimator.id != "se" {
            bail!("weighted graphs are only supported by the se estimator");
        }
        if self.sbm.weights.is_some() && self.boost.is_some() {
            bail!("boosting is defined for unweighted graphs only");
        }
        if let Some(b) = self.boost {
            nodedp::boosting::BoostConfig { t: b.t, xi: b.xi, k: params.k }.validate()?;
        }
        if let Some(r) = self.reduction {
            if !(r.eps1 > 0.0) || !(r.delta1 > 0.0 && r.delta1 < 1.0) {
                bail!("reduction needs eps1 > 0 and delta1 in (0,1)");
            }
        }
        Ok(())
    }

    /// Grid points in record order: ε outer, δ inner.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        self.eps.iter().flat_map(|&e| self.delta.iter().map(move |&d| (e, d))).collect()
    }
}
