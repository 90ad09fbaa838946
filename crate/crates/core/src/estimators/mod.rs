//! Private community-estimation pipelines and the wrappers around them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::accounting::PrivacyBudget;
use crate::error::Result;
use crate::graph::{Graph, LabelAssignment};
use crate::mechanisms::NoiseMode;
use crate::rng::SeedRng;

pub mod convex;
pub mod deflation;
pub mod ef;
pub mod good_center;
pub mod matrix_est;
pub mod pca;
pub mod reduction;
pub mod subspace;
pub mod symmetrize;

pub use convex::{
    dual_project, dykstra_project, project_psd, two_community_convex, ConvexSolver, ProjectionResult, DUAL_MAX_ITER,
    DUAL_TOL, DYKSTRA_MAX_ITER, DYKSTRA_TOL,
};
pub use deflation::{deflate_matrix, eigvec_deflation, eigvec_deflation_cluster, DeflationOutput};
pub use ef::ef_spectral;
pub use good_center::{good_center, Ball};
pub use matrix_est::{default_iterations, matrix_estimation, noisy_power_method, PpmOutput};
pub use pca::private_pca_lipschitz;
pub use reduction::{
    reduce_to_node_private, reduce_weighted_to_node_private, DeflationBase, EfBase, MeBase, ReductionConfig,
    ReductionOutput, SeBase, TcBase,
};
pub use subspace::{subspace_estimation, subspace_estimation_matrix, SubspaceParams};
pub use symmetrize::symmetrize;

/// Per-stage scalars and flags recorded by a pipeline.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Set whenever any stage ran with noise disabled.
    pub noise_off: bool,
    pub values: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl Diagnostics {
    pub fn new(noise: NoiseMode) -> Self {
        Self { noise_off: noise.is_off(), ..Self::default() }
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    /// Merges another record, prefixing its keys.
    pub fn absorb(&mut self, prefix: &str, other: &Diagnostics) {
        self.noise_off |= other.noise_off;
        for (k, v) in &other.values {
            self.values.insert(format!("{prefix}{k}"), *v);
        }
        for n in &other.notes {
            self.notes.push(format!("{prefix}{n}"));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOutput {
    pub labels: LabelAssignment,
    /// Guarantee claimed for this run, with its derivation.
    pub budget: Option<PrivacyBudget>,
    pub diagnostics: Diagnostics,
}

/// Anything that maps a graph to labels.
pub trait Estimator: Send + Sync {
    fn estimate(&self, g: &Graph, rng: &mut SeedRng) -> Result<EstimatorOutput>;
}

impl<F> Estimator for F
where
    F: Fn(&Graph, &mut SeedRng) -> Result<EstimatorOutput> + Send + Sync,
{
    fn estimate(&self, g: &Graph, rng: &mut SeedRng) -> Result<EstimatorOutput> {
        self(g, rng)
    }
}

/// Whether a bounded-degree estimator's guarantee is pure or approximate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrivacyForm {
    /// `(ε, 0)` node privacy on graphs of degree at most 2D.
    Pure,
    /// `(2ε, δ)` node privacy on graphs of degree at most 2D.
    Approx,
}

/// Estimator that is private on bounded-degree graphs at a caller-chosen
/// budget, so it can be wrapped by the truncation reduction.
pub trait BoundedDegreeEstimator: Send + Sync {
    fn name(&self) -> &str;
    fn form(&self) -> PrivacyForm;
    /// Degree parameter `D` the guarantee refers to (graphs in 𝒢_{n,2D}).
    fn degree(&self) -> usize;
    fn run(&self, g: &Graph, eps: f64, delta: f64, rng: &mut SeedRng) -> Result<EstimatorOutput>;
}
