//! Node-private community estimation in stochastic block models.
//!
//! Graph and SBM types, permutation-invariant losses, privacy accounting,
//! noise mechanisms, the truncation and Lipschitz-extension LPs, spectral
//! clustering, the private estimators, boosting, and lower-bound calculators.
//! Numerical kernels are generic over [`Scalar`]; the aliases below fix `f64`.

pub mod accounting;
pub mod boosting;
pub mod bounds;
pub mod clustering;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod linalg;
pub mod lp;
pub mod mechanisms;
pub mod metrics;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{Graph, LabelAssignment, SbmParams, WeightedGraph};
pub use mechanisms::NoiseMode;
pub use rng::SeedRng;
pub use scalar::Scalar;

pub type Matrix = linalg::DenseMatrix<f64>;
pub type MatrixF32 = linalg::DenseMatrix<f32>;
pub type LpProblemF64 = lp::LpProblem<f64>;
pub type LpSolutionF64 = lp::LpSolution<f64>;
