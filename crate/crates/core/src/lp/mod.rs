//! Linear programming: a generic solver and the two graph LPs built on it.

pub mod lipschitz;
pub mod simplex;
pub mod truncation;

pub use lipschitz::{lipschitz_extension_score, LipschitzScorer};
pub use simplex::{solve_lp, Constraint, LpProblem, LpSolution, LpStatus, Relation, Sense};
pub use truncation::{
    degree_truncate, degree_truncate_detail, private_sensitivity_bound, sensitivity_bound_value,
    truncation_certificate, weighted_degree_truncate, TruncationCertificate, TruncationDetail,
};
