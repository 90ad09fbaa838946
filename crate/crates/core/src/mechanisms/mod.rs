//! Noise and sampling primitives.

pub mod edge_flip;
pub mod noise;
pub mod sphere;

pub use edge_flip::{debias_flip, edge_flip, flip_probability};
pub use noise::{gaussian_vec, laplace};
pub use sphere::{
    sample_lipschitz_exp, sample_sphere_exp, top_eigenvector, BinghamSampler, SphereSample, DEFAULT_TRIAL_CAP,
};

/// Whether randomized steps add their noise. `Off` exists only for exact
/// oracle comparisons; every output produced with it is marked as such.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    #[default]
    On,
    Off,
}

impl NoiseMode {
    pub fn is_off(self) -> bool {
        self == NoiseMode::Off
    }
}
