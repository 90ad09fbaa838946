//! Seeded, splittable random number generation.
//!
//! Every randomized routine takes a `&mut SeedRng`. Independent child
//! generators are derived from `(seed, stream)` pairs so that results do not
//! depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// The generator used throughout the crate.
pub type SeedRng = ChaCha12Rng;

/// Generator for a master seed.
pub fn seeded(seed: u64) -> SeedRng {
    SeedRng::seed_from_u64(seed)
}

/// Child generator for `(seed, stream)`; distinct streams are independent.
pub fn derive(seed: u64, stream: u64) -> SeedRng {
    let mut rng = SeedRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Splits a fresh child generator off a parent.
pub fn split(parent: &mut SeedRng) -> SeedRng {
    use rand::Rng;
    let seed: u64 = parent.random();
    let stream: u64 = parent.random();
    derive(seed, stream)
}
