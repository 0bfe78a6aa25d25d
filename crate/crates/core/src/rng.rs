//! Deterministic generator streams.
//!
//! Every replicate `i` of a run seeded with `seed` draws from ChaCha8 stream
//! `i` of key `seed`, so results do not depend on how replicates are
//! scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const GENERATOR_NAME: &str = "ChaCha8 (rand_chacha), key = seed, stream = replicate index";

pub fn stream(seed: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniform draw from `(0, 1]`, safe to divide by.
pub(crate) fn open_unit<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
