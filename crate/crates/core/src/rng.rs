//! Deterministic per-particle random streams.
//!
//! Every particle draws from its own ChaCha stream derived from the pair
//! (master seed, particle index). Streams are independent, so ensembles
//! can be sharded across threads in any order and still reproduce
//! bit-identical histograms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type StreamRng = ChaCha8Rng;

/// Creates the stream for one particle of an ensemble.
pub fn particle_stream(master_seed: u64, particle_index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(particle_index);
    rng
}
