//! Counter-based random streams.
//!
//! Every random draw in the crate comes from ChaCha8 keyed by the run seed,
//! with the sample (or instance) index selecting the stream. A sample's
//! randomness therefore depends only on `(seed, index)`, never on the order
//! in which samples are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
