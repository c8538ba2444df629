//! Replayable randomness.
//!
//! Every random draw comes from ChaCha8 keyed by a 64-bit seed, with the
//! 64-bit stream id selecting an independent substream. A trial, cell or
//! sample index maps to a stream, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for substream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for a pair of indices (e.g. `(N, seed_index)`).
pub fn pair_stream(a: u64, b: u64) -> u64 {
    a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.rotate_left(32)
}
