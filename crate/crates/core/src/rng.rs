//! Seeded, splittable random streams. Every random draw in a synthesis run comes from a
//! stream derived from the request seed, so runs replay exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PatternRng = ChaCha8Rng;

/// Stream used for the initial point layout.
pub const LAYOUT_STREAM: u64 = 0;
/// Stream used for pair targets during correction.
pub const CORRECTION_STREAM: u64 = 1;
const NODE_STREAM_BASE: u64 = 1 << 32;

pub fn stream(seed: u64, stream: u64) -> PatternRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Independent stream for one synthesized node.
pub fn node_stream(seed: u64, node: usize) -> PatternRng {
    stream(seed, NODE_STREAM_BASE + node as u64)
}

/// Seed for the `index`-th derived run (index 0 keeps the seed unchanged).
pub fn derive_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}
