//! Deterministic seeding helpers.
//!
//! Every stochastic operation takes a `u64` seed and builds its own ChaCha
//! stream from it, so a replication can be recomputed in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `replication` at design point `point`.
///
/// Chained mixing keeps `(point, replication)` pairs distinct for all
/// practical campaign sizes (the map is a bijection at each stage).
pub fn replication_seed(master: u64, point: u64, replication: u64) -> u64 {
    mix64(mix64(mix64(master) ^ point) ^ replication.rotate_left(32))
}

/// Derives an independent sub-stream seed, e.g. density vs network stage.
pub fn substream(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream.wrapping_add(0xA076_1D64_78BD_642F)))
}
