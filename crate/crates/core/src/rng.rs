//! Seed derivation for reproducible per-timestep streams.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded through
//! `SeedableRng::seed_from_u64` with a 64-bit seed derived from a master
//! seed and a stream index by SplitMix64 mixing:
//!
//! ```text
//! derive_seed(master, stream) = mix(master ^ mix(stream + 0x9E3779B97F4A7C15))
//! mix(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!         z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!         z ^ (z >> 31)
//! ```
//!
//! Streams are independent of evaluation order, so parallel and sequential
//! runs produce identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: u64) -> u64 {
    mix(master ^ mix(stream.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

pub fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream))
}
