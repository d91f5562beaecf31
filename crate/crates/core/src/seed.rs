//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a master
//! seed combined with a sequence of purpose tags, so independent consumers
//! (calculation point sampling, population init, per-run sub-seeds) never
//! share or reuse a stream by accident.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Advances a splitmix64 state and returns the next output.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over a byte string, for turning labels into tags.
#[inline]
pub fn tag(label: &str) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325u64;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Derives a child seed from a master seed and a sequence of tags.
pub fn derive(master: u64, tags: &[u64]) -> u64 {
    let mut state = master;
    let mut acc = splitmix64(&mut state);
    for t in tags {
        state = acc ^ t.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        acc = splitmix64(&mut state);
    }
    acc
}

/// A `ChaCha8Rng` for the given master seed and purpose tags.
pub fn rng(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, tags))
}
