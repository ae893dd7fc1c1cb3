//! Deterministic random streams.
//!
//! Every random quantity in a campaign is drawn from a ChaCha8 stream whose
//! seed is a pure function of `(master seed, purpose, index, sub-index)`, so
//! results never depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// What a stream is used for. Keeps streams for different purposes disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Unitary = 1,
    Samples = 2,
    Bootstrap = 3,
    Reference = 4,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the stream for `(seed, purpose, index, sub)`.
pub fn stream(seed: u64, purpose: Purpose, index: u64, sub: u64) -> SimRng {
    let mut state = seed;
    let mut key = [0u8; 32];
    let words = [purpose as u64, index, sub, 0x5046_515f_7631];
    for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
        state ^= w;
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    SimRng::from_seed(key)
}

/// Convenience for tests and one-off draws.
pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
