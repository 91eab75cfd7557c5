//! Counter-based random streams.
//!
//! Every random quantity is drawn from a ChaCha stream selected by a
//! `(seed, domain, index)` triple. Streams with different triples are
//! independent, and a given stream never depends on which thread (or in
//! which order) it is evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream domains. Each consumer owns one so their draws never overlap.
pub mod domain {
    pub const PROJECTIONS: u64 = 0x5052_4f4a;
    pub const PAIRS: u64 = 0x5041_4952;
    pub const FACTOR_HYPER: u64 = 0x4859_5052;
    pub const FACTOR_ROWS: u64 = 0x524f_5753;
    pub const AR1_ROWS: u64 = 0x4152_3152;
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a parent seed with a sequence of tags into a child seed.
pub fn derive_seed(parent: u64, tags: &[u64]) -> u64 {
    let mut state = parent;
    let mut out = splitmix64(&mut state);
    for &tag in tags {
        state ^= tag.wrapping_mul(0xd6e8_feb8_6659_fd93);
        out = splitmix64(&mut state) ^ out.rotate_left(17);
    }
    out
}

/// The ChaCha stream for `(seed, domain, index)`.
pub fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut state = derive_seed(seed, &[domain]);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
