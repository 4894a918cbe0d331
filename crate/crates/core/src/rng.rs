//! Deterministic randomness.
//!
//! Constructions use a keyed counter-style derivation: every random quantity
//! is a pure function of `(seed, label, index)`, so nothing is stored and
//! materialization can run in any order. Sampled measures draw from ChaCha8
//! streams keyed by `(seed, sample index)`, which makes their output
//! independent of how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a of a domain label, used to separate independent colorings.
pub fn label_hash(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// A keyed word stream: `word(index, attempt)` is a pure function of the key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyedStream {
    key: u64,
}

impl KeyedStream {
    pub fn new(seed: u64, label: &str) -> Self {
        KeyedStream { key: mix64(seed ^ mix64(label_hash(label))) }
    }

    #[inline]
    pub fn word(&self, index: u64, attempt: u64) -> u64 {
        mix64(mix64(self.key ^ index).wrapping_add(attempt.wrapping_mul(0xd1b5_4a32_d192_ed03)))
    }

    /// Uniform value in `0..bound` by rejection, so there is no modulo bias.
    #[inline]
    pub fn below(&self, index: u64, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        let mut attempt = 0;
        loop {
            let w = self.word(index, attempt);
            if w <= zone {
                return w % bound;
            }
            attempt += 1;
        }
    }

    #[inline]
    pub fn bit(&self, index: u64) -> bool {
        self.word(index, 0) >> 63 == 1
    }
}

/// Independent ChaCha8 stream for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
