//! Deterministic, splittable random-number streams.
//!
//! Every stochastic component in this crate draws from an [`RngStream`]: a
//! counter-based ChaCha12 generator addressed by a `(seed, stream)` pair.
//! Streams with the same seed but different stream ids are statistically
//! independent, and a given pair produces the same byte sequence on every
//! platform, so results are reproducible across machines and thread counts.
//!
//! Derived streams are obtained by hashing a label and an index into a fresh
//! stream id. This is what makes Monte Carlo runs embarrassingly parallel
//! without shared mutable state: the harness hands each (run, purpose) pair its
//! own generator up front, e.g. `master.derive("truth", run)` and
//! `master.derive("rstscf", run)`, and adding another filter to an experiment
//! cannot perturb anybody else's draws.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// splitmix64 finalizer. Full-avalanche 64-bit mixer used to turn
/// (parent stream, label, index) into fresh stream ids.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a hash of a label. Stable across platforms and releases; the label
/// space here is a handful of short strings, so 64 bits is plenty.
fn hash_label(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// A seeded, addressable random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    /// Root stream for a master seed (stream id 0).
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Stream addressed by an explicit `(seed, stream)` pair.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    /// A fresh, statistically independent stream for `(label, index)`,
    /// keyed off this stream's id. Derivation depends only on the
    /// `(seed, stream, label, index)` values, never on how many draws have
    /// been consumed, so it is safe to call at any time and from any thread
    /// holding a clone.
    pub fn derive(&self, label: &str, index: u64) -> Self {
        let stream = mix64(self.stream ^ hash_label(label) ^ mix64(index));
        Self::with_stream(self.seed, stream)
    }

    /// Master seed this stream was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stream id within the seed's family.
    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        rand::Rng::random(self)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}
