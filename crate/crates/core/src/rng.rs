//! Deterministic random streams.
//!
//! Every random quantity in the crate is drawn from a `ChaCha8Rng` seeded with
//! the run seed and positioned on a stream id that encodes *what* is being
//! sampled and *which* work item draws it. Work items never share a stream, so
//! results do not depend on how rayon splits the work.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measures::BernoulliSpec;

/// What a stream is used for; occupies the top byte of the stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Birkhoff = 1,
    OverlapWord = 2,
    OverlapBase = 3,
    EmpiricalPoints = 4,
    EmpiricalCenters = 5,
    Generic = 6,
}

/// A reproducible stream of draws.
#[derive(Debug, Clone)]
pub struct SampleStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl SampleStream {
    /// Stream `index` (lower 56 bits) for `purpose` under `seed`.
    pub fn new(seed: u64, purpose: Purpose, index: u64) -> Self {
        debug_assert!(index < 1 << 56);
        let stream = ((purpose as u64) << 56) | (index & ((1 << 56) - 1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SampleStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// One symbol with law `p`.
    #[inline]
    pub fn next_symbol(&mut self, p: &BernoulliSpec) -> usize {
        p.symbol_for(self.next_unit())
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
