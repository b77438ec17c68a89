//! Reproducible random streams.
//!
//! Every chain gets its own ChaCha8 generator keyed by
//! `(seed, purpose, time index, chain index)`, so chains can run on any
//! thread in any order and still produce the same draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::stats::Phase;

pub type ChainRng = ChaCha8Rng;

/// What a stream is used for; part of the stream key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Simulate(Phase),
    /// Sampling for MC-MLE iteration `iteration`.
    Fit { phase: Phase, iteration: u32 },
    /// Sampling at bridge point `point`.
    Bridge { phase: Phase, point: u32 },
    /// A random starting network.
    Initial,
    /// Draws used only by tests and benchmarks.
    Raw(u32),
}

impl Purpose {
    fn code(self) -> u64 {
        let phase = |p: Phase| p as u64;
        match self {
            Purpose::Simulate(p) => (1 << 56) | phase(p),
            Purpose::Fit { phase: p, iteration } => (2 << 56) | (phase(p) << 32) | iteration as u64,
            Purpose::Bridge { phase: p, point } => (3 << 56) | (phase(p) << 32) | point as u64,
            Purpose::Raw(k) => (4 << 56) | k as u64,
            Purpose::Initial => 5 << 56,
        }
    }
}

pub fn stream(seed: u64, purpose: Purpose, time: u64, chain: u64) -> ChainRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&purpose.code().to_le_bytes());
    key[16..24].copy_from_slice(&time.to_le_bytes());
    key[24..].copy_from_slice(&chain.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
