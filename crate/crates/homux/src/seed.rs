//! Deterministic random-stream derivation.
//!
//! Every source of randomness in the pipeline is derived from one master
//! seed plus a named context (stage, layer, candidate, column, ...). The
//! derivation hashes the context, so streams are independent of scheduling
//! order and of the number of worker threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derives independent, reproducible RNG streams from a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedDeriver {
    master: u64,
}

impl SeedDeriver {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// A fresh RNG for the given context path.
    pub fn rng(&self, context: &[&str]) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.digest(context))
    }

    /// A derived 64-bit seed, for nesting derivers (e.g. one per layer).
    pub fn subseed(&self, context: &[&str]) -> u64 {
        let d = self.digest(context);
        u64::from_le_bytes(d[..8].try_into().unwrap())
    }

    fn digest(&self, context: &[&str]) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(self.master.to_le_bytes());
        for part in context {
            // length-prefix each part so ("ab","c") != ("a","bc")
            hasher.update((part.len() as u64).to_le_bytes());
            hasher.update(part.as_bytes());
        }
        hasher.finalize().into()
    }
}
