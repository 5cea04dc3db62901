//! Counter-based random streams keyed by `(master_seed, stream_id)`.
//!
//! Each stream is a ChaCha8 generator whose key comes from the master seed and
//! whose 64-bit stream word is the stream id, so two streams never overlap and
//! a stream's sequence does not depend on when or where it is consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Purpose tags keep streams for different jobs apart even when they share a
/// replication index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum Purpose {
    Master = 1,
    Replication = 2,
    Quadrature = 3,
    Diagnostic = 4,
    Bound = 5,
    Calibration = 6,
    Extra = 7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngStream { master_seed, stream_id }
    }

    /// Stream for `(purpose, index)` under `master_seed`.
    pub fn tagged(master_seed: u64, purpose: Purpose, index: u64) -> Self {
        let id = ((purpose as u64) << 48) ^ (index & 0x0000_FFFF_FFFF_FFFF);
        RngStream { master_seed, stream_id: id }
    }

    /// Deterministic child stream, used for nested loops such as
    /// (outer sample, inner replication).
    pub fn child(&self, index: u64) -> Self {
        let id = splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)));
        RngStream { master_seed: self.master_seed, stream_id: id }
    }

    /// Child stream separated by a purpose tag.
    pub fn sub(&self, purpose: Purpose, index: u64) -> Self {
        self.child(((purpose as u64) << 48) ^ index)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
