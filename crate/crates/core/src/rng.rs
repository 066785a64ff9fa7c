//! Deterministic random streams.
//!
//! Every replication draws from its own ChaCha8 stream keyed by
//! `(master_seed, scenario, replication)`. The 256-bit key is expanded from
//! `(master_seed, scenario)` with SplitMix64 and the replication index selects
//! the ChaCha stream, so a stream's output depends only on its key and never on
//! which worker thread consumes it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub scenario: u64,
    pub replication: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64, scenario: u64, replication: u64) -> Self {
        StreamKey {
            master_seed,
            scenario,
            replication,
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut state = self.master_seed ^ splitmix64(&mut self.scenario.wrapping_add(0x5851_f42d_4c95_7f2d));
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(self.replication);
        rng
    }
}

/// Shorthand for `StreamKey::new(master_seed, scenario, replication).rng()`.
pub fn stream(master_seed: u64, scenario: u64, replication: u64) -> StreamRng {
    StreamKey::new(master_seed, scenario, replication).rng()
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
