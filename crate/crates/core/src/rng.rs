//! Deterministic per-block random streams.
//!
//! Every block of every encoding stage gets its own ChaCha8 stream. The
//! 32-byte ChaCha key is the little-endian run seed followed by the
//! little-endian stage tag (remaining 16 bytes zero), and the ChaCha stream
//! id is `(block_row << 32) | block_col`. Draws take the top bits of
//! successive 32-bit outputs. This layout is part of the output format:
//! changing it changes every share produced for a given seed.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Identifies the generator layout above. Recorded in pipeline manifests.
pub const GENERATOR_ID: &str = "chacha8-block-stream-v1";

/// Seed plus stage tag; the root of all streams used by one encoding pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub stage: u64,
}

impl StreamKey {
    pub const fn new(seed: u64, stage: u64) -> Self {
        StreamKey { seed, stage }
    }

    fn chacha_key(&self) -> [u8; 32] {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stage.to_le_bytes());
        key
    }

    pub fn block_stream(&self, row: usize, col: usize) -> RngStream {
        RngStream::new(*self, ((row as u64) << 32) | (col as u64 & 0xffff_ffff))
    }
}

/// A single-owner random stream. Identical key and stream id give identical
/// draw sequences on every platform.
#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha8Rng,
    position: u64,
}

impl RngStream {
    pub fn new(key: StreamKey, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::from_seed(key.chacha_key());
        inner.set_stream(stream);
        RngStream { inner, position: 0 }
    }

    /// Number of 32-bit words drawn so far.
    pub fn position(&self) -> u64 {
        self.position
    }

    pub fn next_u32(&mut self) -> u32 {
        self.position += 1;
        self.inner.next_u32()
    }

    /// Uniform draw from `0..4` using the top two bits of one word.
    pub fn index4(&mut self) -> usize {
        (self.next_u32() >> 30) as usize
    }

    /// Exactly uniform draw from `0..n` for `1 <= n <= 4`; two-bit rejection
    /// sampling, no draw at all when `n == 1`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!((1..=4).contains(&n), "below({n}) supports 1..=4");
        if n == 1 {
            return 0;
        }
        loop {
            let v = self.index4();
            if v < n {
                return v;
            }
        }
    }
}
