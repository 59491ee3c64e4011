//! Expansionless 2-out-of-2 encoding and XOR reveal.
//!
//! The secret is normalized to multiple-of-4 dimensions, then every 2×2 block
//! is classified and replaced in each share by one pattern pair from the
//! codec tables. Shares have exactly the normalized secret's size.

use rayon::prelude::*;

use crate::bitmap::{normalize_size, BinaryImage, Dimensions, NormalizeMode};
use crate::codec::{encode_block, MixedPolicy};
use crate::error::{Error, Result};
use crate::rng::StreamKey;

/// Stage tag for the first-level split of the secret.
pub const STAGE_LEVEL1: u64 = 0x4c31;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Block rows are encoded on the rayon thread pool.
    #[default]
    Parallel,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct EncodeConfig {
    pub seed: u64,
    pub mixed_policy: MixedPolicy,
    pub normalize_mode: NormalizeMode,
    /// Does not affect output; every block draws from its own stream.
    pub execution: Execution,
}

impl EncodeConfig {
    pub fn with_seed(seed: u64) -> Self {
        EncodeConfig {
            seed,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharePair {
    pub share1: BinaryImage,
    pub share2: BinaryImage,
    pub source_dims: Dimensions,
}

pub fn encode(secret: &BinaryImage, cfg: &EncodeConfig) -> SharePair {
    let normalized = normalize_size(secret, cfg.normalize_mode);
    let (share1, share2) = encode_blocks(&normalized, StreamKey::new(cfg.seed, STAGE_LEVEL1), cfg.mixed_policy, cfg.execution)
        .expect("normalized images have even dimensions");
    SharePair {
        share1,
        share2,
        source_dims: normalized.dims(),
    }
}

/// Encodes an even-sized image block by block without normalizing it first.
/// The block at `(row, col)` draws only from `key.block_stream(row, col)`.
pub fn encode_blocks(
    img: &BinaryImage,
    key: StreamKey,
    policy: MixedPolicy,
    execution: Execution,
) -> Result<(BinaryImage, BinaryImage)> {
    let (_, cols) = img.block_grid()?;
    let dims = img.dims();
    let band = 2 * dims.width;
    let mut bits1 = vec![0u8; dims.area()];
    let mut bits2 = vec![0u8; dims.area()];

    let encode_band = |row: usize, out1: &mut [u8], out2: &mut [u8]| {
        let w = dims.width;
        for col in 0..cols {
            let mut rng = key.block_stream(row, col);
            let pair = encode_block(img.block_unchecked(row, col), policy, &mut rng);
            for (out, block) in [(&mut *out1, pair.share1), (&mut *out2, pair.share2)] {
                let [tl, tr, bl, br] = block.bits();
                out[2 * col] = tl;
                out[2 * col + 1] = tr;
                out[w + 2 * col] = bl;
                out[w + 2 * col + 1] = br;
            }
        }
    };

    match execution {
        Execution::Sequential => {
            for (row, (o1, o2)) in bits1.chunks_mut(band).zip(bits2.chunks_mut(band)).enumerate() {
                encode_band(row, o1, o2);
            }
        }
        Execution::Parallel => {
            bits1
                .par_chunks_mut(band)
                .zip(bits2.par_chunks_mut(band))
                .enumerate()
                .for_each(|(row, (o1, o2))| encode_band(row, o1, o2));
        }
    }
    Ok((BinaryImage::from_raw(dims, bits1), BinaryImage::from_raw(dims, bits2)))
}

/// Stacks the two shares with pixelwise XOR.
pub fn reveal(pair: &SharePair) -> Result<BinaryImage> {
    pair.share1.xor(&pair.share2)
}

/// True when every 2×2 block is entirely black or entirely white.
pub fn is_pure_block_image(img: &BinaryImage) -> Result<bool> {
    let (rows, cols) = img.block_grid()?;
    Ok((0..rows).all(|r| (0..cols).all(|c| matches!(img.block_unchecked(r, c).black_count(), 0 | 4))))
}

pub(crate) fn ensure_even(img: &BinaryImage) -> Result<()> {
    if !img.dims().is_even() {
        return Err(Error::OddDimensions(img.dims()));
    }
    Ok(())
}
