#![allow(dead_code)]

use hvc_core::BinaryImage;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut StdRng, width: usize, height: usize) -> BinaryImage {
    BinaryImage::from_fn(width, height, |_, _| rng.random_range(0..=1u8)).unwrap()
}

/// Image built from solid 2×2 tiles of random color.
pub fn random_tile_image(rng: &mut StdRng, block_cols: usize, block_rows: usize) -> BinaryImage {
    let colors: Vec<u8> = (0..block_cols * block_rows).map(|_| rng.random_range(0..=1u8)).collect();
    BinaryImage::from_fn(2 * block_cols, 2 * block_rows, |x, y| colors[(y / 2) * block_cols + x / 2]).unwrap()
}
