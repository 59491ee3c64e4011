//! Binary images, PBM I/O and size normalization.
//!
//! Pixels use the PBM convention throughout the crate: `1` is black and `0`
//! is white.

mod pbm;

use std::fmt;
use std::str::FromStr;

pub use pbm::{decode_pbm, encode_pbm, load_pbm, save_pbm, PbmVariant};

use crate::codec::Block;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dimensions {
    pub width: usize,
    pub height: usize,
}

impl Dimensions {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        Ok(Dimensions { width, height })
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    pub fn is_even(&self) -> bool {
        self.width.is_multiple_of(2) && self.height.is_multiple_of(2)
    }
}

impl fmt::Display for Dimensions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// A rectangular grid of black/white pixels stored row-major, one byte per
/// pixel holding `0` or `1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    dims: Dimensions,
    bits: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Result<Self> {
        let dims = Dimensions::new(width, height)?;
        if bits.len() != dims.area() {
            return Err(Error::InvalidImage(format!(
                "{} bits supplied for a {dims} image",
                bits.len()
            )));
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidImage(format!(
                "pixel {pos} has value {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(BinaryImage { dims, bits })
    }

    pub fn filled(width: usize, height: usize, bit: u8) -> Result<Self> {
        let dims = Dimensions::new(width, height)?;
        Ok(BinaryImage {
            dims,
            bits: vec![bit & 1; dims.area()],
        })
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel; only the low
    /// bit of the result is kept.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let dims = Dimensions::new(width, height)?;
        let mut bits = Vec::with_capacity(dims.area());
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y) & 1);
            }
        }
        Ok(BinaryImage { dims, bits })
    }

    /// Caller guarantees `bits.len() == dims.area()` and every value is 0 or 1.
    pub(crate) fn from_raw(dims: Dimensions, bits: Vec<u8>) -> Self {
        debug_assert_eq!(bits.len(), dims.area());
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BinaryImage { dims, bits }
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    /// Pixel at column `x`, row `y`. Panics when out of bounds.
    pub fn get(&self, x: usize, y: usize) -> u8 {
        assert!(x < self.dims.width && y < self.dims.height, "pixel ({x}, {y}) outside {}", self.dims);
        self.bits[y * self.dims.width + x]
    }

    pub fn row(&self, y: usize) -> &[u8] {
        let w = self.dims.width;
        &self.bits[y * w..(y + 1) * w]
    }

    pub fn count_black(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn count_white(&self) -> usize {
        self.bits.len() - self.count_black()
    }

    pub fn ensure_same_dims(&self, other: &BinaryImage) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                left: self.dims,
                right: other.dims,
            });
        }
        Ok(())
    }

    /// Pixelwise XOR.
    pub fn xor(&self, other: &BinaryImage) -> Result<BinaryImage> {
        self.ensure_same_dims(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect();
        Ok(BinaryImage::from_raw(self.dims, bits))
    }

    /// Number of 2×2 blocks per row and per column. Requires even dimensions.
    pub fn block_grid(&self) -> Result<(usize, usize)> {
        if !self.dims.is_even() {
            return Err(Error::OddDimensions(self.dims));
        }
        Ok((self.dims.height / 2, self.dims.width / 2))
    }

    /// The 2×2 tile whose top-left pixel is `(2·row, 2·col)` in (y, x) order.
    pub fn block_at(&self, row: usize, col: usize) -> Result<Block> {
        let (rows, cols) = self.block_grid()?;
        if row >= rows || col >= cols {
            return Err(Error::BlockOutOfRange {
                row,
                col,
                dims: self.dims,
            });
        }
        Ok(self.block_unchecked(row, col))
    }

    pub(crate) fn block_unchecked(&self, row: usize, col: usize) -> Block {
        let w = self.dims.width;
        let top = 2 * row * w + 2 * col;
        let bottom = top + w;
        Block::from_bits([
            self.bits[top],
            self.bits[top + 1],
            self.bits[bottom],
            self.bits[bottom + 1],
        ])
    }

    /// Writes `block` into the tile at block coordinates `(row, col)`.
    pub fn set_block(&mut self, row: usize, col: usize, block: Block) -> Result<()> {
        let (rows, cols) = self.block_grid()?;
        if row >= rows || col >= cols {
            return Err(Error::BlockOutOfRange {
                row,
                col,
                dims: self.dims,
            });
        }
        let w = self.dims.width;
        let top = 2 * row * w + 2 * col;
        let [tl, tr, bl, br] = block.bits();
        self.bits[top] = tl;
        self.bits[top + 1] = tr;
        self.bits[top + w] = bl;
        self.bits[top + w + 1] = br;
        Ok(())
    }
}

impl fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryImage({})", self.dims)?;
        if self.dims.area() <= 64 * 64 {
            for y in 0..self.dims.height {
                let line: String = self.row(y).iter().map(|&b| if b == 1 { '#' } else { '.' }).collect();
                writeln!(f, "{line}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum NormalizeMode {
    /// Nearest-neighbor resampling up to the target size.
    #[default]
    Scale,
    /// Append white columns on the right and white rows at the bottom.
    Pad,
}

impl NormalizeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalizeMode::Scale => "scale",
            NormalizeMode::Pad => "pad",
        }
    }
}

impl fmt::Display for NormalizeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormalizeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scale" => Ok(NormalizeMode::Scale),
            "pad" => Ok(NormalizeMode::Pad),
            _ => Err(Error::UnknownValue {
                kind: "normalize mode",
                value: s.to_owned(),
            }),
        }
    }
}

fn round_up_4(n: usize) -> usize {
    n.div_ceil(4) * 4
}

/// Grows `img` so both dimensions are the smallest multiple of 4 not below
/// the input. Images that already qualify are returned unchanged.
pub fn normalize_size(img: &BinaryImage, mode: NormalizeMode) -> BinaryImage {
    let (w, h) = (img.width(), img.height());
    let (nw, nh) = (round_up_4(w), round_up_4(h));
    if (nw, nh) == (w, h) {
        return img.clone();
    }
    let dims = Dimensions { width: nw, height: nh };
    let mut bits = Vec::with_capacity(dims.area());
    match mode {
        NormalizeMode::Pad => {
            for y in 0..nh {
                if y < h {
                    bits.extend_from_slice(img.row(y));
                    bits.resize(bits.len() + (nw - w), 0);
                } else {
                    bits.resize(bits.len() + nw, 0);
                }
            }
        }
        NormalizeMode::Scale => {
            // Upscaling only, so every source row and column is sampled at
            // least once.
            let src_x: Vec<usize> = (0..nw).map(|x| x * w / nw).collect();
            for y in 0..nh {
                let row = img.row(y * h / nh);
                bits.extend(src_x.iter().map(|&sx| row[sx]));
            }
        }
    }
    BinaryImage::from_raw(dims, bits)
}
