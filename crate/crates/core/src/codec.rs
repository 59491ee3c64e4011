//! 2×2 share pattern tables, block classification and pattern selection.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A 2×2 tile stored as (top-left, top-right, bottom-left, bottom-right).
/// A matrix literal `[a b; c d]` maps to `[a, b, c, d]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block([u8; 4]);

impl Block {
    pub const BLACK: Block = Block([1, 1, 1, 1]);
    pub const WHITE: Block = Block([0, 0, 0, 0]);

    /// Keeps only the low bit of each entry.
    pub const fn from_bits(bits: [u8; 4]) -> Self {
        Block([bits[0] & 1, bits[1] & 1, bits[2] & 1, bits[3] & 1])
    }

    pub const fn bits(&self) -> [u8; 4] {
        self.0
    }

    pub fn black_count(&self) -> u32 {
        self.0.iter().map(|&b| b as u32).sum()
    }

    /// Stacks two tiles: bitwise XOR.
    pub fn stack(self, other: Block) -> Block {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = other.0;
        Block([a0 ^ b0, a1 ^ b1, a2 ^ b2, a3 ^ b3])
    }

    pub fn hamming(self, other: Block) -> u32 {
        self.stack(other).black_count()
    }

    pub fn class(self) -> BlockClass {
        classify_block(self)
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "[{a} {b}; {c} {d}]")
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn stack(a: Block, b: Block) -> Block {
    a.stack(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockClass {
    Black,
    White,
    Mixed,
}

impl fmt::Display for BlockClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockClass::Black => "black",
            BlockClass::White => "white",
            BlockClass::Mixed => "mixed",
        })
    }
}

pub fn classify_block(b: Block) -> BlockClass {
    match b.black_count() {
        4 => BlockClass::Black,
        0 => BlockClass::White,
        _ => BlockClass::Mixed,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PatternPair {
    pub share1: Block,
    pub share2: Block,
}

impl PatternPair {
    const fn new(share1: [u8; 4], share2: [u8; 4]) -> Self {
        PatternPair {
            share1: Block::from_bits(share1),
            share2: Block::from_bits(share2),
        }
    }

    /// What stacking the two shares of this pair shows.
    pub fn reconstruct(&self) -> Block {
        self.share1.stack(self.share2)
    }
}

/// Entirely black blocks. The i-th share1 pattern is paired with the i-th
/// share2 pattern; each pair is complementary.
pub const BLACK_TABLE: [PatternPair; 4] = [
    PatternPair::new([1, 0, 0, 1], [0, 1, 1, 0]),
    PatternPair::new([0, 0, 1, 1], [1, 1, 0, 0]),
    PatternPair::new([1, 1, 0, 0], [0, 0, 1, 1]),
    PatternPair::new([0, 1, 1, 0], [1, 0, 0, 1]),
];

/// Entirely white blocks: both shares carry the same pattern.
pub const WHITE_TABLE: [PatternPair; 4] = [
    PatternPair::new([1, 0, 0, 1], [1, 0, 0, 1]),
    PatternPair::new([0, 0, 1, 1], [0, 0, 1, 1]),
    PatternPair::new([1, 1, 0, 0], [1, 1, 0, 0]),
    PatternPair::new([0, 1, 1, 0], [0, 1, 1, 0]),
];

/// Blocks holding both colors. Pairs 0 and 3 share the same share2 pattern
/// `[0 1; 0 1]`; the table is kept as published.
pub const MIXED_TABLE: [PatternPair; 4] = [
    PatternPair::new([0, 1, 1, 0], [0, 1, 0, 1]),
    PatternPair::new([1, 0, 1, 0], [1, 1, 0, 1]),
    PatternPair::new([0, 1, 1, 1], [1, 0, 1, 0]),
    PatternPair::new([1, 0, 1, 1], [0, 1, 0, 1]),
];

pub fn pattern_table(class: BlockClass) -> &'static [PatternPair; 4] {
    match class {
        BlockClass::Black => &BLACK_TABLE,
        BlockClass::White => &WHITE_TABLE,
        BlockClass::Mixed => &MIXED_TABLE,
    }
}

pub fn pattern_pair(class: BlockClass, index: usize) -> Result<PatternPair> {
    pattern_table(class)
        .get(index)
        .copied()
        .ok_or(Error::PatternIndexOutOfRange(index))
}

/// How a pattern is picked for each block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MixedPolicy {
    /// Uniform over the class's four pairs.
    #[default]
    PaperRandom,
    /// For mixed blocks, the pair whose reconstruction is closest in Hamming
    /// distance to the input, uniform among ties. Pure blocks fall back to
    /// `PaperRandom` with the identical draw.
    BestMatch,
}

impl MixedPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            MixedPolicy::PaperRandom => "paper-random",
            MixedPolicy::BestMatch => "best-match",
        }
    }
}

impl fmt::Display for MixedPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MixedPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-random" => Ok(MixedPolicy::PaperRandom),
            "best-match" => Ok(MixedPolicy::BestMatch),
            _ => Err(Error::UnknownValue {
                kind: "mixed policy",
                value: s.to_owned(),
            }),
        }
    }
}

/// Indices of the mixed pairs whose reconstruction is nearest to `input`.
/// Returns the tie set in ascending order and its length.
pub fn best_mixed_indices(input: Block) -> ([usize; 4], usize) {
    let dist = MIXED_TABLE.map(|p| p.reconstruct().hamming(input));
    let best = *dist.iter().min().expect("table is non-empty");
    let mut tied = [0usize; 4];
    let mut n = 0;
    for (i, &d) in dist.iter().enumerate() {
        if d == best {
            tied[n] = i;
            n += 1;
        }
    }
    (tied, n)
}

pub fn choose_index(class: BlockClass, input: Block, policy: MixedPolicy, rng: &mut RngStream) -> Result<usize> {
    if classify_block(input) != class {
        return Err(Error::ClassMismatch {
            class: class.to_string(),
            block: input.to_string(),
        });
    }
    Ok(choose_unchecked(class, input, policy, rng))
}

pub(crate) fn choose_unchecked(class: BlockClass, input: Block, policy: MixedPolicy, rng: &mut RngStream) -> usize {
    match (policy, class) {
        (MixedPolicy::BestMatch, BlockClass::Mixed) => {
            let (tied, n) = best_mixed_indices(input);
            tied[rng.below(n)]
        }
        _ => rng.index4(),
    }
}

/// Classifies `input`, picks a pair and returns it.
pub fn encode_block(input: Block, policy: MixedPolicy, rng: &mut RngStream) -> PatternPair {
    let class = classify_block(input);
    pattern_table(class)[choose_unchecked(class, input, policy, rng)]
}
