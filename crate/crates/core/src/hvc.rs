//! Two-level hierarchical encryption and key-share construction.
//!
//! The secret is split into `s1`/`s2`; each of those is split again into
//! `s11`/`s12` and `s21`/`s22`. Three of the four leaves are folded pixelwise
//! into a key share, and the remaining leaf is the carrier.

use std::fmt;
use std::str::FromStr;

use crate::bitmap::{normalize_size, BinaryImage};
use crate::codec::MixedPolicy;
use crate::error::{Error, Result};
use crate::rng::StreamKey;
use crate::vc2::{encode_blocks, ensure_even, EncodeConfig, Execution, STAGE_LEVEL1};

/// Stage tag for the split of `s1` into `s11`/`s12`.
pub const STAGE_LEVEL2_S1: u64 = 0x4c32_0001;
/// Stage tag for the split of `s2` into `s21`/`s22`.
pub const STAGE_LEVEL2_S2: u64 = 0x4c32_0002;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LeafShare {
    S11,
    S12,
    S21,
    S22,
}

impl LeafShare {
    pub const ALL: [LeafShare; 4] = [LeafShare::S11, LeafShare::S12, LeafShare::S21, LeafShare::S22];

    pub fn as_str(&self) -> &'static str {
        match self {
            LeafShare::S11 => "s11",
            LeafShare::S12 => "s12",
            LeafShare::S21 => "s21",
            LeafShare::S22 => "s22",
        }
    }
}

impl fmt::Display for LeafShare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LeafShare {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s11" | "share11" => Ok(LeafShare::S11),
            "s12" | "share12" => Ok(LeafShare::S12),
            "s21" | "share21" => Ok(LeafShare::S21),
            "s22" | "share22" => Ok(LeafShare::S22),
            _ => Err(Error::UnknownValue {
                kind: "leaf share",
                value: s.to_owned(),
            }),
        }
    }
}

/// Which pixel rule turns three leaf bits into a key-share bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum KeyRule {
    /// The eight-row lookup table, applied to raw bits.
    #[default]
    Table,
    /// The inference rules: black everywhere except (white, black, white).
    Rules,
}

impl KeyRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            KeyRule::Table => "table",
            KeyRule::Rules => "rules",
        }
    }

    pub fn apply(&self, a: u8, b: u8, c: u8) -> u8 {
        match self {
            KeyRule::Table => table_key_bit(a, b, c),
            KeyRule::Rules => rules_key_bit(a, b, c),
        }
    }
}

impl fmt::Display for KeyRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KeyRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(KeyRule::Table),
            "rules" => Ok(KeyRule::Rules),
            _ => Err(Error::UnknownValue {
                kind: "key mapping",
                value: s.to_owned(),
            }),
        }
    }
}

/// Key bit for input triple `(a, b, c)`, indexed as `a·4 + b·2 + c`.
const KEY_TABLE: [u8; 8] = [1, 1, 0, 0, 0, 1, 0, 0];

pub fn table_key_bit(a: u8, b: u8, c: u8) -> u8 {
    KEY_TABLE[((a & 1) << 2 | (b & 1) << 1 | (c & 1)) as usize]
}

pub fn rules_key_bit(a: u8, b: u8, c: u8) -> u8 {
    // Only (white, black, white) maps to white.
    u8::from(!(a & 1 == 0 && b & 1 == 1 && c & 1 == 0))
}

/// A key rule plus the ordered triple of leaves it reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KeyMapping {
    rule: KeyRule,
    inputs: [LeafShare; 3],
}

impl Default for KeyMapping {
    fn default() -> Self {
        KeyMapping {
            rule: KeyRule::Table,
            inputs: [LeafShare::S12, LeafShare::S21, LeafShare::S22],
        }
    }
}

impl KeyMapping {
    pub fn new(rule: KeyRule, inputs: [LeafShare; 3]) -> Result<Self> {
        if inputs[0] == inputs[1] || inputs[0] == inputs[2] || inputs[1] == inputs[2] {
            return Err(Error::DuplicateKeyInputs);
        }
        Ok(KeyMapping { rule, inputs })
    }

    pub fn with_rule(rule: KeyRule) -> Self {
        KeyMapping {
            rule,
            ..Default::default()
        }
    }

    pub fn rule(&self) -> KeyRule {
        self.rule
    }

    pub fn inputs(&self) -> [LeafShare; 3] {
        self.inputs
    }

    /// The leaf not consumed by the key share.
    pub fn carrier(&self) -> LeafShare {
        *LeafShare::ALL
            .iter()
            .find(|l| !self.inputs.contains(l))
            .expect("three distinct inputs leave one leaf")
    }

    /// Comma-separated input names, e.g. `s12,s21,s22`.
    pub fn inputs_csv(&self) -> String {
        self.inputs.map(|l| l.as_str()).join(",")
    }

    pub fn parse_inputs(s: &str) -> Result<[LeafShare; 3]> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::UnknownValue {
                kind: "keyshare inputs",
                value: s.to_owned(),
            });
        }
        Ok([parts[0].parse()?, parts[1].parse()?, parts[2].parse()?])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyBundle {
    /// The secret after size normalization; the reference for every share.
    pub resized: BinaryImage,
    pub s1: BinaryImage,
    pub s2: BinaryImage,
    pub s11: BinaryImage,
    pub s12: BinaryImage,
    pub s21: BinaryImage,
    pub s22: BinaryImage,
    pub key_share: BinaryImage,
    pub carrier: BinaryImage,
    pub mapping: KeyMapping,
}

impl HierarchyBundle {
    pub fn leaf(&self, leaf: LeafShare) -> &BinaryImage {
        match leaf {
            LeafShare::S11 => &self.s11,
            LeafShare::S12 => &self.s12,
            LeafShare::S21 => &self.s21,
            LeafShare::S22 => &self.s22,
        }
    }
}

fn split(img: &BinaryImage, seed: u64, stage: u64, policy: MixedPolicy, execution: Execution) -> (BinaryImage, BinaryImage) {
    encode_blocks(img, StreamKey::new(seed, stage), policy, execution).expect("hierarchy images are block aligned")
}

pub fn encode_hierarchical(secret: &BinaryImage, cfg: &EncodeConfig, mapping: KeyMapping) -> HierarchyBundle {
    let resized = normalize_size(secret, cfg.normalize_mode);
    let (policy, exec, seed) = (cfg.mixed_policy, cfg.execution, cfg.seed);
    let (s1, s2) = split(&resized, seed, STAGE_LEVEL1, policy, exec);
    let ((s11, s12), (s21, s22)) = match exec {
        Execution::Sequential => (
            split(&s1, seed, STAGE_LEVEL2_S1, policy, exec),
            split(&s2, seed, STAGE_LEVEL2_S2, policy, exec),
        ),
        Execution::Parallel => rayon::join(
            || split(&s1, seed, STAGE_LEVEL2_S1, policy, exec),
            || split(&s2, seed, STAGE_LEVEL2_S2, policy, exec),
        ),
    };
    let mut bundle = HierarchyBundle {
        key_share: resized.clone(),
        carrier: resized.clone(),
        resized,
        s1,
        s2,
        s11,
        s12,
        s21,
        s22,
        mapping,
    };
    let [a, b, c] = mapping.inputs.map(|l| bundle.leaf(l));
    bundle.key_share = generate_key_share(a, b, c, mapping.rule).expect("leaves share dimensions");
    bundle.carrier = bundle.leaf(mapping.carrier()).clone();
    bundle
}

pub fn generate_key_share(a: &BinaryImage, b: &BinaryImage, c: &BinaryImage, rule: KeyRule) -> Result<BinaryImage> {
    a.ensure_same_dims(b)?;
    a.ensure_same_dims(c)?;
    let bits = a
        .bits()
        .iter()
        .zip(b.bits())
        .zip(c.bits())
        .map(|((&x, &y), &z)| rule.apply(x, y, z))
        .collect();
    BinaryImage::new(a.width(), a.height(), bits)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RevealStrategy {
    #[default]
    Xor,
    /// XOR, then each 2×2 block with ≥3 blacks becomes black and with ≤1
    /// black becomes white; two-black blocks are left as they are.
    XorDenoise,
    /// Ignores the key share: `(s11 ^ s12) ^ (s21 ^ s22)`.
    Chain,
}

impl RevealStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            RevealStrategy::Xor => "xor",
            RevealStrategy::XorDenoise => "xor-denoise",
            RevealStrategy::Chain => "chain",
        }
    }
}

impl fmt::Display for RevealStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RevealStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xor" => Ok(RevealStrategy::Xor),
            "xor-denoise" => Ok(RevealStrategy::XorDenoise),
            "chain" => Ok(RevealStrategy::Chain),
            _ => Err(Error::UnknownValue {
                kind: "reveal strategy",
                value: s.to_owned(),
            }),
        }
    }
}

/// Block majority cleanup used by `xor-denoise`.
pub fn denoise_blocks(img: &BinaryImage) -> Result<BinaryImage> {
    let (rows, cols) = img.block_grid()?;
    let mut out = img.clone();
    for r in 0..rows {
        for c in 0..cols {
            let block = img.block_unchecked(r, c);
            match block.black_count() {
                3.. => out.set_block(r, c, crate::codec::Block::BLACK)?,
                0 | 1 => out.set_block(r, c, crate::codec::Block::WHITE)?,
                _ => {}
            }
        }
    }
    Ok(out)
}

/// Reveals from the carrier and key share. `Chain` needs the whole bundle;
/// use [`reveal_chain`] or [`reveal_bundle`] for it.
pub fn reveal_final(carrier: &BinaryImage, key: &BinaryImage, strategy: RevealStrategy) -> Result<BinaryImage> {
    match strategy {
        RevealStrategy::Xor => carrier.xor(key),
        RevealStrategy::XorDenoise => {
            ensure_even(carrier)?;
            denoise_blocks(&carrier.xor(key)?)
        }
        RevealStrategy::Chain => Err(Error::ChainNeedsBundle),
    }
}

pub fn reveal_chain_leaves(s11: &BinaryImage, s12: &BinaryImage, s21: &BinaryImage, s22: &BinaryImage) -> Result<BinaryImage> {
    s11.xor(s12)?.xor(&s21.xor(s22)?)
}

pub fn reveal_chain(bundle: &HierarchyBundle) -> BinaryImage {
    reveal_chain_leaves(&bundle.s11, &bundle.s12, &bundle.s21, &bundle.s22).expect("bundle images share dimensions")
}

pub fn reveal_bundle(bundle: &HierarchyBundle, strategy: RevealStrategy) -> BinaryImage {
    match strategy {
        RevealStrategy::Chain => reveal_chain(bundle),
        s => reveal_final(&bundle.carrier, &bundle.key_share, s).expect("bundle images are block aligned"),
    }
}

/// Fraction of black pixels.
pub fn blacker_tendency(img: &BinaryImage) -> f64 {
    img.count_black() as f64 / img.dims().area() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Block;

    const TABLE_ROWS: [((u8, u8, u8), u8); 8] = [
        ((0, 0, 0), 1),
        ((0, 0, 1), 1),
        ((0, 1, 0), 0),
        ((0, 1, 1), 0),
        ((1, 0, 0), 0),
        ((1, 0, 1), 1),
        ((1, 1, 0), 0),
        ((1, 1, 1), 0),
    ];

    #[test]
    fn table_rule_matches_printed_rows() {
        for ((a, b, c), k) in TABLE_ROWS {
            assert_eq!(table_key_bit(a, b, c), k, "({a},{b},{c})");
        }
    }

    #[test]
    fn rules_whiten_only_white_black_white() {
        for v in 0..8u8 {
            let (a, b, c) = (v >> 2 & 1, v >> 1 & 1, v & 1);
            let expected = if (a, b, c) == (0, 1, 0) { 0 } else { 1 };
            assert_eq!(rules_key_bit(a, b, c), expected);
        }
    }

    #[test]
    fn mapping_validation_and_carrier() {
        assert_eq!(KeyMapping::default().carrier(), LeafShare::S11);
        let m = KeyMapping::new(KeyRule::Rules, [LeafShare::S11, LeafShare::S12, LeafShare::S21]).unwrap();
        assert_eq!(m.carrier(), LeafShare::S22);
        assert!(matches!(
            KeyMapping::new(KeyRule::Table, [LeafShare::S11, LeafShare::S11, LeafShare::S21]),
            Err(Error::DuplicateKeyInputs)
        ));
        assert_eq!(KeyMapping::parse_inputs("s12, share21,S22").unwrap(), KeyMapping::default().inputs());
        assert!(KeyMapping::parse_inputs("s12,s21").is_err());
    }

    #[test]
    fn bundle_is_expansionless_and_deterministic() {
        let secret = BinaryImage::from_fn(8, 8, |x, y| ((x ^ y) & 1) as u8).unwrap();
        let cfg = EncodeConfig::with_seed(5);
        let bundle = encode_hierarchical(&secret, &cfg, KeyMapping::default());
        for img in [&bundle.s1, &bundle.s2, &bundle.s11, &bundle.s12, &bundle.s21, &bundle.s22, &bundle.key_share, &bundle.carrier] {
            assert_eq!(img.dims(), secret.dims());
        }
        assert_eq!(bundle.carrier, bundle.s11);
        assert_eq!(bundle, encode_hierarchical(&secret, &cfg, KeyMapping::default()));
        let seq = EncodeConfig {
            execution: Execution::Sequential,
            ..cfg
        };
        assert_eq!(bundle, encode_hierarchical(&secret, &seq, KeyMapping::default()));
    }

    #[test]
    fn level_two_splits_reveal_level_one() {
        // Level-1 shares contain only two-black pure-table patterns, so every
        // level-2 block is mixed; XOR of s11/s12 is therefore approximate, but
        // s1 and s2 themselves must stack to the resized secret.
        let secret = BinaryImage::from_fn(16, 16, |x, y| ((x / 2 + y / 2) % 2) as u8).unwrap();
        let bundle = encode_hierarchical(&secret, &EncodeConfig::with_seed(1), KeyMapping::default());
        assert_eq!(bundle.s1.xor(&bundle.s2).unwrap(), secret);
    }

    #[test]
    fn xor_reveal_properties() {
        let a = BinaryImage::from_fn(4, 4, |x, y| ((x * 5 + y) % 3 == 0) as u8).unwrap();
        let k = BinaryImage::from_fn(4, 4, |x, y| ((x + y * 7) % 2) as u8).unwrap();
        assert_eq!(reveal_final(&a, &a, RevealStrategy::Xor).unwrap().count_black(), 0);
        let once = reveal_final(&a, &k, RevealStrategy::Xor).unwrap();
        assert_eq!(reveal_final(&once, &k, RevealStrategy::Xor).unwrap(), a);
        assert!(matches!(reveal_final(&a, &k, RevealStrategy::Chain), Err(Error::ChainNeedsBundle)));
    }

    #[test]
    fn denoise_thresholds() {
        let mut img = BinaryImage::filled(6, 2, 0).unwrap();
        img.set_block(0, 0, Block::from_bits([1, 1, 1, 0])).unwrap();
        img.set_block(0, 1, Block::from_bits([1, 0, 0, 1])).unwrap();
        img.set_block(0, 2, Block::from_bits([0, 0, 1, 0])).unwrap();
        let zero = BinaryImage::filled(6, 2, 0).unwrap();
        let out = reveal_final(&img, &zero, RevealStrategy::XorDenoise).unwrap();
        assert_eq!(out.block_at(0, 0).unwrap(), Block::BLACK);
        assert_eq!(out.block_at(0, 1).unwrap().bits(), [1, 0, 0, 1]);
        assert_eq!(out.block_at(0, 2).unwrap(), Block::WHITE);
        let odd = BinaryImage::filled(3, 2, 0).unwrap();
        assert!(matches!(reveal_final(&odd, &odd, RevealStrategy::XorDenoise), Err(Error::OddDimensions(_))));
    }

    #[test]
    fn key_share_dimension_check() {
        let a = BinaryImage::filled(4, 4, 0).unwrap();
        let b = BinaryImage::filled(4, 8, 0).unwrap();
        assert!(matches!(generate_key_share(&a, &a, &b, KeyRule::Table), Err(Error::DimensionMismatch { .. })));
        assert_eq!(generate_key_share(&a, &a, &a, KeyRule::Table).unwrap().count_black(), 16);
    }

    #[test]
    fn tendency() {
        assert_eq!(blacker_tendency(&BinaryImage::filled(3, 5, 1).unwrap()), 1.0);
        assert_eq!(blacker_tendency(&BinaryImage::filled(3, 5, 0).unwrap()), 0.0);
    }
}
