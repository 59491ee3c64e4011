//! Expansionless visual cryptography for binary images.
//!
//! A secret is split into two shares of the same size as the (normalized)
//! secret by replacing each 2×2 block with a pair of fixed patterns. Stacking
//! the shares with XOR reveals the secret. [`hvc`] repeats the split on each
//! share, derives a key share from three of the four leaves and offers
//! several ways to reveal the result. [`analysis`] produces pixel
//! concentration reports.
//!
//! Pixel convention everywhere: `1` is black, `0` is white.

pub mod analysis;
pub mod bitmap;
pub mod codec;
mod error;
pub mod hvc;
pub mod pipeline;
pub mod rng;
pub mod vc2;

pub use analysis::{pixel_stats, report, PixelStats, StatsReport};
pub use bitmap::{load_pbm, normalize_size, save_pbm, BinaryImage, Dimensions, NormalizeMode, PbmVariant};
pub use codec::{Block, BlockClass, MixedPolicy, PatternPair};
pub use error::{Error, PbmError, Result};
pub use hvc::{encode_hierarchical, HierarchyBundle, KeyMapping, KeyRule, LeafShare, RevealStrategy};
pub use vc2::{encode, reveal, EncodeConfig, Execution, SharePair};
