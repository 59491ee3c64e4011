use std::path::PathBuf;

use crate::bitmap::Dimensions;

/// Errors raised while decoding a PBM stream. Every parse error carries the
/// byte offset at which decoding stopped.
#[derive(Debug, thiserror::Error)]
pub enum PbmError {
    #[error("not a PBM bitmap at byte {offset}: found magic {found:?}")]
    NonBitmapFormat { offset: usize, found: String },
    #[error("malformed PBM header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: &'static str },
    #[error("PBM payload at byte {offset} does not match the header: expected {expected} {unit}, found {found}")]
    PayloadMismatch {
        offset: usize,
        expected: usize,
        found: usize,
        unit: &'static str,
    },
    #[error("invalid P1 pixel value {byte:#04x} at byte {offset}")]
    InvalidPixel { offset: usize, byte: u8 },
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}", path.display())]
    Pbm {
        path: PathBuf,
        #[source]
        source: PbmError,
    },
    #[error(transparent)]
    Parse(#[from] PbmError),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: Dimensions, right: Dimensions },
    #[error("image dimensions {0} are not even")]
    OddDimensions(Dimensions),
    #[error("block ({row}, {col}) is out of range for a {dims} image")]
    BlockOutOfRange { row: usize, col: usize, dims: Dimensions },
    #[error("pattern index {0} is out of range 0..4")]
    PatternIndexOutOfRange(usize),
    #[error("block {block} does not belong to class {class}")]
    ClassMismatch { class: String, block: String },
    #[error("key-share inputs must be three distinct leaf shares")]
    DuplicateKeyInputs,
    #[error("the chain strategy needs the full hierarchy bundle")]
    ChainNeedsBundle,
    #[error("chi-square needs at least two bins")]
    TooFewBins,
    #[error("chi-square bin {bin} has expected count {expected:.3} < 5")]
    UnderpopulatedBin { bin: usize, expected: f64 },
    #[error("no p-value table for {0} degrees of freedom (supported: 1..=8)")]
    UnsupportedDegreesOfFreedom(usize),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed stats csv: {0}")]
    MalformedReport(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("unknown {kind} {value:?}")]
    UnknownValue { kind: &'static str, value: String },
}

pub type Result<T> = std::result::Result<T, Error>;
