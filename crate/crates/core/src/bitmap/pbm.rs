//! Netpbm PBM reader and writer (plain `P1` and raw `P4`).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::{BinaryImage, Dimensions};
use crate::error::{Error, PbmError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PbmVariant {
    /// ASCII raster, one digit per pixel.
    P1,
    /// Packed raster, eight pixels per byte, MSB first, rows padded to a byte.
    #[default]
    P4,
}

impl PbmVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            PbmVariant::P1 => "p1",
            PbmVariant::P4 => "p4",
        }
    }
}

impl fmt::Display for PbmVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PbmVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p1" | "P1" => Ok(PbmVariant::P1),
            "p4" | "P4" => Ok(PbmVariant::P4),
            _ => Err(Error::UnknownValue {
                kind: "pbm format",
                value: s.to_owned(),
            }),
        }
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.data.get(self.pos).copied()
    }

    /// Skips whitespace and `#` comments running to end of line.
    fn skip_filler(&mut self) {
        while let Some(c) = self.peek() {
            if c == b'#' {
                while let Some(c) = self.peek() {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn header_uint(&mut self) -> std::result::Result<usize, PbmError> {
        self.skip_filler();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PbmError::MalformedHeader {
                offset: start,
                reason: if self.peek().is_none() {
                    "unexpected end of header"
                } else {
                    "expected a decimal dimension"
                },
            });
        }
        let value = std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or(PbmError::MalformedHeader {
                offset: start,
                reason: "dimension does not fit in usize",
            })?;
        if value == 0 {
            return Err(PbmError::MalformedHeader {
                offset: start,
                reason: "dimension must be positive",
            });
        }
        Ok(value)
    }
}

/// Decodes a PBM byte stream.
pub fn decode_pbm(data: &[u8]) -> std::result::Result<BinaryImage, PbmError> {
    if data.len() < 2 || data[0] != b'P' || !matches!(data[1], b'1' | b'4') {
        return Err(PbmError::NonBitmapFormat {
            offset: 0,
            found: String::from_utf8_lossy(&data[..data.len().min(2)]).into_owned(),
        });
    }
    let variant = if data[1] == b'1' { PbmVariant::P1 } else { PbmVariant::P4 };
    let mut cur = Cursor { data, pos: 2 };
    if !matches!(cur.peek(), Some(c) if c.is_ascii_whitespace() || c == b'#') {
        return Err(PbmError::MalformedHeader {
            offset: 2,
            reason: "magic number must be followed by whitespace",
        });
    }
    let width = cur.header_uint()?;
    let height = cur.header_uint()?;
    let area = width.checked_mul(height).ok_or(PbmError::MalformedHeader {
        offset: cur.pos,
        reason: "image area overflows",
    })?;
    let dims = Dimensions { width, height };

    let bits = match variant {
        PbmVariant::P1 => decode_plain(&mut cur, area)?,
        PbmVariant::P4 => decode_raw(&mut cur, dims)?,
    };
    Ok(BinaryImage::from_raw(dims, bits))
}

fn decode_plain(cur: &mut Cursor<'_>, area: usize) -> std::result::Result<Vec<u8>, PbmError> {
    let mut bits = Vec::with_capacity(area);
    loop {
        cur.skip_filler();
        let Some(c) = cur.peek() else { break };
        match c {
            b'0' | b'1' if bits.len() < area => bits.push(c - b'0'),
            b'0' | b'1' => {
                return Err(PbmError::PayloadMismatch {
                    offset: cur.pos,
                    expected: area,
                    found: area + 1,
                    unit: "pixels",
                })
            }
            _ => return Err(PbmError::InvalidPixel { offset: cur.pos, byte: c }),
        }
        cur.pos += 1;
    }
    if bits.len() != area {
        return Err(PbmError::PayloadMismatch {
            offset: cur.pos,
            expected: area,
            found: bits.len(),
            unit: "pixels",
        });
    }
    Ok(bits)
}

fn decode_raw(cur: &mut Cursor<'_>, dims: Dimensions) -> std::result::Result<Vec<u8>, PbmError> {
    // Exactly one whitespace byte separates the header from the raster.
    match cur.peek() {
        Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
        _ => {
            return Err(PbmError::MalformedHeader {
                offset: cur.pos,
                reason: "expected a single whitespace byte before the raster",
            })
        }
    }
    let stride = dims.width.div_ceil(8);
    let expected = stride * dims.height;
    let payload = &cur.data[cur.pos..];
    if payload.len() != expected {
        return Err(PbmError::PayloadMismatch {
            offset: cur.pos,
            expected,
            found: payload.len(),
            unit: "bytes",
        });
    }
    let mut bits = Vec::with_capacity(dims.area());
    for row in payload.chunks_exact(stride) {
        bits.extend((0..dims.width).map(|x| (row[x / 8] >> (7 - x % 8)) & 1));
    }
    Ok(bits)
}

pub fn encode_pbm(img: &BinaryImage, variant: PbmVariant) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    match variant {
        PbmVariant::P1 => {
            let mut out = format!("P1\n{w} {h}\n").into_bytes();
            for y in 0..h {
                // Plain PBM lines should stay under 70 characters.
                for (i, chunk) in img.row(y).chunks(34).enumerate() {
                    if i > 0 {
                        out.push(b'\n');
                    }
                    for (j, &b) in chunk.iter().enumerate() {
                        if j > 0 {
                            out.push(b' ');
                        }
                        out.push(b'0' + b);
                    }
                }
                out.push(b'\n');
            }
            out
        }
        PbmVariant::P4 => {
            let stride = w.div_ceil(8);
            let mut out = format!("P4\n{w} {h}\n").into_bytes();
            out.reserve(stride * h);
            for y in 0..h {
                let mut packed = vec![0u8; stride];
                for (x, &b) in img.row(y).iter().enumerate() {
                    packed[x / 8] |= b << (7 - x % 8);
                }
                out.extend_from_slice(&packed);
            }
            out
        }
    }
}

pub fn load_pbm(path: impl AsRef<Path>) -> Result<BinaryImage> {
    let path = path.as_ref();
    let data = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    decode_pbm(&data).map_err(|source| Error::Pbm {
        path: path.to_owned(),
        source,
    })
}

pub fn save_pbm(img: &BinaryImage, path: impl AsRef<Path>, variant: PbmVariant) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_pbm(img, variant)).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decodes_plain() {
        let img = decode_pbm(b"P1\n2 2\n1 0 0 1").unwrap();
        assert_eq!(img, BinaryImage::new(2, 2, vec![1, 0, 0, 1]).unwrap());
    }

    #[test]
    fn decodes_plain_with_comments_and_packed_digits() {
        let img = decode_pbm(b"P1 # a comment\n# another\n3 # w\n2\n101\n# mid\n010\n").unwrap();
        assert_eq!(img.bits(), &[1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn decodes_raw() {
        let img = decode_pbm(b"P4\n8 1\n\x81").unwrap();
        assert_eq!(img.bits(), &[1, 0, 0, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn rejects_other_netpbm_kinds() {
        let err = decode_pbm(b"P5\n2 2\n255\n\0\0\0\0").unwrap_err();
        assert!(matches!(err, PbmError::NonBitmapFormat { offset: 0, .. }));
        assert!(matches!(decode_pbm(b"").unwrap_err(), PbmError::NonBitmapFormat { .. }));
    }

    #[test]
    fn reports_header_offsets() {
        match decode_pbm(b"P1\n2 x\n").unwrap_err() {
            PbmError::MalformedHeader { offset, .. } => assert_eq!(offset, 5),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(decode_pbm(b"P1\n0 2\n").unwrap_err(), PbmError::MalformedHeader { offset: 3, .. }));
        assert!(matches!(decode_pbm(b"P12 2\n").unwrap_err(), PbmError::MalformedHeader { offset: 2, .. }));
    }

    #[test]
    fn reports_payload_mismatch() {
        match decode_pbm(b"P1\n2 2\n1 0 1").unwrap_err() {
            PbmError::PayloadMismatch { expected, found, .. } => assert_eq!((expected, found), (4, 3)),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(decode_pbm(b"P1\n1 1\n1 1").unwrap_err(), PbmError::PayloadMismatch { offset: 9, .. }));
        match decode_pbm(b"P4\n9 2\n\0\0\0").unwrap_err() {
            PbmError::PayloadMismatch { offset, expected, found, .. } => {
                assert_eq!((offset, expected, found), (7, 4, 3))
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(decode_pbm(b"P1\n1 1\n2").unwrap_err(), PbmError::InvalidPixel { offset: 7, byte: b'2' }));
    }

    #[test]
    fn encodes_plain() {
        let img = BinaryImage::new(2, 2, vec![1, 0, 0, 1]).unwrap();
        assert_eq!(encode_pbm(&img, PbmVariant::P1), b"P1\n2 2\n1 0\n0 1\n");
    }

    #[test]
    fn raw_rows_are_zero_padded() {
        let img = BinaryImage::new(3, 2, vec![1, 1, 1, 0, 1, 0]).unwrap();
        let bytes = encode_pbm(&img, PbmVariant::P4);
        assert_eq!(&bytes[bytes.len() - 2..], &[0b1110_0000, 0b0100_0000]);
        assert_eq!(decode_pbm(&bytes).unwrap(), img);
    }

    #[test]
    fn roundtrip_13x7_raw() {
        let img = BinaryImage::from_fn(13, 7, |x, y| ((x * 7 + y * 11) % 3 == 0) as u8).unwrap();
        assert_eq!(decode_pbm(&encode_pbm(&img, PbmVariant::P4)).unwrap(), img);
    }

    #[test]
    fn long_plain_rows_wrap() {
        let img = BinaryImage::from_fn(100, 2, |x, _| (x % 2) as u8).unwrap();
        let bytes = encode_pbm(&img, PbmVariant::P1);
        assert!(bytes.split(|&b| b == b'\n').all(|l| l.len() <= 70));
        assert_eq!(decode_pbm(&bytes).unwrap(), img);
    }

    fn arb_image() -> impl Strategy<Value = BinaryImage> {
        (1usize..40, 1usize..40).prop_flat_map(|(w, h)| {
            proptest::collection::vec(0u8..=1, w * h).prop_map(move |bits| BinaryImage::new(w, h, bits).unwrap())
        })
    }

    proptest! {
        #[test]
        fn save_then_load_is_identity(img in arb_image()) {
            for variant in [PbmVariant::P1, PbmVariant::P4] {
                prop_assert_eq!(&decode_pbm(&encode_pbm(&img, variant)).unwrap(), &img);
            }
        }
    }
}
