//! Binary PGM (P5) codec.
//!
//! Reading accepts any maxval in `1..=255` and `#` comments between header
//! tokens. Writing always emits the canonical `P5\n<w> <h>\n255\n` header.

use super::GrayImage;
use crate::error::ImageError;

/// Parses a binary PGM file.
///
/// Raster bytes are taken verbatim; files with maxval below 255 are not rescaled.
/// Trailing bytes after the raster are ignored.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let mut cursor = HeaderCursor { bytes, pos: 0 };
    let magic = cursor
        .token()
        .ok_or_else(|| ImageError::MalformedHeader("missing magic number".into()))?;
    if magic != b"P5" {
        return Err(ImageError::MalformedHeader(format!(
            "expected magic P5, found {:?}",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = cursor.number("width")?;
    let height = cursor.number("height")?;
    let maxval = cursor.number("maxval")?;
    if maxval == 0 {
        return Err(ImageError::MalformedHeader(
            "maxval must be positive".into(),
        ));
    }
    if maxval > 255 {
        return Err(ImageError::MaxvalTooLarge(maxval));
    }
    if width == 0 || height == 0 {
        return Err(ImageError::EmptyDimensions { width, height });
    }
    // exactly one whitespace byte separates maxval from the raster
    match cursor.bytes.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        _ => {
            return Err(ImageError::MalformedHeader(
                "missing whitespace after maxval".into(),
            ))
        }
    }
    let expected = width as usize * height as usize;
    let raster = &bytes[cursor.pos..];
    if raster.len() < expected {
        return Err(ImageError::TruncatedRaster {
            expected,
            actual: raster.len(),
        });
    }
    GrayImage::new(width, height, raster[..expected].to_vec())
}

/// Serializes `image` as binary PGM with maxval 255.
pub fn save_pgm(image: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", image.width(), image.height());
    let mut out = Vec::with_capacity(header.len() + image.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(image.pixels());
    out
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_separators();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32, ImageError> {
        let token = self
            .token()
            .ok_or_else(|| ImageError::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(token)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                ImageError::MalformedHeader(format!(
                    "{what} is not a decimal integer: {:?}",
                    String::from_utf8_lossy(token)
                ))
            })
    }
}
