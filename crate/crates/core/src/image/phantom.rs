//! Synthetic test scenes.

use super::GrayImage;
use crate::error::ImageError;

/// Left half `low`, right half `high`.
pub fn halves(width: u32, height: u32, low: u8, high: u8) -> GrayImage {
    GrayImage::from_fn(width, height, |x, _| if x < width / 2 { low } else { high })
        .expect("positive dimensions")
}

/// Two-level scene: a disk and two rectangles at `high` on a `low` background,
/// laid out relative to the image size.
pub fn shapes(width: u32, height: u32, low: u8, high: u8) -> GrayImage {
    let (w, h) = (width as f64, height as f64);
    let (cx, cy, r) = (0.35 * w, 0.39 * h, 0.21 * w.min(h));
    GrayImage::from_fn(width, height, |x, y| {
        let (fx, fy) = (x as f64 + 0.5, y as f64 + 0.5);
        let in_disk = (fx - cx).powi(2) + (fy - cy).powi(2) < r * r;
        let in_block = (0.55 * w..0.90 * w).contains(&fx) && (0.58 * h..0.86 * h).contains(&fy);
        let in_bar = (0.62 * w..0.94 * w).contains(&fx) && (0.12 * h..0.23 * h).contains(&fy);
        if in_disk || in_block || in_bar {
            high
        } else {
            low
        }
    })
    .expect("positive dimensions")
}

/// 256×256 bimodal benchmark scene (levels 50 and 190).
pub fn bimodal() -> GrayImage {
    shapes(256, 256, 50, 190)
}

/// 256×256 two-level halves at 40 and 210.
pub fn two_level() -> GrayImage {
    halves(256, 256, 40, 210)
}

/// Looks up a built-in phantom: `bimodal` or `two-level`.
pub fn by_name(name: &str) -> Result<GrayImage, ImageError> {
    match name {
        "bimodal" => Ok(bimodal()),
        "two-level" => Ok(two_level()),
        other => Err(ImageError::UnknownPhantom(other.to_string())),
    }
}
