//! 8-bit gray rasters and the operations every other stage builds on:
//! PGM I/O, seeded Gaussian corruption, histograms, neighborhood means and
//! the segmentation-validity check.

mod filter;
mod noise;
mod partition;
mod pgm;
pub mod phantom;

pub use filter::local_mean;
pub use noise::{add_gaussian_noise, NoiseSpec};
pub use partition::{range_within, validate_partition, PartitionVerdict, RegionLabeling};
pub use pgm::{load_pgm, save_pgm};

use serde::{Deserialize, Serialize};

use crate::error::ImageError;

/// Number of intensity levels in an 8-bit image.
pub const LEVELS: usize = 256;

/// Single-channel 8-bit raster stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(ImageError::BufferLength {
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image with every pixel set to `value`.
    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width as usize * height as usize])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> u8,
    ) -> Result<Self, ImageError> {
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    /// Always false: a valid image has at least one pixel.
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub(crate) fn ensure_same_size(&self, other: &GrayImage) -> Result<(), ImageError> {
        if self.dimensions() != other.dimensions() {
            return Err(ImageError::DimensionMismatch {
                left: self.dimensions(),
                right: other.dimensions(),
            });
        }
        Ok(())
    }
}

/// 256-bin intensity census.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn from_counts(counts: [u64; LEVELS]) -> Self {
        let total = counts.iter().sum();
        Self {
            counts: counts.to_vec(),
            total,
        }
    }

    /// Histogram from a sparse list of `(level, count)` pairs; repeated levels add up.
    pub fn from_pairs(pairs: &[(u8, u64)]) -> Self {
        let mut counts = [0u64; LEVELS];
        for &(level, count) in pairs {
            counts[level as usize] += count;
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, level: u8) -> u64 {
        self.counts[level as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Lowest and highest occupied levels, or `None` for an empty histogram.
    pub fn occupied_range(&self) -> Option<(u8, u8)> {
        let lo = self.counts.iter().position(|&c| c > 0)?;
        let hi = self.counts.iter().rposition(|&c| c > 0)?;
        Some((lo as u8, hi as u8))
    }

    pub fn occupied_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Sum of `level * count` over all bins.
    pub fn intensity_sum(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(level, &c)| level as u64 * c)
            .sum()
    }
}

/// Counts each intensity level of `image`.
pub fn histogram(image: &GrayImage) -> Histogram {
    let mut counts = [0u64; LEVELS];
    for &p in image.pixels() {
        counts[p as usize] += 1;
    }
    Histogram::from_counts(counts)
}
