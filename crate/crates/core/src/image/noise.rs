use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::GrayImage;
use crate::error::ImageError;

/// Additive Gaussian noise parameters: standard deviation in intensity levels
/// and the seed of the deviate stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoiseSpec")]
pub struct NoiseSpec {
    sigma: f64,
    seed: u64,
}

#[derive(Deserialize)]
struct RawNoiseSpec {
    sigma: f64,
    seed: u64,
}

impl TryFrom<RawNoiseSpec> for NoiseSpec {
    type Error = ImageError;

    fn try_from(raw: RawNoiseSpec) -> Result<Self, Self::Error> {
        NoiseSpec::new(raw.sigma, raw.seed)
    }
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self, ImageError> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(ImageError::InvalidSigma(sigma));
        }
        Ok(Self { sigma, seed })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Corrupts `image` with zero-mean Gaussian noise.
///
/// The deviate stream is ChaCha12 seeded through `SeedableRng::seed_from_u64`,
/// with normal deviates from `rand_distr::StandardNormal` (ziggurat). One
/// deviate is drawn per pixel in row-major order, so the output depends only
/// on the image and `spec`. Each pixel becomes
/// `clamp(round(p + sigma * z), 0, 255)`, rounding half away from zero.
/// With `sigma == 0` no deviates are drawn and the image is returned as is.
pub fn add_gaussian_noise(image: &GrayImage, spec: &NoiseSpec) -> GrayImage {
    if spec.sigma == 0.0 {
        return image.clone();
    }
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let pixels = image
        .pixels()
        .iter()
        .map(|&p| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (p as f64 + spec.sigma * z).round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage::new(image.width(), image.height(), pixels).expect("dimensions are unchanged")
}
