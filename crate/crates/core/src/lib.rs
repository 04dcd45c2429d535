//! Gray-image extraction from Gaussian-noise-corrupted scenes.
//!
//! Fifteen histogram auto-thresholding methods locate the candidate
//! boundaries between regions of interest. Their levels anchor a Ruspini
//! fuzzy partition of the intensity domain, a Wang–Mendel rule base is
//! learned from the noisy image itself, and Mamdani max–min inference with
//! centroid defuzzification rebuilds every pixel.
//!
//! ```
//! use grayfuzz::image::{add_gaussian_noise, phantom, NoiseSpec};
//! use grayfuzz::metrics::compare;
//! use grayfuzz::pipeline::{extract, PipelineConfig};
//!
//! let clean = phantom::shapes(64, 64, 50, 190);
//! let noisy = add_gaussian_noise(&clean, &NoiseSpec::new(30.0, 1).unwrap());
//! let result = extract(&noisy, &PipelineConfig::default()).unwrap();
//! let before = compare(&noisy, &clean).unwrap().psnr_db;
//! let after = compare(&result.extracted, &clean).unwrap().psnr_db;
//! assert!(after > before);
//! ```

pub mod bench;
pub mod error;
pub mod fuzzy;
pub mod image;
pub mod metrics;
pub mod pipeline;
pub mod threshold;

pub use error::{Error, Result};
pub use image::{histogram, GrayImage, Histogram};
pub use threshold::ThresholdMethod;
