//! Full-reference quality criteria: MAE, MSE, SNR and PSNR.

use serde::{Serialize, Serializer};

use crate::error::ImageError;
use crate::image::GrayImage;

/// Peak intensity used for PSNR.
pub const PEAK: f64 = 255.0;

/// Quality of a test image against a reference. Infinite ratios (identical
/// images) are `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsRecord {
    pub mae: f64,
    pub mse: f64,
    #[serde(serialize_with = "finite_or_string")]
    pub snr_db: f64,
    #[serde(serialize_with = "finite_or_string")]
    pub psnr_db: f64,
}

fn finite_or_string<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    if value.is_finite() {
        s.serialize_f64(*value)
    } else {
        s.serialize_str(&format_db(*value))
    }
}

/// Four decimals; `inf` / `-inf` / `n/a` for non-finite values.
pub fn format_db(value: f64) -> String {
    if value.is_nan() {
        "n/a".to_string()
    } else if value == f64::INFINITY {
        "inf".to_string()
    } else if value == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{value:.4}")
    }
}

/// `10 log10(255^2 / mse)`; infinite when `mse == 0`.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / mse).log10()
    }
}

pub fn compare(test: &GrayImage, reference: &GrayImage) -> Result<MetricsRecord, ImageError> {
    test.ensure_same_size(reference)?;
    let (mut abs, mut sq, mut signal) = (0u64, 0u64, 0u64);
    for (&t, &r) in test.pixels().iter().zip(reference.pixels()) {
        let d = u64::from(t.abs_diff(r));
        abs += d;
        sq += d * d;
        signal += u64::from(r) * u64::from(r);
    }
    let n = test.len() as f64;
    let mse = sq as f64 / n;
    let snr_db = if sq == 0 {
        f64::INFINITY
    } else {
        10.0 * (signal as f64 / sq as f64).log10()
    };
    Ok(MetricsRecord {
        mae: abs as f64 / n,
        mse,
        snr_db,
        psnr_db: psnr_from_mse(mse),
    })
}

impl MetricsRecord {
    pub const CSV_HEADER: &'static str = "mae,mse,snr_db,psnr_db";

    pub fn csv_row(&self) -> String {
        [self.mae, self.mse, self.snr_db, self.psnr_db]
            .map(format_db)
            .join(",")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }
}
