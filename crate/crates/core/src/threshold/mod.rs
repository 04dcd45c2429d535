//! Histogram auto-thresholding, threshold fusion and binarization.
//!
//! A level `t` splits intensities into background (`<= t`) and foreground
//! (`> t`); every method, fusion rule and mask in the crate uses this
//! convention.

mod methods;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use methods::{MAX_ITERATIONS, TIE_TOLERANCE};

use crate::error::{ImageError, ThresholdError};
use crate::image::{GrayImage, Histogram, RegionLabeling, LEVELS};

/// The fifteen global thresholding methods, in benchmark row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ThresholdMethod {
    Default,
    Huang,
    IsoData,
    Li,
    MaxEntropy,
    Mean,
    MinError,
    Minimum,
    Moments,
    Otsu,
    Percentile,
    RenyiEntropy,
    Shanbhag,
    Triangle,
    Yen,
}

impl ThresholdMethod {
    pub const ALL: [ThresholdMethod; 15] = [
        Self::Default,
        Self::Huang,
        Self::IsoData,
        Self::Li,
        Self::MaxEntropy,
        Self::Mean,
        Self::MinError,
        Self::Minimum,
        Self::Moments,
        Self::Otsu,
        Self::Percentile,
        Self::RenyiEntropy,
        Self::Shanbhag,
        Self::Triangle,
        Self::Yen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Default => "Default",
            Self::Huang => "Huang",
            Self::IsoData => "IsoData",
            Self::Li => "Li",
            Self::MaxEntropy => "MaxEntropy",
            Self::Mean => "Mean",
            Self::MinError => "MinError",
            Self::Minimum => "Minimum",
            Self::Moments => "Moments",
            Self::Otsu => "Otsu",
            Self::Percentile => "Percentile",
            Self::RenyiEntropy => "RenyiEntropy",
            Self::Shanbhag => "Shanbhag",
            Self::Triangle => "Triangle",
            Self::Yen => "Yen",
        }
    }
}

impl fmt::Display for ThresholdMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Case-insensitive; `-` and `_` are ignored (`max-entropy` parses).
impl FromStr for ThresholdMethod {
    type Err = ThresholdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_'))
            .flat_map(char::to_lowercase)
            .collect();
        Self::ALL
            .into_iter()
            .find(|m| m.name().to_lowercase() == key)
            .ok_or_else(|| ThresholdError::UnknownMethod(s.to_string()))
    }
}

/// Tunable method parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdParams {
    /// Target background fraction for [`ThresholdMethod::Percentile`].
    pub percentile: f64,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        Self { percentile: 0.5 }
    }
}

impl ThresholdParams {
    pub fn validate(&self) -> Result<(), ThresholdError> {
        if (0.0..=1.0).contains(&self.percentile) {
            Ok(())
        } else {
            Err(ThresholdError::InvalidPercentile(
                self.percentile.to_string(),
            ))
        }
    }
}

/// Threshold of `hist` under `method` with default parameters.
pub fn compute_threshold(method: ThresholdMethod, hist: &Histogram) -> Result<u8, ThresholdError> {
    compute_threshold_with(method, hist, &ThresholdParams::default())
}

pub fn compute_threshold_with(
    method: ThresholdMethod,
    hist: &Histogram,
    params: &ThresholdParams,
) -> Result<u8, ThresholdError> {
    params.validate()?;
    methods::compute(method, hist, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdStatus {
    Converged,
    Failed,
}

impl ThresholdStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::Failed => "failed",
        }
    }
}

/// One method's outcome; `level` is present exactly when the method converged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ThresholdEntry {
    level: Option<u8>,
    status: ThresholdStatus,
}

impl ThresholdEntry {
    pub fn converged(level: u8) -> Self {
        Self {
            level: Some(level),
            status: ThresholdStatus::Converged,
        }
    }

    pub fn failed() -> Self {
        Self {
            level: None,
            status: ThresholdStatus::Failed,
        }
    }

    pub fn level(&self) -> Option<u8> {
        self.level
    }

    pub fn status(&self) -> ThresholdStatus {
        self.status
    }
}

/// One entry per method, ordered by method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ThresholdReport {
    entries: BTreeMap<ThresholdMethod, ThresholdEntry>,
}

impl ThresholdReport {
    /// Report with exactly the given entries; methods not listed are absent.
    pub fn from_entries(
        entries: impl IntoIterator<Item = (ThresholdMethod, ThresholdEntry)>,
    ) -> Self {
        Self {
            entries: entries.into_iter().collect(),
        }
    }

    pub fn get(&self, method: ThresholdMethod) -> Option<ThresholdEntry> {
        self.entries.get(&method).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ThresholdMethod, ThresholdEntry)> + '_ {
        self.entries.iter().map(|(&m, &e)| (m, e))
    }

    /// Converged levels in method order.
    pub fn converged_levels(&self) -> Vec<u8> {
        self.entries.values().filter_map(|e| e.level).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `method,level,status` rows; failed methods have an empty level.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["method", "level", "status"])?;
        for (method, entry) in self.iter() {
            let level = entry.level.map(|l| l.to_string()).unwrap_or_default();
            out.write_record([method.name(), &level, entry.status.as_str()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Runs all fifteen methods with default parameters.
pub fn threshold_report(hist: &Histogram) -> ThresholdReport {
    threshold_report_with(hist, &ThresholdParams::default())
}

pub fn threshold_report_with(hist: &Histogram, params: &ThresholdParams) -> ThresholdReport {
    ThresholdReport::from_entries(ThresholdMethod::ALL.into_iter().map(|m| {
        let entry = match compute_threshold_with(m, hist, params) {
            Ok(level) => ThresholdEntry::converged(level),
            Err(_) => ThresholdEntry::failed(),
        };
        (m, entry)
    }))
}

/// Feature-level fusion: the mean of the converged levels, rounded half up.
pub fn fuse_feature_level(report: &ThresholdReport) -> Result<u8, ThresholdError> {
    let levels = report.converged_levels();
    if levels.is_empty() {
        return Err(ThresholdError::NoConvergedMethod);
    }
    let n = levels.len() as u64;
    let sum: u64 = levels.iter().map(|&l| u64::from(l)).sum();
    Ok(((2 * sum + n) / (2 * n)) as u8)
}

/// Row-major foreground flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        let expected = width as usize * height as usize;
        if bits.len() != expected {
            return Err(ImageError::BufferLength {
                expected,
                actual: bits.len(),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    fn from_lut(image: &GrayImage, foreground: &[bool; LEVELS]) -> Self {
        Self {
            width: image.width(),
            height: image.height(),
            bits: image
                .pixels()
                .iter()
                .map(|&p| foreground[p as usize])
                .collect(),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn foreground_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Background/foreground as regions 0/1. A mask holding one class only
    /// becomes a single region.
    pub fn to_labeling(&self) -> RegionLabeling {
        let fg = self.foreground_count();
        let labels = if fg == 0 || fg == self.bits.len() {
            vec![0; self.bits.len()]
        } else {
            self.bits.iter().map(|&b| u32::from(b)).collect()
        };
        let regions = if fg == 0 || fg == self.bits.len() {
            1
        } else {
            2
        };
        RegionLabeling::new(labels, regions).expect("both labels used")
    }
}

/// Foreground where the pixel exceeds `level`.
pub fn binarize(image: &GrayImage, level: u8) -> BinaryMask {
    let mut lut = [false; LEVELS];
    for (v, fg) in lut.iter_mut().enumerate() {
        *fg = v > level as usize;
    }
    BinaryMask::from_lut(image, &lut)
}

/// Decision-level fusion: a pixel is foreground when strictly more than half
/// of the converged methods put it above their level. Ties go to background.
pub fn fuse_decision_level(
    image: &GrayImage,
    report: &ThresholdReport,
) -> Result<BinaryMask, ThresholdError> {
    let levels = report.converged_levels();
    if levels.is_empty() {
        return Err(ThresholdError::NoConvergedMethod);
    }
    let mut lut = [false; LEVELS];
    for (v, fg) in lut.iter_mut().enumerate() {
        let votes = levels.iter().filter(|&&l| v > l as usize).count();
        *fg = 2 * votes > levels.len();
    }
    Ok(BinaryMask::from_lut(image, &lut))
}

/// Replaces every pixel by the mean intensity of its mask class, rounded half up.
pub fn class_means_image(image: &GrayImage, mask: &BinaryMask) -> Result<GrayImage, ImageError> {
    if (mask.width, mask.height) != image.dimensions() {
        return Err(ImageError::DimensionMismatch {
            left: image.dimensions(),
            right: (mask.width, mask.height),
        });
    }
    let means = class_means(image, mask);
    let pixels = mask
        .bits
        .iter()
        .map(|&fg| means[usize::from(fg)].unwrap_or(0))
        .collect();
    Ok(GrayImage::new(image.width(), image.height(), pixels).expect("same dimensions"))
}

/// Rounded mean intensity of the background (`[0]`) and foreground (`[1]`)
/// pixels; `None` for an empty class.
pub fn class_means(image: &GrayImage, mask: &BinaryMask) -> [Option<u8>; 2] {
    let mut sum = [0u64; 2];
    let mut count = [0u64; 2];
    for (&p, &fg) in image.pixels().iter().zip(&mask.bits) {
        sum[usize::from(fg)] += u64::from(p);
        count[usize::from(fg)] += 1;
    }
    [0, 1].map(|k| (count[k] > 0).then(|| ((2 * sum[k] + count[k]) / (2 * count[k])) as u8))
}

/// Two-level reconstruction of `image` at `level`: each side replaced by its mean.
pub fn two_level_reconstruction(image: &GrayImage, level: u8) -> GrayImage {
    class_means_image(image, &binarize(image, level)).expect("mask built from image")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in ThresholdMethod::ALL {
            assert_eq!(m.name().parse::<ThresholdMethod>(), Ok(m));
        }
        assert_eq!("max-entropy".parse(), Ok(ThresholdMethod::MaxEntropy));
        assert!("sauvola".parse::<ThresholdMethod>().is_err());
        let mut sorted = ThresholdMethod::ALL;
        sorted.sort();
        assert_eq!(sorted, ThresholdMethod::ALL);
    }

    #[test]
    fn single_spike_report() {
        let h = Histogram::from_pairs(&[(99, 50)]);
        let report = threshold_report(&h);
        assert_eq!(report.len(), 15);
        assert_eq!(report.get(ThresholdMethod::Mean).unwrap().level(), Some(99));
        assert_eq!(
            report.get(ThresholdMethod::Otsu).unwrap().status(),
            ThresholdStatus::Failed
        );
    }

    fn report_of(levels: &[u8]) -> ThresholdReport {
        ThresholdReport::from_entries(
            levels
                .iter()
                .zip(ThresholdMethod::ALL)
                .map(|(&l, m)| (m, ThresholdEntry::converged(l))),
        )
    }

    #[test]
    fn feature_fusion_rounds_half_up() {
        assert_eq!(fuse_feature_level(&report_of(&[100, 110, 120])), Ok(110));
        assert_eq!(fuse_feature_level(&report_of(&[100, 101])), Ok(101));
        let mut report = report_of(&[77]);
        report
            .entries
            .insert(ThresholdMethod::Yen, ThresholdEntry::failed());
        assert_eq!(fuse_feature_level(&report), Ok(77));
        assert_eq!(
            fuse_feature_level(&ThresholdReport::from_entries([])),
            Err(ThresholdError::NoConvergedMethod)
        );
    }

    #[test]
    fn majority_vote() {
        // levels 10..=150 step 10: value v exceeds (v-1)/10 of them
        let levels: Vec<u8> = (1..=15).map(|k| k * 10).collect();
        let report = report_of(&levels);
        // 85 > 8 levels, 75 > 7 levels
        let img = GrayImage::new(4, 1, vec![0, 75, 85, 255]).unwrap();
        let mask = fuse_decision_level(&img, &report).unwrap();
        assert_eq!(mask.bits(), &[false, false, true, true]);
    }

    #[test]
    fn binarize_matches_single_vote() {
        let img = GrayImage::new(4, 1, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(binarize(&img, 0).bits(), &[false, true, true, false]);
        assert_eq!(binarize(&img, 255).foreground_count(), 0);
        assert_eq!(
            fuse_decision_level(&img, &report_of(&[0])).unwrap(),
            binarize(&img, 0)
        );
    }

    #[test]
    fn reconstruction_uses_class_means() {
        let img = GrayImage::new(4, 1, vec![10, 20, 200, 211]).unwrap();
        // background mean 15, foreground 205.5 -> 206
        assert_eq!(
            two_level_reconstruction(&img, 100).pixels(),
            &[15, 15, 206, 206]
        );
    }

    #[test]
    fn report_csv_layout() {
        let h = Histogram::from_pairs(&[(99, 50)]);
        let csv = threshold_report(&h).to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("method,level,status"));
        assert_eq!(lines.next(), Some("Default,,failed"));
        assert!(csv.contains("Mean,99,converged"));
        assert_eq!(csv.lines().count(), 16);
    }
}
