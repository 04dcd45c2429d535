//! End-to-end extraction: thresholds, envelopes, rule learning, per-pixel
//! inference.
//!
//! The rule base has two inputs, the pixel intensity `x` and its
//! neighbourhood mean `m`. Training targets come from the image itself: the
//! majority-vote mask of the fifteen thresholds seeds a two-class labeling,
//! which is refined by nearest class mean on `(x + m) / 2`, and each pixel's
//! target is the mean intensity of its class.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;
use crate::fuzzy::{
    build_consequent_partition, build_partition_with_gap, combine, defuzzify, generate_rules,
    infer, FuzzyPartition, RuleBase, TrainingPair, DEFAULT_CLUSTER_GAP,
};
use crate::image::{histogram, local_mean, GrayImage, LEVELS};
use crate::threshold::{
    class_means, class_means_image, fuse_decision_level, threshold_report_with, BinaryMask,
    ThresholdParams, ThresholdReport,
};

/// Level given to pixels for which no rule fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    /// The mean intensity of the pixel's training class.
    ClassMean,
    /// A fixed level.
    Level(u8),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Minimum number of input regions per variable.
    pub min_regions: usize,
    /// Threshold levels closer than this merge into one envelope peak.
    pub cluster_gap: f64,
    /// Side of the square neighbourhood for the local-mean input (odd).
    pub window: usize,
    /// Every `training_stride`-th pixel (row-major) yields a training pair.
    pub training_stride: usize,
    /// Passes of nearest-class-mean relabeling after the majority vote;
    /// 0 trains on the majority vote as is.
    pub refine_iterations: usize,
    pub fallback: Fallback,
    pub threshold: ThresholdParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            min_regions: 24,
            cluster_gap: DEFAULT_CLUSTER_GAP,
            window: 3,
            training_stride: 4,
            refine_iterations: 100,
            fallback: Fallback::ClassMean,
            threshold: ThresholdParams::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |msg: String| Err(PipelineError::Config(msg));
        if self.min_regions < 3 {
            return fail(format!(
                "min_regions must be at least 3, got {}",
                self.min_regions
            ));
        }
        if !(self.cluster_gap.is_finite() && self.cluster_gap > 0.0) {
            return fail(format!(
                "cluster_gap must be positive, got {}",
                self.cluster_gap
            ));
        }
        if self.window.is_multiple_of(2) {
            return fail(format!("window must be odd, got {}", self.window));
        }
        if self.training_stride == 0 {
            return fail("training_stride must be at least 1".to_string());
        }
        self.threshold.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionResult {
    pub extracted: GrayImage,
    pub report: ThresholdReport,
    /// `None` for degenerate input.
    pub rulebase: Option<RuleBase>,
    /// Majority-vote fusion of the fifteen thresholds.
    pub mask: BinaryMask,
    /// Refined two-class labeling the rules were trained on.
    pub labels: BinaryMask,
    /// Training targets of the background and foreground classes.
    pub class_levels: [Option<u8>; 2],
    /// Pixels that took the fallback level because no rule fired.
    pub no_rule_pixels: usize,
    /// Single-intensity input, returned unchanged.
    pub degenerate: bool,
}

impl ExtractionResult {
    /// Every pixel replaced by its training target.
    pub fn class_means_image(&self) -> GrayImage {
        let pixels = self
            .labels
            .bits()
            .iter()
            .map(|&fg| self.class_levels[usize::from(fg)].unwrap_or(0))
            .collect();
        GrayImage::new(self.extracted.width(), self.extracted.height(), pixels)
            .expect("same dimensions")
    }
}

pub fn extract(noisy: &GrayImage, cfg: &PipelineConfig) -> Result<ExtractionResult, PipelineError> {
    cfg.validate()?;
    let hist = histogram(noisy);
    let report = threshold_report_with(&hist, &cfg.threshold);
    let mask = fuse_decision_level(noisy, &report)?;

    if hist.occupied_bins() == 1 {
        let level = noisy.pixels()[0];
        return Ok(ExtractionResult {
            extracted: noisy.clone(),
            report,
            rulebase: None,
            labels: mask.clone(),
            mask,
            class_levels: [Some(level), None],
            no_rule_pixels: 0,
            degenerate: true,
        });
    }

    let local = local_mean(noisy, cfg.window);
    let labels = refine_labels(noisy, &local, &mask, cfg.refine_iterations);
    let class_levels = class_means(noisy, &labels);
    let targets = class_means_image(noisy, &labels).expect("labels built from image");

    let anchors: Vec<f64> = report
        .converged_levels()
        .iter()
        .map(|&l| l as f64)
        .collect();
    let input = build_partition_with_gap(&anchors, cfg.min_regions, cfg.cluster_gap)?;
    let outputs: Vec<f64> = class_levels.iter().flatten().map(|&l| l as f64).collect();
    let output = build_consequent_partition(&outputs)?;

    let pairs: Vec<TrainingPair> = (0..noisy.len())
        .step_by(cfg.training_stride)
        .map(|i| {
            TrainingPair::new(
                vec![noisy.pixels()[i] as f64, local.pixels()[i] as f64],
                targets.pixels()[i] as f64,
            )
        })
        .collect();
    let rules = generate_rules(&pairs, &[input.clone(), input.clone()], &output)?;
    let base = combine(&rules, vec![input.clone(), input], output)?;

    let lut = inference_table(&base, noisy, &local);
    let mut no_rule_pixels = 0;
    let pixels = (0..noisy.len())
        .map(|i| {
            let key = lut_key(noisy.pixels()[i], local.pixels()[i]);
            lut[key].unwrap_or_else(|| {
                no_rule_pixels += 1;
                match cfg.fallback {
                    Fallback::ClassMean => targets.pixels()[i],
                    Fallback::Level(l) => l,
                }
            })
        })
        .collect();
    let extracted = GrayImage::new(noisy.width(), noisy.height(), pixels).expect("same dimensions");

    Ok(ExtractionResult {
        extracted,
        report,
        rulebase: Some(base),
        mask,
        labels,
        class_levels,
        no_rule_pixels,
        degenerate: false,
    })
}

fn lut_key(x: u8, m: u8) -> usize {
    x as usize * LEVELS + m as usize
}

/// Defuzzified output for every `(x, m)` combination present in the image;
/// `None` where no rule fires.
fn inference_table(base: &RuleBase, image: &GrayImage, local: &GrayImage) -> Vec<Option<u8>> {
    let mut present = vec![false; LEVELS * LEVELS];
    for (&x, &m) in image.pixels().iter().zip(local.pixels()) {
        present[lut_key(x, m)] = true;
    }
    (0..LEVELS * LEVELS)
        .into_par_iter()
        .map(|key| {
            if !present[key] || base.is_empty() {
                return None;
            }
            let input = [(key / LEVELS) as f64, (key % LEVELS) as f64];
            let out = infer(base, &input).expect("arity and finiteness hold");
            let crisp = defuzzify(&out);
            (!crisp.no_rule_fired).then_some(crisp.level)
        })
        .collect()
}

/// Nearest-class-mean relabeling on `(x + m) / 2`: a pixel is foreground when
/// its value lies strictly above the midpoint of the two class means. Stops
/// at a fixed point, after `iterations` passes, or when a class empties.
fn refine_labels(
    image: &GrayImage,
    local: &GrayImage,
    seed: &BinaryMask,
    iterations: usize,
) -> BinaryMask {
    // work with v = x + m to stay in integers
    let values: Vec<u64> = image
        .pixels()
        .iter()
        .zip(local.pixels())
        .map(|(&x, &m)| u64::from(x) + u64::from(m))
        .collect();
    let mut bits = seed.bits().to_vec();
    for _ in 0..iterations {
        let (mut sum, mut count) = ([0u64; 2], [0u64; 2]);
        for (&v, &fg) in values.iter().zip(&bits) {
            sum[usize::from(fg)] += v;
            count[usize::from(fg)] += 1;
        }
        if count[0] == 0 || count[1] == 0 {
            break;
        }
        // v > (sum0/n0 + sum1/n1) / 2  <=>  2 v n0 n1 > sum0 n1 + sum1 n0
        let (n0, n1) = (count[0] as u128, count[1] as u128);
        let rhs = sum[0] as u128 * n1 + sum[1] as u128 * n0;
        let next: Vec<bool> = values
            .iter()
            .map(|&v| 2 * v as u128 * n0 * n1 > rhs)
            .collect();
        if next == bits {
            break;
        }
        bits = next;
    }
    BinaryMask::new(image.width(), image.height(), bits).expect("same dimensions")
}

/// Membership map of every region of `partition` over the pixels of `image`.
pub fn fuzzify_image(image: &GrayImage, partition: &FuzzyPartition) -> Vec<Vec<f64>> {
    let table: Vec<Vec<f64>> = (0..LEVELS)
        .map(|v| partition.memberships(v as f64))
        .collect();
    (0..partition.region_count())
        .map(|k| {
            image
                .pixels()
                .iter()
                .map(|&p| table[p as usize][k])
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::phantom;

    #[test]
    fn clean_two_level_is_exact() {
        let clean = phantom::halves(32, 16, 40, 210);
        let result = extract(&clean, &PipelineConfig::default()).unwrap();
        assert_eq!(result.extracted, clean);
        assert!(!result.degenerate);
        assert_eq!(result.class_levels, [Some(40), Some(210)]);
    }

    #[test]
    fn constant_image_is_degenerate() {
        let img = GrayImage::filled(8, 8, 128).unwrap();
        let result = extract(&img, &PipelineConfig::default()).unwrap();
        assert!(result.degenerate);
        assert_eq!(result.extracted, img);
        assert!(result.rulebase.is_none());
    }

    #[test]
    fn config_validation() {
        let bad = [
            PipelineConfig {
                window: 4,
                ..Default::default()
            },
            PipelineConfig {
                training_stride: 0,
                ..Default::default()
            },
            PipelineConfig {
                min_regions: 2,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        let json = r#"{"min_regions": 12, "fallback": {"level": 7}}"#;
        let cfg: PipelineConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.min_regions, 12);
        assert_eq!(cfg.fallback, Fallback::Level(7));
        assert_eq!(cfg.window, 3);
    }

    #[test]
    fn fuzzified_maps_sum_to_one() {
        let img = GrayImage::new(3, 1, vec![0, 100, 150]).unwrap();
        let p = FuzzyPartition::from_peaks(vec![0.0, 100.0, 255.0]).unwrap();
        let maps = fuzzify_image(&img, &p);
        assert_eq!(maps.len(), 3);
        assert_eq!(maps[1][1], 1.0);
        assert_eq!((maps[0][1], maps[2][1]), (0.0, 0.0));
        for i in 0..3 {
            let total: f64 = maps.iter().map(|m| m[i]).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
