//! Method × sigma PSNR matrices.
//!
//! Every (image, sigma, seed) run corrupts the clean image once and scores
//! each requested row against the clean image. Single-method rows use the
//! two-level class-means reconstruction at that method's threshold; the
//! proposed row uses the extraction pipeline.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{add_gaussian_noise, histogram, load_pgm, phantom, GrayImage, NoiseSpec};
use crate::metrics::{compare, format_db};
use crate::pipeline::{extract, PipelineConfig};
use crate::threshold::{compute_threshold_with, two_level_reconstruction, ThresholdMethod};

/// Row label of the fuzzy extraction pipeline.
pub const PROPOSED_LABEL: &str = "Proposed method";

/// Prefix selecting a built-in phantom instead of a file.
pub const PHANTOM_PREFIX: &str = "phantom:";

/// A benchmark row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Row {
    Method(ThresholdMethod),
    Proposed,
}

impl Row {
    /// The fifteen methods followed by the proposed row.
    pub fn all() -> Vec<Row> {
        ThresholdMethod::ALL
            .into_iter()
            .map(Row::Method)
            .chain([Row::Proposed])
            .collect()
    }

    pub fn label(&self) -> &'static str {
        match self {
            Row::Method(m) => m.name(),
            Row::Proposed => PROPOSED_LABEL,
        }
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Row {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim();
        if key.eq_ignore_ascii_case("proposed") || key.eq_ignore_ascii_case(PROPOSED_LABEL) {
            return Ok(Row::Proposed);
        }
        Ok(Row::Method(key.parse()?))
    }
}

impl TryFrom<String> for Row {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Row> for String {
    fn from(row: Row) -> Self {
        match row {
            Row::Method(m) => m.name().to_string(),
            Row::Proposed => "proposed".to_string(),
        }
    }
}

/// What the proposed row is scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareMode {
    /// The extracted image itself.
    #[default]
    Restored,
    /// The noisy image with each training class replaced by its mean.
    BinarizedMeans,
}

impl FromStr for CompareMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "restored" => Ok(Self::Restored),
            "binarized-means" => Ok(Self::BinarizedMeans),
            other => Err(Error::Spec(format!(
                "unknown compare mode {other:?} (expected restored or binarized-means)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSpec {
    /// PGM paths, or `phantom:<name>` for a built-in scene.
    pub images: Vec<String>,
    pub sigmas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Row>,
    pub compare: CompareMode,
    pub pipeline: PipelineConfig,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self {
            images: vec![format!("{PHANTOM_PREFIX}bimodal")],
            sigmas: vec![15.0, 30.0, 45.0, 60.0, 75.0],
            seeds: vec![1],
            methods: Row::all(),
            compare: CompareMode::Restored,
            pipeline: PipelineConfig::default(),
        }
    }
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<()> {
        let spec_err = |msg: &str| Err(Error::Spec(msg.to_string()));
        if self.images.is_empty() {
            return spec_err("no images");
        }
        if self.sigmas.is_empty() {
            return spec_err("no sigmas");
        }
        if self.seeds.is_empty() {
            return spec_err("no seeds");
        }
        if self.methods.is_empty() {
            return spec_err("no methods");
        }
        for &sigma in &self.sigmas {
            NoiseSpec::new(sigma, 0)?;
        }
        self.pipeline.validate()?;
        Ok(())
    }
}

/// Loads `phantom:<name>` or a PGM file.
pub fn load_image(source: &str) -> Result<GrayImage> {
    if let Some(name) = source.strip_prefix(PHANTOM_PREFIX) {
        return Ok(phantom::by_name(name)?);
    }
    let path = Path::new(source);
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(load_pgm(&bytes)?)
}

/// Mean PSNR per (row, sigma); `None` where any contributing run failed.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkTable {
    pub sigmas: Vec<f64>,
    pub rows: Vec<(Row, Vec<Option<f64>>)>,
}

impl BenchmarkTable {
    pub fn cell(&self, row: Row, sigma_index: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|(r, _)| *r == row)
            .and_then(|(_, cells)| cells[sigma_index])
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method");
        for sigma in &self.sigmas {
            out.push(',');
            out.push_str(&sigma.to_string());
        }
        out.push('\n');
        for (row, cells) in &self.rows {
            out.push_str(row.label());
            for cell in cells {
                out.push(',');
                out.push_str(&cell.map(format_db).unwrap_or_else(|| "n/a".to_string()));
            }
            out.push('\n');
        }
        out
    }
}

/// PSNR of one row for one noisy realisation.
fn score_row(
    row: Row,
    noisy: &GrayImage,
    clean: &GrayImage,
    spec: &BenchmarkSpec,
) -> Result<Option<f64>> {
    let candidate = match row {
        Row::Method(m) => {
            match compute_threshold_with(m, &histogram(noisy), &spec.pipeline.threshold) {
                Ok(level) => two_level_reconstruction(noisy, level),
                Err(_) => return Ok(None),
            }
        }
        Row::Proposed => {
            let result = extract(noisy, &spec.pipeline)?;
            match spec.compare {
                CompareMode::Restored => result.extracted,
                CompareMode::BinarizedMeans => result.class_means_image(),
            }
        }
    };
    Ok(Some(compare(&candidate, clean)?.psnr_db))
}

pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkTable> {
    spec.validate()?;
    let images = spec
        .images
        .iter()
        .map(|s| load_image(s))
        .collect::<Result<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for s in 0..spec.sigmas.len() {
        for image in &images {
            for &seed in &spec.seeds {
                jobs.push((s, image, seed));
            }
        }
    }
    // one noisy realisation per job, scored for every row
    let scores = jobs
        .par_iter()
        .map(|&(s, clean, seed)| {
            let noisy = add_gaussian_noise(clean, &NoiseSpec::new(spec.sigmas[s], seed)?);
            let row_scores = spec
                .methods
                .iter()
                .map(|&row| score_row(row, &noisy, clean, spec))
                .collect::<Result<Vec<_>>>()?;
            Ok((s, row_scores))
        })
        .collect::<Result<Vec<_>>>()?;

    let runs = (images.len() * spec.seeds.len()) as f64;
    let rows = spec
        .methods
        .iter()
        .enumerate()
        .map(|(r, &row)| {
            let cells = (0..spec.sigmas.len())
                .map(|s| {
                    let mut total = 0.0;
                    for (js, row_scores) in &scores {
                        if *js == s {
                            total += row_scores[r]?;
                        }
                    }
                    Some(total / runs)
                })
                .collect();
            (row, cells)
        })
        .collect();
    Ok(BenchmarkTable {
        sigmas: spec.sigmas.clone(),
        rows,
    })
}
