use std::path::PathBuf;

use thiserror::Error;

use crate::threshold::ThresholdMethod;

/// Errors raised while constructing images or parsing PGM data.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImageError {
    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },
    #[error("pixel buffer holds {actual} values, expected {expected}")]
    BufferLength { expected: usize, actual: usize },
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("PGM maxval {0} exceeds 255; only 8-bit rasters are supported")]
    MaxvalTooLarge(u32),
    #[error("PGM raster truncated: expected {expected} bytes, found {actual}")]
    TruncatedRaster { expected: usize, actual: usize },
    #[error("image dimensions differ: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
    #[error("labeling has {actual} labels for {expected} pixels")]
    LabelingLength { expected: usize, actual: usize },
    #[error("region count must be at least 1")]
    NoRegions,
    #[error("label {label} is out of range for {region_count} regions")]
    LabelOutOfRange { label: u32, region_count: u32 },
    #[error("region {0} has no pixels")]
    UnusedRegion(u32),
    #[error("noise sigma must be finite and non-negative, got {0}")]
    InvalidSigma(f64),
    #[error("unknown phantom {0:?}")]
    UnknownPhantom(String),
}

/// Errors raised by the histogram thresholding suite.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThresholdError {
    #[error("histogram is empty")]
    EmptyHistogram,
    #[error("{0:?}: histogram has a single occupied bin")]
    Degenerate(ThresholdMethod),
    #[error("{0:?}: no valid candidate threshold")]
    NoCandidate(ThresholdMethod),
    #[error("{0:?}: iteration cap reached without convergence")]
    NoConvergence(ThresholdMethod),
    #[error("report has no converged method")]
    NoConvergedMethod,
    #[error("percentile must lie in [0, 1], got {0}")]
    InvalidPercentile(String),
    #[error("unknown threshold method {0:?}")]
    UnknownMethod(String),
}

/// Errors raised by fuzzy partition construction, rule generation and inference.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error("anchor list is empty")]
    EmptyAnchors,
    #[error("anchor {0} is not a finite level in [0, 255]")]
    AnchorOutOfRange(f64),
    #[error("a partition needs at least 2 regions, got {0}")]
    TooFewRegions(usize),
    #[error("partition peaks must be finite, strictly increasing and within [0, 255]")]
    InvalidPeaks,
    #[error("region index {index} out of range for {count} regions")]
    RegionIndex { index: usize, count: usize },
    #[error("expected {expected} input values, got {actual}")]
    Arity { expected: usize, actual: usize },
    #[error("input value {0} is not finite")]
    NonFiniteInput(f64),
    #[error("rule base is empty")]
    EmptyRuleBase,
    #[error("rule base JSON: {0}")]
    Format(String),
}

/// Errors raised by the extraction pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("invalid pipeline config: {0}")]
    Config(String),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

/// Top-level error for file-facing operations (CLI and benchmark harness).
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("invalid benchmark spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
