//! Segmentation validity: a labeling is a valid segmentation when its regions
//! cover the image, do not overlap, are each homogeneous, and no two
//! 4-adjacent regions stay homogeneous once merged.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::GrayImage;
use crate::error::ImageError;

/// Row-major region identifiers in `0..region_count`, each used at least once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionLabeling {
    labels: Vec<u32>,
    region_count: u32,
}

impl RegionLabeling {
    pub fn new(labels: Vec<u32>, region_count: u32) -> Result<Self, ImageError> {
        if region_count == 0 {
            return Err(ImageError::NoRegions);
        }
        let mut used = vec![false; region_count as usize];
        for &label in &labels {
            if label >= region_count {
                return Err(ImageError::LabelOutOfRange {
                    label,
                    region_count,
                });
            }
            used[label as usize] = true;
        }
        if let Some(unused) = used.iter().position(|&u| !u) {
            return Err(ImageError::UnusedRegion(unused as u32));
        }
        Ok(Self {
            labels,
            region_count,
        })
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn region_count(&self) -> u32 {
        self.region_count
    }
}

/// Outcome of [`validate_partition`], one flag per validity condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionVerdict {
    pub union_ok: bool,
    pub disjoint_ok: bool,
    pub homogeneous_ok: bool,
    pub adjacent_merge_fails: bool,
}

impl PartitionVerdict {
    pub fn is_valid(&self) -> bool {
        self.union_ok && self.disjoint_ok && self.homogeneous_ok && self.adjacent_merge_fails
    }
}

/// Homogeneity predicate: intensity range (max − min) of the set is at most `tolerance`.
pub fn range_within(tolerance: u8) -> impl Fn(&[u8]) -> bool {
    move |values: &[u8]| match (values.iter().min(), values.iter().max()) {
        (Some(lo), Some(hi)) => hi - lo <= tolerance,
        _ => true,
    }
}

/// Checks `labeling` against `image` using the homogeneity `predicate`.
///
/// Coverage and disjointness follow from the representation (one label per
/// pixel) once the lengths agree; they are reported for completeness.
pub fn validate_partition<P>(
    image: &GrayImage,
    labeling: &RegionLabeling,
    predicate: P,
) -> Result<PartitionVerdict, ImageError>
where
    P: Fn(&[u8]) -> bool,
{
    if labeling.labels.len() != image.len() {
        return Err(ImageError::LabelingLength {
            expected: image.len(),
            actual: labeling.labels.len(),
        });
    }
    let regions = labeling.region_count as usize;
    let mut members: Vec<Vec<u8>> = vec![Vec::new(); regions];
    for (&label, &p) in labeling.labels.iter().zip(image.pixels()) {
        members[label as usize].push(p);
    }
    let homogeneous_ok = members.iter().all(|m| predicate(m));

    let (w, h) = (image.width() as usize, image.height() as usize);
    let labels = &labeling.labels;
    let mut adjacent = BTreeSet::new();
    for y in 0..h {
        for x in 0..w {
            let a = labels[y * w + x];
            if x + 1 < w {
                let b = labels[y * w + x + 1];
                if a != b {
                    adjacent.insert((a.min(b), a.max(b)));
                }
            }
            if y + 1 < h {
                let b = labels[(y + 1) * w + x];
                if a != b {
                    adjacent.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    let adjacent_merge_fails = adjacent.iter().all(|&(a, b)| {
        let mut merged = members[a as usize].clone();
        merged.extend_from_slice(&members[b as usize]);
        !predicate(&merged)
    });

    Ok(PartitionVerdict {
        union_ok: true,
        disjoint_ok: true,
        homogeneous_ok,
        adjacent_merge_fails,
    })
}
