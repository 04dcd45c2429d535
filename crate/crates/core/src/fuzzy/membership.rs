use serde::{Deserialize, Serialize};

use crate::error::FuzzyError;

pub const DOMAIN_MIN: f64 = 0.0;
pub const DOMAIN_MAX: f64 = 255.0;

/// Default single-linkage gap, in levels, below which anchors merge.
pub const DEFAULT_CLUSTER_GAP: f64 = 8.0;

/// Consequent anchors closer than this many levels are merged.
const CONSEQUENT_MERGE_GAP: f64 = 2.0;

/// Peaks closer than this are treated as one.
const PEAK_EPSILON: f64 = 1e-9;

/// Piecewise-linear envelope. Shoulders stay at 1 out to the domain edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum MembershipFunction {
    LeftShoulder { center: f64, right: f64 },
    Triangle { left: f64, center: f64, right: f64 },
    RightShoulder { left: f64, center: f64 },
}

impl MembershipFunction {
    pub fn center(&self) -> f64 {
        match *self {
            Self::LeftShoulder { center, .. }
            | Self::Triangle { center, .. }
            | Self::RightShoulder { center, .. } => center,
        }
    }

    /// Closed interval outside which the membership is zero.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::LeftShoulder { right, .. } => (DOMAIN_MIN, right),
            Self::Triangle { left, right, .. } => (left, right),
            Self::RightShoulder { left, .. } => (left, DOMAIN_MAX),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::LeftShoulder { center, right } => {
                if x <= center {
                    1.0
                } else if x >= right {
                    0.0
                } else {
                    (right - x) / (right - center)
                }
            }
            Self::Triangle {
                left,
                center,
                right,
            } => {
                if x <= left || x >= right {
                    0.0
                } else if x == center {
                    1.0
                } else if x < center {
                    (x - left) / (center - left)
                } else {
                    (right - x) / (right - center)
                }
            }
            Self::RightShoulder { left, center } => {
                if x >= center {
                    1.0
                } else if x <= left {
                    0.0
                } else {
                    (x - left) / (center - left)
                }
            }
        }
    }
}

/// Ruspini partition of `[0, 255]`: triangles between consecutive peaks,
/// shoulders at both ends, memberships summing to one everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct FuzzyPartition {
    peaks: Vec<f64>,
    functions: Vec<MembershipFunction>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    peaks: Vec<f64>,
}

impl TryFrom<PartitionRepr> for FuzzyPartition {
    type Error = FuzzyError;

    fn try_from(repr: PartitionRepr) -> Result<Self, Self::Error> {
        Self::from_peaks(repr.peaks)
    }
}

impl From<FuzzyPartition> for PartitionRepr {
    fn from(p: FuzzyPartition) -> Self {
        Self { peaks: p.peaks }
    }
}

impl FuzzyPartition {
    /// Partition with one region per peak. Peaks must be finite, strictly
    /// increasing, inside the domain, and at least two.
    pub fn from_peaks(peaks: Vec<f64>) -> Result<Self, FuzzyError> {
        if peaks.len() < 2 {
            return Err(FuzzyError::TooFewRegions(peaks.len()));
        }
        let in_domain = peaks
            .iter()
            .all(|p| p.is_finite() && (DOMAIN_MIN..=DOMAIN_MAX).contains(p));
        if !in_domain || peaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FuzzyError::InvalidPeaks);
        }
        let last = peaks.len() - 1;
        let functions = (0..peaks.len())
            .map(|k| {
                if k == 0 {
                    MembershipFunction::LeftShoulder {
                        center: peaks[0],
                        right: peaks[1],
                    }
                } else if k == last {
                    MembershipFunction::RightShoulder {
                        left: peaks[k - 1],
                        center: peaks[k],
                    }
                } else {
                    MembershipFunction::Triangle {
                        left: peaks[k - 1],
                        center: peaks[k],
                        right: peaks[k + 1],
                    }
                }
            })
            .collect();
        Ok(Self { peaks, functions })
    }

    pub fn region_count(&self) -> usize {
        self.peaks.len()
    }

    pub fn peaks(&self) -> &[f64] {
        &self.peaks
    }

    pub fn functions(&self) -> &[MembershipFunction] {
        &self.functions
    }

    /// Membership of `x` in region `index`.
    pub fn membership(&self, index: usize, x: f64) -> Result<f64, FuzzyError> {
        self.functions
            .get(index)
            .map(|f| f.eval(x))
            .ok_or(FuzzyError::RegionIndex {
                index,
                count: self.region_count(),
            })
    }

    /// Memberships of `x` in every region.
    pub fn memberships(&self, x: f64) -> Vec<f64> {
        self.functions.iter().map(|f| f.eval(x)).collect()
    }

    /// Regions with non-zero membership at `x` (at most two), in index order.
    pub fn active(&self, x: f64) -> Vec<(usize, f64)> {
        // first peak strictly greater than x
        let upper = self.peaks.partition_point(|&p| p <= x);
        let from = upper.saturating_sub(1);
        let to = upper.min(self.region_count() - 1);
        (from..=to)
            .map(|k| (k, self.functions[k].eval(x)))
            .filter(|&(_, mu)| mu > 0.0)
            .collect()
    }

    /// Region of maximal membership at `x`, lower index on ties.
    pub fn best_region(&self, x: f64) -> (usize, f64) {
        let mut best = (0, self.functions[0].eval(x));
        for (k, mu) in self.active(x) {
            if mu > best.1 {
                best = (k, mu);
            }
        }
        best
    }
}

fn check_anchors(anchors: &[f64]) -> Result<Vec<f64>, FuzzyError> {
    if anchors.is_empty() {
        return Err(FuzzyError::EmptyAnchors);
    }
    if let Some(&bad) = anchors
        .iter()
        .find(|a| !a.is_finite() || !(DOMAIN_MIN..=DOMAIN_MAX).contains(*a))
    {
        return Err(FuzzyError::AnchorOutOfRange(bad));
    }
    let mut sorted = anchors.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Single-linkage clusters of sorted values: a new cluster starts where
/// consecutive values are at least `gap` apart. Returns the cluster means.
fn cluster_means(sorted: &[f64], gap: f64) -> Vec<f64> {
    let mut means = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] >= gap {
            let run = &sorted[start..i];
            means.push(run.iter().sum::<f64>() / run.len() as f64);
            start = i;
        }
    }
    means
}

/// Builds the input partition from threshold anchors with the default gap.
pub fn build_partition(anchors: &[f64], min_regions: usize) -> Result<FuzzyPartition, FuzzyError> {
    build_partition_with_gap(anchors, min_regions, DEFAULT_CLUSTER_GAP)
}

/// Anchors are clustered, cluster means become interior peaks between edge
/// shoulders at 0 and 255, and the widest gap is halved until there are at
/// least `min_regions` regions (lowest gap on ties).
pub fn build_partition_with_gap(
    anchors: &[f64],
    min_regions: usize,
    gap: f64,
) -> Result<FuzzyPartition, FuzzyError> {
    let sorted = check_anchors(anchors)?;
    let mut peaks = vec![DOMAIN_MIN];
    peaks.extend(
        cluster_means(&sorted, gap)
            .into_iter()
            .filter(|&c| c > DOMAIN_MIN && c < DOMAIN_MAX),
    );
    peaks.push(DOMAIN_MAX);
    while peaks.len() < min_regions {
        let mut widest = 0;
        for k in 1..peaks.len() - 1 {
            if peaks[k + 1] - peaks[k] > peaks[widest + 1] - peaks[widest] {
                widest = k;
            }
        }
        let mid = 0.5 * (peaks[widest] + peaks[widest + 1]);
        peaks.insert(widest + 1, mid);
    }
    FuzzyPartition::from_peaks(peaks)
}

/// Output partition whose regions are symmetric around each anchor, so that
/// a clipped consequent envelope has its centroid exactly at the anchor.
///
/// Each anchor `m` gets feet at `m - w` and `m + w`, where `w` is the room to
/// the nearer of the domain edge or the halfway point to a neighbouring
/// anchor; filler regions cover whatever lies between. Anchors on a domain
/// edge get a foot one level inward.
pub fn build_consequent_partition(anchors: &[f64]) -> Result<FuzzyPartition, FuzzyError> {
    let sorted = check_anchors(anchors)?;
    let mut centers: Vec<f64> = cluster_means(&sorted, CONSEQUENT_MERGE_GAP)
        .into_iter()
        .map(|c| {
            if c < DOMAIN_MIN + 1.0 {
                DOMAIN_MIN
            } else if c > DOMAIN_MAX - 1.0 {
                DOMAIN_MAX
            } else {
                c
            }
        })
        .collect();
    centers.dedup();

    let mut peaks = vec![DOMAIN_MIN];
    let n = centers.len();
    for (k, &m) in centers.iter().enumerate() {
        let left_room = if k == 0 {
            m - DOMAIN_MIN
        } else {
            0.5 * (m - centers[k - 1])
        };
        let right_room = if k + 1 == n {
            DOMAIN_MAX - m
        } else {
            0.5 * (centers[k + 1] - m)
        };
        let w = left_room.min(right_room);
        if w > 0.0 {
            peaks.extend([m - w, m, m + w]);
        } else if m == DOMAIN_MIN {
            peaks.extend([m, m + 1.0]);
        } else {
            peaks.extend([m - 1.0, m]);
        }
    }
    peaks.push(DOMAIN_MAX);

    let mut unique: Vec<f64> = Vec::with_capacity(peaks.len());
    for p in peaks {
        match unique.last() {
            Some(&last) if p - last < PEAK_EPSILON => {}
            _ => unique.push(p),
        }
    }
    if unique.len() < 2 {
        unique = vec![DOMAIN_MIN, DOMAIN_MAX];
    }
    FuzzyPartition::from_peaks(unique)
}
