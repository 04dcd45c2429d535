//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use grayfuzz::fuzzy::{FuzzyPartition, FuzzyRule};
use grayfuzz::{Histogram, ThresholdMethod};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixture of 1..=4 Gaussian lobes, optionally sparse, with at least two
/// occupied bins.
pub fn random_histogram(rng: &mut ChaCha8Rng) -> Histogram {
    loop {
        let mut counts = [0u64; 256];
        let lobes = rng.gen_range(1..=4);
        for _ in 0..lobes {
            let center = rng.gen_range(0.0..256.0);
            let width = rng.gen_range(1.0..40.0);
            let height = rng.gen_range(5.0..5000.0);
            for (i, c) in counts.iter_mut().enumerate() {
                let z = (i as f64 - center) / width;
                *c += (height * (-0.5 * z * z).exp()).round() as u64;
            }
        }
        match rng.gen_range(0..3) {
            // random holes
            0 => {
                for c in counts.iter_mut() {
                    if rng.gen_bool(0.3) {
                        *c = 0;
                    }
                }
            }
            // salt of isolated spikes
            1 => {
                for _ in 0..rng.gen_range(1..10) {
                    counts[rng.gen_range(0..256)] += rng.gen_range(1..300);
                }
            }
            _ => {}
        }
        let h = Histogram::from_counts(counts);
        if h.occupied_bins() >= 2 {
            return h;
        }
    }
}

const TIE: f64 = 1e-10;

/// Lowest candidate whose score is within the tie tolerance of the optimum.
fn pick(scores: &[(usize, f64)], maximize: bool) -> Option<usize> {
    let finite: Vec<(usize, f64)> = scores.iter().copied().filter(|s| s.1.is_finite()).collect();
    let best = finite
        .iter()
        .map(|s| s.1)
        .reduce(|a, b| if maximize { a.max(b) } else { a.min(b) })?;
    let tol = TIE * best.abs().max(1.0);
    finite
        .iter()
        .find(|s| {
            if maximize {
                s.1 >= best - tol
            } else {
                s.1 <= best + tol
            }
        })
        .map(|s| s.0)
}

struct Split {
    n0: f64,
    n1: f64,
    total: f64,
}

fn h(hist: &Histogram) -> Vec<f64> {
    hist.counts().iter().map(|&c| c as f64).collect()
}

fn split(h: &[f64], t: usize) -> Option<Split> {
    let n0: f64 = h[..=t].iter().sum();
    let n1: f64 = h[t + 1..].iter().sum();
    (n0 > 0.0 && n1 > 0.0).then_some(Split {
        n0,
        n1,
        total: n0 + n1,
    })
}

fn class_mean(h: &[f64], range: std::ops::Range<usize>) -> f64 {
    let n: f64 = h[range.clone()].iter().sum();
    range.map(|i| i as f64 * h[i]).sum::<f64>() / n
}

/// Scores every threshold that leaves both classes non-empty.
fn sweep(h: &[f64], maximize: bool, score: impl Fn(usize, &Split) -> Option<f64>) -> Option<u8> {
    let scores: Vec<(usize, f64)> = (0..255)
        .filter_map(|t| split(h, t).and_then(|s| score(t, &s).map(|v| (t, v))))
        .collect();
    pick(&scores, maximize).map(|t| t as u8)
}

fn occupied(h: &[f64]) -> (usize, usize) {
    let lo = h.iter().position(|&c| c > 0.0).unwrap();
    let hi = h.iter().rposition(|&c| c > 0.0).unwrap();
    (lo, hi)
}

pub fn oracle(method: ThresholdMethod, hist: &Histogram) -> Option<u8> {
    use ThresholdMethod::*;
    let h = h(hist);
    let (lo, hi) = occupied(&h);
    let total: f64 = h.iter().sum();
    if lo == hi && !matches!(method, Mean | Percentile) {
        return None;
    }
    match method {
        Mean => {
            let s: u64 = hist
                .counts()
                .iter()
                .enumerate()
                .map(|(i, &c)| i as u64 * c)
                .sum();
            Some((s / hist.total()) as u8)
        }
        Percentile => {
            let mut cum = 0.0;
            let scores: Vec<(usize, f64)> = (0..256)
                .map(|t| {
                    cum += h[t];
                    (t, (cum / total - 0.5).abs())
                })
                .filter(|&(t, _)| t >= lo && t <= hi)
                .collect();
            pick(&scores, false).map(|t| t as u8)
        }
        IsoData => {
            let mean = (0..256).map(|i| i as f64 * h[i]).sum::<f64>() / total;
            let mut t = mean.floor() as usize;
            for _ in 0..10_000 {
                let next = (0.5 * (class_mean(&h, 0..t + 1) + class_mean(&h, t + 1..256))).floor()
                    as usize;
                if next == t {
                    return Some(t as u8);
                }
                t = next;
            }
            None
        }
        Default => (lo..hi)
            .find(|&t| {
                (0.5 * (class_mean(&h, 0..t + 1) + class_mean(&h, t + 1..256))).floor() as usize
                    <= t
            })
            .map(|t| t as u8),
        Otsu => sweep(&h, true, |t, s| {
            let (w0, w1) = (s.n0 / s.total, s.n1 / s.total);
            let d = class_mean(&h, 0..t + 1) - class_mean(&h, t + 1..256);
            Some(w0 * w1 * d * d)
        }),
        MaxEntropy => sweep(&h, true, |t, s| {
            Some(entropy(&h[..=t], s.n0, 1.0) + entropy(&h[t + 1..], s.n1, 1.0))
        }),
        Yen => sweep(&h, true, |t, s| {
            let sq = |part: &[f64], n: f64| part.iter().map(|c| (c / n).powi(2)).sum::<f64>();
            Some(-sq(&h[..=t], s.n0).ln() - sq(&h[t + 1..], s.n1).ln())
        }),
        RenyiEntropy => {
            let by_order = |alpha: f64| {
                sweep(&h, true, |t, s| {
                    Some(entropy(&h[..=t], s.n0, alpha) + entropy(&h[t + 1..], s.n1, alpha))
                })
            };
            let ts = [by_order(0.5)?, by_order(1.0)?, by_order(2.0)?];
            let mut ts = ts.map(|t| t as usize);
            ts.sort();
            let cum = |t: usize| h[..=t].iter().sum::<f64>() / total;
            let near = |a: usize, b: usize| (a as i64 - b as i64).abs() <= 5;
            let beta = if near(ts[0], ts[1]) {
                if near(ts[1], ts[2]) {
                    [1.0, 2.0, 1.0]
                } else {
                    [0.0, 1.0, 3.0]
                }
            } else if near(ts[1], ts[2]) {
                [3.0, 1.0, 0.0]
            } else {
                [1.0, 2.0, 1.0]
            };
            let omega = cum(ts[2]) - cum(ts[0]);
            let level = ts[0] as f64 * (cum(ts[0]) + 0.25 * omega * beta[0])
                + 0.25 * ts[1] as f64 * omega * beta[1]
                + ts[2] as f64 * (1.0 - cum(ts[2]) + 0.25 * omega * beta[2]);
            Some((level + 1e-9).floor() as u8)
        }
        Moments => {
            let m = |k: i32| (0..256).map(|i| (i as f64).powi(k) * h[i]).sum::<f64>() / total;
            let (m1, m2, m3) = (m(1), m(2), m(3));
            // c0 + c1 z + z^2 = 0 has the two representative levels as roots
            let det = m2 - m1 * m1;
            if det <= 0.0 {
                return None;
            }
            let c0 = (m1 * m3 - m2 * m2) / det;
            let c1 = (m1 * m2 - m3) / det;
            let disc = c1 * c1 - 4.0 * c0;
            if disc <= 0.0 {
                return None;
            }
            let z0 = (-c1 - disc.sqrt()) / 2.0;
            let z1 = (-c1 + disc.sqrt()) / 2.0;
            let p0 = (z1 - m1) / (z1 - z0);
            sweep(&h, false, |_, s| Some((s.n0 / s.total - p0).abs()))
        }
        Huang => {
            let c = (hi - lo) as f64;
            sweep(&h, false, |t, _| {
                let (mu0, mu1) = (class_mean(&h, 0..t + 1), class_mean(&h, t + 1..256));
                let mut e = 0.0;
                for i in 0..256 {
                    if h[i] == 0.0 {
                        continue;
                    }
                    let mu = if i <= t { mu0 } else { mu1 };
                    let x = 1.0 / (1.0 + (i as f64 - mu).abs() / c);
                    let s = if x >= 1.0 {
                        0.0
                    } else {
                        -x * x.ln() - (1.0 - x) * (1.0 - x).ln()
                    };
                    e += h[i] * s;
                }
                Some(e / total)
            })
        }
        Li => sweep(&h, false, |t, _| {
            let (mu0, mu1) = (class_mean(&h, 0..t + 1), class_mean(&h, t + 1..256));
            let mut eta = 0.0;
            for i in 1..256 {
                let mu = if i <= t { mu0 } else { mu1 };
                eta += i as f64 * h[i] * (i as f64 / mu).ln();
            }
            Some(eta / total)
        }),
        Shanbhag => sweep(&h, false, |t, s| {
            let (p0, p1) = (s.n0 / s.total, s.n1 / s.total);
            let cum = |i: usize| h[..=i].iter().sum::<f64>() / total;
            let mut back = 0.0;
            for i in 0..=t {
                let before = if i == 0 { 0.0 } else { cum(i - 1) };
                back -= h[i] / total * (1.0 - before / (2.0 * p0)).ln();
            }
            let mut obj = 0.0;
            for i in t + 1..256 {
                obj -= h[i] / total * (1.0 - (1.0 - cum(i)) / (2.0 * p1)).ln();
            }
            Some((back / (2.0 * p0) - obj / (2.0 * p1)).abs())
        }),
        MinError => sweep(&h, false, |t, s| {
            let var = |range: std::ops::Range<usize>, n: f64| {
                let mu = class_mean(&h, range.clone());
                range.map(|i| h[i] * (i as f64 - mu).powi(2)).sum::<f64>() / n
            };
            let (v0, v1) = (var(0..t + 1, s.n0), var(t + 1..256, s.n1));
            if v0 == 0.0 || v1 == 0.0 {
                return None;
            }
            let (p0, p1) = (s.n0 / s.total, s.n1 / s.total);
            Some(
                1.0 + 2.0 * (p0 * v0.sqrt().ln() + p1 * v1.sqrt().ln())
                    - 2.0 * (p0 * p0.ln() + p1 * p1.ln()),
            )
        }),
        Minimum => {
            let mut y = h.clone();
            for _ in 0..=10_000 {
                let modes: Vec<usize> = (1..255)
                    .filter(|&k| y[k] > y[k - 1] && y[k] > y[k + 1])
                    .collect();
                if modes.len() == 2 {
                    let (a, b) = (modes[0], modes[1]);
                    let low = (a..=b).map(|k| y[k]).fold(f64::INFINITY, f64::min);
                    return (a..=b).find(|&k| y[k] == low).map(|k| k as u8);
                }
                let prev = y.clone();
                for k in 0..256 {
                    let l = if k == 0 { 0.0 } else { prev[k - 1] };
                    let r = if k == 255 { 0.0 } else { prev[k + 1] };
                    y[k] = (l + prev[k] + r) / 3.0;
                }
            }
            None
        }
        Triangle => {
            let top = h.iter().cloned().fold(0.0, f64::max);
            let peak = h.iter().position(|&c| c == top).unwrap();
            let right = hi - peak > peak - lo;
            // line from (x1, y1) to (x2, y2) with x1 < x2
            let (x1, x2, cands): (usize, usize, Vec<usize>) = if right {
                (peak, (hi + 1).min(255), (peak + 1..=hi).collect())
            } else {
                (lo.saturating_sub(1), peak, (lo..peak).collect())
            };
            let (y1, y2) = (h[x1], h[x2]);
            let (dx, dy) = ((x2 - x1) as f64, y2 - y1);
            let norm = (dx * dx + dy * dy).sqrt();
            let scores: Vec<(usize, f64)> = cands
                .iter()
                .map(|&i| (i, (dy * (i as f64 - x1 as f64) - dx * (h[i] - y1)) / norm))
                .collect();
            let best = pick(&scores, true)?;
            Some(if right { best - 1 } else { best } as u8)
        }
    }
}

/// Rényi entropy of order `alpha` of a class (Shannon for `alpha == 1`).
fn entropy(part: &[f64], n: f64, alpha: f64) -> f64 {
    let probs = part.iter().filter(|&&c| c > 0.0).map(|c| c / n);
    if alpha == 1.0 {
        -probs.map(|p| p * p.ln()).sum::<f64>()
    } else {
        probs.map(|p| p.powf(alpha)).sum::<f64>().ln() / (1.0 - alpha)
    }
}

/// Triangular membership of `x` in region `k` of a partition with `peaks`.
pub fn tri_membership(peaks: &[f64], k: usize, x: f64) -> f64 {
    let c = peaks[k];
    if x == c {
        return 1.0;
    }
    if x < c {
        if k == 0 {
            return 1.0;
        }
        let l = peaks[k - 1];
        if x <= l {
            0.0
        } else {
            (x - l) / (c - l)
        }
    } else {
        if k == peaks.len() - 1 {
            return 1.0;
        }
        let r = peaks[k + 1];
        if x >= r {
            0.0
        } else {
            (r - x) / (r - c)
        }
    }
}

/// Brute-force rule base: every (antecedent, consequent) combination is scored
/// against every pair; each pair votes for its best-scoring combination
/// (lexicographically lowest on ties), and each antecedent keeps its
/// highest-degree vote (lower consequent on ties).
pub fn wang_mendel_oracle(
    pairs: &[([f64; 2], f64)],
    inputs: [&FuzzyPartition; 2],
    output: &FuzzyPartition,
) -> Vec<FuzzyRule> {
    let (na, nb, nc) = (
        inputs[0].region_count(),
        inputs[1].region_count(),
        output.region_count(),
    );
    let mut kept: Vec<Option<(usize, f64)>> = vec![None; na * nb];
    for (x, y) in pairs {
        let mut best: Option<((usize, usize, usize), f64)> = None;
        for a in 0..na {
            for b in 0..nb {
                for c in 0..nc {
                    let score = tri_membership(inputs[0].peaks(), a, x[0])
                        * tri_membership(inputs[1].peaks(), b, x[1])
                        * tri_membership(output.peaks(), c, *y);
                    if best.map_or(true, |(_, s)| score > s) {
                        best = Some(((a, b, c), score));
                    }
                }
            }
        }
        let ((a, b, c), degree) = best.unwrap();
        let slot = &mut kept[a * nb + b];
        match slot {
            Some((kc, kd)) if degree < *kd || (degree == *kd && c >= *kc) => {}
            _ => *slot = Some((c, degree)),
        }
    }
    kept.iter()
        .enumerate()
        .filter_map(|(k, v)| {
            v.map(|(consequent, degree)| FuzzyRule {
                antecedent: vec![k / nb, k % nb],
                consequent,
                degree,
            })
        })
        .collect()
}

/// Strictly increasing peaks in [0, 255], 2..=max_regions of them.
pub fn random_peaks(rng: &mut ChaCha8Rng, max_regions: usize) -> Vec<f64> {
    let n = rng.gen_range(2..=max_regions);
    loop {
        let mut peaks: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=255.0)).collect();
        if rng.gen_bool(0.5) {
            peaks[0] = 0.0;
            peaks[n - 1] = 255.0;
        }
        peaks.sort_by(f64::total_cmp);
        if peaks.windows(2).all(|w| w[1] - w[0] > 1e-6) {
            return peaks;
        }
    }
}
