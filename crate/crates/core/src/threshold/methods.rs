//! The fifteen global auto-thresholding algorithms.
//!
//! Conventions shared by every method:
//! - a threshold `t` puts levels `<= t` in the background and `> t` in the
//!   foreground;
//! - criterion methods search `t` in `[lo, hi - 1]`, where `lo`/`hi` are the
//!   lowest/highest occupied bins, so both classes are non-empty;
//! - among optimal candidates the lowest `t` wins. Scores within a relative
//!   [`TIE_TOLERANCE`] of the incumbent count as ties, so rounding noise in
//!   flat criteria cannot move the result.

use std::ops::RangeInclusive;

use super::{ThresholdMethod, ThresholdParams};
use crate::error::ThresholdError;
use crate::image::{Histogram, LEVELS};

/// Relative score difference below which two candidates are considered tied.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Iteration cap for the iterative methods (IsoData, Minimum).
pub const MAX_ITERATIONS: usize = 10_000;

/// Distance (in levels) under which two Rényi thresholds are considered close
/// when they are combined.
const RENYI_CLOSE: usize = 5;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Maximize,
    Minimize,
}

/// Lowest candidate attaining the best finite score.
fn arg_best(
    candidates: RangeInclusive<usize>,
    goal: Goal,
    mut score: impl FnMut(usize) -> Option<f64>,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for t in candidates {
        let Some(s) = score(t).filter(|s| s.is_finite()) else {
            continue;
        };
        let replace = match best {
            None => true,
            Some((_, b)) => {
                let margin = TIE_TOLERANCE * b.abs().max(1.0);
                match goal {
                    Goal::Maximize => s > b + margin,
                    Goal::Minimize => s < b - margin,
                }
            }
        };
        if replace {
            best = Some((t, s));
        }
    }
    best.map(|(t, _)| t)
}

/// Prefix sums over a histogram.
struct Stats<'a> {
    counts: &'a [u64],
    total: u64,
    lo: usize,
    hi: usize,
    /// `n[t]`: pixels at levels `<= t`
    n: [u64; LEVELS],
    /// `s1[t]`: sum of `level * count` for levels `<= t`
    s1: [u64; LEVELS],
    /// `s2[t]`: sum of `level^2 * count` for levels `<= t`
    s2: [u64; LEVELS],
}

impl<'a> Stats<'a> {
    fn new(hist: &'a Histogram) -> Option<Self> {
        let (lo, hi) = hist.occupied_range()?;
        let counts = hist.counts();
        let mut n = [0u64; LEVELS];
        let mut s1 = [0u64; LEVELS];
        let mut s2 = [0u64; LEVELS];
        let (mut cn, mut c1, mut c2) = (0u64, 0u64, 0u64);
        for (i, &c) in counts.iter().enumerate() {
            cn += c;
            c1 += i as u64 * c;
            c2 += (i * i) as u64 * c;
            n[i] = cn;
            s1[i] = c1;
            s2[i] = c2;
        }
        Some(Self {
            counts,
            total: cn,
            lo: lo as usize,
            hi: hi as usize,
            n,
            s1,
            s2,
        })
    }

    fn degenerate(&self) -> bool {
        self.lo == self.hi
    }

    fn candidates(&self) -> RangeInclusive<usize> {
        self.lo..=self.hi - 1
    }

    fn sum(&self) -> u64 {
        self.s1[LEVELS - 1]
    }

    fn p(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total as f64
    }

    /// Background mass fraction at threshold `t`.
    fn mass_below(&self, t: usize) -> f64 {
        self.n[t] as f64 / self.total as f64
    }

    /// Foreground mass fraction at threshold `t`, computed from counts.
    fn mass_above(&self, t: usize) -> f64 {
        (self.total - self.n[t]) as f64 / self.total as f64
    }

    /// `floor((mean_below(t) + mean_above(t)) / 2)` in exact integer arithmetic.
    fn two_means_midpoint(&self, t: usize) -> usize {
        let n0 = self.n[t] as u128;
        let n1 = (self.total - self.n[t]) as u128;
        let s0 = self.s1[t] as u128;
        let s1 = (self.sum() - self.s1[t]) as u128;
        ((s0 * n1 + s1 * n0) / (2 * n0 * n1)) as usize
    }

    /// Prefix and suffix sums of `f(p_i)` over occupied bins, so that
    /// `below[t] = sum_{i<=t}` and `above[t] = sum_{i>t}`.
    fn split_sums(&self, f: impl Fn(f64) -> f64) -> ([f64; LEVELS], [f64; LEVELS]) {
        let mut below = [0.0; LEVELS];
        let mut above = [0.0; LEVELS];
        let mut acc = 0.0;
        for (i, slot) in below.iter_mut().enumerate() {
            if self.counts[i] > 0 {
                acc += f(self.p(i));
            }
            *slot = acc;
        }
        acc = 0.0;
        for i in (0..LEVELS).rev() {
            above[i] = acc;
            if self.counts[i] > 0 {
                acc += f(self.p(i));
            }
        }
        (below, above)
    }
}

pub(super) fn compute(
    method: ThresholdMethod,
    hist: &Histogram,
    params: &ThresholdParams,
) -> Result<u8, ThresholdError> {
    let stats = Stats::new(hist).ok_or(ThresholdError::EmptyHistogram)?;
    use ThresholdMethod::*;
    match method {
        Mean => return Ok(mean(&stats) as u8),
        Percentile => return Ok(percentile(&stats, params.percentile) as u8),
        _ => {}
    }
    if stats.degenerate() {
        return Err(ThresholdError::Degenerate(method));
    }
    let level = match method {
        Default => Some(default_isodata(&stats)),
        IsoData => Some(isodata(&stats).ok_or(ThresholdError::NoConvergence(method))?),
        Huang => huang(&stats),
        Li => li(&stats),
        MaxEntropy => max_entropy(&stats),
        MinError => min_error(&stats),
        Minimum => Some(minimum(&stats).ok_or(ThresholdError::NoConvergence(method))?),
        Moments => moments(&stats),
        Otsu => otsu(&stats),
        RenyiEntropy => renyi_entropy(&stats),
        Shanbhag => shanbhag(&stats),
        Triangle => Some(triangle(&stats)),
        Yen => yen(&stats),
        Mean | Percentile => unreachable!("handled above"),
    };
    let level = level.ok_or(ThresholdError::NoCandidate(method))?;
    debug_assert!(
        (stats.lo..stats.hi).contains(&level),
        "{method:?} level {level} outside [{}, {})",
        stats.lo,
        stats.hi
    );
    Ok(level as u8)
}

/// Arithmetic mean, floored.
fn mean(st: &Stats) -> usize {
    (st.sum() / st.total) as usize
}

/// Doyle's p-tile: the level whose cumulative mass fraction is closest to `p`.
fn percentile(st: &Stats, p: f64) -> usize {
    arg_best(st.lo..=st.hi, Goal::Minimize, |t| {
        Some((st.mass_below(t) - p).abs())
    })
    .expect("non-empty range")
}

/// Ridler–Calvard iterative selection: starting from the floored mean, repeat
/// `t <- floor((mean_below(t) + mean_above(t)) / 2)` until it stops moving.
/// The update is monotone in `t`, so the iteration cannot cycle.
fn isodata(st: &Stats) -> Option<usize> {
    let mut t = mean(st).min(st.hi - 1);
    for _ in 0..MAX_ITERATIONS {
        let next = st.two_means_midpoint(t);
        if next == t {
            return Some(t);
        }
        t = next;
    }
    None
}

/// Legacy IsoData variant: scan upward from the lowest occupied bin and stop at
/// the first `t` whose two-means midpoint no longer lies above it.
fn default_isodata(st: &Stats) -> usize {
    st.candidates()
        .find(|&t| st.two_means_midpoint(t) <= t)
        .unwrap_or(st.hi - 1)
}

/// Otsu: maximize the between-class variance. With `n0`, `s0` the background
/// count and intensity sum, `(S * n0 - N * s0)^2 / (n0 * n1)` is proportional
/// to it; the numerator is exact and unchanged by an intensity shift.
fn otsu(st: &Stats) -> Option<usize> {
    let (total, sum) = (st.total as i128, st.sum() as i128);
    arg_best(st.candidates(), Goal::Maximize, |t| {
        let n0 = st.n[t];
        let d = (sum * n0 as i128 - total * st.s1[t] as i128) as f64;
        Some(d * d / (n0 as f64 * (st.total - n0) as f64))
    })
}

/// Kapur–Sahoo–Wong: maximize the sum of the class entropies
/// `H_b + H_f` with `H = ln P - (1/P) sum p ln p`.
fn max_entropy(st: &Stats) -> Option<usize> {
    let (below, above) = st.split_sums(|p| p * p.ln());
    arg_best(st.candidates(), Goal::Maximize, |t| {
        let (p0, p1) = (st.mass_below(t), st.mass_above(t));
        Some(p0.ln() - below[t] / p0 + p1.ln() - above[t] / p1)
    })
}

/// Sum of the two class Rényi entropies of order `alpha != 1`:
/// `H = (ln sum p^alpha - alpha ln P) / (1 - alpha)`.
fn renyi_threshold(st: &Stats, alpha: f64) -> Option<usize> {
    let (below, above) = st.split_sums(|p| p.powf(alpha));
    arg_best(st.candidates(), Goal::Maximize, |t| {
        let (p0, p1) = (st.mass_below(t), st.mass_above(t));
        let hb = (below[t].ln() - alpha * p0.ln()) / (1.0 - alpha);
        let hf = (above[t].ln() - alpha * p1.ln()) / (1.0 - alpha);
        Some(hb + hf)
    })
}

/// Sahoo–Wilkins–Yeager: combine the Rényi thresholds of orders 0.5, 1 and 2.
pub(super) fn combine_renyi(thresholds: [usize; 3], cumulative: impl Fn(usize) -> f64) -> usize {
    let mut t = thresholds;
    t.sort_unstable();
    let close = |a: usize, b: usize| a.abs_diff(b) <= RENYI_CLOSE;
    let beta: [f64; 3] = match (close(t[0], t[1]), close(t[1], t[2])) {
        (true, true) => [1.0, 2.0, 1.0],
        (true, false) => [0.0, 1.0, 3.0],
        (false, true) => [3.0, 1.0, 0.0],
        (false, false) => [1.0, 2.0, 1.0],
    };
    let (p1, p3) = (cumulative(t[0]), cumulative(t[2]));
    let omega = p3 - p1;
    let level = t[0] as f64 * (p1 + 0.25 * omega * beta[0])
        + 0.25 * t[1] as f64 * omega * beta[1]
        + t[2] as f64 * (1.0 - p3 + 0.25 * omega * beta[2]);
    // truncation; the small guard keeps an exact integer from rounding down
    ((level + 1e-9).floor() as usize).clamp(t[0], t[2])
}

fn renyi_entropy(st: &Stats) -> Option<usize> {
    let t_half = renyi_threshold(st, 0.5)?;
    let t_one = max_entropy(st)?;
    let t_two = renyi_threshold(st, 2.0)?;
    Some(combine_renyi([t_half, t_one, t_two], |t| st.mass_below(t)))
}

/// Yen: maximize the entropic correlation
/// `-ln(sum_b (p/P0)^2) - ln(sum_f (p/P1)^2)`.
fn yen(st: &Stats) -> Option<usize> {
    let (below, above) = st.split_sums(|p| p * p);
    arg_best(st.candidates(), Goal::Maximize, |t| {
        let (p0, p1) = (st.mass_below(t), st.mass_above(t));
        Some(-below[t].ln() - above[t].ln() + 2.0 * (p0.ln() + p1.ln()))
    })
}

/// Li–Lee minimum cross entropy: minimize
/// `-m_b ln(mu_b) - m_f ln(mu_f)` with `m` the class first moment and `mu`
/// the class mean. A zero first moment contributes zero.
fn li(st: &Stats) -> Option<usize> {
    let total = st.total as f64;
    let term = |moment: u64, count: u64| {
        if moment == 0 {
            0.0
        } else {
            let m = moment as f64;
            (m / total) * (m / count as f64).ln()
        }
    };
    arg_best(st.candidates(), Goal::Minimize, |t| {
        let below = term(st.s1[t], st.n[t]);
        let above = term(st.sum() - st.s1[t], st.total - st.n[t]);
        Some(-below - above)
    })
}

/// Shannon function `-x ln x - (1 - x) ln(1 - x)`.
fn shannon(x: f64) -> f64 {
    let part = |v: f64| if v <= 0.0 { 0.0 } else { -v * v.ln() };
    part(x) + part(1.0 - x)
}

/// Huang–Wang fuzzy thresholding: minimize the mean Shannon entropy of the
/// membership `1 / (1 + |i - mu_class| / C)`, `C` the occupied range width.
fn huang(st: &Stats) -> Option<usize> {
    let c = (st.hi - st.lo) as f64;
    let sum = st.sum();
    arg_best(st.candidates(), Goal::Minimize, |t| {
        let mu0 = st.s1[t] as f64 / st.n[t] as f64;
        let mu1 = (sum - st.s1[t]) as f64 / (st.total - st.n[t]) as f64;
        let entropy: f64 = (st.lo..=st.hi)
            .filter(|&i| st.counts[i] > 0)
            .map(|i| {
                let mu = if i <= t { mu0 } else { mu1 };
                st.counts[i] as f64 * shannon(1.0 / (1.0 + (i as f64 - mu).abs() / c))
            })
            .sum();
        Some(entropy / st.total as f64)
    })
}

/// Shanbhag: minimize `|E_b - E_f|`, the imbalance between the fuzzy class
/// entropies `E_b = -(1/2P0) sum_{i<=t} p_i ln(1 - P(i-1)/2P0)` and
/// `E_f = -(1/2P1) sum_{i>t} p_i ln(1 - (1-P(i))/2P1)`.
fn shanbhag(st: &Stats) -> Option<usize> {
    arg_best(st.candidates(), Goal::Minimize, |t| {
        let (p0, p1) = (st.mass_below(t), st.mass_above(t));
        let k0 = 0.5 / p0;
        let mut back = 0.0;
        for i in st.lo..=t {
            let prev = if i == 0 { 0.0 } else { st.mass_below(i - 1) };
            back -= st.p(i) * (1.0 - k0 * prev).ln();
        }
        back *= k0;
        let k1 = 0.5 / p1;
        let mut obj = 0.0;
        for i in t + 1..=st.hi {
            obj -= st.p(i) * (1.0 - k1 * st.mass_above(i)).ln();
        }
        obj *= k1;
        Some((back - obj).abs())
    })
}

/// Kittler–Illingworth minimum error: minimize
/// `1 + 2 (P0 ln s0 + P1 ln s1) - 2 (P0 ln P0 + P1 ln P1)`.
/// Candidates leaving a class with zero variance are skipped.
fn min_error(st: &Stats) -> Option<usize> {
    // n^2 * variance, exact
    let scaled_var =
        |n: u64, s1: u64, s2: u64| -> u128 { n as u128 * s2 as u128 - s1 as u128 * s1 as u128 };
    let (sum1, sum2) = (st.s1[LEVELS - 1], st.s2[LEVELS - 1]);
    arg_best(st.candidates(), Goal::Minimize, |t| {
        let (n0, n1) = (st.n[t], st.total - st.n[t]);
        let v0 = scaled_var(n0, st.s1[t], st.s2[t]);
        let v1 = scaled_var(n1, sum1 - st.s1[t], sum2 - st.s2[t]);
        if v0 == 0 || v1 == 0 {
            return None;
        }
        let var0 = v0 as f64 / (n0 as f64 * n0 as f64);
        let var1 = v1 as f64 / (n1 as f64 * n1 as f64);
        let (p0, p1) = (st.mass_below(t), st.mass_above(t));
        Some(1.0 + p0 * var0.ln() + p1 * var1.ln() - 2.0 * (p0 * p0.ln() + p1 * p1.ln()))
    })
}

/// Tsai moment-preserving: the level whose cumulative mass is closest to the
/// background fraction `p0` of the two-level image with the same first three
/// moments.
fn moments(st: &Stats) -> Option<usize> {
    let total = st.total as f64;
    let (mut m1, mut m2, mut m3) = (0u128, 0u128, 0u128);
    for (i, &c) in st.counts.iter().enumerate() {
        let (i, c) = (i as u128, c as u128);
        m1 += i * c;
        m2 += i * i * c;
        m3 += i * i * i * c;
    }
    let (m1, m2, m3) = (m1 as f64 / total, m2 as f64 / total, m3 as f64 / total);
    let p0 = moment_preserving_fraction(m1, m2, m3)?;
    arg_best(st.candidates(), Goal::Minimize, |t| {
        Some((st.mass_below(t) - p0).abs())
    })
}

pub(super) fn moment_preserving_fraction(m1: f64, m2: f64, m3: f64) -> Option<f64> {
    let cd = m2 - m1 * m1;
    if cd <= 0.0 {
        return None;
    }
    let c0 = (-m2 * m2 + m1 * m3) / cd;
    let c1 = (-m3 + m2 * m1) / cd;
    let disc = c1 * c1 - 4.0 * c0;
    // also rejects NaN
    if disc.is_nan() || disc <= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let z0 = 0.5 * (-c1 - root);
    let z1 = 0.5 * (-c1 + root);
    Some((z1 - m1) / (z1 - z0))
}

/// One pass of the 3-tap moving average; bins outside the domain count as zero.
pub(super) fn smooth3(y: &[f64]) -> Vec<f64> {
    let last = y.len() - 1;
    (0..y.len())
        .map(|i| {
            let left = if i == 0 { 0.0 } else { y[i - 1] };
            let right = if i == last { 0.0 } else { y[i + 1] };
            (left + y[i] + right) / 3.0
        })
        .collect()
}

/// Interior strict local maxima.
fn modes(y: &[f64]) -> Vec<usize> {
    (1..y.len() - 1)
        .filter(|&k| y[k - 1] < y[k] && y[k + 1] < y[k])
        .collect()
}

/// Prewitt–Mendelsohn minimum: smooth until exactly two modes remain, then
/// take the lowest bin of minimum height between them.
fn minimum(st: &Stats) -> Option<usize> {
    let mut y: Vec<f64> = st.counts.iter().map(|&c| c as f64).collect();
    for _ in 0..=MAX_ITERATIONS {
        let peaks = modes(&y);
        if let [a, b] = peaks[..] {
            let mut best = a;
            for k in a..=b {
                if y[k] < y[best] {
                    best = k;
                }
            }
            return Some(best);
        }
        y = smooth3(&y);
    }
    None
}

/// Zack triangle: draw a line from the histogram peak to the end of the longer
/// tail (one bin past the last occupied bin when available) and take the bin
/// lying farthest below it. On a left tail that bin closes the background; on
/// a right tail it opens the foreground.
fn triangle(st: &Stats) -> usize {
    let h = |i: usize| st.counts[i] as i128;
    let mut peak = st.lo;
    for i in st.lo..=st.hi {
        if st.counts[i] > st.counts[peak] {
            peak = i;
        }
    }
    let right_tail = st.hi - peak > peak - st.lo;
    let (end, range) = if right_tail {
        ((st.hi + 1).min(LEVELS - 1), peak + 1..=st.hi)
    } else {
        (st.lo.saturating_sub(1), st.lo..=peak - 1)
    };
    // (line height - h_i) * |end - peak|, exact
    let d = end as i128 - peak as i128;
    let below = |i: usize| -> i128 {
        let raw = h(peak) * d + (h(end) - h(peak)) * (i as i128 - peak as i128) - h(i) * d;
        raw * d.signum()
    };
    let mut best = *range.start();
    for i in range {
        if below(i) > below(best) {
            best = i;
        }
    }
    if right_tail {
        best - 1
    } else {
        best
    }
}
