//! Burst labeling by the moving-contrast score rule, plus the
//! distance-from-last-burst feature consumed by the forecaster.
//!
//! The score of index j is the sample minus the mean of its k neighbors on
//! each side. An index is a burst when its score is positive and both the
//! score and the raw value sit more than h standard deviations above their
//! respective means; the score statistics are taken over positive scores
//! only. Indices within k of either boundary are never flagged.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::series::TimeSeries;

/// Labeling parameters: window half-width k and SD multiplier h.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BurstConfig {
    pub k: usize,
    pub h: f64,
}

impl Default for BurstConfig {
    fn default() -> Self {
        Self { k: 128, h: 2.5 }
    }
}

/// Population moments backing the two threshold tests.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BurstStats {
    /// Mean and SD of the full series.
    pub mu_x: f64,
    pub sigma_x: f64,
    /// Mean and SD of the positive scores (the set P). Zero when P is empty.
    pub mu_p: f64,
    pub sigma_p: f64,
}

/// Per-index burst flags plus the score vector and threshold metadata.
#[derive(Debug, Clone)]
pub struct BurstLabels {
    /// Same length as the series; indices outside [k, N-k) are always 0.
    pub flags: Vec<u8>,
    /// Scores for j in [k, N-k); `scores[j - k]` is the score of index j.
    pub scores: Vec<f64>,
    pub k: usize,
    pub stats: BurstStats,
}

impl BurstLabels {
    /// Score of absolute index `i`, if defined.
    pub fn score_at(&self, i: usize) -> Option<f64> {
        let n = self.flags.len();
        if i >= self.k && i + self.k < n {
            Some(self.scores[i - self.k])
        } else {
            None
        }
    }

    /// Scores aligned to the full series, NaN outside the defined range.
    pub fn scores_full(&self) -> Vec<f64> {
        let n = self.flags.len();
        (0..n).map(|i| self.score_at(i).unwrap_or(f64::NAN)).collect()
    }

    pub fn burst_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f == 1).count()
    }
}

fn population_mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Moving-contrast scores for j in [k, N-k):
/// `a_j = x_j - (sum of the k left neighbors + k right neighbors) / 2k`.
///
/// Computed with prefix sums, so the total cost is O(N) rather than O(Nk).
pub fn contrast_scores(x: &[f64], k: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if k == 0 {
        return Err(CoreError::InvalidConfig("window half-width k must be positive".into()));
    }
    if n <= 2 * k {
        return Err(CoreError::TooShort { needed: 2 * k + 1, got: n });
    }
    // prefix[i] = sum of x[0..i]
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in x {
        acc += v;
        prefix.push(acc);
    }
    let inv = 1.0 / (2.0 * k as f64);
    Ok((k..n - k)
        .map(|j| {
            let left = prefix[j] - prefix[j - k];
            let right = prefix[j + k + 1] - prefix[j + 1];
            x[j] - (left + right) * inv
        })
        .collect())
}

/// Applies the full burst rule. When the positive-score set is empty or the
/// series SD is zero, no index is flagged.
pub fn label_bursts(x: &TimeSeries, cfg: &BurstConfig) -> Result<BurstLabels> {
    x.validate()?;
    let n = x.len();
    let scores = contrast_scores(&x.values, cfg.k)?;
    let (mu_x, sigma_x) = population_mean_sd(&x.values);
    let positive: Vec<f64> = scores.iter().copied().filter(|&a| a > 0.0).collect();
    let (mu_p, sigma_p) = if positive.is_empty() { (0.0, 0.0) } else { population_mean_sd(&positive) };

    let mut flags = vec![0u8; n];
    if !positive.is_empty() && sigma_x > 0.0 {
        for (offset, &a) in scores.iter().enumerate() {
            let i = offset + cfg.k;
            if a > 0.0 && a - mu_p > cfg.h * sigma_p && x.values[i] - mu_x > cfg.h * sigma_x {
                flags[i] = 1;
            }
        }
    }
    Ok(BurstLabels { flags, scores, k: cfg.k, stats: BurstStats { mu_x, sigma_x, mu_p, sigma_p } })
}

/// Ticks since the last burst, with a virtual burst at index -1 (so the
/// distance at index 0 is 1 when it is not itself a burst), clamped at
/// `cap`.
pub fn burst_distance(flags: &[u8], cap: usize) -> Vec<usize> {
    assert!(!flags.is_empty(), "burst_distance requires non-empty flags");
    let mut out = Vec::with_capacity(flags.len());
    let mut d = 1usize; // distance from the virtual burst at -1
    for &f in flags {
        if f == 1 {
            d = 0;
        }
        out.push(d.min(cap));
        d = d.saturating_add(1);
    }
    out
}

/// Causal variant: the flag at index i depends on k future samples, so it
/// only becomes observable at time i + k. The distance at time t therefore
/// counts from the latest burst index <= t - k, falling back to the virtual
/// burst at -1.
pub fn burst_distance_causal(flags: &[u8], k: usize, cap: usize) -> Vec<usize> {
    assert!(!flags.is_empty(), "burst_distance_causal requires non-empty flags");
    let mut out = Vec::with_capacity(flags.len());
    let mut last: i64 = -1;
    for t in 0..flags.len() {
        if t >= k && flags[t - k] == 1 {
            last = (t - k) as i64;
        }
        out.push(((t as i64 - last) as usize).min(cap));
    }
    out
}

/// Elementwise `ln(1 + d)`; compresses long burst-free stretches.
pub fn log_distance(d: &[usize]) -> Vec<f64> {
    d.iter().map(|&v| (1.0 + v as f64).ln()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(values, 10).unwrap()
    }

    #[test]
    fn constant_series_scores_are_zero() {
        let scores = contrast_scores(&[2.0; 9], 2).unwrap();
        for s in scores {
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn single_spike_score_by_hand() {
        let x = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let scores = contrast_scores(&x, 1).unwrap();
        // j = 3 maps to offset 2
        assert!((scores[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_short_is_an_error() {
        assert!(matches!(contrast_scores(&[1.0; 8], 4), Err(CoreError::TooShort { .. })));
    }

    #[test]
    fn constant_series_has_no_bursts() {
        let labels = label_bursts(&series(vec![3.0; 50]), &BurstConfig { k: 4, h: 2.5 }).unwrap();
        assert_eq!(labels.burst_count(), 0);
    }

    #[test]
    fn flags_never_touch_the_boundary_margin() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..300).map(|_| rng.gen::<f64>() * 10.0).collect();
        let k = 8;
        let labels = label_bursts(&series(x), &BurstConfig { k, h: 1.0 }).unwrap();
        for (i, &f) in labels.flags.iter().enumerate() {
            if f == 1 {
                assert!(i >= k && i + k < labels.flags.len());
            }
        }
    }

    #[test]
    fn distance_resets_at_bursts() {
        assert_eq!(burst_distance(&[1, 0, 0, 1, 0], 100), vec![0, 1, 2, 0, 1]);
        assert_eq!(burst_distance(&[0, 0, 1], 100), vec![1, 2, 0]);
        assert_eq!(burst_distance(&[0; 6], 4), vec![1, 2, 3, 4, 4, 4]);
    }

    #[test]
    fn causal_distance_delays_flag_visibility() {
        // burst at index 2, k = 2: first observable at t = 4
        let d = burst_distance_causal(&[0, 0, 1, 0, 0, 0], 2, 100);
        assert_eq!(d, vec![1, 2, 3, 4, 2, 3]);
    }

    #[test]
    fn log_distance_closed_forms_and_monotonicity() {
        let vals = log_distance(&[0, 1, 2, 3, 4]);
        assert_eq!(vals[0], 0.0);
        assert!((vals[1] - std::f64::consts::LN_2).abs() < 1e-12);
        for w in vals.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
