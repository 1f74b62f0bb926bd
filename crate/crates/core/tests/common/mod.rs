//! Shared fixtures for the integration suites: seeded Gaussian draws and a
//! literal brute-force implementation of the burst rule, kept independent
//! of the library's sliding-sum path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Box-Muller standard normal.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-15);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Direct O(Nk) evaluation of the moving-contrast score.
pub fn brute_scores(x: &[f64], k: usize) -> Vec<f64> {
    let n = x.len();
    (k..n - k)
        .map(|j| {
            let mut left = 0.0;
            let mut right = 0.0;
            for r in 1..=k {
                left += x[j - r];
                right += x[j + r];
            }
            x[j] - (left + right) / (2.0 * k as f64)
        })
        .collect()
}

/// Literal burst rule: positive score, score above its positive-set mean by
/// h SDs, and raw value above the series mean by h SDs.
pub fn brute_labels(x: &[f64], k: usize, h: f64) -> Vec<u8> {
    let n = x.len();
    let scores = brute_scores(x, k);
    let positives: Vec<f64> = scores.iter().copied().filter(|&a| a > 0.0).collect();
    let (mu_x, sigma_x) = mean_sd(x);
    let mut flags = vec![0u8; n];
    if positives.is_empty() || sigma_x == 0.0 {
        return flags;
    }
    let (mu_p, sigma_p) = mean_sd(&positives);
    for (offset, &a) in scores.iter().enumerate() {
        let j = offset + k;
        if a > 0.0 && a - mu_p > h * sigma_p && x[j] - mu_x > h * sigma_x {
            flags[j] = 1;
        }
    }
    flags
}
