//! Second-order self-similarity diagnostics: block aggregation,
//! variance-time Hurst estimation, and autocorrelation decay.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::par;
use crate::series::TimeSeries;

/// Variance-time regression result. The log-log slope of aggregated-block
/// variance against block size is -beta, and H = 1 - beta/2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub h: f64,
    pub beta: f64,
    pub slope_stderr: f64,
    pub block_sizes: Vec<usize>,
    /// Population variance of the aggregated series at each block size.
    pub block_vars: Vec<f64>,
}

/// Powers of two 1..512 — spans the scaling region while keeping at least
/// ~100 top-level blocks on a 60,000-sample series.
pub fn default_block_sizes() -> Vec<usize> {
    (0..10).map(|e| 1usize << e).collect()
}

fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Averages over non-overlapping blocks of size m; output length floor(N/m),
/// tick duration scaled by m.
pub fn aggregate(x: &TimeSeries, m: usize) -> Result<TimeSeries> {
    let n = x.len();
    if m == 0 {
        return Err(CoreError::InvalidConfig("block size must be at least 1".into()));
    }
    if m > n {
        return Err(CoreError::TooShort { needed: m, got: n });
    }
    let blocks = n / m;
    let inv = 1.0 / m as f64;
    let values = (0..blocks)
        .map(|b| x.values[b * m..(b + 1) * m].iter().sum::<f64>() * inv)
        .collect();
    let tick_ms = x
        .tick_ms
        .checked_mul(u32::try_from(m).map_err(|_| CoreError::InvalidConfig(format!("block size {m} too large")))?)
        .ok_or_else(|| CoreError::InvalidConfig(format!("aggregated tick duration overflows at m = {m}")))?;
    Ok(TimeSeries { values, tick_ms, origin_tick: 0 })
}

/// Least-squares fit of log var(X^(m)) against log m. The slope is -beta
/// and H = 1 - beta/2; the standard error comes from the residuals of the
/// unweighted regression.
pub fn variance_time_hurst(x: &TimeSeries, block_sizes: &[usize]) -> Result<HurstEstimate> {
    if block_sizes.len() < 3 {
        return Err(CoreError::InsufficientData(format!(
            "need at least 3 block sizes, got {}",
            block_sizes.len()
        )));
    }
    for w in block_sizes.windows(2) {
        if w[1] <= w[0] {
            return Err(CoreError::InvalidConfig("block sizes must be strictly increasing".into()));
        }
    }
    if block_sizes[0] == 0 {
        return Err(CoreError::InvalidConfig("block sizes must be at least 1".into()));
    }
    let max_m = *block_sizes.last().unwrap();
    if x.len() / max_m < 10 {
        return Err(CoreError::InsufficientData(format!(
            "largest block {} leaves fewer than 10 aggregated points over {} samples",
            max_m,
            x.len()
        )));
    }

    let block_vars: Vec<f64> = par::map_slice(block_sizes, |&m| {
        let agg = aggregate(x, m).expect("block size bounds checked above");
        population_variance(&agg.values)
    });
    if block_vars.iter().any(|&v| !(v > 0.0)) {
        return Err(CoreError::DegenerateSeries);
    }

    let xs: Vec<f64> = block_sizes.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = block_vars.iter().map(|&v| v.ln()).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let slope_stderr = (sse / (n - 2.0) / sxx).sqrt();

    let beta = -slope;
    Ok(HurstEstimate {
        h: 1.0 - beta / 2.0,
        beta,
        slope_stderr,
        block_sizes: block_sizes.to_vec(),
        block_vars,
    })
}

/// Biased (1/N) sample autocorrelation up to `max_lag`, with r(0) = 1.
pub fn autocorrelation(x: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if max_lag >= n / 2 {
        return Err(CoreError::InvalidConfig(format!(
            "max_lag {max_lag} must be below half the series length {n}"
        )));
    }
    let mean = x.values.iter().sum::<f64>() / n as f64;
    let c0: f64 = x.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if !(c0 > 0.0) {
        return Err(CoreError::DegenerateSeries);
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let ck: f64 = (0..n - k).map(|t| (x.values[t] - mean) * (x.values[t + k] - mean)).sum::<f64>() / n as f64;
        out.push(ck / c0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(values, 10).unwrap()
    }

    #[test]
    fn aggregate_by_hand() {
        let a = aggregate(&series(vec![1.0, 2.0, 3.0, 4.0]), 2).unwrap();
        assert_eq!(a.values, vec![1.5, 3.5]);
        assert_eq!(a.tick_ms, 20);
    }

    #[test]
    fn aggregate_m1_is_identity() {
        let s = series(vec![5.0, -1.0, 2.0]);
        let a = aggregate(&s, 1).unwrap();
        assert_eq!(a.values, s.values);
    }

    #[test]
    fn aggregate_preserves_mean_over_covered_prefix() {
        let s = series((0..101).map(|i| (i as f64).sin() + 2.0).collect());
        let m = 7;
        let a = aggregate(&s, m).unwrap();
        let covered = (s.len() / m) * m;
        let mean_raw = s.values[..covered].iter().sum::<f64>() / covered as f64;
        let mean_agg = a.values.iter().sum::<f64>() / a.values.len() as f64;
        assert!((mean_raw - mean_agg).abs() < 1e-12);
    }

    #[test]
    fn aggregate_rejects_oversized_blocks() {
        assert!(matches!(aggregate(&series(vec![1.0, 2.0]), 3), Err(CoreError::TooShort { .. })));
    }

    #[test]
    fn autocorrelation_r0_is_one() {
        let s = series((0..100).map(|i| (i as f64 * 0.7).sin()).collect());
        let r = autocorrelation(&s, 5).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn autocorrelation_lag_bound() {
        let s = series(vec![1.0, 2.0, 3.0, 4.0]);
        assert!(autocorrelation(&s, 2).is_err());
    }

    #[test]
    fn hurst_requires_three_block_sizes() {
        let s = series(vec![1.0; 1000]);
        assert!(matches!(
            variance_time_hurst(&s, &[1, 2]),
            Err(CoreError::InsufficientData(_))
        ));
    }

    #[test]
    fn hurst_requires_ten_points_at_top_block() {
        let s = series(vec![0.0, 1.0].repeat(40)); // 80 samples
        assert!(matches!(
            variance_time_hurst(&s, &[1, 2, 16]),
            Err(CoreError::InsufficientData(_))
        ));
    }
}
