//! Bursty demand synthesis by superposing independent ON/OFF packet-train
//! sources with Pareto-distributed sojourn times.
//!
//! Each source alternates between an ON phase (emitting at its per-source
//! rate) and an OFF phase (silent), with heavy-tailed sojourn durations.
//! Superposing many such sources produces long-range-dependent demand whose
//! Hurst parameter follows H = (3 - a_min)/2 from the smallest Pareto shape.
//!
//! Reproducibility: every source consumes its own ChaCha8 stream derived
//! from `(seed, source index)`, and the superposition accumulates sources
//! in fixed index order over fixed-size chunks, so results are identical
//! with or without the `parallel` feature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::par;
use crate::series::{save_series, SeriesFormat, TimeSeries};

/// Per-source sojourn and rate parameters.
///
/// Both Pareto shapes must lie in (1, 2): the mean sojourn is finite but the
/// variance is not, which is what makes the superposition self-similar.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SourceConfig {
    /// Pareto shape of the ON sojourn distribution.
    pub shape_on: f64,
    /// Pareto shape of the OFF sojourn distribution.
    pub shape_off: f64,
    /// Minimum ON sojourn, in ticks.
    pub scale_on: f64,
    /// Minimum OFF sojourn, in ticks.
    pub scale_off: f64,
    /// Mean per-source demand while ON, Mbps.
    pub rate_mean_mbps: f64,
    /// SD of the per-source demand, Mbps.
    pub rate_sd_mbps: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            shape_on: 1.04,
            shape_off: 1.04,
            scale_on: 1.0,
            scale_off: 1.0,
            rate_mean_mbps: 1.0,
            rate_sd_mbps: 0.05,
        }
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, shape) in [("shape_on", self.shape_on), ("shape_off", self.shape_off)] {
            if !(shape > 1.0 && shape < 2.0) {
                return Err(CoreError::InvalidConfig(format!(
                    "{name} must lie in (1, 2) for heavy-tailed sojourns with finite mean, got {shape}"
                )));
            }
        }
        for (name, scale) in [("scale_on", self.scale_on), ("scale_off", self.scale_off)] {
            if !(scale > 0.0) {
                return Err(CoreError::InvalidConfig(format!("{name} must be positive, got {scale}")));
            }
        }
        if !(self.rate_mean_mbps > 0.0) {
            return Err(CoreError::InvalidConfig("rate_mean_mbps must be positive".into()));
        }
        if !(self.rate_sd_mbps >= 0.0) {
            return Err(CoreError::InvalidConfig("rate_sd_mbps must be non-negative".into()));
        }
        Ok(())
    }
}

/// Full generator configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenConfig {
    /// Number of superposed sources (terminals).
    pub num_sources: usize,
    /// Number of output ticks.
    pub num_ticks: usize,
    /// Tick duration, milliseconds.
    pub tick_ms: u32,
    /// Master seed; all per-source streams derive from it.
    pub seed: u64,
    pub source: SourceConfig,
    /// When true, the ON rate is redrawn every tick instead of once per
    /// source.
    #[serde(default)]
    pub resample_rate_per_tick: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            num_sources: 750,
            num_ticks: 60_000,
            tick_ms: 10,
            seed: 0,
            source: SourceConfig::default(),
            resample_rate_per_tick: false,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_sources == 0 {
            return Err(CoreError::InvalidConfig("num_sources must be at least 1".into()));
        }
        if self.num_ticks == 0 {
            return Err(CoreError::InvalidConfig("num_ticks must be at least 1".into()));
        }
        if self.tick_ms == 0 {
            return Err(CoreError::InvalidConfig("tick_ms must be positive".into()));
        }
        self.source.validate()
    }
}

/// Inverse-CDF Pareto draw: `scale * (1-u)^(-1/shape)`, strictly >= scale.
///
/// Deterministic in `u`; `u` must lie in [0, 1).
pub fn sample_pareto(shape: f64, scale: f64, u: f64) -> f64 {
    assert!(shape > 0.0 && scale > 0.0, "sample_pareto requires shape > 0 and scale > 0");
    assert!((0.0..1.0).contains(&u), "sample_pareto requires u in [0, 1), got {u}");
    scale * (1.0 - u).powf(-1.0 / shape)
}

/// Analytic Pareto mean `shape * scale / (shape - 1)` for shape > 1.
pub fn pareto_mean(shape: f64, scale: f64) -> f64 {
    assert!(shape > 1.0, "pareto mean is finite only for shape > 1");
    shape * scale / (shape - 1.0)
}

/// The dedicated RNG stream for source `m` under master `seed`.
///
/// Stream 0 is reserved; source m uses stream m+1. The first draw on a
/// source stream is its rate normal, followed by the initial-phase uniform
/// and then one uniform per sojourn.
pub fn source_rng(seed: u64, m: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(m as u64 + 1);
    rng
}

/// Alternating ON/OFF activity per tick. Sojourn durations are Pareto draws
/// in continuous ticks rounded up to whole ticks (so never below 1 tick),
/// and the initial phase is ON with probability mu_on / (mu_on + mu_off)
/// from the analytic means. The sequence is truncated at `num_ticks`.
pub fn gen_onoff_source(cfg: &SourceConfig, num_ticks: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mu_on = pareto_mean(cfg.shape_on, cfg.scale_on);
    let mu_off = pareto_mean(cfg.shape_off, cfg.scale_off);
    let p_on = mu_on / (mu_on + mu_off);
    let mut on = rng.gen::<f64>() < p_on;
    let mut activity = Vec::with_capacity(num_ticks);
    while activity.len() < num_ticks {
        let (shape, scale) = if on { (cfg.shape_on, cfg.scale_on) } else { (cfg.shape_off, cfg.scale_off) };
        let sojourn = sample_pareto(shape, scale, rng.gen::<f64>()).ceil() as usize;
        let fill = sojourn.min(num_ticks - activity.len());
        activity.extend(std::iter::repeat(u8::from(on)).take(fill));
        on = !on;
    }
    activity
}

// Sources are accumulated in chunks of this size; the chunk boundary (not
// the thread count) fixes the floating-point grouping.
const SOURCE_CHUNK: usize = 64;

/// Per-tick demand of one source, already weighted by its rate.
fn source_contribution(cfg: &GenConfig, m: usize) -> Vec<f64> {
    let mut rng = source_rng(cfg.seed, m);
    let normal = Normal::new(cfg.source.rate_mean_mbps, cfg.source.rate_sd_mbps)
        .expect("rate_sd validated non-negative");
    let static_rate = normal.sample(&mut rng).max(0.0);
    let activity = gen_onoff_source(&cfg.source, cfg.num_ticks, &mut rng);
    if cfg.resample_rate_per_tick {
        activity
            .iter()
            .map(|&a| if a == 1 { normal.sample(&mut rng).max(0.0) } else { 0.0 })
            .collect()
    } else {
        activity.iter().map(|&a| f64::from(a) * static_rate).collect()
    }
}

/// Superposition of all sources: demand at tick t is the sum over sources
/// of activity * rate, accumulated in source index order.
pub fn superpose(cfg: &GenConfig) -> Result<TimeSeries> {
    cfg.validate()?;
    let mut demand = vec![0.0f64; cfg.num_ticks];
    let mut start = 0;
    while start < cfg.num_sources {
        let end = (start + SOURCE_CHUNK).min(cfg.num_sources);
        let chunk: Vec<Vec<f64>> = par::map_indexed(end - start, |i| source_contribution(cfg, start + i));
        for contribution in &chunk {
            for (d, c) in demand.iter_mut().zip(contribution) {
                *d += c;
            }
        }
        start = end;
    }
    Ok(TimeSeries { values: demand, tick_ms: cfg.tick_ms, origin_tick: 0 })
}

/// Runs [`superpose`] and writes the result, choosing CSV or raw from the
/// output extension. Returns the generated series.
pub fn generate_dataset(cfg: &GenConfig, out: &Path) -> Result<TimeSeries> {
    let series = superpose(cfg)?;
    save_series(&series, out, SeriesFormat::from_path(out))?;
    Ok(series)
}
