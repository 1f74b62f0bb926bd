//! Canonical time-series container, normalization, dataset windowing, and file I/O.
//!
//! The CSV layout is `t_ms,demand_mbps` with optional `burst` (0/1) and
//! `score` columns. The raw layout is `BAFS`, u32 version, u32 tick_ms,
//! u64 length, then f64 values, all little-endian.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::ops::Range;
use std::path::Path;

use crate::error::{CoreError, Result};

const RAW_MAGIC: &[u8; 4] = b"BAFS";
const RAW_VERSION: u32 = 1;

/// Uniformly sampled demand values with a fixed tick duration.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    /// Demand per tick, megabits per second.
    pub values: Vec<f64>,
    /// Sampling interval in milliseconds.
    pub tick_ms: u32,
    /// Index of the first sample in the parent series (0 for roots).
    pub origin_tick: i64,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, tick_ms: u32) -> Result<Self> {
        let s = Self { values, tick_ms, origin_tick: 0 };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks non-emptiness, a positive tick, and finiteness of every value.
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(CoreError::Empty("time series has no samples".into()));
        }
        if self.tick_ms == 0 {
            return Err(CoreError::InvalidConfig("tick_ms must be positive".into()));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::Format(format!("non-finite value at index {i}")));
        }
        Ok(())
    }

    /// Sub-series over `range`, keeping track of the absolute origin.
    pub fn slice(&self, range: Range<usize>) -> TimeSeries {
        TimeSeries {
            values: self.values[range.clone()].to_vec(),
            tick_ms: self.tick_ms,
            origin_tick: self.origin_tick + range.start as i64,
        }
    }
}

/// Mean and standard deviation of the fitting segment, reused to transform
/// validation and test data.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormStats {
    pub mean: f64,
    pub sd: f64,
}

/// Population (1/N) mean and SD.
pub fn population_stats(values: &[f64]) -> NormStats {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    NormStats { mean, sd: var.sqrt() }
}

/// z-score transform. With `stats` absent the population mean/SD of the
/// series itself are computed and returned; with `stats` supplied they are
/// used unchanged (test-set transform).
pub fn zscore_normalize(series: &TimeSeries, stats: Option<NormStats>) -> Result<(TimeSeries, NormStats)> {
    let stats = match stats {
        Some(s) => {
            if !(s.sd > 0.0) {
                return Err(CoreError::DegenerateSeries);
            }
            s
        }
        None => {
            if series.len() < 2 {
                return Err(CoreError::TooShort { needed: 2, got: series.len() });
            }
            let s = population_stats(&series.values);
            if !(s.sd > 0.0) {
                return Err(CoreError::DegenerateSeries);
            }
            s
        }
    };
    let values = series.values.iter().map(|v| (v - stats.mean) / stats.sd).collect();
    Ok((
        TimeSeries { values, tick_ms: series.tick_ms, origin_tick: series.origin_tick },
        stats,
    ))
}

/// Inverse of [`zscore_normalize`]: v = v' * sd + mean.
pub fn denormalize(series: &TimeSeries, stats: NormStats) -> TimeSeries {
    TimeSeries {
        values: series.values.iter().map(|v| v * stats.sd + stats.mean).collect(),
        tick_ms: series.tick_ms,
        origin_tick: series.origin_tick,
    }
}

/// One forecasting window: encoder context, decoder label region, and the
/// forecast target, as index ranges into the parent series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub encoder: Range<usize>,
    pub label: Range<usize>,
    pub target: Range<usize>,
}

/// Stride-1 window layout over a series.
#[derive(Debug, Clone)]
pub struct WindowSet {
    pub encoder_len: usize,
    pub label_len: usize,
    pub pred_len: usize,
    pub windows: Vec<Window>,
}

/// Stride-1 windows over `[0, series_len)`. For the window starting at `t`
/// the encoder slice is `[t, t+enc)`, the label slice `[t+enc-lab, t+enc)`,
/// and the target slice `[t+enc, t+enc+pred)`. The count is
/// `series_len - encoder_len - pred_len + 1`.
pub fn make_windows(
    series_len: usize,
    encoder_len: usize,
    label_len: usize,
    pred_len: usize,
) -> Result<WindowSet> {
    if encoder_len == 0 || pred_len == 0 {
        return Err(CoreError::InvalidConfig("encoder_len and pred_len must be positive".into()));
    }
    if label_len > encoder_len {
        return Err(CoreError::InvalidConfig(format!(
            "label_len {label_len} exceeds encoder_len {encoder_len}"
        )));
    }
    let needed = encoder_len + pred_len;
    if series_len < needed {
        return Err(CoreError::TooShort { needed, got: series_len });
    }
    let count = series_len - needed + 1;
    let windows = (0..count)
        .map(|t| Window {
            encoder: t..t + encoder_len,
            label: t + encoder_len - label_len..t + encoder_len,
            target: t + encoder_len..t + encoder_len + pred_len,
        })
        .collect();
    Ok(WindowSet { encoder_len, label_len, pred_len, windows })
}

/// Chronological train/validation/test ranges (default 70/10/20).
pub fn split_chrono(n: usize, train_frac: f64, val_frac: f64) -> (Range<usize>, Range<usize>, Range<usize>) {
    let n_train = (n as f64 * train_frac).floor() as usize;
    let n_val = (n as f64 * val_frac).floor() as usize;
    (0..n_train, n_train..n_train + n_val, n_train + n_val..n)
}

/// On-disk formats for [`load_series`] / [`save_series`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    Csv,
    RawF64,
}

impl SeriesFormat {
    /// Picks the format from a file extension: `.csv` is CSV, everything
    /// else the raw binary layout.
    pub fn from_path(path: &Path) -> SeriesFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => SeriesFormat::Csv,
            _ => SeriesFormat::RawF64,
        }
    }
}

/// Demand values printed with 9 significant digits.
fn fmt_value(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn save_series(series: &TimeSeries, path: &Path, format: SeriesFormat) -> Result<()> {
    match format {
        SeriesFormat::Csv => save_csv(series, None, None, path),
        SeriesFormat::RawF64 => save_raw(series, path),
    }
}

pub fn load_series(path: &Path, format: SeriesFormat) -> Result<TimeSeries> {
    match format {
        SeriesFormat::Csv => load_csv(path).map(|(s, _, _)| s),
        SeriesFormat::RawF64 => load_raw(path),
    }
}

/// CSV writer. `flags` adds the `burst` column, `scores` (aligned to the
/// full series, NaN where undefined) adds `score`, printed empty outside
/// its defined range.
pub fn save_csv(
    series: &TimeSeries,
    flags: Option<&[u8]>,
    scores: Option<&[f64]>,
    path: &Path,
) -> Result<()> {
    if let Some(f) = flags {
        if f.len() != series.len() {
            return Err(CoreError::InvalidConfig(format!(
                "flags length {} does not match series length {}",
                f.len(),
                series.len()
            )));
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    let mut header = String::from("t_ms,demand_mbps");
    if flags.is_some() {
        header.push_str(",burst");
    }
    if scores.is_some() {
        header.push_str(",score");
    }
    writeln!(w, "{header}")?;
    for (i, v) in series.values.iter().enumerate() {
        let t_ms = (series.origin_tick + i as i64) * series.tick_ms as i64;
        write!(w, "{t_ms},{}", fmt_value(*v))?;
        if let Some(f) = flags {
            write!(w, ",{}", f[i])?;
        }
        if let Some(s) = scores {
            if s[i].is_nan() {
                write!(w, ",")?;
            } else {
                write!(w, ",{}", fmt_value(s[i]))?;
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// CSV reader, returning the series together with the optional `burst`
/// and `score` columns.
pub fn load_csv(path: &Path) -> Result<(TimeSeries, Option<Vec<u8>>, Option<Vec<f64>>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(CoreError::Empty(format!("{}: no header row", path.display()))),
    };
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < 2 || cols[0] != "t_ms" || cols[1] != "demand_mbps" {
        return Err(CoreError::Format(format!(
            "expected header starting with `t_ms,demand_mbps`, got `{header}`"
        )));
    }
    let burst_col = cols.iter().position(|c| *c == "burst");
    let score_col = cols.iter().position(|c| *c == "score");

    let mut timestamps: Vec<i64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut flags: Vec<u8> = Vec::new();
    let mut scores: Vec<f64> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let row = idx + 1; // 1-based data row, header not counted
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() < 2 {
            return Err(CoreError::Parse { row, msg: format!("expected at least 2 fields, got {}", fields.len()) });
        }
        let t: i64 = fields[0]
            .parse()
            .map_err(|e| CoreError::Parse { row, msg: format!("bad timestamp `{}`: {e}", fields[0]) })?;
        let v: f64 = fields[1]
            .parse()
            .map_err(|e| CoreError::Parse { row, msg: format!("bad value `{}`: {e}", fields[1]) })?;
        if !v.is_finite() {
            return Err(CoreError::Parse { row, msg: format!("non-finite value `{}`", fields[1]) });
        }
        timestamps.push(t);
        values.push(v);
        if let Some(c) = burst_col {
            let f = fields.get(c).copied().unwrap_or("");
            match f {
                "0" => flags.push(0),
                "1" => flags.push(1),
                other => {
                    return Err(CoreError::Parse { row, msg: format!("burst column must be 0 or 1, got `{other}`") })
                }
            }
        }
        if let Some(c) = score_col {
            let f = fields.get(c).copied().unwrap_or("");
            if f.is_empty() {
                scores.push(f64::NAN);
            } else {
                scores.push(
                    f.parse()
                        .map_err(|e| CoreError::Parse { row, msg: format!("bad score `{f}`: {e}") })?,
                );
            }
        }
    }
    if values.is_empty() {
        return Err(CoreError::Empty(format!("{}: no data rows", path.display())));
    }
    if values.len() < 2 {
        return Err(CoreError::Format("cannot infer tick interval from a single row".into()));
    }
    let step = timestamps[1] - timestamps[0];
    if step <= 0 {
        return Err(CoreError::NonUniformTimestamp { row: 2 });
    }
    for i in 2..timestamps.len() {
        if timestamps[i] - timestamps[i - 1] != step {
            return Err(CoreError::NonUniformTimestamp { row: i + 1 });
        }
    }
    if timestamps[0] % step != 0 {
        return Err(CoreError::Format(format!(
            "first timestamp {} is not a multiple of the tick interval {step}",
            timestamps[0]
        )));
    }
    let series = TimeSeries {
        values,
        tick_ms: u32::try_from(step).map_err(|_| CoreError::Format(format!("tick interval {step} out of range")))?,
        origin_tick: timestamps[0] / step,
    };
    let flags = burst_col.map(|_| flags);
    let scores = score_col.map(|_| scores);
    Ok((series, flags, scores))
}

pub fn save_raw(series: &TimeSeries, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(RAW_MAGIC)?;
    w.write_all(&RAW_VERSION.to_le_bytes())?;
    w.write_all(&series.tick_ms.to_le_bytes())?;
    w.write_all(&(series.values.len() as u64).to_le_bytes())?;
    for v in &series.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_raw(path: &Path) -> Result<TimeSeries> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| CoreError::Format(format!("{}: truncated header", path.display())))?;
    if &magic != RAW_MAGIC {
        return Err(CoreError::Format(format!("{}: bad magic {magic:?}", path.display())));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != RAW_VERSION {
        return Err(CoreError::Format(format!("unsupported raw version {version}")));
    }
    r.read_exact(&mut u32buf)?;
    let tick_ms = u32::from_le_bytes(u32buf);
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let len = u64::from_le_bytes(u64buf) as usize;
    let mut values = Vec::with_capacity(len);
    let mut vbuf = [0u8; 8];
    for i in 0..len {
        r.read_exact(&mut vbuf)
            .map_err(|_| CoreError::Format(format!("truncated values: expected {len}, got {i}")))?;
        values.push(f64::from_le_bytes(vbuf));
    }
    let series = TimeSeries { values, tick_ms, origin_tick: 0 };
    series.validate()?;
    Ok(series)
}
