//! AR/ARIMA and FARIMA forecasting baselines.
//!
//! AR coefficients come from the Yule-Walker equations solved with
//! Levinson-Durbin on biased sample autocorrelations; stationarity is
//! checked through the reflection coefficients and reported, never clipped.
//! FARIMA applies a truncated fractional-differencing filter before the AR
//! fit, with the memory parameter taken from the Hurst relation d = H - 1/2
//! when not supplied.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::selfsim::{default_block_sizes, variance_time_hurst};
use crate::series::TimeSeries;

/// Fitted autoregressive model, optionally on an integer-differenced series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArModel {
    pub phi: Vec<f64>,
    /// Mean of the (differenced) fitting series; forecasts are produced on
    /// the demeaned scale and shifted back.
    pub intercept_mean: f64,
    pub noise_var: f64,
    /// Integer differencing order applied before fitting (0 or 1 here).
    pub d_int: usize,
}

/// FARIMA model: fractional differencing weights plus an AR part fitted on
/// the filtered series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FarimaModel {
    pub phi: Vec<f64>,
    pub d_frac: f64,
    pub trunc_lags: usize,
    /// pi_coeffs[0] = 1 and pi_j = pi_{j-1} * (j - 1 - d) / j.
    pub pi_coeffs: Vec<f64>,
    pub intercept_mean: f64,
}

const DEFAULT_TRUNC_LAGS: usize = 1_000;

fn biased_autocorrelations(x: &[f64], p: usize) -> Result<Vec<f64>> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let c0: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if !(c0 > 0.0) {
        return Err(CoreError::Singular("zero-variance series".into()));
    }
    let mut r = Vec::with_capacity(p + 1);
    r.push(1.0);
    for k in 1..=p {
        let ck: f64 = (0..x.len() - k).map(|t| (x[t] - mean) * (x[t + k] - mean)).sum::<f64>() / n;
        r.push(ck / c0);
    }
    Ok(r)
}

/// Levinson-Durbin recursion. Returns (phi, prediction-error variance ratio).
/// Stationarity holds iff every reflection coefficient has magnitude < 1.
fn levinson_durbin(r: &[f64]) -> Result<(Vec<f64>, f64)> {
    let p = r.len() - 1;
    let mut phi = vec![0.0f64; p];
    let mut prev = vec![0.0f64; p];
    let mut err = r[0];
    for m in 1..=p {
        if !(err > 0.0) {
            return Err(CoreError::Singular(format!("prediction error vanished at order {m}")));
        }
        let mut acc = r[m];
        for j in 1..m {
            acc -= prev[j - 1] * r[m - j];
        }
        let kappa = acc / err;
        if !(kappa.abs() < 1.0) {
            return Err(CoreError::NonStationary(format!(
                "reflection coefficient {kappa:.6} at order {m} leaves the unit disc"
            )));
        }
        phi[m - 1] = kappa;
        for j in 1..m {
            phi[j - 1] = prev[j - 1] - kappa * prev[m - 1 - j];
        }
        err *= 1.0 - kappa * kappa;
        prev[..m].copy_from_slice(&phi[..m]);
    }
    Ok((phi, err))
}

fn difference(x: &[f64], order: usize) -> Vec<f64> {
    let mut out = x.to_vec();
    for _ in 0..order {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

/// Yule-Walker AR(p) fit on a demeaned series. Requires N >= 50 p.
pub fn fit_ar_yule_walker(x: &TimeSeries, p: usize) -> Result<ArModel> {
    fit_arima(x, p, 0)
}

/// AR(p) on a d-times integer-differenced series (d in {0, 1}).
pub fn fit_arima(x: &TimeSeries, p: usize, d_int: usize) -> Result<ArModel> {
    if p == 0 {
        return Err(CoreError::InvalidConfig("AR order p must be at least 1".into()));
    }
    if d_int > 1 {
        return Err(CoreError::InvalidConfig(format!("integer differencing order {d_int} not supported (use 0 or 1)")));
    }
    let needed = 50 * p + d_int;
    if x.len() < needed {
        return Err(CoreError::TooShort { needed, got: x.len() });
    }
    let work = difference(&x.values, d_int);
    let mean = work.iter().sum::<f64>() / work.len() as f64;
    let r = biased_autocorrelations(&work, p)?;
    let (phi, err_ratio) = levinson_durbin(&r)?;
    let c0: f64 = work.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / work.len() as f64;
    Ok(ArModel { phi, intercept_mean: mean, noise_var: c0 * err_ratio / r[0], d_int })
}

/// Iterated h-step AR forecasts. History is differenced d_int times and
/// demeaned; forecasts are integrated back and re-meaned.
pub fn forecast_ar(model: &ArModel, history: &[f64], horizon: usize) -> Result<Vec<f64>> {
    let p = model.phi.len();
    if history.len() < p + model.d_int {
        return Err(CoreError::TooShort { needed: p + model.d_int, got: history.len() });
    }
    let work = difference(history, model.d_int);
    let mut tail: Vec<f64> = work[work.len() - p..].iter().map(|v| v - model.intercept_mean).collect();
    let mut demeaned = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut next = 0.0;
        for (j, &phi) in model.phi.iter().enumerate() {
            next += phi * tail[tail.len() - 1 - j];
        }
        demeaned.push(next);
        tail.push(next);
    }
    let mut out: Vec<f64> = demeaned.iter().map(|v| v + model.intercept_mean).collect();
    if model.d_int == 1 {
        let mut level = *history.last().unwrap();
        for v in out.iter_mut() {
            level += *v;
            *v = level;
        }
    }
    Ok(out)
}

/// Fractional-differencing weights pi_0..pi_trunc.
pub fn pi_weights(d: f64, trunc: usize) -> Vec<f64> {
    let mut pi = Vec::with_capacity(trunc + 1);
    pi.push(1.0);
    for j in 1..=trunc {
        let prev = pi[j - 1];
        pi.push(prev * ((j - 1) as f64 - d) / j as f64);
    }
    pi
}

/// Truncated fractional differencing:
/// `y_t = sum_{j=0..min(t,trunc)} pi_j x_{t-j}`. d = 0 is the identity.
pub fn frac_diff(x: &[f64], d: f64, trunc: usize) -> Vec<f64> {
    assert!((0.0..0.5).contains(&d), "fractional order d must lie in [0, 0.5), got {d}");
    let pi = pi_weights(d, trunc);
    frac_diff_with_weights(x, &pi)
}

fn frac_diff_with_weights(x: &[f64], pi: &[f64]) -> Vec<f64> {
    let trunc = pi.len() - 1;
    (0..x.len())
        .map(|t| {
            let jmax = t.min(trunc);
            let mut acc = 0.0;
            for j in 0..=jmax {
                acc += pi[j] * x[t - j];
            }
            acc
        })
        .collect()
}

/// Inverse of [`frac_diff`] with the same weights:
/// `x_t = y_t - sum_{j=1..min(t,trunc)} pi_j x_{t-j}`.
pub fn frac_integrate(y: &[f64], d: f64, trunc: usize) -> Vec<f64> {
    assert!((0.0..0.5).contains(&d), "fractional order d must lie in [0, 0.5), got {d}");
    let pi = pi_weights(d, trunc);
    let mut x = Vec::with_capacity(y.len());
    for t in 0..y.len() {
        let jmax = t.min(trunc);
        let mut acc = y[t];
        for j in 1..=jmax {
            acc -= pi[j] * x[t - j];
        }
        x.push(acc);
    }
    x
}

/// FARIMA fit. When `d` is absent it is taken as
/// `clamp(H_est - 0.5, 0, 0.49)` from the variance-time Hurst estimate of
/// the series. The series is demeaned, fractionally differenced, and an
/// AR(p) is fitted on the filtered values (past the filter warm-up).
pub fn fit_farima(x: &TimeSeries, p: usize, d: Option<f64>) -> Result<FarimaModel> {
    if x.len() < 1_000 {
        return Err(CoreError::TooShort { needed: 1_000, got: x.len() });
    }
    let d = match d {
        Some(d) => {
            if !(0.0..0.5).contains(&d) {
                return Err(CoreError::InvalidConfig(format!("fractional order d must lie in [0, 0.5), got {d}")));
            }
            d
        }
        None => {
            let est = variance_time_hurst(x, &default_block_sizes())?;
            (est.h - 0.5).clamp(0.0, 0.49)
        }
    };
    let trunc = DEFAULT_TRUNC_LAGS.min(x.len() / 2);
    let mean = x.values.iter().sum::<f64>() / x.len() as f64;
    let demeaned: Vec<f64> = x.values.iter().map(|v| v - mean).collect();
    let pi = pi_weights(d, trunc);
    let filtered = frac_diff_with_weights(&demeaned, &pi);
    // Skip the filter warm-up when the filter is active; with d = 0 the
    // filter is the identity and the fit must coincide with the plain AR.
    let skip = if d == 0.0 { 0 } else { trunc.min(filtered.len() / 5) };
    let fit_series = TimeSeries { values: filtered[skip..].to_vec(), tick_ms: x.tick_ms, origin_tick: 0 };
    let ar = fit_ar_yule_walker(&fit_series, p)?;
    Ok(FarimaModel { phi: ar.phi, d_frac: d, trunc_lags: trunc, pi_coeffs: pi, intercept_mean: mean })
}

/// Forecasts by fractionally differencing the history, iterating the AR
/// recursion, and re-integrating the forecasts conditioned on the history
/// tail.
pub fn forecast_farima(model: &FarimaModel, history: &[f64], horizon: usize) -> Result<Vec<f64>> {
    let p = model.phi.len();
    if history.len() <= model.trunc_lags.max(p) {
        return Err(CoreError::TooShort { needed: model.trunc_lags.max(p) + 1, got: history.len() });
    }
    let demeaned: Vec<f64> = history.iter().map(|v| v - model.intercept_mean).collect();
    let filtered = frac_diff_with_weights(&demeaned, &model.pi_coeffs);
    forecast_farima_from_filtered(model, &demeaned, &filtered, horizon)
}

/// Shared forecasting core: `demeaned` is the raw demeaned history and
/// `filtered` its fractional difference (both length t).
fn forecast_farima_from_filtered(
    model: &FarimaModel,
    demeaned: &[f64],
    filtered: &[f64],
    horizon: usize,
) -> Result<Vec<f64>> {
    let p = model.phi.len();
    if filtered.len() < p {
        return Err(CoreError::TooShort { needed: p, got: filtered.len() });
    }
    let inner_mean = 0.0; // AR fitted on an already-demeaned filtered series
    let mut tail: Vec<f64> = filtered[filtered.len() - p..].to_vec();
    let mut y_hat = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut next = inner_mean;
        for (j, &phi) in model.phi.iter().enumerate() {
            next += phi * (tail[tail.len() - 1 - j] - inner_mean);
        }
        y_hat.push(next);
        tail.push(next);
    }
    // Invert the filter one step at a time, reading actual history where
    // available and previously integrated forecasts otherwise.
    let t = demeaned.len();
    let mut x_hat: Vec<f64> = Vec::with_capacity(horizon);
    for s in 0..horizon {
        let mut acc = y_hat[s];
        let jmax = model.trunc_lags.min(t + s);
        for j in 1..=jmax {
            let idx = t as i64 + s as i64 - j as i64;
            let xv = if idx >= t as i64 {
                x_hat[(idx - t as i64) as usize]
            } else {
                demeaned[idx as usize]
            };
            acc -= model.pi_coeffs[j] * xv;
        }
        x_hat.push(acc);
    }
    Ok(x_hat.iter().map(|v| v + model.intercept_mean).collect())
}

/// Rolling-origin helper: fractionally differences the full series once so
/// that forecasting from every origin costs O(horizon * trunc) instead of
/// re-filtering the whole history per window.
pub struct RollingFarima<'a> {
    model: &'a FarimaModel,
    demeaned: Vec<f64>,
    filtered: Vec<f64>,
}

impl<'a> RollingFarima<'a> {
    pub fn new(model: &'a FarimaModel, series: &[f64]) -> Self {
        let demeaned: Vec<f64> = series.iter().map(|v| v - model.intercept_mean).collect();
        let filtered = frac_diff_with_weights(&demeaned, &model.pi_coeffs);
        Self { model, demeaned, filtered }
    }

    /// Forecasts `horizon` steps using only `series[..t]` as history. The
    /// cached filter output is causal, so the prefix equals a fresh filter
    /// of the prefix exactly.
    pub fn forecast_from(&self, t: usize, horizon: usize) -> Result<Vec<f64>> {
        if t > self.demeaned.len() {
            return Err(CoreError::InvalidConfig(format!(
                "forecast origin {t} beyond series length {}",
                self.demeaned.len()
            )));
        }
        forecast_farima_from_filtered(self.model, &self.demeaned[..t], &self.filtered[..t], horizon)
    }
}
