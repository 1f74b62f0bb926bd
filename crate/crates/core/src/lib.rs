//! Self-similar traffic synthesis, burst labeling, self-similarity
//! diagnostics, statistical forecasting baselines, and the shared
//! time-series container.

pub mod baselines;
pub mod burst;
pub mod error;
pub mod gen;
pub mod par;
pub mod selfsim;
pub mod series;

pub use error::{CoreError, Result};
pub use series::{NormStats, TimeSeries};
