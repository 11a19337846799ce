//! Hybrid financial series: real (or simulated) low-frequency fundamentals
//! plus synthetic high-frequency noise with a prescribed correlation.

mod filter;
mod hybrid;
mod noise;
mod predict;
mod series;

pub use filter::{decimate, gaussian_kernel, lowpass, FilterSpec};
pub use hybrid::{
    effective_correlation, measure_effective_correlation, synthesize_hybrid, EffectiveCorrelation,
    HybridOutput, HybridSpec,
};
pub use noise::{cholesky_psd, correlated_noise, equicorrelation, synthetic_fundamentals, wiener_paths};
pub use predict::{
    fit_ar, fit_ar_predict, lagged_correlation, performance, Performance, PredictorSpec,
};
pub use series::{clean_multiple, clean_series, log_prices_and_returns, parse_price_csv, Series};
