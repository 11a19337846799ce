use serde::{Deserialize, Serialize};

use super::{equicorrelation, lowpass, wiener_paths, FilterSpec, Series};
use crate::error::{Error, Result};
use crate::stats::{fisher_interval, pearson, variance_estimate, VarianceMode};

/// Hybrid construction settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct HybridSpec {
    /// Fundamental timescale in seconds.
    pub omega0: f64,
    /// Noise timescale in seconds; sets the sampling of the fundamentals.
    pub omega1: f64,
    /// Target correlation of the noise increments.
    pub rho: f64,
    /// Per-asset noise increment scale.
    pub sigma: Vec<f64>,
}

impl HybridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega1 > 0.0 && self.omega1 < self.omega0) {
            return Err(Error::param("omega1", "must be positive and below omega0"));
        }
        if !(self.rho.abs() < 1.0) {
            return Err(Error::param("rho", "must lie in (-1, 1)"));
        }
        if self.sigma.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::param("sigma", "must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridOutput {
    /// Fundamental plus synthetic component, one per asset.
    pub series: Vec<Series>,
    /// The synthetic high-frequency component alone.
    pub noise: Vec<Series>,
}

/// Adds to each fundamental the high-frequency part `W - F_omega0[W]` of a
/// correlated Wiener path.
pub fn synthesize_hybrid(fundamentals: &[Series], spec: &HybridSpec, seed: u64) -> Result<HybridOutput> {
    spec.validate()?;
    let Some(first) = fundamentals.first() else {
        return Err(Error::Input("no fundamentals".into()));
    };
    if fundamentals.iter().any(|f| !f.same_grid(first)) {
        return Err(Error::Input("fundamentals must share t0, dt and length".into()));
    }
    if spec.sigma.len() != fundamentals.len() {
        return Err(Error::param("sigma", "one scale per asset is required"));
    }
    let n = first.len();
    let corr = equicorrelation(fundamentals.len(), spec.rho);
    let paths = wiener_paths(n, &corr, &spec.sigma, seed)?;
    let mut series = Vec::with_capacity(fundamentals.len());
    let mut noise = Vec::with_capacity(fundamentals.len());
    for ((f, path), &sigma) in fundamentals.iter().zip(paths).zip(&spec.sigma) {
        if sigma == 0.0 {
            series.push(f.clone());
            noise.push(Series::new(f.t0, f.dt, vec![0.0; n])?);
            continue;
        }
        let w = Series::new(f.t0, f.dt, path)?;
        let low = lowpass(&w, FilterSpec { width: spec.omega0 })?;
        let high: Vec<f64> = w.values.iter().zip(&low.values).map(|(a, b)| a - b).collect();
        let hybrid: Vec<f64> = f.values.iter().zip(&high).map(|(a, b)| a + b).collect();
        series.push(Series::new(f.t0, f.dt, hybrid)?);
        noise.push(Series::new(f.t0, f.dt, high)?);
    }
    Ok(HybridOutput { series, noise })
}

/// First-order effective correlation of hybrid returns:
/// `(eps1 eps2 rho0 + rho) (1 - (eps1^2 + eps2^2) / 2)`.
pub fn effective_correlation(rho: f64, rho0: f64, eps1: f64, eps2: f64) -> f64 {
    (eps1 * eps2 * rho0 + rho) * (1.0 - 0.5 * (eps1 * eps1 + eps2 * eps2))
}

/// Measured quantities entering the effective correlation comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCorrelation {
    /// Correlation of fundamental returns.
    pub rho0: f64,
    /// Fundamental-to-noise return volatility ratios.
    pub eps: [f64; 2],
    pub predicted: f64,
    pub empirical: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

/// Compares the empirical correlation of hybrid returns with the
/// first-order prediction for a pair of assets.
pub fn measure_effective_correlation(
    fundamentals: &[Series],
    hybrid: &HybridOutput,
    rho: f64,
) -> Result<EffectiveCorrelation> {
    if fundamentals.len() != 2 || hybrid.series.len() != 2 {
        return Err(Error::Input("effective correlation is defined for two assets".into()));
    }
    let df: Vec<Vec<f64>> = fundamentals.iter().map(|s| s.differences().values).collect();
    let dn: Vec<Vec<f64>> = hybrid.noise.iter().map(|s| s.differences().values).collect();
    let dx: Vec<Vec<f64>> = hybrid.series.iter().map(|s| s.differences().values).collect();
    let sd = |v: &[f64]| variance_estimate(v, VarianceMode::Unbiased).map(f64::sqrt);
    let mut eps = [0.0; 2];
    for i in 0..2 {
        let noise_sd = sd(&dn[i])?;
        if noise_sd <= 0.0 {
            return Err(Error::UndefinedCorrelation("noise component has zero variance".into()));
        }
        eps[i] = sd(&df[i])? / noise_sd;
    }
    let rho0 = pearson(&df[0], &df[1], VarianceMode::Unbiased)?;
    let empirical = pearson(&dx[0], &dx[1], VarianceMode::Unbiased)?.clamp(-1.0, 1.0);
    let n = dx[0].len();
    let (ci_low, ci_high) = fisher_interval(empirical, n, 0.95)?;
    Ok(EffectiveCorrelation {
        rho0,
        eps,
        predicted: effective_correlation(rho, rho0, eps[0], eps[1]),
        empirical,
        ci_low,
        ci_high,
        n,
    })
}
