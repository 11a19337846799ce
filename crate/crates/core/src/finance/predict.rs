//! Rolling autoregressive predictor and its evaluation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Series;
use crate::error::{Error, Result};
use crate::stats::{pearson, VarianceMode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PredictorSpec {
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default)]
    pub q: usize,
    #[serde(default = "default_window")]
    pub window: usize,
}

fn default_p() -> usize {
    2
}

fn default_window() -> usize {
    100
}

impl Default for PredictorSpec {
    fn default() -> Self {
        PredictorSpec {
            p: 2,
            q: 0,
            window: 100,
        }
    }
}

impl PredictorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.q != 0 {
            return Err(Error::param("q", "only pure autoregressive models (q = 0) are supported"));
        }
        if self.p < 1 {
            return Err(Error::param("p", "must be at least 1"));
        }
        if self.window <= self.p + 2 {
            return Err(Error::param("window", "must exceed p + 2"));
        }
        Ok(())
    }
}

/// Least-squares AR(p) fit with intercept. Returns `[c, a_1, ..., a_p]`,
/// or `None` when the regression is singular.
pub fn fit_ar(values: &[f64], p: usize) -> Option<Vec<f64>> {
    if values.len() <= p + 1 {
        return None;
    }
    // Centering conditions the normal equations; the intercept absorbs it.
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let y: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let dim = p + 1;
    let mut a = vec![vec![0.0; dim]; dim];
    let mut b = vec![0.0; dim];
    let mut row = vec![0.0; dim];
    for s in p..y.len() {
        row[0] = 1.0;
        for k in 1..=p {
            row[k] = y[s - k];
        }
        for i in 0..dim {
            b[i] += row[i] * y[s];
            for j in 0..dim {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve(a, b)?;
    let intercept = coef[0] + mean * (1.0 - coef[1..].iter().sum::<f64>());
    Some(std::iter::once(intercept).chain(coef[1..].iter().copied()).collect())
}

/// Gaussian elimination with partial pivoting. A pivot that collapses
/// relative to its original diagonal marks the system singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let diag: Vec<f64> = (0..n).map(|i| a[i][i].abs()).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-10 * diag[col] || a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// One-step-ahead predictions. For every `t` with a full window
/// `[t - window + 1, t]`, the AR model fitted on that window predicts
/// `t + 1`; a singular fit falls back to the last observed value. The
/// output is aligned with the targets, starting at index `window`.
pub fn fit_ar_predict(s: &Series, spec: &PredictorSpec) -> Result<Series> {
    spec.validate()?;
    let n = s.len();
    if n <= spec.window + spec.p {
        return Err(Error::Input(format!(
            "series of {n} samples is too short for window {} and order {}",
            spec.window, spec.p
        )));
    }
    let x = &s.values;
    let p = spec.p;
    let preds: Vec<f64> = (spec.window - 1..n - 1)
        .into_par_iter()
        .map(|t| {
            let window = &x[t + 1 - spec.window..=t];
            match fit_ar(window, p) {
                Some(c) => c[0] + (1..=p).map(|k| c[k] * x[t + 1 - k]).sum::<f64>(),
                None => x[t],
            }
        })
        .collect();
    Series::new(
        (s.t0 as f64 + spec.window as f64 * s.dt).round() as i64,
        s.dt,
        preds,
    )
}

/// Normalized squared prediction error with its 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Performance {
    pub pi: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// `pi = mean((target - prediction)^2) / var(target)`, biased variance.
/// The interval is `pi +- 1.96 sd / sqrt(T)` over the per-sample terms.
pub fn performance(target: &[f64], predictions: &[f64]) -> Result<Performance> {
    if target.len() != predictions.len() {
        return Err(Error::Input("target and predictions differ in length".into()));
    }
    let t = target.len();
    if t < 2 {
        return Err(Error::Input("performance needs at least two samples".into()));
    }
    let tf = t as f64;
    let mean = target.iter().sum::<f64>() / tf;
    let var = target.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / tf;
    if var <= 0.0 {
        return Err(Error::UndefinedCorrelation("target has zero variance".into()));
    }
    let terms: Vec<f64> = target
        .iter()
        .zip(predictions)
        .map(|(a, b)| (a - b).powi(2) / var)
        .collect();
    let pi = terms.iter().sum::<f64>() / tf;
    let sd = (terms.iter().map(|e| (e - pi).powi(2)).sum::<f64>() / (tf - 1.0)).sqrt();
    let h = 1.96 * sd / tf.sqrt();
    Ok(Performance {
        pi,
        ci_low: pi - h,
        ci_high: pi + h,
    })
}

/// `rho[x(t), y(t - tau)]` for `tau` in `[-tau_max, tau_max]`. Lags with
/// fewer than four overlapping pairs, or zero variance, are `None`.
pub fn lagged_correlation(x: &Series, y: &Series, tau_max: usize) -> Result<Vec<(i64, Option<f64>)>> {
    if x.dt != y.dt {
        return Err(Error::Input("series must share a sampling period".into()));
    }
    if x.t0 != y.t0 {
        return Err(Error::Input("series must start at the same time".into()));
    }
    let (n, m) = (x.len() as i64, y.len() as i64);
    let tm = tau_max as i64;
    Ok((-tm..=tm)
        .map(|tau| {
            let start = tau.max(0);
            let end = n.min(m + tau);
            if end - start < 4 {
                return (tau, None);
            }
            let xs = &x.values[start as usize..end as usize];
            let ys = &y.values[(start - tau) as usize..(end - tau) as usize];
            (tau, pearson(xs, ys, VarianceMode::Unbiased).ok())
        })
        .collect())
}
