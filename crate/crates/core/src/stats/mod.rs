//! Correlation estimation, Fisher intervals and indicator cross-correlation
//! matrices.

mod pca;

pub use pca::{pca_project, PcaResult};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Variance normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum VarianceMode {
    /// `(1/T) sum x^2 - ((1/T) sum x)^2`, combined literally with the
    /// `1/(T-1)` covariance. Self-correlation is then `T/(T-1)`.
    Biased,
    /// Sample variance with `1/(T-1)`; correlations lie in `[-1, 1]`.
    #[default]
    Unbiased,
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Input(format!(
            "sample lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Input("samples need at least two values".into()));
    }
    Ok(())
}

/// `(1/(T-1)) sum xy - (1/(T(T-1))) sum x sum y`, evaluated on centered
/// values (algebraically identical, numerically stable).
pub fn covariance_estimate(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let t = x.len() as f64;
    let mx = x.iter().sum::<f64>() / t;
    let my = y.iter().sum::<f64>() / t;
    let s: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(s / (t - 1.0))
}

pub fn variance_estimate(x: &[f64], mode: VarianceMode) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::Input("samples need at least two values".into()));
    }
    let t = x.len() as f64;
    let m = x.iter().sum::<f64>() / t;
    let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    Ok(match mode {
        VarianceMode::Biased => ss / t,
        VarianceMode::Unbiased => ss / (t - 1.0),
    })
}

/// Pearson correlation. Exactly symmetric in its arguments.
pub fn pearson(x: &[f64], y: &[f64], mode: VarianceMode) -> Result<f64> {
    check_pair(x, y)?;
    let c = covariance_estimate(x, y)?;
    let vx = variance_estimate(x, mode)?;
    let vy = variance_estimate(y, mode)?;
    if vx <= 0.0 || vy <= 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance".into()));
    }
    // Product first so that swapping x and y is bit-identical.
    Ok(c / (vx * vy).sqrt())
}

/// Two-sided standard normal quantile for a confidence level.
pub fn normal_quantile(level: f64) -> f64 {
    if level == 0.95 {
        return 1.96;
    }
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + level / 2.0)
}

/// Fisher z-transform confidence interval for a correlation from `n` pairs.
pub fn fisher_interval(rho: f64, n: usize, level: f64) -> Result<(f64, f64)> {
    if n <= 3 {
        return Err(Error::Input(format!("Fisher interval needs n >= 4, got {n}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param("level", "must lie in (0, 1)"));
    }
    if !rho.is_finite() || rho.abs() > 1.0 {
        return Err(Error::Input(format!("correlation {rho} outside [-1, 1]")));
    }
    if rho.abs() == 1.0 {
        return Ok((rho, rho));
    }
    let z = rho.atanh();
    let h = normal_quantile(level) / ((n - 3) as f64).sqrt();
    Ok(((z - h).tanh(), (z + h).tanh()))
}

pub const MORPHOLOGY_LABELS: [&str; 4] = ["moran", "meanDistance", "entropy", "hierarchy"];
pub const NETWORK_LABELS: [&str; 4] = ["centrality", "pathLength", "speed", "diameter"];

/// One correlation entry with its 95% Fisher interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorrelationEntry {
    pub rho: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// 4x4 table of correlations between morphology rows and network columns.
/// `None` marks entries that could not be estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCorrelationMatrix {
    pub entries: [[Option<CorrelationEntry>; 4]; 4],
    pub n: usize,
}

impl CrossCorrelationMatrix {
    pub fn rho(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i][j].map(|e| e.rho)
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().flatten().all(Option::is_some)
    }

    /// Row-major flattening of the 16 correlations.
    pub fn flatten(&self) -> Option<[f64; 16]> {
        let mut out = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                out[i * 4 + j] = self.rho(i, j)?;
            }
        }
        Some(out)
    }

    pub fn mean_abs_rho(&self) -> Option<f64> {
        self.flatten().map(|f| f.iter().map(|v| v.abs()).sum::<f64>() / 16.0)
    }

    pub const CSV_HEADER: &'static str = "rowLabel,colLabel,rho,ciLow,ciHigh,n";

    /// Long-format CSV; missing entries leave the numeric fields empty.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for (i, row) in MORPHOLOGY_LABELS.iter().enumerate() {
            for (j, col) in NETWORK_LABELS.iter().enumerate() {
                match self.entries[i][j] {
                    Some(e) => out.push_str(&format!(
                        "{row},{col},{},{},{},{}\n",
                        e.rho, e.ci_low, e.ci_high, self.n
                    )),
                    None => out.push_str(&format!("{row},{col},,,,{}\n", self.n)),
                }
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == Self::CSV_HEADER => {}
            _ => return Err(Error::Input("line 1: unexpected correlation matrix header".into())),
        }
        let mut entries = [[None; 4]; 4];
        let mut n = None;
        let mut seen = 0;
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Input(format!("line {}: malformed row `{line}`", lineno + 1));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad());
            }
            let i = MORPHOLOGY_LABELS.iter().position(|l| *l == f[0]).ok_or_else(bad)?;
            let j = NETWORK_LABELS.iter().position(|l| *l == f[1]).ok_or_else(bad)?;
            let row_n: usize = f[5].parse().map_err(|_| bad())?;
            if *n.get_or_insert(row_n) != row_n {
                return Err(bad());
            }
            if !f[2].is_empty() {
                let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
                entries[i][j] = Some(CorrelationEntry {
                    rho: num(f[2])?,
                    ci_low: num(f[3])?,
                    ci_high: num(f[4])?,
                });
            }
            seen += 1;
        }
        if seen != 16 {
            return Err(Error::Input(format!("expected 16 matrix rows, found {seen}")));
        }
        Ok(CrossCorrelationMatrix {
            entries,
            n: n.unwrap_or(0),
        })
    }
}

/// Correlates each of the four morphology samples with each of the four
/// network samples. Degenerate entries become `None`.
pub fn cross_correlation(m: &[Vec<f64>; 4], g: &[Vec<f64>; 4]) -> Result<CrossCorrelationMatrix> {
    let n = m[0].len();
    if m.iter().chain(g.iter()).any(|s| s.len() != n) {
        return Err(Error::Input("all indicator samples must share one length".into()));
    }
    if n < 4 {
        return Err(Error::Input(format!("need at least 4 replications, got {n}")));
    }
    let mut entries = [[None; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            entries[i][j] = pearson(&m[i], &g[j], VarianceMode::Unbiased)
                .ok()
                .and_then(|rho| {
                    let rho = rho.clamp(-1.0, 1.0);
                    fisher_interval(rho, n, 0.95).ok().map(|(lo, hi)| CorrelationEntry {
                        rho,
                        ci_low: lo,
                        ci_high: hi,
                    })
                });
        }
    }
    Ok(CrossCorrelationMatrix { entries, n })
}

/// Per-entry values over the morphology x network layout.
pub type EntryGrid = [[Option<f64>; 4]; 4];

/// Per-entry spread `max - min` and maximal absolute correlation over a
/// population of matrices; missing entries are skipped.
pub fn amplitude_and_max(
    matrices: &[CrossCorrelationMatrix],
) -> Result<(EntryGrid, EntryGrid)> {
    if matrices.is_empty() {
        return Err(Error::Input("no matrices".into()));
    }
    let mut amplitude = [[None; 4]; 4];
    let mut max_abs = [[None; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let vals: Vec<f64> = matrices.iter().filter_map(|m| m.rho(i, j)).collect();
            if vals.is_empty() {
                continue;
            }
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            amplitude[i][j] = Some(hi - lo);
            max_abs[i][j] = Some(vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
        }
    }
    Ok((amplitude, max_abs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_cases() {
        assert!((covariance_estimate(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(covariance_estimate(&[2.0, 2.0, 2.0], &[1.0, 5.0, 3.0]).unwrap(), 0.0);
        assert!((covariance_estimate(&[1.0, 2.0], &[2.0, 1.0]).unwrap() + 0.5).abs() < 1e-15);
        assert!(covariance_estimate(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn variance_cases() {
        let x = [1.0, 2.0, 3.0];
        assert!((variance_estimate(&x, VarianceMode::Biased).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((variance_estimate(&x, VarianceMode::Unbiased).unwrap() - 1.0).abs() < 1e-15);
        for mode in [VarianceMode::Biased, VarianceMode::Unbiased] {
            assert_eq!(variance_estimate(&[4.0; 5], mode).unwrap(), 0.0);
        }
    }

    #[test]
    fn pearson_cases() {
        let u = VarianceMode::Unbiased;
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], u).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0], u).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0], u).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], u),
            Err(Error::UndefinedCorrelation(_))
        ));
    }

    #[test]
    fn fisher_cases() {
        let (lo, hi) = fisher_interval(0.0, 100, 0.95).unwrap();
        let h = (1.96 / 97f64.sqrt()).tanh();
        assert!((hi - h).abs() < 1e-15 && (lo + h).abs() < 1e-15);
        assert!((hi - 0.1964).abs() < 1e-4);
        assert!((hi - lo - 0.39).abs() < 0.01);
        assert!(fisher_interval(0.0, 3, 0.95).is_err());
        assert_eq!(fisher_interval(1.0, 10, 0.95).unwrap(), (1.0, 1.0));
        let (lo, hi) = fisher_interval(0.3, 50, 0.99).unwrap();
        let (lo95, hi95) = fisher_interval(0.3, 50, 0.95).unwrap();
        assert!(lo < lo95 && hi > hi95);
    }

    #[test]
    fn cross_correlation_with_itself() {
        let base: Vec<Vec<f64>> = (0..4)
            .map(|k| (0..10).map(|t| ((t * (k + 2)) % 7) as f64 + 0.1 * t as f64).collect())
            .collect();
        let m: [Vec<f64>; 4] = std::array::from_fn(|i| base[i].clone());
        let mat = cross_correlation(&m, &m).unwrap();
        for i in 0..4 {
            assert!((mat.rho(i, i).unwrap() - 1.0).abs() < 1e-12);
            assert_eq!(mat.rho(i, 2), mat.rho(2, i));
        }
    }

    #[test]
    fn constant_column_is_missing() {
        let m: [Vec<f64>; 4] = std::array::from_fn(|k| (0..8).map(|t| ((t * t + k) % 5) as f64).collect());
        let mut g = m.clone();
        g[1] = vec![3.0; 8];
        let mat = cross_correlation(&m, &g).unwrap();
        for i in 0..4 {
            assert!(mat.entries[i][1].is_none());
            assert!(mat.entries[i][0].is_some());
        }
        assert!(!mat.is_complete());
        let round = CrossCorrelationMatrix::from_csv(&mat.to_csv()).unwrap();
        assert_eq!(round, mat);
    }

    #[test]
    fn amplitude_cases() {
        let mut a = CrossCorrelationMatrix {
            entries: [[Some(CorrelationEntry { rho: -0.3, ci_low: -0.5, ci_high: 0.0 }); 4]; 4],
            n: 10,
        };
        let (amp, max) = amplitude_and_max(std::slice::from_ref(&a)).unwrap();
        assert!(amp.iter().flatten().all(|v| *v == Some(0.0)));
        assert!(max.iter().flatten().all(|v| *v == Some(0.3)));
        let mut b = a.clone();
        b.entries[0][0] = Some(CorrelationEntry { rho: 0.5, ci_low: 0.2, ci_high: 0.7 });
        a.entries[3][3] = None;
        b.entries[3][3] = None;
        let (amp, max) = amplitude_and_max(&[a, b]).unwrap();
        assert!((amp[0][0].unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(max[0][0], Some(0.5));
        assert_eq!(amp[3][3], None);
        assert!(amplitude_and_max(&[]).is_err());
    }
}
