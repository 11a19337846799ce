//! Correlated Gaussian increments by triangular orthonormalization.

use rand_distr::{Distribution, StandardNormal};

use super::{lowpass, FilterSpec, Series};
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

const PSD_TOL: f64 = 1e-10;

/// Lower-triangular `L` with `L L^T = R` for a positive semi-definite `R`.
/// Zero pivots (rank deficiency) produce zero columns.
pub fn cholesky_psd(r: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = r.len();
    if r.iter().any(|row| row.len() != n) {
        return Err(Error::param("correlation", "matrix must be square"));
    }
    for i in 0..n {
        if (r[i][i] - 1.0).abs() > 1e-12 {
            return Err(Error::param("correlation", "diagonal must be 1"));
        }
        for j in 0..i {
            if (r[i][j] - r[j][i]).abs() > 1e-12 {
                return Err(Error::param("correlation", "matrix must be symmetric"));
            }
            if !(r[i][j].abs() <= 1.0) {
                return Err(Error::param("correlation", "entries must lie in [-1, 1]"));
            }
        }
    }
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let d = r[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if d < -PSD_TOL {
            return Err(Error::param("correlation", "matrix is not positive semi-definite"));
        }
        if d <= PSD_TOL {
            for i in (j + 1)..n {
                let rest = r[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                if rest.abs() > 1e-8 {
                    return Err(Error::param("correlation", "matrix is not positive semi-definite"));
                }
            }
            continue;
        }
        let pivot = d.sqrt();
        l[j][j] = pivot;
        for i in (j + 1)..n {
            let s = r[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            l[i][j] = s / pivot;
        }
    }
    Ok(l)
}

/// Correlation matrix with every off-diagonal entry equal to `rho`.
pub fn equicorrelation(n: usize, rho: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { rho }).collect())
        .collect()
}

/// `n` jointly Gaussian increments per stream, with per-step standard
/// deviations `sigmas` and correlation matrix `correlation`.
///
/// Each step draws independent standard normals and maps them through the
/// triangular factor, so stream `i` only depends on the first `i + 1` draws.
pub fn correlated_noise(
    n: usize,
    correlation: &[Vec<f64>],
    sigmas: &[f64],
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let l = cholesky_psd(correlation)?;
    let k = l.len();
    if sigmas.len() != k {
        return Err(Error::param("sigma", "one scale per stream is required"));
    }
    if sigmas.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
        return Err(Error::param("sigma", "scales must be nonnegative"));
    }
    let mut rng = rng_from_seed(seed);
    let mut out = vec![Vec::with_capacity(n); k];
    let mut z = vec![0.0; k];
    for _ in 0..n {
        for v in z.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        for i in 0..k {
            let mut x = 0.0;
            for j in 0..=i {
                x += l[i][j] * z[j];
            }
            out[i].push(sigmas[i] * x);
        }
    }
    Ok(out)
}

/// Cumulative sums of correlated increments, starting from zero.
pub fn wiener_paths(
    n: usize,
    correlation: &[Vec<f64>],
    sigmas: &[f64],
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let inc = correlated_noise(n, correlation, sigmas, seed)?;
    Ok(inc
        .into_iter()
        .map(|s| {
            let mut acc = 0.0;
            s.into_iter()
                .map(|v| {
                    acc += v;
                    acc
                })
                .collect()
        })
        .collect())
}

/// Simulated fundamentals: a pair of slow correlated Wiener log-price paths
/// with correlation `rho0`, low-passed at `omega0`.
pub fn synthetic_fundamentals(
    n: usize,
    t0: i64,
    dt: f64,
    rho0: f64,
    step_sigma: f64,
    omega0: f64,
    seed: u64,
) -> Result<Vec<Series>> {
    let paths = wiener_paths(n, &equicorrelation(2, rho0), &[step_sigma, step_sigma], seed)?;
    paths
        .into_iter()
        .map(|p| lowpass(&Series::new(t0, dt, p)?, FilterSpec { width: omega0 }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{pearson, VarianceMode};

    #[test]
    fn identity_gives_independent_streams() {
        let x = correlated_noise(50_000, &equicorrelation(3, 0.0), &[1.0, 2.0, 0.5], 1).unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                let r = pearson(&x[i], &x[j], VarianceMode::Unbiased).unwrap();
                assert!(r.abs() < 3.0 / (50_000f64).sqrt() * 1.5, "{r}");
            }
        }
    }

    #[test]
    fn perfect_correlation_duplicates() {
        let x = correlated_noise(1000, &equicorrelation(2, 1.0), &[0.3, 0.3], 7).unwrap();
        assert_eq!(x[0], x[1]);
    }

    #[test]
    fn half_correlation() {
        let x = correlated_noise(1_000_000, &equicorrelation(2, 0.5), &[1.0, 1.0], 11).unwrap();
        let r = pearson(&x[0], &x[1], VarianceMode::Unbiased).unwrap();
        assert!((0.4985..=0.5015).contains(&r), "{r}");
    }

    #[test]
    fn rejects_non_psd() {
        let r = vec![
            vec![1.0, 0.9, -0.9],
            vec![0.9, 1.0, 0.9],
            vec![-0.9, 0.9, 1.0],
        ];
        assert!(correlated_noise(10, &r, &[1.0; 3], 0).is_err());
        assert!(cholesky_psd(&[vec![1.0, 0.2], vec![0.3, 1.0]]).is_err());
    }

    #[test]
    fn factor_reproduces_matrix() {
        let r = vec![
            vec![1.0, 0.3, -0.2],
            vec![0.3, 1.0, 0.5],
            vec![-0.2, 0.5, 1.0],
        ];
        let l = cholesky_psd(&r).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| l[i][k] * l[j][k]).sum();
                assert!((v - r[i][j]).abs() < 1e-14);
            }
        }
    }
}
