use serde::{Deserialize, Serialize};

use super::Series;
use crate::error::{Error, Result};

/// Non-causal truncated Gaussian filter of total width `width` seconds:
/// support `[-width/2, width/2]`, standard deviation `width/4`, unit sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub width: f64,
}

/// Normalized kernel taps for sampling period `dt`, centered on the
/// middle element.
pub fn gaussian_kernel(width: f64, dt: f64) -> Result<Vec<f64>> {
    if !(width > 2.0 * dt) {
        return Err(Error::param("width", "filter width must exceed twice the sampling period"));
    }
    let half = (width / (2.0 * dt)).floor() as i64;
    let sigma = width / (4.0 * dt);
    let taps: Vec<f64> = (-half..=half)
        .map(|j| (-(j * j) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    Ok(taps.into_iter().map(|t| t / total).collect())
}

/// Centered convolution with the Gaussian kernel. Near the edges the
/// kernel is renormalized over the available samples.
pub fn lowpass(s: &Series, spec: FilterSpec) -> Result<Series> {
    let kernel = checked_kernel(s, spec.width)?;
    let out = (0..s.len()).map(|i| smooth_at(&s.values, &kernel, i)).collect();
    Series::new(s.t0, s.dt, out)
}

fn checked_kernel(s: &Series, width: f64) -> Result<Vec<f64>> {
    let kernel = gaussian_kernel(width, s.dt)?;
    if s.len() < kernel.len() {
        return Err(Error::Input(format!(
            "series of {} samples is shorter than the {}-sample filter support",
            s.len(),
            kernel.len()
        )));
    }
    Ok(kernel)
}

fn smooth_at(x: &[f64], kernel: &[f64], i: usize) -> f64 {
    let half = kernel.len() / 2;
    let n = x.len();
    let lo = i.saturating_sub(half);
    let hi = (i + half).min(n - 1);
    let mut acc = 0.0;
    let mut norm = 0.0;
    for j in lo..=hi {
        let k = kernel[j + half - i];
        acc += k * x[j];
        norm += k;
    }
    if lo + half == i && hi == i + half {
        acc
    } else {
        acc / norm
    }
}

/// Low-pass at `omega_m`, then keep every `k`-th sample with
/// `k = round((omega_m / 3) / dt)`. Only the kept samples are filtered.
pub fn decimate(s: &Series, omega_m: f64) -> Result<Series> {
    let k = ((omega_m / 3.0) / s.dt).round();
    if !(k >= 1.0) {
        return Err(Error::param("omegaM", "omegaM / 3 must be at least the sampling period"));
    }
    let k = k as usize;
    let kernel = checked_kernel(s, omega_m)?;
    let values = (0..s.len()).step_by(k).map(|i| smooth_at(&s.values, &kernel, i)).collect();
    Series::new(s.t0, s.dt * k as f64, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_unchanged() {
        let s = Series::new(0, 1.0, vec![2.5; 50]).unwrap();
        let f = lowpass(&s, FilterSpec { width: 10.0 }).unwrap();
        for v in f.values {
            assert!((v - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn impulse_response_is_kernel() {
        let mut v = vec![0.0; 41];
        v[20] = 1.0;
        let s = Series::new(0, 1.0, v).unwrap();
        let f = lowpass(&s, FilterSpec { width: 12.0 }).unwrap();
        let k = gaussian_kernel(12.0, 1.0).unwrap();
        assert_eq!(k.len(), 13);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for (j, kj) in k.iter().enumerate() {
            assert!((f.values[14 + j] - kj).abs() < 1e-15);
        }
        assert_eq!(f.values[13], 0.0);
    }

    #[test]
    fn slow_sine_passes() {
        let width = 20.0;
        let period = 50.0 * width;
        let n = 5000;
        let v: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / period).sin())
            .collect();
        let f = lowpass(&Series::new(0, 1.0, v).unwrap(), FilterSpec { width }).unwrap();
        let amp = f.values[100..n - 100].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!((amp - 1.0).abs() < 0.01, "{amp}");
    }

    #[test]
    fn too_short_or_too_narrow() {
        let s = Series::new(0, 1.0, vec![1.0; 5]).unwrap();
        assert!(lowpass(&s, FilterSpec { width: 20.0 }).is_err());
        assert!(lowpass(&s, FilterSpec { width: 2.0 }).is_err());
    }

    #[test]
    fn decimation_steps() {
        let s = Series::new(10, 1.0, (0..30).map(|i| i as f64).collect()).unwrap();
        let d = decimate(&s, 3.0).unwrap();
        assert_eq!(d.len(), 30);
        assert_eq!(d.dt, 1.0);
        let d = decimate(&s, 9.0).unwrap();
        assert_eq!(d.dt, 3.0);
        assert_eq!(d.len(), 10);
        assert_eq!(d.timestamp(4), 22.0);
        assert!(decimate(&s, 1.0).is_err());
    }

    #[test]
    fn decimation_samples_the_full_filter() {
        let s = Series::new(0, 1.0, (0..500).map(|i| (i as f64 * 0.07).sin() + 0.01 * i as f64).collect()).unwrap();
        let full = lowpass(&s, FilterSpec { width: 60.0 }).unwrap();
        let d = decimate(&s, 60.0).unwrap();
        let kept: Vec<f64> = full.values.into_iter().step_by(20).collect();
        assert_eq!(d.values, kept);
    }
}
