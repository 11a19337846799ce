//! Hybrid series sweeps and predictability on real or synthetic fundamentals.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Deserialize;
use synthcorr::finance::{
    clean_multiple, decimate, fit_ar_predict, lagged_correlation, log_prices_and_returns,
    lowpass, measure_effective_correlation, parse_price_csv, performance, synthesize_hybrid,
    synthetic_fundamentals, FilterSpec, HybridSpec, PredictorSpec, Series,
};
use synthcorr::seed::{replication_seed, substream};
use synthcorr::stats::{variance_estimate, VarianceMode};

use crate::config::Run;
use crate::error::{CliError, CliResult};
use crate::output::{create_dir, num, opt_num, read_input, write_file};

const DAY: f64 = 86_400.0;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FinanceConfig {
    pub master_seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Two `timestamp,price` files; when empty, synthetic fundamentals are used.
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    /// Sampling period of the cleaned input series, in seconds.
    #[serde(default = "default_sampling")]
    pub sampling: f64,
    #[serde(default = "default_gap")]
    pub gap_threshold: f64,
    #[serde(default)]
    pub synthetic: SyntheticConfig,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
    #[serde(default = "default_omega1")]
    pub omega1: Vec<f64>,
    #[serde(default = "default_rho")]
    pub rho: Vec<f64>,
    /// Target ratio of fundamental to noise return volatility, used to
    /// derive the noise scales when `sigma` is absent.
    #[serde(default = "default_noise_ratio")]
    pub noise_ratio: f64,
    pub sigma: Option<Vec<f64>>,
    #[serde(default)]
    pub predictor: PredictorSpec,
    #[serde(default = "default_tau_max")]
    pub tau_max: usize,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SyntheticConfig {
    #[serde(default = "default_days")]
    pub days: f64,
    #[serde(default = "default_rho0")]
    pub rho0: f64,
    #[serde(default = "default_step_sigma")]
    pub step_sigma: f64,
}

fn default_sampling() -> f64 {
    1.0
}
fn default_gap() -> f64 {
    60.0
}
fn default_omega0() -> f64 {
    DAY
}
fn default_omega1() -> Vec<f64> {
    vec![2.0 * 3600.0]
}
fn default_rho() -> Vec<f64> {
    vec![-0.9, -0.5, -0.3, 0.0, 0.3, 0.5, 0.9]
}
fn default_noise_ratio() -> f64 {
    0.3
}
fn default_tau_max() -> usize {
    6
}
fn default_days() -> f64 {
    720.0
}
fn default_rho0() -> f64 {
    0.7
}
fn default_step_sigma() -> f64 {
    1e-3
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            days: default_days(),
            rho0: default_rho0(),
            step_sigma: default_step_sigma(),
        }
    }
}

impl Default for FinanceConfig {
    fn default() -> Self {
        FinanceConfig {
            master_seed: None,
            out: None,
            workers: None,
            inputs: Vec::new(),
            sampling: default_sampling(),
            gap_threshold: default_gap(),
            synthetic: SyntheticConfig::default(),
            omega0: default_omega0(),
            omega1: default_omega1(),
            rho: default_rho(),
            noise_ratio: default_noise_ratio(),
            sigma: None,
            predictor: PredictorSpec::default(),
            tau_max: default_tau_max(),
        }
    }
}

fn invalid(field: &str, reason: &str) -> CliError {
    CliError::Validation(format!("invalid parameter `{field}`: {reason}"))
}

impl FinanceConfig {
    fn validate(&self) -> CliResult<()> {
        if !self.inputs.is_empty() && self.inputs.len() != 2 {
            return Err(invalid("inputs", "exactly two price files are required"));
        }
        if self.omega1.is_empty() {
            return Err(invalid("omega1", "at least one timescale is required"));
        }
        if self.rho.is_empty() {
            return Err(invalid("rho", "at least one target correlation is required"));
        }
        if !(self.noise_ratio > 0.0 && self.noise_ratio.is_finite()) {
            return Err(invalid("noiseRatio", "must be positive"));
        }
        if let Some(s) = &self.sigma {
            if s.len() != 2 {
                return Err(invalid("sigma", "one scale per asset is required"));
            }
        }
        if self.inputs.is_empty() {
            let s = &self.synthetic;
            if !(s.days > 0.0 && s.days.is_finite()) {
                return Err(invalid("synthetic.days", "must be positive"));
            }
            if s.rho0.is_nan() || s.rho0.abs() > 1.0 {
                return Err(invalid("synthetic.rho0", "must lie in [-1, 1]"));
            }
            if !(s.step_sigma > 0.0 && s.step_sigma.is_finite()) {
                return Err(invalid("synthetic.stepSigma", "must be positive"));
            }
        }
        self.predictor.validate()?;
        for &omega1 in &self.omega1 {
            for &rho in &self.rho {
                HybridSpec {
                    omega0: self.omega0,
                    omega1,
                    rho,
                    sigma: vec![0.0; 2],
                }
                .validate()?;
            }
        }
        Ok(())
    }

    fn asset_names(&self) -> Vec<String> {
        if self.inputs.is_empty() {
            return vec!["asset1".into(), "asset2".into()];
        }
        self.inputs
            .iter()
            .map(|p| {
                p.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| p.display().to_string())
            })
            .collect()
    }
}

/// Series at one noise timescale, sampled at `omega1 / 3`.
struct Prepared {
    omega1: f64,
    /// Observed log-prices (the fundamentals themselves in synthetic mode).
    original: Vec<Series>,
    fundamentals: Vec<Series>,
    sigma: Vec<f64>,
    noise_seed: u64,
}

fn return_sd(s: &Series) -> CliResult<f64> {
    Ok(variance_estimate(&s.differences().values, VarianceMode::Unbiased)?.sqrt())
}

fn prepare(cfg: &FinanceConfig, seed: u64) -> CliResult<Vec<Prepared>> {
    let log_prices = if cfg.inputs.is_empty() {
        None
    } else {
        let mut raws = Vec::new();
        for p in &cfg.inputs {
            let text = read_input(p)?;
            raws.push(parse_price_csv(&text).map_err(|e| CliError::from(e).in_file(p))?);
        }
        let cleaned = clean_multiple(&raws, cfg.sampling, cfg.gap_threshold)?;
        Some(
            cleaned
                .iter()
                .map(|s| log_prices_and_returns(s).map(|(x, _)| x))
                .collect::<Result<Vec<_>, _>>()?,
        )
    };
    cfg.omega1
        .par_iter()
        .enumerate()
        .map(|(k, &omega1)| {
            let base = replication_seed(seed, k as u64, 0);
            let (original, fundamentals) = match &log_prices {
                Some(x) => {
                    let original = x
                        .iter()
                        .map(|s| decimate(s, omega1))
                        .collect::<Result<Vec<_>, _>>()?;
                    let fundamentals = original
                        .iter()
                        .map(|s| lowpass(s, FilterSpec { width: cfg.omega0 }))
                        .collect::<Result<Vec<_>, _>>()?;
                    (original, fundamentals)
                }
                None => {
                    let dt = omega1 / 3.0;
                    let n = (cfg.synthetic.days * DAY / dt).round() as usize;
                    let f = synthetic_fundamentals(
                        n,
                        0,
                        dt,
                        cfg.synthetic.rho0,
                        cfg.synthetic.step_sigma,
                        cfg.omega0,
                        substream(base, 0),
                    )?;
                    (f.clone(), f)
                }
            };
            let sigma = match &cfg.sigma {
                Some(s) => s.clone(),
                None => fundamentals
                    .iter()
                    .map(|f| return_sd(f).map(|sd| sd / cfg.noise_ratio))
                    .collect::<CliResult<Vec<_>>>()?,
            };
            Ok(Prepared {
                omega1,
                original,
                fundamentals,
                sigma,
                noise_seed: substream(base, 1),
            })
        })
        .collect()
}

/// The same noise seed is used across the correlation sweep at one
/// timescale, so curves over `rho` are smooth.
fn hybrid_spec(cfg: &FinanceConfig, p: &Prepared, rho: f64) -> HybridSpec {
    HybridSpec {
        omega0: cfg.omega0,
        omega1: p.omega1,
        rho,
        sigma: p.sigma.clone(),
    }
}

fn jobs(cfg: &FinanceConfig, n_prepared: usize, with_original: bool) -> Vec<(usize, Option<f64>)> {
    let mut out = Vec::new();
    for k in 0..n_prepared {
        if with_original {
            out.push((k, None));
        }
        for &rho in &cfg.rho {
            out.push((k, Some(rho)));
        }
    }
    out
}

pub fn sweep(mut cfg: FinanceConfig, inputs: Vec<PathBuf>, run: &Run) -> CliResult<()> {
    if !inputs.is_empty() {
        cfg.inputs = inputs;
    }
    cfg.validate()?;
    let prepared = prepare(&cfg, run.seed)?;
    let rows = jobs(&cfg, prepared.len(), false)
        .into_par_iter()
        .map(|(k, rho)| -> CliResult<String> {
            let p = &prepared[k];
            let rho = rho.expect("sweep jobs carry a target");
            let hybrid = synthesize_hybrid(&p.fundamentals, &hybrid_spec(&cfg, p, rho), p.noise_seed)?;
            let m = measure_effective_correlation(&p.fundamentals, &hybrid, rho)?;
            Ok(format!(
                "{},{},{},{},{},{}\n",
                num(rho),
                num(m.predicted),
                num(m.empirical),
                num(m.ci_low),
                num(m.ci_high),
                num(p.omega1)
            ))
        })
        .collect::<CliResult<Vec<_>>>()?;
    create_dir(&run.out)?;
    let mut text =
        String::from("rho_target,rho_effective_predicted,rho_effective_empirical,ci_low,ci_high,omega1\n");
    text.extend(rows);
    write_file(&run.out.join("sweep.csv"), &text)
}

pub fn predict(mut cfg: FinanceConfig, inputs: Vec<PathBuf>, run: &Run) -> CliResult<()> {
    if !inputs.is_empty() {
        cfg.inputs = inputs;
    }
    cfg.validate()?;
    let names = cfg.asset_names();
    let prepared = prepare(&cfg, run.seed)?;
    let results = jobs(&cfg, prepared.len(), true)
        .into_par_iter()
        .map(|(k, rho)| -> CliResult<(String, String)> {
            let p = &prepared[k];
            let series = match rho {
                None => p.original.clone(),
                Some(rho) => {
                    synthesize_hybrid(&p.fundamentals, &hybrid_spec(&cfg, p, rho), p.noise_seed)?
                        .series
                }
            };
            let returns: Vec<Series> = series.iter().map(Series::differences).collect();
            let rho_field = rho.map(num).unwrap_or_default();
            let mut perf = String::new();
            for (name, r) in names.iter().zip(&returns) {
                let preds = fit_ar_predict(r, &cfg.predictor)?;
                let pi = performance(&r.values[cfg.predictor.window..], &preds.values)?;
                perf.push_str(&format!(
                    "{name},{},{rho_field},{},{},{}\n",
                    num(p.omega1),
                    num(pi.pi),
                    num(pi.ci_low),
                    num(pi.ci_high)
                ));
            }
            let mut lagged = String::new();
            for (tau, v) in lagged_correlation(&returns[0], &returns[1], cfg.tau_max)? {
                lagged.push_str(&format!("{},{rho_field},{tau},{}\n", num(p.omega1), opt_num(v)));
            }
            Ok((perf, lagged))
        })
        .collect::<CliResult<Vec<_>>>()?;
    create_dir(&run.out)?;
    let mut perf = String::from("asset,omega1,rho_target,pi,ci_low,ci_high\n");
    let mut lagged = String::from("omega1,rho_target,tau,rho\n");
    for (p, l) in results {
        perf.push_str(&p);
        lagged.push_str(&l);
    }
    write_file(&run.out.join("performance.csv"), &perf)?;
    write_file(&run.out.join("lagged.csv"), &lagged)
}
