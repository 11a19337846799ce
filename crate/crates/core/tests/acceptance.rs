//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! with a failure status if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use synthcorr::explore::{
    lhs_sample, run_null_point, run_point, CoupledParams, ExperimentDesign, PointOutcome,
};
use synthcorr::finance::{
    correlated_noise, decimate, equicorrelation, fit_ar_predict, measure_effective_correlation,
    performance, synthesize_hybrid, synthetic_fundamentals, HybridSpec, PredictorSpec, Series,
};
use synthcorr::morphology::{entropy, hierarchy, mean_distance, moran_index};
use synthcorr::nullmodel::{NullParams, Placement};
use synthcorr::seed::rng_from_seed;
use synthcorr::stats::{
    amplitude_and_max, fisher_interval, pca_project, pearson, CrossCorrelationMatrix,
    VarianceMode,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn correlated_noise_fidelity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for (k, rho) in [-0.9, -0.5, 0.0, 0.5, 0.9].into_iter().enumerate() {
        let start = Instant::now();
        let z = correlated_noise(1_000_000, &equicorrelation(2, rho), &[1.0, 1.0], 100 + k as u64)
            .unwrap();
        let got = pearson(&z[0], &z[1], VarianceMode::Unbiased).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        worst = worst.max((got - rho).abs());
    }
    outcome(
        worst <= 0.005 && slowest < 10.0,
        format!("max |rho_hat - rho| = {worst:.5} (tol 0.005), slowest rho {slowest:.2}s (limit 10s)"),
    )
}

const HOUR: f64 = 3600.0;

fn effective_correlation_law() -> Outcome {
    let start = Instant::now();
    let (omega0, omega1) = (24.0 * HOUR, 2.0 * HOUR);
    let dt = omega1 / 3.0;
    let n = (720.0 * 24.0 * HOUR / dt) as usize;
    let replicates = 8u64;
    let band = [-0.5, -0.3, 0.0, 0.3, 0.5];
    let mut worst_band: f64 = 0.0;
    let mut eps_range = (f64::INFINITY, f64::NEG_INFINITY);
    // Mean absolute deviation at |rho| = 0.5 and |rho| = 0.9.
    let (mut dev_mid, mut dev_high) = (0.0, 0.0);
    for r in 0..replicates {
        let fund = synthetic_fundamentals(n, 0, dt, 0.7, 1e-3, omega0, 500 + r).unwrap();
        let sd = |s: &Series| {
            let d = s.differences().values;
            synthcorr::stats::variance_estimate(&d, VarianceMode::Unbiased).unwrap().sqrt()
        };
        // Noise scales chosen so the fundamental-to-noise ratio is about 0.3.
        let sigma: Vec<f64> = fund.iter().map(|f| sd(f) / 0.3).collect();
        for rho in [-0.9, -0.5, -0.3, 0.0, 0.3, 0.5, 0.9] {
            let spec = HybridSpec { omega0, omega1, rho, sigma: sigma.clone() };
            // Common noise seed across the sweep.
            let hybrid = synthesize_hybrid(&fund, &spec, 900 + r).unwrap();
            let m = measure_effective_correlation(&fund, &hybrid, rho).unwrap();
            for e in m.eps {
                eps_range = (eps_range.0.min(e), eps_range.1.max(e));
            }
            let dev = (m.empirical - m.predicted).abs();
            if band.contains(&rho) {
                worst_band = worst_band.max(dev);
            }
            if rho.abs() == 0.5 {
                dev_mid += dev / (2 * replicates) as f64;
            }
            if rho.abs() == 0.9 {
                dev_high += dev / (2 * replicates) as f64;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let eps_ok = eps_range.0 >= 0.25 && eps_range.1 <= 0.35;
    outcome(
        eps_ok && worst_band <= 0.05 && dev_high > dev_mid && secs < 60.0,
        format!(
            "eps in [{:.3}, {:.3}], max |dev| on [-0.5,0.5] = {worst_band:.4} (tol 0.05), \
             mean |dev| at |rho|=0.5 {dev_mid:.4} < at |rho|=0.9 {dev_high:.4}, {secs:.1}s (limit 60s)",
            eps_range.0, eps_range.1
        ),
    )
}

fn null_model_baseline() -> Outcome {
    let start = Instant::now();
    let params = NullParams {
        occupied_fraction: 0.5,
        n_nodes: 15,
        n_links: 30,
        placement: Placement::Random,
        width: 50,
    };
    let point = run_null_point(&params, 0, 80, 2024, true).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let covering = match &point.matrix {
        Some(m) => m
            .entries
            .iter()
            .flatten()
            .filter(|e| e.is_some_and(|e| e.ci_low <= 0.0 && e.ci_high >= 0.0))
            .count(),
        None => 0,
    };
    outcome(
        covering >= 13 && secs < 120.0,
        format!(
            "{covering}/16 intervals cover 0 (need 13), {} replications kept, {secs:.1}s (limit 120s)",
            point.replications.len()
        ),
    )
}

struct Campaign {
    params: Vec<CoupledParams>,
    outcomes: Vec<PointOutcome>,
    secs: f64,
}

fn run_campaign() -> Campaign {
    let start = Instant::now();
    let mut design = ExperimentDesign::new(50, 20, 17);
    design.grid_width = 50;
    let params = lhs_sample(&design).unwrap();
    let outcomes: Vec<PointOutcome> = params
        .par_iter()
        .enumerate()
        .map(|(i, p)| run_point(p, i, &design, false).unwrap())
        .collect();
    Campaign {
        params,
        outcomes,
        secs: start.elapsed().as_secs_f64(),
    }
}

fn matrices(c: &Campaign) -> Vec<CrossCorrelationMatrix> {
    c.outcomes.iter().filter_map(|o| o.matrix.clone()).collect()
}

fn correlation_spread(c: &Campaign) -> Outcome {
    let ms = matrices(c);
    let (amp, max_abs) = amplitude_and_max(&ms).unwrap();
    let strong = max_abs.iter().flatten().filter(|v| v.is_some_and(|v| v >= 0.5)).count();
    let wide = amp.iter().flatten().filter(|v| v.is_some_and(|v| v >= 0.7)).count();
    outcome(
        strong >= 8 && wide >= 4 && c.secs < 1800.0,
        format!(
            "{strong}/16 entries with max |rho| >= 0.5 (need 8), {wide}/16 with amplitude >= 0.7 \
             (need 4), {} usable points, {:.1}s",
            ms.len(),
            c.secs
        ),
    )
}

fn sign_modulation(c: &Campaign) -> Outcome {
    // Mean distance (morphology row 1) against centrality (network column 0).
    let pts: Vec<(f64, &CoupledParams)> = c
        .outcomes
        .iter()
        .zip(&c.params)
        .filter_map(|(o, p)| o.matrix.as_ref()?.rho(1, 0).map(|r| (r, p)))
        .collect();
    let mut best: Option<(f64, f64)> = None;
    for (pos, pp) in pts.iter().filter(|(r, _)| *r >= 0.2) {
        for (neg, pn) in pts.iter().filter(|(r, _)| *r <= -0.2) {
            if pn.gravity_exponent > pp.gravity_exponent && pn.hierarchy_weight > pp.hierarchy_weight {
                best = Some((*pos, *neg));
            }
        }
    }
    let n_pos = pts.iter().filter(|(r, _)| *r >= 0.2).count();
    let n_neg = pts.iter().filter(|(r, _)| *r <= -0.2).count();
    match best {
        Some((pos, neg)) => outcome(
            true,
            format!("{n_pos} points with rho[d,c] >= 0.2, {n_neg} with <= -0.2; e.g. {pos:.2} vs {neg:.2} with higher gamma and k_h at the negative point"),
        ),
        None => outcome(
            false,
            format!("{n_pos} points with rho[d,c] >= 0.2, {n_neg} with <= -0.2; no pair with higher gamma and k_h at the negative point"),
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = rng_from_seed(6);
    let mut grid_err: f64 = 0.0;
    for _ in 0..100 {
        let g = common::random_grid(&mut rng, 8);
        let pairs = [
            (moran_index(&g).unwrap(), common::oracle_moran(&g)),
            (mean_distance(&g).unwrap(), common::oracle_mean_distance(&g)),
            (entropy(&g).unwrap(), common::oracle_entropy(&g)),
            (hierarchy(&g).unwrap(), common::oracle_hierarchy(&g)),
        ];
        for (a, b) in pairs {
            grid_err = grid_err.max((a - b).abs() / a.abs().max(b.abs()).max(1e-300));
        }
    }
    let mut net_err: f64 = 0.0;
    let mut max_nodes = 0;
    for _ in 0..50 {
        let net = common::random_planar(&mut rng);
        max_nodes = max_nodes.max(net.nodes.len());
        net_err = net_err.max(common::path_oracle_error(&net, 10.0));
    }
    outcome(
        grid_err <= 1e-9 && net_err <= 1e-9 && max_nodes <= 20,
        format!(
            "morphology max relative error {grid_err:.2e} on 100 8x8 grids; path indicators and \
             betweenness max error {net_err:.2e} on 50 planar networks of <= {max_nodes} nodes (tol 1e-9)"
        ),
    )
}

fn estimator_ledger() -> Outcome {
    let mut rng = rng_from_seed(3);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for t in [5usize, 17, 100, 1000] {
        let x: Vec<f64> = (0..t).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let unbiased = pearson(&x, &x, VarianceMode::Unbiased).unwrap();
        let literal = pearson(&x, &x, VarianceMode::Biased).unwrap();
        let tf = t as f64;
        worst = worst.max((unbiased - 1.0).abs()).max((literal - tf / (tf - 1.0)).abs());
        ok &= (unbiased - 1.0).abs() <= 1e-12 && (literal - tf / (tf - 1.0)).abs() <= 1e-12;
    }
    outcome(ok, format!("default = 1 and literal = T/(T-1) within {worst:.1e}"))
}

fn fisher_width() -> Outcome {
    let (lo, hi) = fisher_interval(0.0, 100, 0.95).unwrap();
    let w = hi - lo;
    outcome((w - 0.387).abs() <= 0.01, format!("width {w:.4} (target 0.387 +- 0.01)"))
}

fn decimation_count() -> Outcome {
    let s = Series::new(0, 1.0, (0..86_400).map(|i| (i as f64 * 1e-3).sin()).collect()).unwrap();
    let d = decimate(&s, 600.0).unwrap();
    outcome(d.len() == 432, format!("{} samples (expected 432)", d.len()))
}

fn predictor_null() -> Outcome {
    let z = correlated_noise(10_000, &equicorrelation(1, 0.0), &[1.0], 77).unwrap();
    let mut level = 0.0;
    let walk: Vec<f64> = z[0]
        .iter()
        .map(|v| {
            level += v;
            level
        })
        .collect();
    let returns = Series::new(0, 1.0, walk).unwrap().differences();
    let spec = PredictorSpec::default();
    let preds = fit_ar_predict(&returns, &spec).unwrap();
    let target = &returns.values[spec.window..];
    let p = performance(target, &preds.values).unwrap();
    outcome(
        (0.9..=1.2).contains(&p.pi),
        format!("pi = {:.4} [{:.4}, {:.4}] (range [0.9, 1.2])", p.pi, p.ci_low, p.ci_high),
    )
}

fn pca_sanity(c: &Campaign) -> Outcome {
    let ms = matrices(c);
    let pca = match pca_project(&ms) {
        Ok(p) => p,
        Err(e) => return outcome(false, format!("PCA failed: {e}")),
    };
    let r = &pca.variance_ratios;
    let descending = r.windows(2).all(|w| w[0] >= w[1]);
    let sum_err = (r.iter().sum::<f64>() - 1.0).abs();
    let mut recon: f64 = 0.0;
    for &i in &pca.used {
        let x = ms[i].flatten().unwrap();
        let back = pca.back_project(&pca.scores(&x));
        for k in 0..16 {
            recon = recon.max((back[k] - x[k]).abs());
        }
    }
    outcome(
        descending && sum_err <= 1e-9 && recon <= 1e-9,
        format!(
            "ratios descending: {descending}, |sum - 1| = {sum_err:.1e}, max reconstruction error {recon:.1e}; PC1 {:.2}, PC1+PC2 {:.2}",
            r[0],
            r[0] + r[1]
        ),
    )
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |id: u32, name: &str, o: Outcome| {
        all &= o.pass;
        println!("[{}] {id:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    };
    report(1, "correlated-noise fidelity", correlated_noise_fidelity());
    report(2, "effective-correlation law", effective_correlation_law());
    report(3, "null-model baseline", null_model_baseline());
    let campaign = run_campaign();
    report(4, "coupled-model correlation spread", correlation_spread(&campaign));
    report(5, "sign modulation of rho[d,c]", sign_modulation(&campaign));
    report(6, "oracle equivalence", oracle_equivalence());
    report(7, "estimator ledger", estimator_ledger());
    report(8, "Fisher width", fisher_width());
    report(9, "decimation count", decimation_count());
    report(10, "predictor null", predictor_null());
    report(11, "PCA sanity", pca_sanity(&campaign));
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
