//! Latin hypercube exploration of the coupled density/network model.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{generate_density, DensityParams};
use crate::morphology::{morphology, MorphologyIndicators};
use crate::network::{
    generate_network, largest_component, network_indicators, NetworkIndicators, NetworkParams,
};
use crate::nullmodel::{generate_null, NullParams, Placement};
use crate::seed::{replication_seed, rng_from_seed, substream};
use crate::stats::{cross_correlation, CrossCorrelationMatrix};

/// One explored parameter with its sampling interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Dimension {
    pub name: String,
    pub low: f64,
    pub high: f64,
    #[serde(default)]
    pub integer: bool,
}

impl Dimension {
    fn new(name: &str, low: f64, high: f64, integer: bool) -> Self {
        Dimension {
            name: name.to_string(),
            low,
            high,
            integer,
        }
    }
}

/// Names of the ten coupled-model dimensions, in canonical order.
pub const DIMENSIONS: [&str; 10] = [
    "populationToGrowth",
    "hierarchyExponent",
    "diffusionFraction",
    "diffusionSteps",
    "nCenters",
    "hierarchyWeight",
    "gravityExponent",
    "interactionRange",
    "distanceShape",
    "newLinks",
];

pub fn default_bounds() -> Vec<Dimension> {
    vec![
        // P_m in [1e4, 1e5] over N_G in [500, 3000].
        Dimension::new("populationToGrowth", 1e4 / 3000.0, 1e5 / 500.0, false),
        Dimension::new("hierarchyExponent", 0.5, 2.0, false),
        Dimension::new("diffusionFraction", 0.0, 0.2, false),
        Dimension::new("diffusionSteps", 1.0, 4.0, true),
        Dimension::new("nCenters", 50.0, 120.0, true),
        Dimension::new("hierarchyWeight", 0.0, 1.0, false),
        Dimension::new("gravityExponent", 0.1, 4.0, false),
        Dimension::new("interactionRange", 1.0, 100.0, false),
        Dimension::new("distanceShape", 0.1, 10.0, false),
        Dimension::new("newLinks", 4.0, 20.0, true),
    ]
}

fn default_width() -> usize {
    50
}

fn default_growth() -> f64 {
    1000.0
}

/// Exploration campaign definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentDesign {
    #[serde(default = "default_bounds")]
    pub bounds: Vec<Dimension>,
    pub n_points: usize,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default = "default_width")]
    pub grid_width: usize,
    /// Growth per step `N_G`; total population follows from the sampled
    /// ratio `P_m / N_G`.
    #[serde(default = "default_growth")]
    pub growth_per_step: f64,
    /// Minimal proximity to the reference set for a point to be kept in
    /// the filtered output.
    #[serde(default)]
    pub proximity_threshold: Option<f64>,
}

impl ExperimentDesign {
    pub fn new(n_points: usize, replications: usize, master_seed: u64) -> Self {
        ExperimentDesign {
            bounds: default_bounds(),
            n_points,
            replications,
            master_seed,
            grid_width: default_width(),
            growth_per_step: default_growth(),
            proximity_threshold: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 1 {
            return Err(Error::param("nPoints", "must be at least 1"));
        }
        if self.replications < 4 {
            return Err(Error::param("replications", "must be at least 4"));
        }
        if self.grid_width < 2 {
            return Err(Error::param("gridWidth", "must be at least 2"));
        }
        if !(self.growth_per_step >= 1.0) || self.growth_per_step.fract() != 0.0 {
            return Err(Error::param("growthPerStep", "must be a positive whole number"));
        }
        for d in &self.bounds {
            if !DIMENSIONS.contains(&d.name.as_str()) {
                return Err(Error::param("bounds", format!("unknown dimension `{}`", d.name)));
            }
            if !(d.low < d.high) || !d.low.is_finite() || !d.high.is_finite() {
                return Err(Error::param("bounds", format!("`{}` needs low < high", d.name)));
            }
        }
        for name in DIMENSIONS {
            match self.bounds.iter().filter(|d| d.name == name).count() {
                1 => {}
                0 => return Err(Error::param("bounds", format!("missing dimension `{name}`"))),
                _ => return Err(Error::param("bounds", format!("dimension `{name}` repeated"))),
            }
        }
        Ok(())
    }
}

/// A point of the coupled parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoupledParams {
    pub population_to_growth: f64,
    pub hierarchy_exponent: f64,
    pub diffusion_fraction: f64,
    pub diffusion_steps: usize,
    pub n_centers: usize,
    pub hierarchy_weight: f64,
    pub gravity_exponent: f64,
    pub interaction_range: f64,
    pub distance_shape: f64,
    pub new_links: usize,
}

impl CoupledParams {
    pub fn from_values(values: &[f64; 10]) -> Self {
        CoupledParams {
            population_to_growth: values[0],
            hierarchy_exponent: values[1],
            diffusion_fraction: values[2],
            diffusion_steps: values[3] as usize,
            n_centers: values[4] as usize,
            hierarchy_weight: values[5],
            gravity_exponent: values[6],
            interaction_range: values[7],
            distance_shape: values[8],
            new_links: values[9] as usize,
        }
    }

    pub fn to_values(&self) -> [f64; 10] {
        [
            self.population_to_growth,
            self.hierarchy_exponent,
            self.diffusion_fraction,
            self.diffusion_steps as f64,
            self.n_centers as f64,
            self.hierarchy_weight,
            self.gravity_exponent,
            self.interaction_range,
            self.distance_shape,
            self.new_links as f64,
        ]
    }

    pub fn density_params(&self, width: usize, growth_per_step: f64) -> DensityParams {
        DensityParams {
            total_population: self.population_to_growth * growth_per_step,
            growth_per_step,
            hierarchy_exponent: self.hierarchy_exponent,
            diffusion_fraction: self.diffusion_fraction,
            diffusion_steps: self.diffusion_steps,
            width,
        }
    }

    pub fn network_params(&self) -> NetworkParams {
        NetworkParams {
            n_centers: self.n_centers,
            hierarchy_weight: self.hierarchy_weight,
            gravity_exponent: self.gravity_exponent,
            interaction_range: self.interaction_range,
            distance_shape: self.distance_shape,
            new_links: self.new_links,
            candidate_factor: 5,
            center_exponent: self.hierarchy_exponent,
        }
    }
}

/// Unit-cube Latin hypercube: for every dimension, each of the `n` equal
/// strata of `[0, 1)` holds exactly one point.
pub fn latin_hypercube(n: usize, dims: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    let mut points = vec![vec![0.0; dims]; n];
    for d in 0..dims {
        let mut strata: Vec<usize> = (0..n).collect();
        strata.shuffle(&mut rng);
        for (p, s) in points.iter_mut().zip(strata) {
            p[d] = (s as f64 + rng.gen::<f64>()) / n as f64;
        }
    }
    points
}

/// Latin hypercube design over the configured bounds. Integer dimensions
/// are rounded after sampling.
pub fn lhs_sample(design: &ExperimentDesign) -> Result<Vec<CoupledParams>> {
    design.validate()?;
    let unit = latin_hypercube(design.n_points, DIMENSIONS.len(), design.master_seed);
    let dims: Vec<&Dimension> = DIMENSIONS
        .iter()
        .map(|name| design.bounds.iter().find(|d| d.name == *name).expect("validated"))
        .collect();
    Ok(unit
        .into_iter()
        .map(|u| {
            let mut values = [0.0; 10];
            for (k, d) in dims.iter().enumerate() {
                let v = d.low + u[k] * (d.high - d.low);
                values[k] = if d.integer { v.round().clamp(d.low, d.high) } else { v };
            }
            CoupledParams::from_values(&values)
        })
        .collect())
}

/// Indicators of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replication {
    pub morphology: MorphologyIndicators,
    pub network: NetworkIndicators,
}

/// Outcome of all replications at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    pub replications: Vec<Replication>,
    /// Replications dropped because an indicator was undefined or the
    /// configuration was infeasible.
    pub dropped: usize,
    /// `None` when fewer than four replications survived.
    pub matrix: Option<CrossCorrelationMatrix>,
}

impl PointOutcome {
    fn from_results(results: Vec<Option<Replication>>) -> Result<Self> {
        let total = results.len();
        let replications: Vec<Replication> = results.into_iter().flatten().collect();
        let dropped = total - replications.len();
        let matrix = if replications.len() >= 4 {
            let (m, g) = samples(&replications);
            Some(cross_correlation(&m, &g)?)
        } else {
            None
        };
        Ok(PointOutcome {
            replications,
            dropped,
            matrix,
        })
    }

    pub fn is_failed(&self) -> bool {
        self.matrix.is_none()
    }

    /// Means and standard deviations of the eight indicators, morphology
    /// first. Standard deviations use `n - 1`.
    pub fn summary(&self) -> [(f64, f64); 8] {
        let (m, g) = samples(&self.replications);
        let mut out = [(f64::NAN, f64::NAN); 8];
        for (k, s) in m.iter().chain(g.iter()).enumerate() {
            if s.is_empty() {
                continue;
            }
            let n = s.len() as f64;
            let mean = s.iter().sum::<f64>() / n;
            let sd = if s.len() > 1 {
                (s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                f64::NAN
            };
            out[k] = (mean, sd);
        }
        out
    }

    pub fn mean_morphology(&self) -> Option<MorphologyIndicators> {
        if self.replications.is_empty() {
            return None;
        }
        let s = self.summary();
        Some(MorphologyIndicators::from_array([s[0].0, s[1].0, s[2].0, s[3].0]))
    }
}

/// Column-wise indicator samples.
pub fn samples(reps: &[Replication]) -> ([Vec<f64>; 4], [Vec<f64>; 4]) {
    let m = std::array::from_fn(|k| reps.iter().map(|r| r.morphology.to_array()[k]).collect());
    let g = std::array::from_fn(|k| reps.iter().map(|r| r.network.to_array()[k]).collect());
    (m, g)
}

fn coupled_replication(params: &CoupledParams, design: &ExperimentDesign, seed: u64) -> Option<Replication> {
    let grid = generate_density(
        &params.density_params(design.grid_width, design.growth_per_step),
        substream(seed, 0),
    )
    .ok()?;
    let morphology = morphology(&grid).ok()?;
    let net = generate_network(&grid, &params.network_params(), substream(seed, 1)).ok()?;
    let network = network_indicators(&net, design.grid_width as f64).ok()?;
    Some(Replication {
        morphology,
        network,
    })
}

fn run_replications<F>(n: usize, parallel: bool, f: F) -> Vec<Option<Replication>>
where
    F: Fn(usize) -> Option<Replication> + Sync,
{
    if parallel {
        (0..n).into_par_iter().map(&f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// Runs every replication of design point `index`. Replication `r` uses
/// the seed `replication_seed(masterSeed, index, r)`, so results do not
/// depend on scheduling or on which other points are run.
pub fn run_point(
    params: &CoupledParams,
    index: usize,
    design: &ExperimentDesign,
    parallel: bool,
) -> Result<PointOutcome> {
    design.validate()?;
    let results = run_replications(design.replications, parallel, |r| {
        coupled_replication(
            params,
            design,
            replication_seed(design.master_seed, index as u64, r as u64),
        )
    });
    PointOutcome::from_results(results)
}

/// Null-model counterpart of [`run_point`]. Path indicators are computed
/// on the largest connected component.
pub fn run_null_point(
    params: &NullParams,
    index: usize,
    replications: usize,
    master_seed: u64,
    parallel: bool,
) -> Result<PointOutcome> {
    params.validate()?;
    let results = run_replications(replications, parallel, |r| {
        let seed = replication_seed(master_seed, index as u64, r as u64);
        let (grid, net) = generate_null(params, seed).ok()?;
        let morphology = morphology(&grid).ok()?;
        let network = network_indicators(&largest_component(&net), params.width as f64).ok()?;
        Some(Replication {
            morphology,
            network,
        })
    });
    PointOutcome::from_results(results)
}

/// The null campaign grid: occupation in {0.25, 0.5, 0.75}, nodes in
/// {10, 15, 20}, links in {20, 30, 40}, for both placements.
pub fn null_grid(width: usize) -> Vec<NullParams> {
    let mut out = Vec::new();
    for placement in [Placement::Random, Placement::DensityProportional] {
        for occupied_fraction in [0.25, 0.5, 0.75] {
            for n_nodes in [10, 15, 20] {
                for n_links in [20, 30, 40] {
                    out.push(NullParams {
                        occupied_fraction,
                        n_nodes,
                        n_links,
                        placement,
                        width,
                    });
                }
            }
        }
    }
    out
}

/// Real-data morphology measures used as proximity references.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet {
    pub rows: Vec<MorphologyIndicators>,
}

impl ReferenceSet {
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == MorphologyIndicators::CSV_HEADER => {}
            _ => {
                return Err(Error::Input(format!(
                    "line 1: expected header `{}`",
                    MorphologyIndicators::CSV_HEADER
                )))
            }
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            match vals {
                Ok(v) if v.len() == 4 && v.iter().all(|x| x.is_finite()) => {
                    rows.push(MorphologyIndicators::from_array([v[0], v[1], v[2], v[3]]))
                }
                _ => {
                    return Err(Error::Input(format!(
                        "line {}: malformed row `{line}`",
                        lineno + 1
                    )))
                }
            }
        }
        if rows.is_empty() {
            return Err(Error::Input("reference set is empty".into()));
        }
        Ok(ReferenceSet { rows })
    }
}

/// `1 - min_r ||M - M_r||` with the Euclidean norm on raw indicator values.
pub fn proximity(m: &MorphologyIndicators, reference: &ReferenceSet) -> Result<f64> {
    if reference.rows.is_empty() {
        return Err(Error::Input("reference set is empty".into()));
    }
    let a = m.to_array();
    let best = reference
        .rows
        .iter()
        .map(|r| {
            let b = r.to_array();
            (0..4).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    Ok(1.0 - best)
}
