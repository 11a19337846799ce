//! Single generations: density grid, network on a grid, null model.

use std::path::PathBuf;

use serde::Deserialize;
use synthcorr::grid::{generate_density, DensityGrid, DensityParams};
use synthcorr::morphology::{morphology, MorphologyIndicators};
use synthcorr::network::{
    generate_network, largest_component, network_indicators, NetworkIndicators, NetworkParams,
    SpatialNetwork,
};
use synthcorr::nullmodel::{generate_null, NullParams, Placement};

use crate::config::Run;
use crate::error::{CliError, CliResult};
use crate::output::{create_dir, read_input, single_row, write_file};

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DensityConfig {
    pub master_seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub density: Option<DensityParams>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NetworkConfig {
    pub master_seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Density grid CSV produced by `density`.
    pub grid: Option<PathBuf>,
    pub network: Option<NetworkParams>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NullConfig {
    pub master_seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub null: Option<NullParams>,
}

pub fn default_density() -> DensityParams {
    DensityParams {
        total_population: 50_000.0,
        growth_per_step: 1000.0,
        hierarchy_exponent: 1.25,
        diffusion_fraction: 0.1,
        diffusion_steps: 2,
        width: 50,
    }
}

pub fn default_network() -> NetworkParams {
    NetworkParams {
        n_centers: 85,
        hierarchy_weight: 0.5,
        gravity_exponent: 2.0,
        interaction_range: 50.0,
        distance_shape: 5.0,
        new_links: 12,
        candidate_factor: 5,
        center_exponent: 1.0,
    }
}

pub fn default_null() -> NullParams {
    NullParams {
        occupied_fraction: 0.5,
        n_nodes: 15,
        n_links: 30,
        placement: Placement::Random,
        width: 50,
    }
}

fn write_grid(run: &Run, grid: &DensityGrid, m: MorphologyIndicators) -> CliResult<()> {
    write_file(&run.out.join("grid.csv"), &grid.to_csv())?;
    write_file(
        &run.out.join("morphology.csv"),
        &single_row(MorphologyIndicators::CSV_HEADER, &m.to_csv_row()),
    )
}

fn write_network(run: &Run, net: &SpatialNetwork, g: NetworkIndicators) -> CliResult<()> {
    let json = serde_json::to_string_pretty(net)
        .map_err(|e| CliError::Runtime(format!("cannot serialize network: {e}")))?;
    write_file(&run.out.join("network.json"), &(json + "\n"))?;
    let (nodes, edges) = net.to_csv_pair();
    write_file(&run.out.join("nodes.csv"), &nodes)?;
    write_file(&run.out.join("edges.csv"), &edges)?;
    write_file(
        &run.out.join("indicators.csv"),
        &single_row(NetworkIndicators::CSV_HEADER, &g.to_csv_row()),
    )
}

pub fn density(cfg: DensityConfig, run: &Run) -> CliResult<()> {
    let params = cfg.density.unwrap_or_else(default_density);
    params.validate()?;
    let grid = generate_density(&params, run.seed)?;
    let m = morphology(&grid)?;
    create_dir(&run.out)?;
    write_grid(run, &grid, m)
}

pub fn network(cfg: NetworkConfig, grid_flag: Option<PathBuf>, run: &Run) -> CliResult<()> {
    let params = cfg.network.unwrap_or_else(default_network);
    params.validate()?;
    let path = grid_flag.or(cfg.grid).ok_or_else(|| {
        CliError::Validation("grid: a density grid CSV is required (--grid or `grid`)".into())
    })?;
    let grid = DensityGrid::from_csv(&read_input(&path)?)
        .map_err(|e| CliError::from(e).in_file(&path))?;
    let net = generate_network(&grid, &params, run.seed)?;
    let g = network_indicators(&net, grid.width() as f64)?;
    create_dir(&run.out)?;
    write_network(run, &net, g)
}

/// Path indicators are taken on the largest connected component, since
/// random links need not connect every node.
pub fn null(cfg: NullConfig, run: &Run) -> CliResult<()> {
    let params = cfg.null.unwrap_or_else(default_null);
    params.validate()?;
    let (grid, net) = generate_null(&params, run.seed)?;
    let m = morphology(&grid)?;
    let g = network_indicators(&largest_component(&net), params.width as f64)?;
    create_dir(&run.out)?;
    write_grid(run, &grid, m)?;
    write_network(run, &net, g)
}
