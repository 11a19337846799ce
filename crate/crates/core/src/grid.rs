//! Population density rasters grown by preferential attachment and diffusion.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, Rng};

/// Square raster of nonnegative cell populations, row-major.
///
/// Cell `i` has integer coordinates `(i % width, i / width)`; geometric
/// computations use these as cell-center positions in cell units.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    width: usize,
    cells: Vec<f64>,
}

impl DensityGrid {
    pub fn empty(width: usize) -> Self {
        DensityGrid {
            width,
            cells: vec![0.0; width * width],
        }
    }

    pub fn from_cells(width: usize, cells: Vec<f64>) -> Result<Self> {
        if width == 0 {
            return Err(Error::param("width", "must be at least 1"));
        }
        if cells.len() != width * width {
            return Err(Error::Input(format!(
                "grid of width {width} needs {} cells, got {}",
                width * width,
                cells.len()
            )));
        }
        if let Some(v) = cells.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Input(format!(
                "cell populations must be finite and nonnegative, got {v}"
            )));
        }
        Ok(DensityGrid { width, cells })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.cells[y * self.width + x]
    }

    /// Cell-center coordinates of cell `index`.
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn occupied(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.cells
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, p)| p > 0.0)
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&p| p > 0.0).count()
    }

    /// Serializes as `x,y,population` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,population\n");
        for (i, p) in self.cells.iter().enumerate() {
            let (x, y) = self.coords(i);
            out.push_str(&format!("{x},{y},{p}\n"));
        }
        out
    }

    /// Parses the `x,y,population` format. Every cell of a square grid
    /// must appear exactly once.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == "x,y,population" => {}
            _ => return Err(Error::Input("line 1: expected header `x,y,population`".into())),
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Input(format!("line {}: malformed row `{line}`", lineno + 1));
            let mut parts = line.split(',');
            let x: usize = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            let y: usize = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            let p: f64 = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
            if parts.next().is_some() {
                return Err(bad());
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Input(format!(
                    "line {}: negative or non-finite population {p}",
                    lineno + 1
                )));
            }
            rows.push((x, y, p));
        }
        let width = (rows.len() as f64).sqrt().round() as usize;
        if width == 0 || width * width != rows.len() {
            return Err(Error::Input(format!(
                "{} rows do not form a square grid",
                rows.len()
            )));
        }
        let mut cells = vec![f64::NAN; width * width];
        for (x, y, p) in rows {
            if x >= width || y >= width {
                return Err(Error::Input(format!("cell ({x},{y}) outside {width}x{width} grid")));
            }
            let slot = &mut cells[y * width + x];
            if !slot.is_nan() {
                return Err(Error::Input(format!("cell ({x},{y}) listed twice")));
            }
            *slot = p;
        }
        DensityGrid::from_cells(width, cells)
    }
}

/// Parameters of the aggregation-diffusion density model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DensityParams {
    pub total_population: f64,
    pub growth_per_step: f64,
    pub hierarchy_exponent: f64,
    pub diffusion_fraction: f64,
    pub diffusion_steps: usize,
    pub width: usize,
}

impl DensityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.total_population > 0.0 && self.total_population.is_finite()) {
            return Err(Error::param("totalPopulation", "must be positive"));
        }
        if !(self.growth_per_step > 0.0 && self.growth_per_step.is_finite()) {
            return Err(Error::param("growthPerStep", "must be positive"));
        }
        if self.growth_per_step.fract() != 0.0 {
            return Err(Error::param("growthPerStep", "must be a whole number of units"));
        }
        if !self.hierarchy_exponent.is_finite() {
            return Err(Error::param("hierarchyExponent", "must be finite"));
        }
        if !(0.0..=1.0).contains(&self.diffusion_fraction) {
            return Err(Error::param("diffusionFraction", "must lie in [0, 1]"));
        }
        if self.width == 0 {
            return Err(Error::param("width", "must be at least 1"));
        }
        if self.steps() < 1 {
            return Err(Error::param(
                "totalPopulation",
                "ratio totalPopulation/growthPerStep must round to at least 1",
            ));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.total_population / self.growth_per_step).round() as usize
    }
}

/// Adds `n_units` unit populations, each landing in cell `i` with
/// probability `(P_i/P)^alpha / sum_j (P_j/P)^alpha` evaluated on the
/// entry state. An empty grid grows uniformly.
pub fn preferential_grow(
    grid: &DensityGrid,
    n_units: u64,
    alpha: f64,
    rng: &mut Rng,
) -> Result<DensityGrid> {
    if !alpha.is_finite() {
        return Err(Error::param("hierarchyExponent", "must be finite"));
    }
    if n_units == 0 {
        return Err(Error::param("nUnits", "must be at least 1"));
    }
    let weights = attachment_weights(grid, alpha);
    let counts = multinomial(n_units, &weights, rng);
    let mut next = grid.clone();
    for (cell, c) in next.cells.iter_mut().zip(counts) {
        *cell += c as f64;
    }
    Ok(next)
}

/// Unnormalized attachment weights. Empty cells are excluded unless the
/// whole grid is empty.
pub(crate) fn attachment_weights(grid: &DensityGrid, alpha: f64) -> Vec<f64> {
    let max = grid.cells.iter().copied().fold(0.0_f64, f64::max);
    if max <= 0.0 {
        return vec![1.0; grid.cells.len()];
    }
    // (P_i/P)^alpha rescaled by (P_max/P)^alpha, which cancels on normalization.
    let log_max = max.ln();
    grid.cells
        .iter()
        .map(|&p| {
            if p > 0.0 {
                (alpha * (p.ln() - log_max)).exp()
            } else {
                0.0
            }
        })
        .collect()
}

/// Multinomial draw by sequential conditional binomials.
fn multinomial(n: u64, weights: &[f64], rng: &mut Rng) -> Vec<u64> {
    let mut remaining_mass: f64 = weights.iter().sum();
    let mut remaining = n;
    let mut counts = vec![0; weights.len()];
    let last = weights.iter().rposition(|&w| w > 0.0);
    for (i, &w) in weights.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if w <= 0.0 {
            continue;
        }
        if Some(i) == last {
            counts[i] = remaining;
            break;
        }
        let p = (w / remaining_mass).clamp(0.0, 1.0);
        let k = if p >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, p)
                .expect("binomial probability is clamped to [0, 1]")
                .sample(rng)
        };
        counts[i] = k;
        remaining -= k;
        remaining_mass -= w;
    }
    counts
}

/// One synchronous diffusion step: each cell sends `beta * P_i / 4` to each
/// von Neumann neighbor. Shares leaving the grid are lost.
pub fn diffuse(grid: &DensityGrid, beta: f64) -> Result<DensityGrid> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::param("diffusionFraction", "must lie in [0, 1]"));
    }
    if beta == 0.0 {
        return Ok(grid.clone());
    }
    let w = grid.width;
    let src = &grid.cells;
    let mut out: Vec<f64> = src.iter().map(|p| p * (1.0 - beta)).collect();
    for y in 0..w {
        for x in 0..w {
            let share = beta * src[y * w + x] / 4.0;
            if share == 0.0 {
                continue;
            }
            if x > 0 {
                out[y * w + x - 1] += share;
            }
            if x + 1 < w {
                out[y * w + x + 1] += share;
            }
            if y > 0 {
                out[(y - 1) * w + x] += share;
            }
            if y + 1 < w {
                out[(y + 1) * w + x] += share;
            }
        }
    }
    Ok(DensityGrid {
        width: w,
        cells: out,
    })
}

/// Runs `round(P_m / N_G)` growth steps, each followed by `n_d` diffusions.
pub fn generate_density(params: &DensityParams, seed: u64) -> Result<DensityGrid> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let units = params.growth_per_step as u64;
    let mut grid = DensityGrid::empty(params.width);
    for _ in 0..params.steps() {
        grid = preferential_grow(&grid, units, params.hierarchy_exponent, &mut rng)?;
        for _ in 0..params.diffusion_steps {
            grid = diffuse(&grid, params.diffusion_fraction)?;
        }
    }
    Ok(grid)
}
