//! Urban form indicators: Moran index, mean distance, entropy, hierarchy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::DensityGrid;

/// The morphology vector `M = (r, d, eps, a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MorphologyIndicators {
    pub moran: f64,
    pub mean_distance: f64,
    pub entropy: f64,
    pub hierarchy: f64,
}

impl MorphologyIndicators {
    pub const CSV_HEADER: &'static str = "moran,meanDistance,entropy,hierarchy";

    pub fn to_array(self) -> [f64; 4] {
        [self.moran, self.mean_distance, self.entropy, self.hierarchy]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        MorphologyIndicators {
            moran: a[0],
            mean_distance: a[1],
            entropy: a[2],
            hierarchy: a[3],
        }
    }

    pub fn to_csv_row(self) -> String {
        format!(
            "{},{},{},{}",
            self.moran, self.mean_distance, self.entropy, self.hierarchy
        )
    }
}

/// Cell-center distances `sqrt(dx^2 + dy^2)` indexed by `dy * width + dx`.
fn distance_table(width: usize) -> Vec<f64> {
    let mut t = vec![0.0; width * width];
    for dy in 0..width {
        for dx in 0..width {
            t[dy * width + dx] = ((dx * dx + dy * dy) as f64).sqrt();
        }
    }
    t
}

/// Moran index with inverse-distance weights over all cell pairs.
pub fn moran_index(grid: &DensityGrid) -> Result<f64> {
    let n = grid.len();
    if n < 2 {
        return Err(Error::undefined("moran", "needs at least two cells"));
    }
    let w = grid.width();
    let cells = grid.cells();
    let mean = grid.total() / n as f64;
    let z: Vec<f64> = cells.iter().map(|p| p - mean).collect();
    let var: f64 = z.iter().map(|v| v * v).sum();
    if var <= 0.0 || var <= f64::EPSILON * mean * mean * n as f64 {
        return Err(Error::undefined("moran", "zero population variance"));
    }
    let inv: Vec<f64> = distance_table(w).iter().map(|d| 1.0 / d).collect();
    let mut cross = 0.0;
    let mut weight_sum = 0.0;
    for i in 0..n {
        let (xi, yi) = (i % w, i / w);
        let zi = z[i];
        let mut row_cross = 0.0;
        let mut row_w = 0.0;
        for j in (i + 1)..n {
            let (xj, yj) = (j % w, j / w);
            let wij = inv[(yj - yi) * w + xi.abs_diff(xj)];
            row_cross += wij * z[j];
            row_w += wij;
        }
        cross += zi * row_cross;
        weight_sum += row_w;
    }
    // Both sums run over unordered pairs; the factor 2 cancels.
    Ok(n as f64 / weight_sum * cross / var)
}

/// Population-weighted mean pair distance normalized by the world diagonal.
pub fn mean_distance(grid: &DensityGrid) -> Result<f64> {
    let occ: Vec<(usize, f64)> = grid.occupied().collect();
    if occ.len() < 2 {
        return Err(Error::undefined(
            "meanDistance",
            "fewer than two occupied cells",
        ));
    }
    let w = grid.width();
    let dist = distance_table(w);
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, &(i, pi)) in occ.iter().enumerate() {
        let (xi, yi) = (i % w, i / w);
        let mut row_num = 0.0;
        let mut row_den = 0.0;
        for &(j, pj) in &occ[k + 1..] {
            let (xj, yj) = (j % w, j / w);
            row_num += pj * dist[(yj - yi) * w + xi.abs_diff(xj)];
            row_den += pj;
        }
        num += pi * row_num;
        den += pi * row_den;
    }
    Ok(num / den / (std::f64::consts::SQRT_2 * w as f64))
}

/// Shannon entropy of the population shares, normalized by `ln(W^2)`.
pub fn entropy(grid: &DensityGrid) -> Result<f64> {
    let total = grid.total();
    if total <= 0.0 {
        return Err(Error::undefined("entropy", "empty grid"));
    }
    if grid.len() < 2 {
        return Err(Error::undefined("entropy", "single-cell grid"));
    }
    let h: f64 = grid
        .occupied()
        .map(|(_, p)| {
            let s = p / total;
            -s * s.ln()
        })
        .sum();
    Ok((h / (grid.len() as f64).ln()).clamp(0.0, 1.0))
}

/// Absolute OLS slope of `ln P` against `ln rank` over occupied cells.
pub fn hierarchy(grid: &DensityGrid) -> Result<f64> {
    let mut pops: Vec<f64> = grid.occupied().map(|(_, p)| p).collect();
    if pops.len() < 2 {
        return Err(Error::undefined("hierarchy", "fewer than two occupied cells"));
    }
    pops.sort_by(|a, b| b.total_cmp(a));
    if pops.first() == pops.last() {
        return Err(Error::undefined("hierarchy", "all occupied cells are equal"));
    }
    let n = pops.len() as f64;
    let xs: Vec<f64> = (1..=pops.len()).map(|r| (r as f64).ln()).collect();
    let ys: Vec<f64> = pops.iter().map(|p| p.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Ok((sxy / sxx).abs())
}

/// All four indicators; the first undefined one is returned as the error.
pub fn morphology(grid: &DensityGrid) -> Result<MorphologyIndicators> {
    Ok(MorphologyIndicators {
        moran: moran_index(grid)?,
        mean_distance: mean_distance(grid)?,
        entropy: entropy(grid)?,
        hierarchy: hierarchy(grid)?,
    })
}
