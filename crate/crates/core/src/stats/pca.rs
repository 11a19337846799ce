//! Principal component analysis over populations of correlation matrices.

use nalgebra::{DMatrix, SymmetricEigen};

use super::CrossCorrelationMatrix;
use crate::error::{Error, Result};

pub const DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    /// Mean of the flattened input matrices.
    pub mean: [f64; DIM],
    /// Orthonormal principal axes, by decreasing explained variance.
    pub components: Vec<[f64; DIM]>,
    /// Explained variance fractions, descending, summing to one.
    pub variance_ratios: Vec<f64>,
    /// Indices (into the input slice) of the matrices that were used.
    pub used: Vec<usize>,
    /// Indices of incomplete matrices that were dropped.
    pub dropped: Vec<usize>,
    /// Coordinates in the first principal plane, one per used matrix.
    pub projections: Vec<[f64; 2]>,
    /// For each used matrix, 32 projected points: entry `k` replaced by its
    /// lower bound (index `2k`) or upper bound (index `2k + 1`).
    pub projected_ci_corners: Vec<Vec<[f64; 2]>>,
}

impl PcaResult {
    /// Scores of a flattened matrix on every component.
    pub fn scores(&self, x: &[f64; DIM]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| (0..DIM).map(|k| (x[k] - self.mean[k]) * c[k]).sum())
            .collect()
    }

    /// Inverse of [`PcaResult::scores`] using all supplied score values.
    pub fn back_project(&self, scores: &[f64]) -> [f64; DIM] {
        let mut out = self.mean;
        for (s, c) in scores.iter().zip(&self.components) {
            for k in 0..DIM {
                out[k] += s * c[k];
            }
        }
        out
    }

    fn plane(&self, x: &[f64; DIM]) -> [f64; 2] {
        let s = |c: &[f64; DIM]| (0..DIM).map(|k| (x[k] - self.mean[k]) * c[k]).sum();
        [s(&self.components[0]), s(&self.components[1])]
    }
}

/// Eigendecomposition of the sample covariance of the flattened matrices.
/// Incomplete matrices are dropped and listed in [`PcaResult::dropped`].
pub fn pca_project(matrices: &[CrossCorrelationMatrix]) -> Result<PcaResult> {
    let mut used = Vec::new();
    let mut dropped = Vec::new();
    let mut rows = Vec::new();
    for (i, m) in matrices.iter().enumerate() {
        match m.flatten() {
            Some(f) => {
                used.push(i);
                rows.push(f);
            }
            None => dropped.push(i),
        }
    }
    if rows.len() < 3 {
        return Err(Error::Degenerate(format!(
            "PCA needs at least 3 complete matrices, got {}",
            rows.len()
        )));
    }
    let n = rows.len() as f64;
    let mut mean = [0.0; DIM];
    for r in &rows {
        for k in 0..DIM {
            mean[k] += r[k] / n;
        }
    }
    let mut cov = DMatrix::<f64>::zeros(DIM, DIM);
    for r in &rows {
        for a in 0..DIM {
            let da = r[a] - mean[a];
            for b in a..DIM {
                cov[(a, b)] += da * (r[b] - mean[b]);
            }
        }
    }
    for a in 0..DIM {
        for b in a..DIM {
            let v = cov[(a, b)] / (n - 1.0);
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    let trace: f64 = (0..DIM).map(|k| cov[(k, k)]).sum();
    if !(trace > 0.0) {
        return Err(Error::Degenerate("all matrices are identical".into()));
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..DIM).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
    let total: f64 = values.iter().sum();
    let variance_ratios: Vec<f64> = values.iter().map(|v| v / total).collect();
    let components: Vec<[f64; DIM]> = order
        .iter()
        .map(|&k| {
            let col = eig.eigenvectors.column(k);
            let mut c = [0.0; DIM];
            for i in 0..DIM {
                c[i] = col[i];
            }
            // Largest-magnitude coordinate made positive (first on ties).
            let lead = (0..DIM).fold(0, |best, i| if c[i].abs() > c[best].abs() { i } else { best });
            if c[lead] < 0.0 {
                c.iter_mut().for_each(|v| *v = -*v);
            }
            c
        })
        .collect();

    let mut result = PcaResult {
        mean,
        components,
        variance_ratios,
        used,
        dropped,
        projections: Vec::new(),
        projected_ci_corners: Vec::new(),
    };
    for (&idx, row) in result.used.clone().iter().zip(&rows) {
        result.projections.push(result.plane(row));
        let m = &matrices[idx];
        let mut corners = Vec::with_capacity(2 * DIM);
        for k in 0..DIM {
            let e = m.entries[k / 4][k % 4].expect("complete matrix");
            for bound in [e.ci_low, e.ci_high] {
                let mut x = *row;
                x[k] = bound;
                corners.push(result.plane(&x));
            }
        }
        result.projected_ci_corners.push(corners);
    }
    Ok(result)
}
