//! Latin hypercube campaigns over the coupled model, or the null grid.
//!
//! Every finished point is checkpointed: its matrix file is written first,
//! then its row is appended to `points.csv`. A rerun skips points whose rows
//! are present and rewrites every output in point order, so an interrupted
//! and resumed campaign produces the same bytes as an uninterrupted one.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Deserialize;
use synthcorr::explore::{
    lhs_sample, null_grid, proximity, run_null_point, run_point, CoupledParams, Dimension,
    ExperimentDesign, PointOutcome, ReferenceSet, DIMENSIONS,
};
use synthcorr::nullmodel::{NullParams, Placement};
use synthcorr::stats::{
    amplitude_and_max, pca_project, CrossCorrelationMatrix, MORPHOLOGY_LABELS, NETWORK_LABELS,
};

use crate::config::Run;
use crate::error::{CliError, CliResult};
use crate::output::{create_dir, num, opt_num, read_input, remove_if_present, write_file};

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExploreConfig {
    pub master_seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub design: DesignConfig,
    /// Morphology CSV of real territories for the proximity score.
    pub reference: Option<PathBuf>,
    /// Run the null-model grid instead of the coupled model.
    #[serde(default)]
    pub null: bool,
}

/// Campaign settings; the master seed comes from the run settings.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DesignConfig {
    pub bounds: Option<Vec<Dimension>>,
    pub n_points: Option<usize>,
    pub replications: Option<usize>,
    pub grid_width: Option<usize>,
    pub growth_per_step: Option<f64>,
    pub proximity_threshold: Option<f64>,
}

const DEFAULT_POINTS: usize = 50;
const DEFAULT_REPLICATIONS: usize = 80;

impl DesignConfig {
    fn into_design(self, seed: u64) -> ExperimentDesign {
        let mut d = ExperimentDesign::new(
            self.n_points.unwrap_or(DEFAULT_POINTS),
            self.replications.unwrap_or(DEFAULT_REPLICATIONS),
            seed,
        );
        if let Some(b) = self.bounds {
            d.bounds = b;
        }
        if let Some(w) = self.grid_width {
            d.grid_width = w;
        }
        if let Some(g) = self.growth_per_step {
            d.growth_per_step = g;
        }
        d.proximity_threshold = self.proximity_threshold;
        d
    }
}

enum Point {
    Coupled(CoupledParams),
    Null(NullParams),
}

impl Point {
    fn param_names(null: bool) -> Vec<String> {
        if null {
            ["occupiedFraction", "nNodes", "nLinks", "placement"]
                .iter()
                .map(|s| s.to_string())
                .collect()
        } else {
            DIMENSIONS.iter().map(|s| s.to_string()).collect()
        }
    }

    fn param_fields(&self) -> Vec<String> {
        match self {
            Point::Coupled(p) => p.to_values().iter().map(|v| num(*v)).collect(),
            Point::Null(p) => vec![
                num(p.occupied_fraction),
                p.n_nodes.to_string(),
                p.n_links.to_string(),
                match p.placement {
                    Placement::Random => "random".into(),
                    Placement::DensityProportional => "densityProportional".into(),
                },
            ],
        }
    }
}

fn header(null: bool) -> Vec<String> {
    let mut h = vec!["pointId".to_string()];
    h.extend(Point::param_names(null));
    for l in MORPHOLOGY_LABELS.iter().chain(NETWORK_LABELS.iter()) {
        h.push(format!("{l}Mean"));
        h.push(format!("{l}Sd"));
    }
    for r in MORPHOLOGY_LABELS {
        for c in NETWORK_LABELS {
            h.push(format!("rho_{r}_{c}"));
            h.push(format!("ciLow_{r}_{c}"));
            h.push(format!("ciHigh_{r}_{c}"));
        }
    }
    h.extend(["n", "dropped", "proximity"].map(String::from));
    h
}

fn row(id: usize, point: &Point, outcome: &PointOutcome, prox: Option<f64>) -> Vec<String> {
    let mut f = vec![id.to_string()];
    f.extend(point.param_fields());
    for (mean, sd) in outcome.summary() {
        f.push(num(mean));
        f.push(num(sd));
    }
    for i in 0..4 {
        for j in 0..4 {
            match outcome.matrix.as_ref().and_then(|m| m.entries[i][j]) {
                Some(e) => f.extend([num(e.rho), num(e.ci_low), num(e.ci_high)]),
                None => f.extend([String::new(), String::new(), String::new()]),
            }
        }
    }
    f.push(outcome.replications.len().to_string());
    f.push(outcome.dropped.to_string());
    f.push(opt_num(prox));
    f
}

fn csv_line(fields: &[String]) -> String {
    fields.join(",") + "\n"
}

fn matrix_path(out: &Path, id: usize) -> PathBuf {
    out.join("matrices").join(format!("point_{id}.csv"))
}

/// A completed point: its `points.csv` row and, unless the point failed,
/// its correlation matrix.
struct Done {
    fields: Vec<String>,
    matrix: Option<CrossCorrelationMatrix>,
}

/// Rows of a previous run that are complete and consistent with `points`.
fn load_checkpoint(out: &Path, header: &[String], points: &[Point]) -> CliResult<BTreeMap<usize, Done>> {
    let path = out.join("points.csv");
    let mut done = BTreeMap::new();
    if !path.exists() {
        return Ok(done);
    }
    let text = read_input(&path)?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    let found: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::read(&path, e))?
        .iter()
        .map(String::from)
        .collect();
    if found != header {
        return Err(CliError::Validation(format!(
            "{} has a different layout; use a fresh output directory",
            path.display()
        )));
    }
    let n_idx = header.len() - 3;
    for record in reader.records() {
        // Truncated or unreadable rows are recomputed.
        let Ok(record) = record else { continue };
        let fields: Vec<String> = record.iter().map(String::from).collect();
        if fields.len() != header.len() {
            continue;
        }
        let Ok(id) = fields[0].parse::<usize>() else { continue };
        let Some(point) = points.get(id) else {
            return Err(CliError::Validation(format!(
                "{}: point {id} is outside the design; use a fresh output directory",
                path.display()
            )));
        };
        let params = point.param_fields();
        if fields[1..=params.len()] != params[..] {
            return Err(CliError::Validation(format!(
                "{}: point {id} was produced by a different design; use a fresh output directory",
                path.display()
            )));
        }
        let survived: usize = fields[n_idx].parse().unwrap_or(0);
        let matrix = if survived >= 4 {
            match std::fs::read_to_string(matrix_path(out, id))
                .ok()
                .and_then(|t| CrossCorrelationMatrix::from_csv(&t).ok())
            {
                Some(m) => Some(m),
                None => continue,
            }
        } else {
            None
        };
        done.insert(id, Done { fields, matrix });
    }
    Ok(done)
}

fn reference_set(path: &Option<PathBuf>) -> CliResult<Option<ReferenceSet>> {
    match path {
        None => Ok(None),
        Some(p) => ReferenceSet::from_csv(&read_input(p)?)
            .map(Some)
            .map_err(|e| CliError::from(e).in_file(p)),
    }
}

pub fn explore(
    cfg: ExploreConfig,
    null_flag: bool,
    reference_flag: Option<PathBuf>,
    run: &Run,
) -> CliResult<()> {
    let null = null_flag || cfg.null;
    let design = cfg.design.into_design(run.seed);
    design.validate()?;
    if let Some(t) = design.proximity_threshold {
        if !t.is_finite() {
            return Err(CliError::Validation("proximityThreshold: must be finite".into()));
        }
    }
    let reference_path = reference_flag.or(cfg.reference);
    if design.proximity_threshold.is_some() && reference_path.is_none() {
        return Err(CliError::Validation(
            "proximityThreshold: requires a reference set (--reference or `reference`)".into(),
        ));
    }
    let reference = reference_set(&reference_path)?;
    let points: Vec<Point> = if null {
        null_grid(design.grid_width).into_iter().map(Point::Null).collect()
    } else {
        lhs_sample(&design)?.into_iter().map(Point::Coupled).collect()
    };
    let header = header(null);

    create_dir(&run.out.join("matrices"))?;
    let mut done = load_checkpoint(&run.out, &header, &points)?;

    // Normalize the checkpoint so appended rows start on a fresh line.
    let points_path = run.out.join("points.csv");
    let mut text = csv_line(&header);
    for d in done.values() {
        text.push_str(&csv_line(&d.fields));
    }
    write_file(&points_path, &text)?;

    let file = OpenOptions::new()
        .append(true)
        .open(&points_path)
        .map_err(|e| CliError::write(&points_path, e))?;
    let checkpoint = Mutex::new(file);
    let todo: Vec<usize> = (0..points.len()).filter(|i| !done.contains_key(i)).collect();
    let fresh: Vec<(usize, Done)> = todo
        .par_iter()
        .map(|&id| -> CliResult<(usize, Done)> {
            let outcome = match &points[id] {
                Point::Coupled(p) => run_point(p, id, &design, true)?,
                Point::Null(p) => {
                    run_null_point(p, id, design.replications, design.master_seed, true)?
                }
            };
            let prox = match (&reference, outcome.mean_morphology()) {
                (Some(r), Some(m)) => Some(proximity(&m, r)?),
                _ => None,
            };
            let path = matrix_path(&run.out, id);
            match &outcome.matrix {
                Some(m) => write_file(&path, &m.to_csv())?,
                None => remove_if_present(&path)?,
            }
            let fields = row(id, &points[id], &outcome, prox);
            let mut f = checkpoint.lock().expect("checkpoint lock");
            f.write_all(csv_line(&fields).as_bytes())
                .and_then(|_| f.flush())
                .map_err(|e| CliError::write(&points_path, e))?;
            Ok((id, Done { fields, matrix: outcome.matrix }))
        })
        .collect::<CliResult<_>>()?;
    done.extend(fresh);

    let mut text = csv_line(&header);
    for d in done.values() {
        text.push_str(&csv_line(&d.fields));
    }
    write_file(&points_path, &text)?;

    write_selected(run, &header, &done, design.proximity_threshold)?;
    let matrices: Vec<(usize, CrossCorrelationMatrix)> = done
        .iter()
        .filter_map(|(id, d)| d.matrix.clone().map(|m| (*id, m)))
        .collect();
    write_amplitude(run, &matrices)?;
    write_pca(run, &matrices)
}

fn write_selected(
    run: &Run,
    header: &[String],
    done: &BTreeMap<usize, Done>,
    threshold: Option<f64>,
) -> CliResult<()> {
    let path = run.out.join("selected.csv");
    let Some(t) = threshold else {
        return remove_if_present(&path);
    };
    let mut text = csv_line(header);
    for d in done.values() {
        let prox: Option<f64> = d.fields.last().and_then(|s| s.parse().ok());
        if prox.is_some_and(|p| p >= t) {
            text.push_str(&csv_line(&d.fields));
        }
    }
    write_file(&path, &text)
}

fn write_amplitude(run: &Run, matrices: &[(usize, CrossCorrelationMatrix)]) -> CliResult<()> {
    let path = run.out.join("amplitude.csv");
    if matrices.is_empty() {
        eprintln!("warning: no usable correlation matrices; amplitude.csv not written");
        return remove_if_present(&path);
    }
    let ms: Vec<CrossCorrelationMatrix> = matrices.iter().map(|(_, m)| m.clone()).collect();
    let (amp, max_abs) = amplitude_and_max(&ms)?;
    let mut text = String::from("rowLabel,colLabel,amplitude,maxAbs\n");
    for (i, r) in MORPHOLOGY_LABELS.iter().enumerate() {
        for (j, c) in NETWORK_LABELS.iter().enumerate() {
            text.push_str(&format!("{r},{c},{},{}\n", opt_num(amp[i][j]), opt_num(max_abs[i][j])));
        }
    }
    write_file(&path, &text)
}

fn entry_label(k: usize) -> String {
    format!("{}_{}", MORPHOLOGY_LABELS[k / 4], NETWORK_LABELS[k % 4])
}

fn write_pca(run: &Run, matrices: &[(usize, CrossCorrelationMatrix)]) -> CliResult<()> {
    let files = ["pca.csv", "pca_corners.csv", "pca_components.csv"].map(|f| run.out.join(f));
    let ms: Vec<CrossCorrelationMatrix> = matrices.iter().map(|(_, m)| m.clone()).collect();
    let pca = match pca_project(&ms) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("warning: PCA skipped: {e}");
            for f in &files {
                remove_if_present(f)?;
            }
            return Ok(());
        }
    };
    let mut proj = String::from("pointId,pc1,pc2,meanAbsRho\n");
    let mut corners = String::from("pointId,entry,bound,pc1,pc2\n");
    for (k, &i) in pca.used.iter().enumerate() {
        let (id, m) = &matrices[i];
        let [a, b] = pca.projections[k];
        proj.push_str(&format!("{id},{},{},{}\n", num(a), num(b), opt_num(m.mean_abs_rho())));
        for (c, [a, b]) in pca.projected_ci_corners[k].iter().enumerate() {
            let bound = if c % 2 == 0 { "low" } else { "high" };
            corners.push_str(&format!("{id},{},{bound},{},{}\n", entry_label(c / 2), num(*a), num(*b)));
        }
    }
    let mut comps = String::from("component,varianceRatio");
    for k in 0..16 {
        comps.push_str(&format!(",{}", entry_label(k)));
    }
    comps.push('\n');
    for (k, (c, r)) in pca.components.iter().zip(&pca.variance_ratios).enumerate() {
        comps.push_str(&format!("{},{}", k + 1, num(*r)));
        for v in c {
            comps.push_str(&format!(",{}", num(*v)));
        }
        comps.push('\n');
    }
    write_file(&files[0], &proj)?;
    write_file(&files[1], &corners)?;
    write_file(&files[2], &comps)
}
