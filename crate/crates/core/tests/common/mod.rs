//! Brute-force oracles shared by the integration test targets.
#![allow(dead_code)]

use std::collections::HashSet;

use rand::Rng;
use synthcorr::grid::DensityGrid;
use synthcorr::network::{
    connect_components, edge_betweenness, network_indicators, planarize, segment_passes_through,
    SpatialNetwork,
};
use synthcorr::seed::Rng as SeededRng;

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

pub fn random_grid(rng: &mut SeededRng, width: usize) -> DensityGrid {
    let cells = (0..width * width)
        .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..100.0) })
        .collect();
    DensityGrid::from_cells(width, cells).unwrap()
}

pub fn cell_xy(i: usize, w: usize) -> (f64, f64) {
    ((i % w) as f64, (i / w) as f64)
}

pub fn oracle_moran(g: &DensityGrid) -> f64 {
    let w = g.width();
    let p = g.cells();
    let n = p.len();
    let mean = p.iter().sum::<f64>() / n as f64;
    let (mut num, mut wsum, mut den) = (0.0, 0.0, 0.0);
    for i in 0..n {
        den += (p[i] - mean).powi(2);
        for j in 0..n {
            if i == j {
                continue;
            }
            let (xi, yi) = cell_xy(i, w);
            let (xj, yj) = cell_xy(j, w);
            let wij = 1.0 / ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt();
            wsum += wij;
            num += wij * (p[i] - mean) * (p[j] - mean);
        }
    }
    n as f64 / wsum * num / den
}

pub fn oracle_mean_distance(g: &DensityGrid) -> f64 {
    let w = g.width();
    let p = g.cells();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..p.len() {
        for j in 0..p.len() {
            if i == j {
                continue;
            }
            let (xi, yi) = cell_xy(i, w);
            let (xj, yj) = cell_xy(j, w);
            let d = ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt();
            num += p[i] * p[j] * d;
            den += p[i] * p[j];
        }
    }
    num / den / (2f64.sqrt() * w as f64)
}

pub fn oracle_entropy(g: &DensityGrid) -> f64 {
    let total: f64 = g.cells().iter().sum();
    let mut h = 0.0;
    for &p in g.cells() {
        if p > 0.0 {
            h -= p / total * (p / total).ln();
        }
    }
    h / (g.cells().len() as f64).ln()
}

pub fn oracle_hierarchy(g: &DensityGrid) -> f64 {
    let mut p: Vec<f64> = g.cells().iter().copied().filter(|v| *v > 0.0).collect();
    p.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let n = p.len() as f64;
    let (mut sx, mut sy, mut sxy, mut sxx) = (0.0, 0.0, 0.0, 0.0);
    for (r, v) in p.iter().enumerate() {
        let x = ((r + 1) as f64).ln();
        let y = v.ln();
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
    }
    ((n * sxy - sx * sy) / (n * sxx - sx * sx)).abs()
}

pub fn random_nodes(rng: &mut SeededRng, n: usize) -> SpatialNetwork {
    let mut net = SpatialNetwork::new();
    for _ in 0..n {
        net.add_node(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), 1.0);
    }
    net
}

/// Scans every pair of components each round.
pub fn oracle_percolation(net: &SpatialNetwork) -> HashSet<(usize, usize)> {
    let n = net.nodes.len();
    let mut label: Vec<usize> = (0..n).collect();
    let mut edges = HashSet::new();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                if label[i] == label[j] {
                    continue;
                }
                let d = net.euclidean(i, j);
                let better = match best {
                    None => true,
                    Some((bd, bi, bj)) => d < bd || (d == bd && (i, j) < (bi, bj)),
                };
                if better {
                    best = Some((d, i, j));
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        edges.insert((i, j));
        let (from, to) = (label[j], label[i]);
        for l in label.iter_mut() {
            if *l == from {
                *l = to;
            }
        }
    }
    edges
}

/// Random connected planar networks with at most 20 nodes: random points
/// (or lattice points, for path-length ties), a percolation tree plus a few
/// chords, planarized.
pub fn random_planar(rng: &mut SeededRng) -> SpatialNetwork {
    loop {
        let lattice = rng.gen_bool(0.4);
        let n = rng.gen_range(4..=18);
        let mut net = SpatialNetwork::new();
        let mut used = HashSet::new();
        while net.nodes.len() < n {
            if lattice {
                let (x, y) = (rng.gen_range(0..5), rng.gen_range(0..5));
                if used.insert((x, y)) {
                    net.add_node(x as f64, y as f64, 1.0);
                }
            } else {
                net.add_node(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0), 1.0);
            }
        }
        let mut net = connect_components(&net);
        for _ in 0..rng.gen_range(0..6) {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b && !net.has_edge(a, b) && !segment_passes_through(&net, a, b) {
                net.add_edge(a, b).unwrap();
            }
        }
        let Ok(p) = planarize(&net) else { continue };
        if p.nodes.len() <= 20 {
            return p;
        }
    }
}

pub fn floyd_warshall(net: &SpatialNetwork) -> Vec<Vec<f64>> {
    let n = net.nodes.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in &net.edges {
        d[e.u][e.v] = e.length;
        d[e.v][e.u] = e.length;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub const TIE: f64 = 1e-9;

/// Enumerates every shortest s-t path by depth-first search pruned with
/// the exact remaining distance.
pub fn shortest_paths(
    net: &SpatialNetwork,
    d: &[Vec<f64>],
    s: usize,
    t: usize,
) -> Vec<Vec<(usize, usize)>> {
    #[allow(clippy::too_many_arguments)]
    fn go(
        net: &SpatialNetwork,
        d: &[Vec<f64>],
        v: usize,
        t: usize,
        len: f64,
        target: f64,
        path: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if v == t {
            if (len - target).abs() <= TIE * target.max(1.0) {
                out.push(path.clone());
            }
            return;
        }
        for e in &net.edges {
            let w = if e.u == v {
                e.v
            } else if e.v == v {
                e.u
            } else {
                continue;
            };
            let nl = len + e.length;
            if nl + d[w][t] > target + TIE * target.max(1.0) {
                continue;
            }
            path.push((e.u, e.v));
            go(net, d, w, t, nl, target, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(net, d, s, t, 0.0, d[s][t], &mut Vec::new(), &mut out);
    out
}

/// Largest deviation between the library's betweenness and path
/// indicators and the exhaustive enumeration on `net`.
pub fn path_oracle_error(net: &SpatialNetwork, world_width: f64) -> f64 {
    let n = net.nodes.len();
    let d = floyd_warshall(net);
    let mut bc = vec![0.0; net.edges.len()];
    let (mut sum_d, mut sum_s, mut diam) = (0.0, 0.0, 0.0_f64);
    for s in 0..n {
        for t in (s + 1)..n {
            let paths = shortest_paths(net, &d, s, t);
            assert!(!paths.is_empty());
            for p in &paths {
                for &(u, v) in p {
                    let k = net.edges.iter().position(|e| e.u == u && e.v == v).unwrap();
                    bc[k] += 1.0 / paths.len() as f64;
                }
            }
            sum_d += d[s][t];
            sum_s += net.euclidean(s, t) / d[s][t];
            diam = diam.max(d[s][t]);
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let mut worst: f64 = 0.0;
    for (a, b) in edge_betweenness(net).unwrap().iter().zip(&bc) {
        worst = worst.max((a - b / pairs).abs());
    }
    let g = network_indicators(net, world_width).unwrap();
    let c = bc.iter().sum::<f64>() / pairs / bc.len() as f64;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    worst
        .max((g.centrality - c).abs())
        .max(rel(g.path_length, sum_d / pairs / (2f64.sqrt() * world_width)))
        .max(rel(g.speed, sum_s / pairs))
        .max(rel(g.diameter, diam))
}
