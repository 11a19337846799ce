//! Road network growth over a density grid and network indicators.
//!
//! The generator places centers by preferential sampling, links them into
//! a tree by nearest-component percolation, adds the links whose network
//! detour most degrades a gravity potential, and finally planarizes.

mod paths;
mod planar;

pub use paths::{
    all_pairs_distances, components, edge_betweenness, largest_component, network_indicators,
    NetworkIndicators,
};
pub use planar::{planarize, segment_passes_through};

use std::collections::HashSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{attachment_weights, DensityGrid};
use crate::seed::{rng_from_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub population: f64,
}

/// Undirected straight edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// Embedded graph whose node ids equal their position in `nodes`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpatialNetwork {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl SpatialNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, x: f64, y: f64, population: f64) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            id,
            x,
            y,
            population,
        });
        id
    }

    pub fn euclidean(&self, a: usize, b: usize) -> f64 {
        let (na, nb) = (&self.nodes[a], &self.nodes[b]);
        (na.x - nb.x).hypot(na.y - nb.y)
    }

    /// Adds the straight edge `a`–`b`. Self-loops and duplicates are rejected.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::Input(format!("self-loop on node {a}")));
        }
        if a >= self.nodes.len() || b >= self.nodes.len() {
            return Err(Error::Input(format!("edge ({a},{b}) references a missing node")));
        }
        if self.has_edge(a, b) {
            return Err(Error::Input(format!("duplicate edge ({a},{b})")));
        }
        let length = self.euclidean(a, b);
        if length <= 0.0 {
            return Err(Error::Geometry(format!("nodes {a} and {b} coincide")));
        }
        self.edges.push(Edge {
            u: a.min(b),
            v: a.max(b),
            length,
        });
        Ok(())
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (u, v) = (a.min(b), a.max(b));
        self.edges.iter().any(|e| e.u == u && e.v == v)
    }

    pub fn edge_set(&self) -> HashSet<(usize, usize)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }

    pub fn total_population(&self) -> f64 {
        self.nodes.iter().map(|n| n.population).sum()
    }

    /// Checks ids, self-loops, duplicates and edge lengths.
    pub fn validate(&self) -> Result<()> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return Err(Error::Input(format!("node at position {i} has id {}", n.id)));
            }
            if !(n.x.is_finite() && n.y.is_finite()) || !(n.population >= 0.0) {
                return Err(Error::Input(format!("node {i} has invalid attributes")));
            }
        }
        let mut seen = HashSet::new();
        for e in &self.edges {
            if e.u == e.v {
                return Err(Error::Input(format!("self-loop on node {}", e.u)));
            }
            if e.u >= self.nodes.len() || e.v >= self.nodes.len() {
                return Err(Error::Input(format!("edge ({},{}) references a missing node", e.u, e.v)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::Input(format!("duplicate edge ({},{})", e.u, e.v)));
            }
            let d = self.euclidean(e.u, e.v);
            if !(e.length > 0.0) || (e.length - d).abs() > 1e-9 * d.max(1.0) {
                return Err(Error::Input(format!(
                    "edge ({},{}) length {} differs from distance {d}",
                    e.u, e.v, e.length
                )));
            }
        }
        Ok(())
    }

    /// Writes `nodes.csv` and `edges.csv` contents.
    pub fn to_csv_pair(&self) -> (String, String) {
        let mut nodes = String::from("id,x,y,population\n");
        for n in &self.nodes {
            nodes.push_str(&format!("{},{},{},{}\n", n.id, n.x, n.y, n.population));
        }
        let mut edges = String::from("u,v,length\n");
        for e in &self.edges {
            edges.push_str(&format!("{},{},{}\n", e.u, e.v, e.length));
        }
        (nodes, edges)
    }
}

/// Network generation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NetworkParams {
    pub n_centers: usize,
    pub hierarchy_weight: f64,
    pub gravity_exponent: f64,
    pub interaction_range: f64,
    pub distance_shape: f64,
    pub new_links: usize,
    #[serde(default = "default_candidate_factor")]
    pub candidate_factor: usize,
    /// Exponent of the preferential center placement; the coupled model
    /// reuses the density growth exponent here.
    #[serde(default = "default_center_exponent")]
    pub center_exponent: f64,
}

fn default_candidate_factor() -> usize {
    5
}

fn default_center_exponent() -> f64 {
    1.0
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_centers < 1 {
            return Err(Error::param("nCenters", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.hierarchy_weight) {
            return Err(Error::param("hierarchyWeight", "must lie in [0, 1]"));
        }
        if !self.gravity_exponent.is_finite() {
            return Err(Error::param("gravityExponent", "must be finite"));
        }
        if !(self.interaction_range > 0.0 && self.interaction_range.is_finite()) {
            return Err(Error::param("interactionRange", "must be positive"));
        }
        if !(self.distance_shape > 0.0) {
            return Err(Error::param("distanceShape", "must be positive"));
        }
        if self.candidate_factor < 1 {
            return Err(Error::param("candidateFactor", "must be at least 1"));
        }
        if !self.center_exponent.is_finite() {
            return Err(Error::param("centerExponent", "must be finite"));
        }
        Ok(())
    }
}

/// Samples `n_centers` distinct occupied cells with probability
/// proportional to `(P_i/P)^alpha`, then gives every center the population
/// of the cells nearest to it (ties to the lowest node id).
pub fn place_centers(
    grid: &DensityGrid,
    n_centers: usize,
    alpha: f64,
    rng: &mut Rng,
) -> Result<SpatialNetwork> {
    if n_centers < 1 {
        return Err(Error::param("nCenters", "must be at least 1"));
    }
    if !alpha.is_finite() {
        return Err(Error::param("centerExponent", "must be finite"));
    }
    let occupied = grid.occupied_count();
    if occupied < n_centers {
        return Err(Error::Infeasible(format!(
            "{n_centers} centers requested but only {occupied} occupied cells"
        )));
    }
    let mut weights = attachment_weights(grid, alpha);
    let mut mass: f64 = weights.iter().sum();
    let mut chosen = Vec::with_capacity(n_centers);
    for _ in 0..n_centers {
        let target = rng.gen::<f64>() * mass;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            pick = Some(i);
            if acc > target {
                break;
            }
        }
        let i = pick.expect("at least one positive weight remains");
        chosen.push(i);
        mass -= weights[i];
        weights[i] = 0.0;
        if mass <= 0.0 {
            // Rounding drift; recompute from what is left.
            mass = weights.iter().sum();
        }
    }

    let mut net = SpatialNetwork::new();
    for &cell in &chosen {
        let (x, y) = grid.coords(cell);
        net.add_node(x as f64, y as f64, 0.0);
    }
    let centers: Vec<(i64, i64)> = chosen
        .iter()
        .map(|&c| {
            let (x, y) = grid.coords(c);
            (x as i64, y as i64)
        })
        .collect();
    for (cell, p) in grid.occupied() {
        let (x, y) = grid.coords(cell);
        let (x, y) = (x as i64, y as i64);
        let nearest = centers
            .iter()
            .enumerate()
            .min_by_key(|(id, &(cx, cy))| ((cx - x).pow(2) + (cy - y).pow(2), *id))
            .map(|(id, _)| id)
            .expect("at least one center");
        net.nodes[nearest].population += p;
    }
    Ok(net)
}

/// Union-find over node ids.
struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Repeatedly links the two closest connected components by the node pair
/// realizing their minimal Euclidean distance, until the graph is connected.
///
/// Scanning all pairs in `(distance, u, v)` order and keeping those that
/// join distinct components yields exactly that sequence of merges.
pub fn connect_components(net: &SpatialNetwork) -> SpatialNetwork {
    let n = net.nodes.len();
    let mut sets = DisjointSets::new(n);
    let mut components = n;
    for e in &net.edges {
        if sets.union(e.u, e.v) {
            components -= 1;
        }
    }
    let mut out = net.clone();
    if components <= 1 {
        return out;
    }
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((net.euclidean(i, j), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for (d, i, j) in pairs {
        if sets.union(i, j) {
            out.edges.push(Edge { u: i, v: j, length: d });
            components -= 1;
            if components == 1 {
                break;
            }
        }
    }
    out
}

/// Generalized gravity potential between two centers at distance `d`.
pub fn gravity_potential(pi: f64, pj: f64, total: f64, d: f64, params: &NetworkParams) -> f64 {
    population_term(pi, pj, total, params) * distance_decay(d, params)
}

fn population_term(pi: f64, pj: f64, total: f64, params: &NetworkParams) -> f64 {
    let kh = params.hierarchy_weight;
    let share = if total > 0.0 { pi * pj / (total * total) } else { 0.0 };
    (1.0 - kh) + kh * share.powf(params.gravity_exponent)
}

fn distance_decay(d: f64, params: &NetworkParams) -> f64 {
    (-decay_exponent(d, params)).exp()
}

fn decay_exponent(d: f64, params: &NetworkParams) -> f64 {
    d / (params.interaction_range * (1.0 + d / params.distance_shape))
}

/// Ratio `V(d_N) / V(d_ij)` of the potential at network distance to the
/// potential at straight-line distance. Populations cancel.
pub fn potential_ratio(d_euclid: f64, d_network: f64, params: &NetworkParams) -> f64 {
    (decay_exponent(d_euclid, params) - decay_exponent(d_network, params)).exp()
}

/// Adds the `N_L` links with the worst network-vs-direct potential ratio
/// among the `K * N_L` highest-potential unlinked pairs.
///
/// Pairs whose straight segment would pass through another node are not
/// candidates, so the added links never overlap existing geometry.
pub fn realize_links(net: &SpatialNetwork, params: &NetworkParams) -> Result<SpatialNetwork> {
    params.validate()?;
    let mut out = net.clone();
    if params.new_links == 0 || net.nodes.len() < 2 {
        return Ok(out);
    }
    let n = net.nodes.len();
    let total = net.total_population();
    let existing = net.edge_set();

    let mut ranked: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if existing.contains(&(i, j)) {
                continue;
            }
            let d = net.euclidean(i, j);
            let v = gravity_potential(net.nodes[i].population, net.nodes[j].population, total, d, params);
            ranked.push((v, i, j));
        }
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let wanted = params.candidate_factor * params.new_links;
    let candidates: Vec<(usize, usize)> = ranked
        .iter()
        .filter(|&&(_, i, j)| !segment_passes_through(net, i, j))
        .take(wanted)
        .map(|&(_, i, j)| (i, j))
        .collect();

    let dist = all_pairs_distances(net);
    let mut rated = Vec::with_capacity(candidates.len());
    for (i, j) in candidates {
        let dn = dist[i][j];
        if !dn.is_finite() {
            return Err(Error::Disconnected);
        }
        rated.push((potential_ratio(net.euclidean(i, j), dn, params), i, j));
    }
    rated.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for &(_, i, j) in rated.iter().take(params.new_links) {
        out.add_edge(i, j)?;
    }
    Ok(out)
}

/// Full pipeline: centers, percolation tree, gravity links, planarization.
pub fn generate_network(
    grid: &DensityGrid,
    params: &NetworkParams,
    seed: u64,
) -> Result<SpatialNetwork> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let centers = place_centers(grid, params.n_centers, params.center_exponent, &mut rng)?;
    let tree = connect_components(&centers);
    let linked = realize_links(&tree, params)?;
    planarize(&linked)
}
