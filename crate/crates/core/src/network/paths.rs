//! Length-weighted shortest paths, edge betweenness and network indicators.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Node, SpatialNetwork};
use crate::error::{Error, Result};

/// The network vector `G = (c, l, s, delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NetworkIndicators {
    pub centrality: f64,
    pub path_length: f64,
    pub speed: f64,
    pub diameter: f64,
}

impl NetworkIndicators {
    pub const CSV_HEADER: &'static str = "centrality,pathLength,speed,diameter";

    pub fn to_array(self) -> [f64; 4] {
        [self.centrality, self.path_length, self.speed, self.diameter]
    }

    pub fn to_csv_row(self) -> String {
        format!(
            "{},{},{},{}",
            self.centrality, self.path_length, self.speed, self.diameter
        )
    }
}

/// Adjacency lists of `(neighbor, length, edge index)`.
fn adjacency(net: &SpatialNetwork) -> Vec<Vec<(usize, f64, usize)>> {
    let mut adj = vec![Vec::new(); net.nodes.len()];
    for (k, e) in net.edges.iter().enumerate() {
        adj[e.u].push((e.v, e.length, k));
        adj[e.v].push((e.u, e.length, k));
    }
    adj
}

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance, then on node id.
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Relative tolerance under which two path lengths count as equal.
const TIE_TOL: f64 = 1e-12;

fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOL * a.abs().max(b.abs()).max(1.0)
}

fn dijkstra(adj: &[Vec<(usize, f64, usize)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Item(0.0, source));
    while let Some(Item(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, len, _) in &adj[v] {
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Item(nd, w));
            }
        }
    }
    dist
}

/// Shortest length-weighted network distances between all node pairs
/// (`INFINITY` when unreachable).
pub fn all_pairs_distances(net: &SpatialNetwork) -> Vec<Vec<f64>> {
    let adj = adjacency(net);
    (0..net.nodes.len())
        .into_par_iter()
        .map(|s| dijkstra(&adj, s))
        .collect()
}

/// Connected components as sorted node-id lists, ordered by smallest member.
pub fn components(net: &SpatialNetwork) -> Vec<Vec<usize>> {
    let adj = adjacency(net);
    let mut label = vec![usize::MAX; net.nodes.len()];
    let mut out = Vec::new();
    for start in 0..net.nodes.len() {
        if label[start] != usize::MAX {
            continue;
        }
        let mut members = vec![start];
        label[start] = out.len();
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &(w, _, _) in &adj[v] {
                if label[w] == usize::MAX {
                    label[w] = out.len();
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// The largest connected component, re-indexed from zero in the original
/// id order. Size ties go to the component holding the smallest id.
pub fn largest_component(net: &SpatialNetwork) -> SpatialNetwork {
    let comps = components(net);
    let Some(best) = comps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .map(|(_, c)| c)
    else {
        return SpatialNetwork::new();
    };
    if best.len() == net.nodes.len() {
        return net.clone();
    }
    let mut remap = vec![usize::MAX; net.nodes.len()];
    let mut out = SpatialNetwork::new();
    for &old in best {
        let n = net.nodes[old];
        remap[old] = out.nodes.len();
        out.nodes.push(Node { id: out.nodes.len(), ..n });
    }
    for e in &net.edges {
        if remap[e.u] != usize::MAX {
            out.edges.push(super::Edge {
                u: remap[e.u],
                v: remap[e.v],
                length: e.length,
            });
        }
    }
    out
}

/// Per-source edge dependencies (Brandes accumulation over a Dijkstra DAG).
fn source_dependencies(adj: &[Vec<(usize, f64, usize)>], n_edges: usize, s: usize) -> Vec<f64> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0_f64; n];
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut settled = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    sigma[s] = 1.0;
    heap.push(Item(0.0, s));
    while let Some(Item(d, v)) = heap.pop() {
        if settled[v] || d > dist[v] {
            continue;
        }
        settled[v] = true;
        order.push(v);
        for &(w, len, k) in &adj[v] {
            if settled[w] {
                continue;
            }
            let nd = d + len;
            if dist[w].is_finite() && same_length(nd, dist[w]) {
                sigma[w] += sigma[v];
                preds[w].push((v, k));
            } else if nd < dist[w] {
                dist[w] = nd;
                sigma[w] = sigma[v];
                preds[w].clear();
                preds[w].push((v, k));
                heap.push(Item(nd, w));
            }
        }
    }
    let mut delta = vec![0.0; n];
    let mut dep = vec![0.0; n_edges];
    for &w in order.iter().rev() {
        for &(v, k) in &preds[w] {
            let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
            dep[k] += c;
            delta[v] += c;
        }
    }
    dep
}

/// Fraction of unordered node pairs whose shortest paths use each edge;
/// equal-length alternatives share a pair's unit weight.
pub fn edge_betweenness(net: &SpatialNetwork) -> Result<Vec<f64>> {
    let n = net.nodes.len();
    if n < 2 {
        return Err(Error::Input("betweenness needs at least two nodes".into()));
    }
    if components(net).len() > 1 {
        return Err(Error::Disconnected);
    }
    let adj = adjacency(net);
    let m = net.edges.len();
    let per_source: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| source_dependencies(&adj, m, s))
        .collect();
    let mut total = vec![0.0; m];
    for dep in &per_source {
        for (t, d) in total.iter_mut().zip(dep) {
            *t += d;
        }
    }
    // Every unordered pair is seen once from each endpoint.
    let pairs = (n * (n - 1)) as f64;
    Ok(total.into_iter().map(|t| (t / pairs).min(1.0)).collect())
}

/// Centrality, normalized path length, speed and diameter over all node
/// pairs of a connected network.
pub fn network_indicators(net: &SpatialNetwork, world_width: f64) -> Result<NetworkIndicators> {
    let n = net.nodes.len();
    if n < 2 {
        return Err(Error::Input("network indicators need at least two nodes".into()));
    }
    let betweenness = edge_betweenness(net)?;
    let dist = all_pairs_distances(net);
    let (mut sum_dn, mut sum_speed, mut diameter) = (0.0, 0.0, 0.0_f64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dn = dist[i][j];
            sum_dn += dn;
            sum_speed += net.euclidean(i, j) / dn;
            diameter = diameter.max(dn);
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let centrality = if betweenness.is_empty() {
        0.0
    } else {
        betweenness.iter().sum::<f64>() / betweenness.len() as f64
    };
    Ok(NetworkIndicators {
        centrality,
        path_length: sum_dn / pairs / (std::f64::consts::SQRT_2 * world_width),
        speed: (sum_speed / pairs).min(1.0),
        diameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(coords: &[(f64, f64)], edges: &[(usize, usize)]) -> SpatialNetwork {
        let mut n = SpatialNetwork::new();
        for &(x, y) in coords {
            n.add_node(x, y, 0.0);
        }
        for &(a, b) in edges {
            n.add_edge(a, b).unwrap();
        }
        n
    }

    #[test]
    fn single_edge() {
        let n = net(&[(0.0, 0.0), (3.0, 4.0)], &[(0, 1)]);
        assert_eq!(edge_betweenness(&n).unwrap(), vec![1.0]);
        let g = network_indicators(&n, 10.0).unwrap();
        assert_eq!(g.centrality, 1.0);
        assert!((g.path_length - 5.0 / (2f64.sqrt() * 10.0)).abs() < 1e-15);
        assert_eq!(g.speed, 1.0);
        assert_eq!(g.diameter, 5.0);
    }

    #[test]
    fn path_of_three() {
        let n = net(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], &[(0, 1), (1, 2)]);
        for b in edge_betweenness(&n).unwrap() {
            assert!((b - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn star_with_three_leaves() {
        let n = net(&[(0.0, 0.0), (1.0, 0.0), (-0.5, 0.8), (-0.5, -0.8)], &[(0, 1), (0, 2), (0, 3)]);
        for b in edge_betweenness(&n).unwrap() {
            assert!((b - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn square_splits_ties() {
        // Opposite corners of a unit square have two shortest paths.
        let n = net(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        // Each edge: its own pair (1) + half of each of the two diagonal pairs.
        for b in edge_betweenness(&n).unwrap() {
            assert!((b - 2.0 / 6.0).abs() < 1e-12, "{b}");
        }
    }

    #[test]
    fn equilateral_triangle() {
        let h = 3f64.sqrt() / 2.0;
        let n = net(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)], &[(0, 1), (1, 2), (0, 2)]);
        let g = network_indicators(&n, 1.0).unwrap();
        assert!((g.speed - 1.0).abs() < 1e-12);
        assert!((g.diameter - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disconnected_errors() {
        let n = net(&[(0.0, 0.0), (1.0, 0.0), (5.0, 5.0)], &[(0, 1)]);
        assert_eq!(edge_betweenness(&n), Err(Error::Disconnected));
        assert!(network_indicators(&n, 10.0).is_err());
        let single = net(&[(0.0, 0.0)], &[]);
        assert!(network_indicators(&single, 10.0).is_err());
    }

    #[test]
    fn largest_component_reindexes() {
        let n = net(
            &[(0.0, 0.0), (9.0, 9.0), (1.0, 0.0), (2.0, 0.0), (8.0, 9.0)],
            &[(0, 2), (2, 3), (1, 4)],
        );
        let big = largest_component(&n);
        assert_eq!(big.nodes.len(), 3);
        assert_eq!(big.edge_set(), [(0, 1), (1, 2)].into_iter().collect());
        big.validate().unwrap();
    }
}
