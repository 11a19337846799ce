//! Interaction-free baseline configurations.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::DensityGrid;
use crate::network::{planarize, segment_passes_through, SpatialNetwork};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Placement {
    /// Nodes uniformly over all cells, independent of density.
    Random,
    /// Nodes in cells drawn with probability proportional to density.
    DensityProportional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NullParams {
    pub occupied_fraction: f64,
    pub n_nodes: usize,
    pub n_links: usize,
    pub placement: Placement,
    pub width: usize,
}

const MAX_REDRAWS: usize = 10_000;

impl NullParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.occupied_fraction > 0.0 && self.occupied_fraction <= 1.0) {
            return Err(Error::param("occupiedFraction", "must lie in (0, 1]"));
        }
        if self.width == 0 {
            return Err(Error::param("width", "must be at least 1"));
        }
        if self.n_nodes < 2 {
            return Err(Error::param("nNodes", "must be at least 2"));
        }
        if self.n_links < 1 {
            return Err(Error::param("nLinks", "must be at least 1"));
        }
        let occupied = self.occupied_cells();
        if occupied == 0 {
            return Err(Error::param("occupiedFraction", "selects no cell on this grid"));
        }
        let available = match self.placement {
            Placement::Random => self.width * self.width,
            Placement::DensityProportional => occupied,
        };
        if self.n_nodes > available {
            return Err(Error::Infeasible(format!(
                "{} nodes do not fit in {available} admissible cells",
                self.n_nodes
            )));
        }
        if self.n_links > self.n_nodes * (self.n_nodes - 1) / 2 {
            return Err(Error::Infeasible(format!(
                "{} links exceed the {} distinct node pairs",
                self.n_links,
                self.n_nodes * (self.n_nodes - 1) / 2
            )));
        }
        Ok(())
    }

    pub fn occupied_cells(&self) -> usize {
        (self.occupied_fraction * (self.width * self.width) as f64).floor() as usize
    }
}

/// Random density, independently placed nodes, random links, planarized.
///
/// Nodes occupy distinct cells. A drawn link is redrawn when it is a
/// self-loop, a duplicate, or would run through another node.
pub fn generate_null(params: &NullParams, seed: u64) -> Result<(DensityGrid, SpatialNetwork)> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let w = params.width;
    let n_cells = w * w;

    let mut cells = vec![0.0; n_cells];
    let mut chosen = sample(&mut rng, n_cells, params.occupied_cells()).into_vec();
    chosen.sort_unstable();
    for c in chosen {
        // Open interval keeps selected cells strictly occupied.
        let mut v: f64 = rng.gen();
        while v == 0.0 {
            v = rng.gen();
        }
        cells[c] = v;
    }
    let grid = DensityGrid::from_cells(w, cells)?;

    let node_cells: Vec<usize> = match params.placement {
        Placement::Random => sample(&mut rng, n_cells, params.n_nodes).into_vec(),
        Placement::DensityProportional => {
            let mut weights = grid.cells().to_vec();
            let mut picked = Vec::with_capacity(params.n_nodes);
            for _ in 0..params.n_nodes {
                let mass: f64 = weights.iter().sum();
                let target = rng.gen::<f64>() * mass;
                let mut acc = 0.0;
                let mut pick = 0;
                for (i, &wt) in weights.iter().enumerate() {
                    if wt <= 0.0 {
                        continue;
                    }
                    acc += wt;
                    pick = i;
                    if acc > target {
                        break;
                    }
                }
                picked.push(pick);
                weights[pick] = 0.0;
            }
            picked
        }
    };
    let mut net = SpatialNetwork::new();
    for c in node_cells {
        let (x, y) = grid.coords(c);
        net.add_node(x as f64, y as f64, grid.cells()[c]);
    }

    let n = params.n_nodes;
    let admissible = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !segment_passes_through(&net, i, j))
        .count();
    if params.n_links > admissible {
        return Err(Error::Infeasible(format!(
            "{} links requested but only {admissible} node pairs can be joined",
            params.n_links
        )));
    }
    let mut linked = HashSet::new();
    for _ in 0..params.n_links {
        let mut tries = 0;
        loop {
            tries += 1;
            if tries > MAX_REDRAWS {
                return Err(Error::Infeasible("link redraw limit reached".into()));
            }
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let key = (a.min(b), a.max(b));
            if a == b || linked.contains(&key) || segment_passes_through(&net, a, b) {
                continue;
            }
            linked.insert(key);
            net.add_edge(a, b)?;
            break;
        }
    }
    let net = planarize(&net)?;
    Ok((grid, net))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> NullParams {
        NullParams {
            occupied_fraction: 0.5,
            n_nodes: 15,
            n_links: 30,
            placement: Placement::Random,
            width: 50,
        }
    }

    #[test]
    fn full_occupation() {
        let p = NullParams {
            occupied_fraction: 1.0,
            width: 10,
            ..params()
        };
        let (g, _) = generate_null(&p, 1).unwrap();
        assert_eq!(g.occupied_count(), 100);
        assert!(g.cells().iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn single_link() {
        let p = NullParams {
            n_nodes: 2,
            n_links: 1,
            ..params()
        };
        let (_, net) = generate_null(&p, 4).unwrap();
        assert_eq!(net.nodes.len(), 2);
        assert_eq!(net.edges.len(), 1);
    }

    #[test]
    fn too_many_links() {
        let p = NullParams {
            n_nodes: 3,
            n_links: 4,
            ..params()
        };
        assert!(matches!(generate_null(&p, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn occupied_count_and_determinism() {
        let (g, net) = generate_null(&params(), 12).unwrap();
        assert_eq!(g.occupied_count(), 1250);
        net.validate().unwrap();
        assert!(net.edges.len() >= 30);
        assert_eq!(generate_null(&params(), 12).unwrap(), (g, net));
    }

    #[test]
    fn density_placement_uses_occupied_cells() {
        let p = NullParams {
            placement: Placement::DensityProportional,
            occupied_fraction: 0.25,
            ..params()
        };
        let (g, net) = generate_null(&p, 3).unwrap();
        for node in net.nodes.iter().take(p.n_nodes) {
            assert!(g.get(node.x as usize, node.y as usize) > 0.0);
        }
    }
}
