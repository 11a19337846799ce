//! Planarization by node insertion at segment crossings.

use std::collections::HashSet;

use super::{Edge, SpatialNetwork};
use crate::error::{Error, Result};

type Point = (f64, f64);

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Scale-aware zero test for orientation values.
fn is_zero(o: f64, a: Point, b: Point, c: Point) -> bool {
    let scale = [a.0, a.1, b.0, b.1, c.0, c.1]
        .iter()
        .fold(1.0_f64, |m, v| m.max(v.abs()));
    o.abs() <= 1e-12 * scale * scale
}

/// Parameter of `p` along `a -> b`, assuming `p` is on that line.
fn param_along(a: Point, b: Point, p: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    ((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)
}

const INTERIOR_EPS: f64 = 1e-9;

fn strictly_inside(t: f64) -> bool {
    t > INTERIOR_EPS && t < 1.0 - INTERIOR_EPS
}

/// True when `p` lies on the open segment `a`–`b`.
fn on_open_segment(a: Point, b: Point, p: Point) -> bool {
    is_zero(orient(a, b, p), a, b, p) && strictly_inside(param_along(a, b, p))
}

/// True when some other node lies in the interior of the straight segment
/// between nodes `i` and `j`.
pub fn segment_passes_through(net: &SpatialNetwork, i: usize, j: usize) -> bool {
    let a = (net.nodes[i].x, net.nodes[i].y);
    let b = (net.nodes[j].x, net.nodes[j].y);
    let (lo_x, hi_x) = (a.0.min(b.0), a.0.max(b.0));
    let (lo_y, hi_y) = (a.1.min(b.1), a.1.max(b.1));
    net.nodes.iter().enumerate().any(|(k, n)| {
        k != i
            && k != j
            && n.x >= lo_x
            && n.x <= hi_x
            && n.y >= lo_y
            && n.y <= hi_y
            && on_open_segment(a, b, (n.x, n.y))
    })
}

/// How two edges meet, apart from shared endpoints.
enum Contact {
    None,
    /// Proper interior crossing at this point (parameters along each edge).
    Cross(Point, f64, f64),
}

fn classify(a: (Point, Point), b: (Point, Point)) -> Result<Contact> {
    let (a1, a2) = a;
    let (b1, b2) = b;
    let o1 = orient(a1, a2, b1);
    let o2 = orient(a1, a2, b2);
    let z1 = is_zero(o1, a1, a2, b1);
    let z2 = is_zero(o2, a1, a2, b2);
    if z1 && z2 {
        // Collinear: reject any overlap of positive length.
        let t1 = param_along(a1, a2, b1);
        let t2 = param_along(a1, a2, b2);
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        if hi.min(1.0) - lo.max(0.0) > INTERIOR_EPS {
            return Err(Error::Geometry("collinear overlapping edges".into()));
        }
        return Ok(Contact::None);
    }
    let o3 = orient(b1, b2, a1);
    let o4 = orient(b1, b2, a2);
    let z3 = is_zero(o3, b1, b2, a1);
    let z4 = is_zero(o4, b1, b2, a2);
    if z1 || z2 || z3 || z4 {
        // Touching configurations are resolved as endpoint-on-edge splits.
        return Ok(Contact::None);
    }
    if (o1 > 0.0) == (o2 > 0.0) || (o3 > 0.0) == (o4 > 0.0) {
        return Ok(Contact::None);
    }
    let ta = o3 / (o3 - o4);
    let tb = o1 / (o1 - o2);
    let p = (a1.0 + ta * (a2.0 - a1.0), a1.1 + ta * (a2.1 - a1.1));
    Ok(Contact::Cross(p, ta, tb))
}

/// Inserts a node at every proper crossing and at every node lying in the
/// interior of an edge, splitting the affected edges. Shared endpoints are
/// not crossings. Collinear overlapping edges are rejected.
pub fn planarize(net: &SpatialNetwork) -> Result<SpatialNetwork> {
    let pos = |i: usize| (net.nodes[i].x, net.nodes[i].y);
    let m = net.edges.len();
    let mut out = net.clone();
    // Split points per edge as (parameter, node id).
    let mut splits: Vec<Vec<(f64, usize)>> = vec![Vec::new(); m];

    // Nodes sitting on edge interiors.
    for (k, e) in net.edges.iter().enumerate() {
        let (a, b) = (pos(e.u), pos(e.v));
        for node in &net.nodes {
            if node.id == e.u || node.id == e.v {
                continue;
            }
            let p = (node.x, node.y);
            if on_open_segment(a, b, p) {
                splits[k].push((param_along(a, b, p), node.id));
            }
        }
    }

    // Sweep-and-prune on x extents, exact test on surviving pairs.
    let mut order: Vec<usize> = (0..m).collect();
    let xmin = |k: usize| pos(net.edges[k].u).0.min(pos(net.edges[k].v).0);
    let xmax = |k: usize| pos(net.edges[k].u).0.max(pos(net.edges[k].v).0);
    order.sort_by(|&a, &b| xmin(a).total_cmp(&xmin(b)).then(a.cmp(&b)));
    let first_crossing_node = out.nodes.len();
    for (oi, &ka) in order.iter().enumerate() {
        let ea = net.edges[ka];
        let hi = xmax(ka);
        for &kb in &order[oi + 1..] {
            if xmin(kb) > hi {
                break;
            }
            let eb = net.edges[kb];
            let shared = ea.u == eb.u || ea.u == eb.v || ea.v == eb.u || ea.v == eb.v;
            let sa = (pos(ea.u), pos(ea.v));
            let sb = (pos(eb.u), pos(eb.v));
            if shared {
                // Only a collinear overlap can add contact beyond the shared node.
                classify(sa, sb)?;
                continue;
            }
            if let Contact::Cross(p, ta, tb) = classify(sa, sb)? {
                let id = find_or_add(&mut out, first_crossing_node, p);
                splits[ka].push((ta, id));
                splits[kb].push((tb, id));
            }
        }
    }

    if splits.iter().all(Vec::is_empty) {
        return Ok(out);
    }

    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (k, e) in net.edges.iter().enumerate() {
        let mut pts = std::mem::take(&mut splits[k]);
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        pts.dedup_by_key(|p| p.1);
        let chain = std::iter::once(e.u)
            .chain(pts.into_iter().map(|p| p.1))
            .chain(std::iter::once(e.v));
        let chain: Vec<usize> = chain.collect();
        for w in chain.windows(2) {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            if a == b || !seen.insert((a, b)) {
                continue;
            }
            let length = out.euclidean(a, b);
            if length > 0.0 {
                edges.push(Edge { u: a, v: b, length });
            }
        }
    }
    out.edges = edges;
    Ok(out)
}

/// Reuses a crossing node already created at (numerically) the same point,
/// so concurrent edges share one intersection node.
fn find_or_add(net: &mut SpatialNetwork, first: usize, p: Point) -> usize {
    let scale = 1.0_f64.max(p.0.abs()).max(p.1.abs());
    for n in &net.nodes[first..] {
        if (n.x - p.0).abs() <= 1e-9 * scale && (n.y - p.1).abs() <= 1e-9 * scale {
            return n.id;
        }
    }
    net.add_node(p.0, p.1, 0.0)
}
