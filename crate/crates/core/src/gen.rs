//! Deterministic instance generators. Embeddings come straight from the
//! grid topology, so no planarity inference is ever involved; the same
//! seed always yields byte-identical instances.

use crate::instance::Instance;
use crate::planar_graph::{CapacityMap, PlanarGraph, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Vertices of the grid boundary in clockwise order starting at (0, 0):
/// top row left-to-right, right column downwards, bottom row right-to-left,
/// left column upwards.
pub fn grid_boundary(rows: usize, cols: usize) -> Vec<VertexId> {
    let at = |r: usize, c: usize| r * cols + c;
    let mut out = Vec::new();
    for c in 0..cols {
        out.push(at(0, c));
    }
    for r in 1..rows {
        out.push(at(r, cols - 1));
    }
    if rows > 1 {
        for c in (0..cols - 1).rev() {
            out.push(at(rows - 1, c));
        }
        for r in (1..rows - 1).rev() {
            out.push(at(r, 0));
        }
    }
    out
}

struct GridTopo {
    edges: Vec<(usize, usize)>,
    rotation: Vec<Vec<usize>>,
    f_dart: usize,
}

fn grid_topology(rows: usize, cols: usize) -> GridTopo {
    assert!(rows >= 2 && cols >= 2);
    let at = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    let mut right_edge = vec![usize::MAX; rows * cols];
    let mut down_edge = vec![usize::MAX; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                right_edge[at(r, c)] = edges.len();
                edges.push((at(r, c), at(r, c + 1)));
            }
            if r + 1 < rows {
                down_edge[at(r, c)] = edges.len();
                edges.push((at(r, c), at(r + 1, c)));
            }
        }
    }
    // clockwise rotation: north, east, south, west
    let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let v = at(r, c);
            let mut list = Vec::new();
            if r > 0 {
                list.push(2 * down_edge[at(r - 1, c)] + 1); // north
            }
            if c + 1 < cols {
                list.push(2 * right_edge[v]); // east
            }
            if r + 1 < rows {
                list.push(2 * down_edge[v]); // south
            }
            if c > 0 {
                list.push(2 * right_edge[at(r, c - 1)] + 1); // west
            }
            rotation[v] = list;
        }
    }
    let f_dart = 2 * right_edge[at(0, 0)]; // eastward at the top-left corner
    GridTopo {
        edges,
        rotation,
        f_dart,
    }
}

/// Random grid instance: capacities uniform in [1, max_cap] per dart,
/// terminal pairs evenly spread along the boundary, alternating s, t.
pub fn gen_grid(
    rows: usize,
    cols: usize,
    pairs: usize,
    seed: u64,
    max_cap: i64,
) -> Result<Instance, String> {
    assert!(rows >= 2 && cols >= 2 && pairs >= 1 && max_cap >= 1);
    let topo = grid_topology(rows, cols);
    let boundary = grid_boundary(rows, cols);
    if 2 * pairs > boundary.len() {
        return Err(format!(
            "{} terminal pairs do not fit on a boundary of {} vertices",
            pairs,
            boundary.len()
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut caps = Vec::with_capacity(2 * topo.edges.len());
    for _ in 0..2 * topo.edges.len() {
        caps.push(rng.gen_range(1..=max_cap));
    }
    let graph = PlanarGraph::build(rows * cols, &topo.edges, &topo.rotation, topo.f_dart)
        .expect("grid topology is a valid embedding");
    let mut terminals = Vec::with_capacity(2 * pairs);
    for k in 0..2 * pairs {
        let pos = k * boundary.len() / (2 * pairs);
        terminals.push((k % 2 == 0, boundary[pos]));
    }
    Ok(Instance {
        graph,
        caps: CapacityMap::new(caps),
        terminals,
    })
}

/// Adversarial family: a wide two-row grid whose top row is a
/// high-capacity trunk from the single real source; the sinks hang along
/// the bottom row behind unit-capacity spokes, with token sources between
/// them to keep the alternation. A solver that restarts its search per
/// sink pays for the trunk every time.
pub fn gen_path_star(cols: usize, pairs: usize, seed: u64) -> Result<Instance, String> {
    assert!(pairs >= 1);
    let rows = 2;
    if cols < 2 * pairs + 2 {
        return Err(format!(
            "path-star family needs at least {} columns for {} pairs",
            2 * pairs + 2,
            pairs
        ));
    }
    let topo = grid_topology(rows, cols);
    let at = |r: usize, c: usize| r * cols + c;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trunk_cap: i64 = 1_000_000;
    let mut caps = vec![0i64; 2 * topo.edges.len()];
    for (e, &(u, v)) in topo.edges.iter().enumerate() {
        let (ru, rv) = (u / cols, v / cols);
        let horizontal = ru == rv;
        let (cuv, cvu) = if horizontal && ru == 0 {
            (trunk_cap, trunk_cap)
        } else if horizontal {
            (1, 1)
        } else {
            // spokes from the trunk to the sink row
            let c = rng.gen_range(1..=3);
            (c, c)
        };
        caps[2 * e] = cuv;
        caps[2 * e + 1] = cvu;
    }
    let graph = PlanarGraph::build(rows * cols, &topo.edges, &topo.rotation, topo.f_dart)
        .expect("grid topology is a valid embedding");
    // terminals: source at the top-left, sinks and token sources along the
    // bottom row in clockwise (right-to-left) order
    let mut terminals = vec![(true, at(0, 0))];
    let slots = 2 * pairs - 1; // t1, s2, t2, ..., sm, tm
    for k in 0..slots {
        let c = cols - 2 - (k * (cols - 2) / slots.max(1));
        terminals.push((k % 2 == 1, at(1, c.max(1))));
    }
    // ensure distinct columns
    {
        let mut seen = std::collections::HashSet::new();
        for &(_, v) in &terminals {
            if !seen.insert(v) {
                return Err("path-star terminals collide; use more columns".into());
            }
        }
    }
    Ok(Instance {
        graph,
        caps: CapacityMap::new(caps),
        terminals,
    })
}
