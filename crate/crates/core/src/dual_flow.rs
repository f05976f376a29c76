//! Shortest-path flow primitives in the dual.
//!
//! Distances from the infinite face with capacities as lengths give a
//! circulation that saturates every clockwise cycle. Splitting f∞* along
//! the two boundary arcs of an (s, t) pair turns the same computation
//! into the leftmost maximum st-flow: the flow on a dart is the distance
//! difference across it, the value is the distance of the far side b∞*.
//!
//! These full-search routines are the reference path; production multiflow
//! uses the early-stopping biased search instead.

use crate::instrument::{new_counters, Instr};
use crate::offset_heap::{new_arena, OffsetHeap, UNRANKED};
use crate::planar_graph::{CapacityMap, Dart, FlowMap, GraphError, PlanarGraph, VertexId, NONE};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("terminal {0} is not on the boundary")]
    TerminalNotOnBoundary(VertexId),
    #[error("terminal cycle invalid: {0}")]
    TerminalOrderInvalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Shortest-path distances per face in the (possibly split) dual.
#[derive(Debug, Clone)]
pub struct DistanceLabels {
    /// Per face id; the infinite face reads 0 (it is the source side).
    pub dist: Vec<i64>,
    /// Distance of b∞*, the flow value. Zero when the dual was not split.
    pub sink_dist: i64,
}

/// A minimum st-cut as a set of primal darts crossed by the dual
/// a∞*-to-b∞* path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutPath {
    pub darts: Vec<Dart>,
    pub capacity: i64,
}

/// Output of the full dual Dijkstra.
pub struct DualSearch {
    pub dist: Vec<i64>,
    pub parent: Vec<Dart>,
    /// Cheapest crossing into b∞*: (distance, arrival dart).
    pub best_b: Option<(i64, Dart)>,
}

/// Full Dijkstra over faces. Darts of ∂G flagged in `a_mark` belong to the
/// source side a∞* (distance 0); any crossing of an unflagged boundary
/// dart is an arrival at b∞*.
pub fn full_dual_dijkstra(
    g: &PlanarGraph,
    c: &CapacityMap,
    a_mark: &[bool],
    instr: Option<Instr>,
) -> DualSearch {
    let nf = g.faces.len();
    let instr = instr.unwrap_or_else(new_counters);
    let mut heap = OffsetHeap::new(new_arena(instr));
    let mut dist = vec![i64::MAX; nf];
    let mut parent = vec![NONE; nf];
    let mut settled = vec![false; nf];
    let mut best_b: Option<(i64, Dart)> = None;
    let inf = g.infinite_face;
    dist[inf] = 0;
    settled[inf] = true;

    fn note_b(best_b: &mut Option<(i64, Dart)>, cand: i64, via: Dart) {
        if best_b.map_or(true, |(v, _)| cand < v) {
            *best_b = Some((cand, via));
        }
    }

    // seed from the marked boundary darts
    for d in 0..g.dart_count() {
        if !g.dart_alive[d] || !a_mark[d] {
            continue;
        }
        debug_assert_eq!(g.face_of[d], inf, "a-marked dart not on the infinite face");
        let y = g.face_of[d ^ 1];
        if y == inf {
            if !a_mark[d ^ 1] {
                note_b(&mut best_b, c[d], d);
            }
            continue;
        }
        if c[d] < dist[y] {
            dist[y] = c[d];
            parent[y] = d;
            if heap.contains(y) {
                heap.decrease_key(y, (c[d], UNRANKED)).unwrap();
            } else {
                heap.insert(y, (c[d], UNRANKED)).unwrap();
            }
        }
    }

    while let Ok((x, (dx, _))) = heap.delete_min() {
        if settled[x] {
            continue;
        }
        settled[x] = true;
        debug_assert_eq!(dx, dist[x]);
        // scan the face walk of x; each dart crosses to its right side
        let start = g.faces[x].any_dart;
        let mut o = start;
        loop {
            let y = g.face_of[o ^ 1];
            let nd = dx + c[o];
            if y == inf {
                if !a_mark[o ^ 1] {
                    note_b(&mut best_b, nd, o);
                }
            } else if !settled[y] && nd < dist[y] {
                dist[y] = nd;
                parent[y] = o;
                if heap.contains(y) {
                    heap.decrease_key(y, (nd, UNRANKED)).unwrap();
                } else {
                    heap.insert(y, (nd, UNRANKED)).unwrap();
                }
            }
            o = g.next_in_face[o];
            if o == start {
                break;
            }
        }
    }
    DualSearch {
        dist,
        parent,
        best_b,
    }
}

/// Clockwise-saturating circulation: distances from f∞* interpreting
/// capacities as lengths; the flow across a dart is the distance
/// difference between its sides. No clockwise cycle stays residual.
pub fn cw_saturating_circulation(g: &PlanarGraph, c: &CapacityMap) -> FlowMap {
    let mut a_mark = vec![false; g.dart_count()];
    for d in 0..g.dart_count() {
        if g.dart_alive[d] && g.face_of[d] == g.infinite_face {
            a_mark[d] = true;
        }
    }
    let search = full_dual_dijkstra(g, c, &a_mark, None);
    debug_assert!(search.best_b.is_none());
    let mut f = FlowMap::zeros(g.dart_count());
    for d in 0..g.dart_count() {
        if !g.dart_alive[d] {
            continue;
        }
        let dl = side_dist(g, &search.dist, &a_mark, d, 0);
        let dr = side_dist(g, &search.dist, &a_mark, d ^ 1, 0);
        f[d] = dr - dl;
    }
    f
}

fn side_dist(g: &PlanarGraph, dist: &[i64], a_mark: &[bool], d: Dart, sink_dist: i64) -> i64 {
    let face = g.face_of[d];
    if face == g.infinite_face {
        if a_mark[d] {
            0
        } else {
            sink_dist
        }
    } else {
        dist[face]
    }
}

/// Clockwise boundary darts from s's corner up to and including t's.
pub fn boundary_arc(g: &PlanarGraph, s: VertexId, t: VertexId) -> Result<Vec<Dart>, FlowError> {
    let walk = g.boundary_walk();
    let n = walk.len();
    let pos_s = (0..n)
        .find(|&i| g.head[walk[i]] == s)
        .ok_or(FlowError::TerminalNotOnBoundary(s))?;
    let mut arc = Vec::new();
    for k in 1..=n {
        let d = walk[(pos_s + k) % n];
        arc.push(d);
        if g.head[d] == t {
            return Ok(arc);
        }
    }
    Err(FlowError::TerminalNotOnBoundary(t))
}

/// Leftmost maximum st-flow for boundary terminals via the split dual.
/// Capacities must be clockwise-acyclic (the caller's obligation; the
/// preprocessing step establishes it).
pub fn st_max_flow(
    g: &PlanarGraph,
    c: &CapacityMap,
    s: VertexId,
    t: VertexId,
) -> Result<(FlowMap, i64, DistanceLabels, CutPath), FlowError> {
    let arc = boundary_arc(g, s, t)?;
    let mut a_mark = vec![false; g.dart_count()];
    for &d in &arc {
        a_mark[d] = true;
    }
    let search = full_dual_dijkstra(g, c, &a_mark, None);
    let (value, _via) = search
        .best_b
        .expect("b-side of the split is always reachable");
    let mut f = FlowMap::zeros(g.dart_count());
    for d in 0..g.dart_count() {
        if !g.dart_alive[d] {
            continue;
        }
        let dl = side_dist(g, &search.dist, &a_mark, d, value);
        let dr = side_dist(g, &search.dist, &a_mark, d ^ 1, value);
        f[d] = dr - dl;
    }
    // leftmost minimum cut: darts leaving the region that still reaches s
    // in the residual graph
    let cut = residual_cut(g, c, &f, s, value);
    let mut dist = search.dist;
    dist[g.infinite_face] = 0;
    Ok((
        f,
        value,
        DistanceLabels {
            dist,
            sink_dist: value,
        },
        cut,
    ))
}

/// The minimum cut whose source side is exactly the residual-reachable
/// region of `s`.
pub fn residual_cut(
    g: &PlanarGraph,
    c: &CapacityMap,
    f: &FlowMap,
    s: VertexId,
    value: i64,
) -> CutPath {
    let mut reach = vec![false; g.vertex_count];
    reach[s] = true;
    let mut stack = vec![s];
    let mut adj: Vec<Vec<Dart>> = vec![Vec::new(); g.vertex_count];
    for d in 0..g.dart_count() {
        if g.dart_alive[d] && c[d] - f[d] > 0 {
            adj[g.tail(d)].push(d);
        }
    }
    while let Some(v) = stack.pop() {
        for &d in &adj[v] {
            let w = g.head[d];
            if !reach[w] {
                reach[w] = true;
                stack.push(w);
            }
        }
    }
    let mut darts = Vec::new();
    let mut capacity = 0;
    for d in 0..g.dart_count() {
        if g.dart_alive[d] && reach[g.tail(d)] && !reach[g.head[d]] {
            darts.push(d);
            capacity += c[d];
        }
    }
    debug_assert_eq!(capacity, value, "cut capacity must certify the flow value");
    CutPath { darts, capacity }
}

/// Check that the terminals appear on ∂G in the listed clockwise order.
pub fn validate_terminal_order(g: &PlanarGraph, terminals: &[VertexId]) -> Result<(), FlowError> {
    let walk = g.boundary_walk();
    let mut pos = Vec::with_capacity(terminals.len());
    for &v in terminals {
        let p = walk
            .iter()
            .position(|&d| g.head[d] == v)
            .ok_or(FlowError::TerminalNotOnBoundary(v))?;
        pos.push(p);
    }
    if terminals.len() <= 1 {
        return Ok(());
    }
    let min_idx = (0..pos.len()).min_by_key(|&i| pos[i]).unwrap();
    let rotated: Vec<usize> = (0..pos.len())
        .map(|i| pos[(min_idx + i) % pos.len()])
        .collect();
    if rotated.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FlowError::TerminalOrderInvalid(format!(
            "boundary positions {:?} not in clockwise order",
            pos
        )));
    }
    Ok(())
}

/// First step of the algorithm: embed a hub in f∞ joined to every terminal
/// by never-saturating arcs laid out so that s₁, t_m and the hub share the
/// new infinite face; saturate all clockwise residual cycles; return the
/// residual capacities restricted to the original darts.
///
/// Afterwards no residual path runs from a later source to an earlier
/// sink, and no clockwise residual cycle remains.
pub fn preprocess(
    g: &PlanarGraph,
    c: &CapacityMap,
    terminals: &[VertexId],
    _instr: Option<Instr>,
) -> Result<CapacityMap, FlowError> {
    assert!(terminals.len() >= 2 && terminals.len() % 2 == 0);
    validate_terminal_order(g, terminals)?;
    let big = c.big();
    let mut g2 = g.clone();
    let mut c2 = c.clone();
    // hub rotation: s1 first, then the remaining terminals in reverse
    // clockwise order, closing the infinite sector between t_m and s1
    let mut order: Vec<(VertexId, bool)> = Vec::with_capacity(terminals.len());
    order.push((terminals[0], true));
    for (i, &v) in terminals.iter().enumerate().skip(1).rev() {
        order.push((v, i % 2 == 0));
    }
    let targets: Vec<VertexId> = order.iter().map(|&(v, _)| v).collect();
    let (_hub, arcs) = g2.attach_hub(&targets)?;
    for &(_, is_source) in order.iter() {
        if is_source {
            c2.c.push(big); // hub -> source
            c2.c.push(0);
        } else {
            c2.c.push(0); // hub -> sink carries nothing
            c2.c.push(big); // sink -> hub
        }
    }
    debug_assert_eq!(c2.c.len(), g2.dart_count());
    g2.boundary_anchor = arcs[0] ^ 1;
    g2.rebuild_faces()?;
    let f = cw_saturating_circulation(&g2, &c2);
    let mut c0 = CapacityMap::zeros(g.dart_count());
    for d in 0..g.dart_count() {
        c0[d] = c[d] - f[d];
        debug_assert!(c0[d] >= 0);
    }
    Ok(c0)
}
