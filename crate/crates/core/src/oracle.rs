//! Brute-force verifiers, deliberately independent of the production
//! algorithms: generic max-flow, residual reachability, clockwise-cycle
//! detection, flow feasibility and leftmost path decomposition.
//!
//! These run in tests and the `verify` command only; nothing here is
//! performance sensitive.

use crate::planar_graph::{CapacityMap, Dart, FlowMap, PlanarGraph, VertexId};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for cycle enumeration ({0} finite faces)")]
    TooLarge(usize),
    #[error("flow is not acyclic at vertex {0}")]
    CyclicFlow(VertexId),
}

struct Arc {
    to: usize,
    residual: i64,
}

/// Exact maximum-flow value by shortest augmenting paths. Multiple sources
/// or sinks are joined through a virtual node with never-saturating arcs.
pub fn max_flow_bfs(
    g: &PlanarGraph,
    c: &CapacityMap,
    sources: &[VertexId],
    sinks: &[VertexId],
) -> i64 {
    let n = g.vertex_count + 2;
    let s_node = g.vertex_count;
    let t_node = g.vertex_count + 1;
    let mut arcs: Vec<Arc> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let push_pair = |arcs: &mut Vec<Arc>, adj: &mut Vec<Vec<usize>>, u: usize, v: usize, cap_uv: i64, cap_vu: i64| {
        let id = arcs.len();
        arcs.push(Arc { to: v, residual: cap_uv });
        arcs.push(Arc { to: u, residual: cap_vu });
        adj[u].push(id);
        adj[v].push(id + 1);
    };
    for d in (0..g.dart_count()).step_by(2) {
        if g.dart_alive[d] {
            push_pair(&mut arcs, &mut adj, g.tail(d), g.head[d], c[d], c[d ^ 1]);
        }
    }
    let big = c.big();
    for &s in sources {
        push_pair(&mut arcs, &mut adj, s_node, s, big, 0);
    }
    for &t in sinks {
        push_pair(&mut arcs, &mut adj, t, t_node, big, 0);
    }

    let mut total = 0i64;
    loop {
        // BFS for a shortest residual path
        let mut pred: Vec<usize> = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[s_node] = true;
        let mut queue = VecDeque::new();
        queue.push_back(s_node);
        'bfs: while let Some(u) = queue.pop_front() {
            for &a in &adj[u] {
                if arcs[a].residual > 0 && !seen[arcs[a].to] {
                    seen[arcs[a].to] = true;
                    pred[arcs[a].to] = a;
                    if arcs[a].to == t_node {
                        break 'bfs;
                    }
                    queue.push_back(arcs[a].to);
                }
            }
        }
        if !seen[t_node] {
            return total;
        }
        let mut delta = i64::MAX;
        let mut v = t_node;
        while v != s_node {
            let a = pred[v];
            delta = delta.min(arcs[a].residual);
            v = arcs[a ^ 1].to;
        }
        let mut v = t_node;
        while v != s_node {
            let a = pred[v];
            arcs[a].residual -= delta;
            arcs[a ^ 1].residual += delta;
            v = arcs[a ^ 1].to;
        }
        total += delta;
    }
}

/// BFS over strictly positive darts.
pub fn residual_path_exists(
    g: &PlanarGraph,
    c: &CapacityMap,
    from: &[VertexId],
    to: &[VertexId],
) -> bool {
    let mut target = vec![false; g.vertex_count];
    for &t in to {
        target[t] = true;
    }
    let mut seen = vec![false; g.vertex_count];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in from {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count];
    for d in 0..g.dart_count() {
        if g.dart_alive[d] && c[d] > 0 {
            adj[g.tail(d)].push(g.head[d]);
        }
    }
    while let Some(v) = queue.pop_front() {
        if target[v] {
            return true;
        }
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// Does any clockwise residual cycle exist? Exhaustive over vertex-simple
/// cycles, classified combinatorially: a simple cycle is clockwise iff the
/// faces it encloses (those unreachable from f∞ in the dual once the
/// cycle's edges are blocked) lie to its right.
pub fn cw_residual_cycle_exists(g: &PlanarGraph, c: &CapacityMap) -> Result<bool, OracleError> {
    let finite_faces = g
        .faces
        .iter()
        .enumerate()
        .filter(|(i, f)| *i != g.infinite_face && f.alive)
        .count();
    if finite_faces > 12 {
        return Err(OracleError::TooLarge(finite_faces));
    }
    let mut adj: Vec<Vec<Dart>> = vec![Vec::new(); g.vertex_count];
    for d in 0..g.dart_count() {
        if g.dart_alive[d] && c[d] > 0 {
            adj[g.tail(d)].push(d);
        }
    }
    // enumerate vertex-simple residual cycles whose smallest vertex is the root
    for root in 0..g.vertex_count {
        let mut on_path = vec![false; g.vertex_count];
        let mut path: Vec<Dart> = Vec::new();
        if dfs_cycles(g, &adj, root, root, &mut on_path, &mut path)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn dfs_cycles(
    g: &PlanarGraph,
    adj: &[Vec<Dart>],
    root: VertexId,
    v: VertexId,
    on_path: &mut Vec<bool>,
    path: &mut Vec<Dart>,
) -> Result<bool, OracleError> {
    on_path[v] = true;
    for &d in &adj[v] {
        let w = g.head[d];
        if w == root && !path.is_empty() {
            path.push(d);
            let cw = cycle_is_clockwise(g, path);
            path.pop();
            if cw {
                on_path[v] = false;
                return Ok(true);
            }
        } else if w > root && !on_path[w] {
            path.push(d);
            if dfs_cycles(g, adj, root, w, on_path, path)? {
                on_path[v] = false;
                return Ok(true);
            }
            path.pop();
        }
    }
    on_path[v] = false;
    Ok(false)
}

/// Classify a vertex-simple cycle: clockwise iff its enclosed faces are on
/// its right. Orientation is intrinsic to the embedding; no coordinates.
pub fn cycle_is_clockwise(g: &PlanarGraph, cycle: &[Dart]) -> bool {
    let mut blocked_edge = vec![false; g.edge_count()];
    for &d in cycle {
        blocked_edge[d / 2] = true;
    }
    // dual reachability from the infinite face
    let mut reach = vec![false; g.faces.len()];
    let mut stack = vec![g.infinite_face];
    reach[g.infinite_face] = true;
    while let Some(x) = stack.pop() {
        let f = &g.faces[x];
        if !f.alive {
            continue;
        }
        let mut d = f.any_dart;
        loop {
            if !blocked_edge[d / 2] && g.dart_alive[d] {
                let y = g.face_of[d ^ 1];
                if !reach[y] {
                    reach[y] = true;
                    stack.push(y);
                }
            }
            d = g.next_in_face[d];
            if d == f.any_dart {
                break;
            }
        }
    }
    // clockwise <=> the right side of every cycle dart is enclosed
    let right_enclosed = !reach[g.face_of[cycle[0] ^ 1]];
    debug_assert!(cycle
        .iter()
        .all(|&d| !reach[g.face_of[d ^ 1]] == right_enclosed));
    right_enclosed
}

#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub violations: Vec<String>,
    /// Net flow into each listed terminal.
    pub terminal_net: Vec<(VertexId, i64)>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check antisymmetry, capacity respect and conservation; report net flow
/// per terminal. Violations are listed, not panicked on.
pub fn check_flow_feasible(
    g: &PlanarGraph,
    c: &CapacityMap,
    f: &FlowMap,
    terminals: &[VertexId],
) -> FeasibilityReport {
    let mut violations = Vec::new();
    let mut is_terminal = vec![false; g.vertex_count];
    for &t in terminals {
        is_terminal[t] = true;
    }
    for d in 0..g.dart_count() {
        if f[d] != -f[d ^ 1] {
            violations.push(format!("antisymmetry broken on dart {}", d));
        }
        if g.dart_alive[d] {
            if f[d] > c[d] {
                violations.push(format!("capacity exceeded on dart {}: {} > {}", d, f[d], c[d]));
            }
        } else if f[d] != 0 {
            violations.push(format!("dead dart {} carries flow", d));
        }
    }
    let mut net_in = vec![0i64; g.vertex_count];
    for d in 0..g.dart_count() {
        if g.dart_alive[d] {
            net_in[g.head[d]] += f[d];
        }
    }
    for v in 0..g.vertex_count {
        if !is_terminal[v] && net_in[v] != 0 {
            violations.push(format!("conservation broken at vertex {}: net {}", v, net_in[v]));
        }
    }
    FeasibilityReport {
        violations,
        terminal_net: terminals.iter().map(|&t| (t, net_in[t])).collect(),
    }
}

/// Greedy leftmost path stripping of an acyclic st-flow (small instances).
/// Returns the paths in saturation order; each carries positive flow.
pub fn leftmost_decomposition(
    g: &PlanarGraph,
    f: &FlowMap,
    s: VertexId,
    t: VertexId,
) -> Result<Vec<(Vec<Dart>, i64)>, OracleError> {
    let mut rf = f.f.clone();
    let mut out = Vec::new();
    let (entry, _exit) = match g.boundary_corner(s) {
        Ok(p) => p,
        Err(_) => return Ok(out),
    };
    loop {
        // leftmost positive dart out of s, scanning clockwise from the
        // infinite-face corner
        let first = {
            let mut cand = None;
            let mut d = g.next_cw[entry ^ 1];
            loop {
                if g.dart_alive[d] && rf[d] > 0 {
                    cand = Some(d);
                    break;
                }
                if d == entry ^ 1 {
                    break;
                }
                d = g.next_cw[d];
            }
            match cand {
                Some(d) => d,
                None => break,
            }
        };
        let mut path = vec![first];
        let mut steps = 0usize;
        while g.head[*path.last().unwrap()] != t {
            let prev = *path.last().unwrap();
            // leftmost continuation: clockwise scan from the successor of
            // the reverse of the arrival dart
            let mut d = g.next_cw[prev ^ 1];
            let next = loop {
                if d == prev ^ 1 {
                    return Err(OracleError::CyclicFlow(g.head[prev]));
                }
                if g.dart_alive[d] && rf[d] > 0 {
                    break d;
                }
                d = g.next_cw[d];
            };
            path.push(next);
            steps += 1;
            if steps > g.dart_count() {
                return Err(OracleError::CyclicFlow(g.head[prev]));
            }
        }
        let amount = path.iter().map(|&d| rf[d]).min().unwrap();
        debug_assert!(amount > 0);
        for &d in &path {
            rf[d] -= amount;
            rf[d ^ 1] += amount;
        }
        out.push((path, amount));
    }
    Ok(out)
}
