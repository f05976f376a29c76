//! Combinatorial-embedding representation of a connected planar graph.
//!
//! Conventions (all other modules inherit these):
//!
//! * Edge `e` owns darts `2e` (tail→head) and `2e+1` (its reverse);
//!   `rev(d) = d ^ 1`.
//! * `next_cw[d]` is the successor of `d` in clockwise order around
//!   `tail(d)` (the rotation system, given as input).
//! * The next dart on a face is the rotation-successor of the reverse
//!   dart: `phi(d) = next_cw[rev(d)]`. The face traced this way lies to
//!   the LEFT of each of its darts.
//! * The boundary is the orbit of the designated infinite-face dart; it
//!   is the clockwise walk of `∂G`, so the graph interior lies to the
//!   right of each boundary dart.
//! * The dual dart of `d` crosses `d` from left to right:
//!   `tail(d*) = face(d)`, `head(d*) = face(rev(d))`, and its length in
//!   shortest-path computations is `c[d]`.

use thiserror::Error;

pub type Dart = usize;
pub type VertexId = usize;
pub type FaceId = usize;

pub const NONE: usize = usize::MAX;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed rotation: {0}")]
    MalformedRotation(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("Euler formula violated: V={v} E={e} F={f}")]
    EulerViolation { v: usize, e: usize, f: usize },
    #[error("vertex {0} is not on the boundary")]
    NotOnBoundary(VertexId),
    #[error("flow push-back does not fit the simplification log: {0}")]
    InfeasiblePushback(String),
    #[error("terminal order invalid: {0}")]
    TerminalOrderInvalid(String),
    #[error("empty terminal group")]
    EmptyGroup,
}

/// Per-dart non-negative capacities. `big()` is the never-saturating
/// value used for super-terminal and preprocessing arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityMap {
    pub c: Vec<i64>,
}

impl CapacityMap {
    pub fn new(c: Vec<i64>) -> Self {
        assert!(c.iter().all(|&x| x >= 0), "capacities must be non-negative");
        CapacityMap { c }
    }

    pub fn zeros(darts: usize) -> Self {
        CapacityMap { c: vec![0; darts] }
    }

    /// One more than the sum of all current capacities: strictly exceeds
    /// any flow the instance can carry, so arcs of this capacity never
    /// saturate. Recomputed per instance.
    pub fn big(&self) -> i64 {
        1 + self.c.iter().sum::<i64>()
    }
}

impl std::ops::Index<Dart> for CapacityMap {
    type Output = i64;
    fn index(&self, d: Dart) -> &i64 {
        &self.c[d]
    }
}

impl std::ops::IndexMut<Dart> for CapacityMap {
    fn index_mut(&mut self, d: Dart) -> &mut i64 {
        &mut self.c[d]
    }
}

/// Antisymmetric per-dart flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowMap {
    pub f: Vec<i64>,
}

impl FlowMap {
    pub fn zeros(darts: usize) -> Self {
        FlowMap { f: vec![0; darts] }
    }

    /// f = before − after, dart-wise.
    pub fn from_residual(before: &CapacityMap, after: &CapacityMap) -> Self {
        FlowMap {
            f: before
                .c
                .iter()
                .zip(after.c.iter())
                .map(|(b, a)| b - a)
                .collect(),
        }
    }
}

impl std::ops::Index<Dart> for FlowMap {
    type Output = i64;
    fn index(&self, d: Dart) -> &i64 {
        &self.f[d]
    }
}

impl std::ops::IndexMut<Dart> for FlowMap {
    fn index_mut(&mut self, d: Dart) -> &mut i64 {
        &mut self.f[d]
    }
}

#[derive(Debug, Clone)]
pub struct FaceRec {
    /// Some dart on the face walk.
    pub any_dart: Dart,
    /// Number of darts on the walk.
    pub len: usize,
    /// Cleared when the face is absorbed into a deleted region.
    pub alive: bool,
}

#[derive(Debug, Clone)]
pub enum LogEntry {
    /// Zero-capacity chord added by triangulation; carries no flow.
    AddedZeroCapEdge { edge: usize },
    /// Degree-2 vertex removed: darts `d_uv` then `d_vw` were replaced by
    /// the single dart `d_uw` (and reverses by the reverse chain).
    Deg2 { d_uw: Dart, d_uv: Dart, d_vw: Dart },
    /// Parallel edge folded into `kept_uv`; capacities recorded as they
    /// were before the merge, same orientation for both darts.
    Parallel {
        kept_uv: Dart,
        removed_uv: Dart,
        kept_caps: (i64, i64),
        removed_caps: (i64, i64),
    },
    /// Super-terminal vertex with its arc edges; arc flow is discarded on
    /// push-back (the group members are the real terminals).
    SuperTerminal { vertex: VertexId, edges: Vec<usize> },
}

/// Ordered record of capacity-preserving rewrites. Replaying it backwards
/// maps any feasible flow on the rewritten graph to a feasible flow of
/// equal terminal value on the original graph.
#[derive(Debug, Clone, Default)]
pub struct SimplificationLog {
    pub entries: Vec<LogEntry>,
    /// Dart count of the graph the log starts from.
    pub base_darts: usize,
}

#[derive(Debug, Clone)]
pub struct PlanarGraph {
    pub vertex_count: usize,
    /// Per-dart head vertex; `tail(d) = head[d ^ 1]`.
    pub head: Vec<VertexId>,
    /// Clockwise rotation successor around `tail(d)`.
    pub next_cw: Vec<Dart>,
    pub prev_cw: Vec<Dart>,
    /// Tombstone flags; dead darts stay in the arrays.
    pub dart_alive: Vec<bool>,
    pub face_of: Vec<FaceId>,
    /// Face-walk successor, `phi(d) = next_cw[rev d]`, valid for alive darts.
    pub next_in_face: Vec<Dart>,
    pub faces: Vec<FaceRec>,
    pub infinite_face: FaceId,
    /// An alive dart on the infinite face, anchor for `boundary_walk`.
    pub boundary_anchor: Dart,
    /// Some alive dart with its tail at each vertex (NONE when isolated).
    pub vertex_dart: Vec<Dart>,
}

impl PlanarGraph {
    #[inline]
    pub fn rev(d: Dart) -> Dart {
        d ^ 1
    }

    #[inline]
    pub fn tail(&self, d: Dart) -> VertexId {
        self.head[d ^ 1]
    }

    #[inline]
    pub fn dart_count(&self) -> usize {
        self.head.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.head.len() / 2
    }

    #[inline]
    pub fn phi(&self, d: Dart) -> Dart {
        self.next_cw[d ^ 1]
    }

    /// Faces to the left and right of `d`.
    #[inline]
    pub fn left_face(&self, d: Dart) -> FaceId {
        self.face_of[d]
    }

    #[inline]
    pub fn right_face(&self, d: Dart) -> FaceId {
        self.face_of[d ^ 1]
    }

    pub fn alive_edge_count(&self) -> usize {
        self.dart_alive.iter().filter(|&&a| a).count() / 2
    }

    /// Build from per-vertex clockwise dart lists.
    ///
    /// `edges[e] = (u, v)` gives dart `2e` tail `u`, head `v`.
    pub fn build(
        vertex_count: usize,
        edges: &[(VertexId, VertexId)],
        rotation: &[Vec<Dart>],
        infinite_face_dart: Dart,
    ) -> Result<PlanarGraph, GraphError> {
        let m = edges.len();
        let darts = 2 * m;
        if rotation.len() != vertex_count {
            return Err(GraphError::MalformedRotation(format!(
                "{} rotation lists for {} vertices",
                rotation.len(),
                vertex_count
            )));
        }
        let mut head = vec![0usize; darts];
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(GraphError::MalformedRotation(format!(
                    "edge {} endpoint out of range",
                    e
                )));
            }
            if u == v {
                return Err(GraphError::MalformedRotation(format!(
                    "edge {} is a self-loop",
                    e
                )));
            }
            head[2 * e] = v;
            head[2 * e + 1] = u;
        }
        let mut seen = vec![false; darts];
        let mut next_cw = vec![NONE; darts];
        let mut prev_cw = vec![NONE; darts];
        for (v, list) in rotation.iter().enumerate() {
            for &d in list {
                if d >= darts {
                    return Err(GraphError::MalformedRotation(format!(
                        "dart {} out of range",
                        d
                    )));
                }
                if seen[d] {
                    return Err(GraphError::MalformedRotation(format!(
                        "dart {} appears twice",
                        d
                    )));
                }
                seen[d] = true;
                if head[d ^ 1] != v {
                    return Err(GraphError::MalformedRotation(format!(
                        "dart {} listed at vertex {} but its tail is {}",
                        d,
                        v,
                        head[d ^ 1]
                    )));
                }
            }
            for i in 0..list.len() {
                let d = list[i];
                let nd = list[(i + 1) % list.len()];
                next_cw[d] = nd;
                prev_cw[nd] = d;
            }
        }
        if let Some(d) = (0..darts).find(|&d| !seen[d]) {
            return Err(GraphError::MalformedRotation(format!("dart {} missing", d)));
        }
        if infinite_face_dart >= darts && darts > 0 {
            return Err(GraphError::MalformedRotation(
                "infinite face dart out of range".into(),
            ));
        }
        let mut vertex_dart = vec![NONE; vertex_count];
        for (v, list) in rotation.iter().enumerate() {
            if let Some(&d) = list.first() {
                vertex_dart[v] = d;
            }
        }
        let mut g = PlanarGraph {
            vertex_count,
            head,
            next_cw,
            prev_cw,
            dart_alive: vec![true; darts],
            face_of: vec![NONE; darts],
            next_in_face: vec![NONE; darts],
            faces: Vec::new(),
            infinite_face: NONE,
            boundary_anchor: infinite_face_dart,
            vertex_dart,
        };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        g.rebuild_faces()?;
        Ok(g)
    }

    /// Connectivity over alive darts, ignoring fully isolated vertices.
    pub fn is_connected(&self) -> bool {
        let darts = self.dart_count();
        if darts == 0 {
            return self.vertex_count <= 1;
        }
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); self.vertex_count];
        let mut touched = vec![false; self.vertex_count];
        for d in (0..darts).step_by(2) {
            if self.dart_alive[d] {
                let u = self.tail(d);
                let v = self.head[d];
                adj[u].push(v);
                adj[v].push(u);
                touched[u] = true;
                touched[v] = true;
            }
        }
        let start = match (0..self.vertex_count).find(|&v| touched[v]) {
            Some(s) => s,
            None => return self.vertex_count <= 1,
        };
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..self.vertex_count).all(|v| !touched[v] || seen[v])
    }

    /// Retrace all faces of the alive subgraph and re-check Euler's formula.
    pub fn rebuild_faces(&mut self) -> Result<(), GraphError> {
        let darts = self.dart_count();
        self.face_of = vec![NONE; darts];
        self.next_in_face = vec![NONE; darts];
        self.faces.clear();
        for d0 in 0..darts {
            if !self.dart_alive[d0] || self.face_of[d0] != NONE {
                continue;
            }
            let id = self.faces.len();
            let mut d = d0;
            let mut len = 0usize;
            loop {
                self.face_of[d] = id;
                let nd = self.phi(d);
                self.next_in_face[d] = nd;
                len += 1;
                d = nd;
                if d == d0 {
                    break;
                }
                debug_assert!(len <= darts, "face tracing does not close");
            }
            self.faces.push(FaceRec {
                any_dart: d0,
                len,
                alive: true,
            });
        }
        let v_alive = self.alive_vertex_count();
        let e_alive = self.alive_edge_count();
        let f = self.faces.len();
        if v_alive > 0 && v_alive as i64 - e_alive as i64 + f as i64 != 2 {
            return Err(GraphError::EulerViolation {
                v: v_alive,
                e: e_alive,
                f,
            });
        }
        if !self.head.is_empty() {
            if !self.dart_alive[self.boundary_anchor] {
                return Err(GraphError::MalformedRotation(
                    "boundary anchor dart is dead".into(),
                ));
            }
            self.infinite_face = self.face_of[self.boundary_anchor];
        }
        Ok(())
    }

    pub fn alive_vertex_count(&self) -> usize {
        let mut touched = vec![false; self.vertex_count];
        for d in 0..self.dart_count() {
            if self.dart_alive[d] {
                touched[self.head[d]] = true;
                touched[self.head[d ^ 1]] = true;
            }
        }
        touched.iter().filter(|&&t| t).count()
    }

    /// Clockwise dart sequence of ∂G (the walk of the infinite face).
    pub fn boundary_walk(&self) -> Vec<Dart> {
        let mut out = Vec::new();
        let d0 = self.boundary_anchor;
        let mut d = d0;
        loop {
            out.push(d);
            d = self.next_in_face[d];
            if d == d0 {
                break;
            }
        }
        out
    }

    /// Next dart along the contour of the alive subgraph after `d`,
    /// rotating past tombstoned darts. Equals `phi(d)` when everything
    /// around `head(d)` is alive.
    pub fn walk_next_alive(&self, d: Dart) -> Dart {
        let mut e = self.next_cw[d ^ 1];
        while !self.dart_alive[e] {
            e = self.next_cw[e];
            debug_assert_ne!(e, d ^ 1, "no alive dart around vertex");
        }
        e
    }

    /// The dual: vertices are faces, dart ids carry over, and the dart
    /// `d` in the dual runs `face(d) → face(rev d)`. The rotation around a
    /// dual vertex is the primal face walk.
    pub fn dual(&self) -> Result<PlanarGraph, GraphError> {
        let darts = self.dart_count();
        let mut head = vec![0usize; darts];
        let mut next_cw = vec![NONE; darts];
        let mut prev_cw = vec![NONE; darts];
        for d in 0..darts {
            head[d] = self.face_of[d ^ 1];
            next_cw[d] = self.next_in_face[d];
            prev_cw[self.next_in_face[d]] = d;
        }
        let mut vertex_dart = vec![NONE; self.faces.len()];
        for d in 0..darts {
            vertex_dart[self.face_of[d]] = d;
        }
        let mut g = PlanarGraph {
            vertex_count: self.faces.len(),
            head,
            next_cw,
            prev_cw,
            dart_alive: vec![true; darts],
            face_of: vec![NONE; darts],
            next_in_face: vec![NONE; darts],
            faces: Vec::new(),
            infinite_face: NONE,
            boundary_anchor: self.boundary_anchor,
            vertex_dart,
        };
        g.rebuild_faces()?;
        Ok(g)
    }

    /// Append a new edge `u -> v` with rotation positions spliced in by the
    /// caller. Returns the forward dart id.
    fn push_edge(&mut self, u: VertexId, v: VertexId) -> Dart {
        let d = self.dart_count();
        self.head.push(v); // dart d: u -> v
        self.head.push(u); // dart d+1: v -> u
        self.next_cw.push(NONE);
        self.next_cw.push(NONE);
        self.prev_cw.push(NONE);
        self.prev_cw.push(NONE);
        self.dart_alive.push(true);
        self.dart_alive.push(true);
        self.face_of.push(NONE);
        self.face_of.push(NONE);
        self.next_in_face.push(NONE);
        self.next_in_face.push(NONE);
        d
    }

    /// Splice dart `d` into the rotation of its tail immediately before `at`.
    fn insert_before(&mut self, d: Dart, at: Dart) {
        let p = self.prev_cw[at];
        self.next_cw[p] = d;
        self.prev_cw[d] = p;
        self.next_cw[d] = at;
        self.prev_cw[at] = d;
        self.vertex_dart[self.head[d ^ 1]] = d;
    }

    /// Splice dart `d` into the rotation of its tail immediately after `at`.
    fn insert_after(&mut self, d: Dart, at: Dart) {
        let n = self.next_cw[at];
        self.next_cw[at] = d;
        self.prev_cw[d] = at;
        self.next_cw[d] = n;
        self.prev_cw[n] = d;
        self.vertex_dart[self.head[d ^ 1]] = d;
    }

    /// Unsplice both darts of the edge of `d` from their rotations and
    /// tombstone them.
    pub fn remove_edge_of(&mut self, d: Dart) {
        let e = d & !1;
        for &x in &[e, e + 1] {
            let p = self.prev_cw[x];
            let n = self.next_cw[x];
            let t = self.head[x ^ 1];
            if p == x {
                // sole dart at its tail
                self.vertex_dart[t] = NONE;
            } else {
                self.next_cw[p] = n;
                self.prev_cw[n] = p;
                if self.vertex_dart[t] == x {
                    self.vertex_dart[t] = n;
                }
            }
            self.dart_alive[x] = false;
        }
    }

    /// Add a vertex with no darts; returns its id.
    pub fn add_vertex(&mut self) -> VertexId {
        self.vertex_count += 1;
        self.vertex_dart.push(NONE);
        self.vertex_count - 1
    }

    /// The infinite-face corner of `v`: the pair (entry, exit) of boundary
    /// darts with `head(entry) = v`, `tail(exit) = v` consecutive on the
    /// boundary walk. First occurrence wins if `v` repeats on ∂G.
    pub fn boundary_corner(&self, v: VertexId) -> Result<(Dart, Dart), GraphError> {
        let walk = self.boundary_walk();
        let n = walk.len();
        for i in 0..n {
            if self.head[walk[i]] == v {
                return Ok((walk[i], walk[(i + 1) % n]));
            }
        }
        Err(GraphError::NotOnBoundary(v))
    }

    /// Attach a fresh vertex inside the infinite face, with one arc to each
    /// listed boundary vertex, inserted at that vertex's f∞ corner. The new
    /// vertex's clockwise rotation is the listed order. Returns
    /// (new vertex, forward darts center→target in list order).
    ///
    /// Capacities are the caller's business; this only rewires topology and
    /// leaves faces stale until `rebuild_faces`.
    pub fn attach_hub(
        &mut self,
        targets: &[VertexId],
    ) -> Result<(VertexId, Vec<Dart>), GraphError> {
        let corners: Vec<(Dart, Dart)> = targets
            .iter()
            .map(|&t| self.boundary_corner(t))
            .collect::<Result<_, _>>()?;
        let hub = self.add_vertex();
        let mut arc_darts = Vec::with_capacity(targets.len());
        for (&t, &(entry, _exit)) in targets.iter().zip(corners.iter()) {
            let d = self.push_edge(hub, t);
            arc_darts.push(d);
            // target side: t→hub goes into the f∞ corner, after rev(entry)
            self.insert_after(d ^ 1, entry ^ 1);
        }
        // hub side: cyclic order as listed
        let k = arc_darts.len();
        for i in 0..k {
            let d = arc_darts[i];
            let nd = arc_darts[(i + 1) % k];
            self.next_cw[d] = nd;
            self.prev_cw[nd] = d;
        }
        self.vertex_dart[hub] = arc_darts[0];
        Ok((hub, arc_darts))
    }
}

/// Fan-triangulate every finite face with more than three darts using
/// zero-capacity chords. The chord fan is rooted at the face's
/// lowest-index vertex occurrence, so output is deterministic.
pub fn triangulate(
    g: &mut PlanarGraph,
    c: &mut CapacityMap,
    log: &mut SimplificationLog,
) -> Result<(), GraphError> {
    let face_ids: Vec<FaceId> = (0..g.faces.len())
        .filter(|&f| f != g.infinite_face && g.faces[f].alive && g.faces[f].len > 3)
        .collect();
    for f in face_ids {
        // canonical walk: start from the smallest dart id on the face
        let mut start = g.faces[f].any_dart;
        {
            let mut d = start;
            loop {
                if d < start {
                    start = d;
                }
                d = g.next_in_face[d];
                if d == g.faces[f].any_dart {
                    break;
                }
            }
        }
        let mut walk = Vec::with_capacity(g.faces[f].len);
        let mut d = start;
        loop {
            walk.push(d);
            d = g.next_in_face[d];
            if d == start {
                break;
            }
        }
        // anchor: first occurrence of the smallest tail vertex with a
        // non-degenerate chord
        while walk.len() > 3 {
            let n = walk.len();
            let mut anchor = None;
            let mut best_v = usize::MAX;
            for (i, &w) in walk.iter().enumerate() {
                let v = g.tail(w);
                if v < best_v && g.head[walk[(i + 1) % n]] != v {
                    best_v = v;
                    anchor = Some(i);
                }
            }
            let p = anchor.ok_or_else(|| {
                GraphError::MalformedRotation("face not fan-triangulable".into())
            })?;
            walk.rotate_left(p);
            let a = g.tail(walk[0]);
            let x = g.head[walk[1]];
            let chord = g.push_edge(a, x);
            c.c.push(0);
            c.c.push(0);
            g.insert_before(chord, walk[0]);
            g.insert_after(chord ^ 1, walk[1] ^ 1);
            log.entries.push(LogEntry::AddedZeroCapEdge { edge: chord / 2 });
            // the cut-off triangle is (walk[0], walk[1], chord^1)
            walk = {
                let mut rest = vec![chord];
                rest.extend_from_slice(&walk[2..]);
                rest
            };
        }
    }
    g.rebuild_faces()?;
    debug_assert!(g
        .faces
        .iter()
        .enumerate()
        .all(|(i, fr)| i == g.infinite_face || !fr.alive || fr.len == 3));
    Ok(())
}

/// Remove non-terminal degree-2 vertices (merging dart chains, keeping the
/// minimum capacity per direction) and rotation-adjacent parallel edges
/// (summing capacities). Iterates to a fixpoint.
pub fn simplify(
    g: &mut PlanarGraph,
    c: &mut CapacityMap,
    protected: &[bool],
    log: &mut SimplificationLog,
) -> Result<(), GraphError> {
    loop {
        let mut changed = false;

        // degree-2 merges (no face data needed)
        let mut degree = vec![0usize; g.vertex_count];
        let mut some_dart = vec![NONE; g.vertex_count];
        for d in 0..g.dart_count() {
            if g.dart_alive[d] {
                let t = g.tail(d);
                degree[t] += 1;
                some_dart[t] = d;
            }
        }
        for v in 0..g.vertex_count {
            if degree[v] != 2 || protected.get(v).copied().unwrap_or(false) {
                continue;
            }
            let d1 = some_dart[v]; // v -> u
            let d2 = g.next_cw[d1]; // v -> w
            if !g.dart_alive[d1] || !g.dart_alive[d2] || d2 == d1 {
                continue;
            }
            let u = g.head[d1];
            let w = g.head[d2];
            if u == w || u == v || w == v {
                continue; // 2-gon or loop shape, leave for the parallel rule
            }
            let d_uv = d1 ^ 1;
            let d_vw = d2;
            let new_uw = g.push_edge(u, w);
            c.c.push(std::cmp::min(c[d_uv], c[d_vw])); // u -> w
            c.c.push(std::cmp::min(c[d_vw ^ 1], c[d_uv ^ 1])); // w -> u
            // u side: new dart replaces the slot of u->v
            g.insert_before(new_uw, d_uv);
            // w side: reverse replaces the slot of w->v
            g.insert_before(new_uw ^ 1, d_vw ^ 1);
            let anchor = g.boundary_anchor;
            if anchor == d_uv || anchor == d_vw {
                g.boundary_anchor = new_uw;
            } else if anchor == (d_uv ^ 1) || anchor == (d_vw ^ 1) {
                g.boundary_anchor = new_uw ^ 1;
            }
            g.remove_edge_of(d1);
            g.remove_edge_of(d2);
            log.entries.push(LogEntry::Deg2 {
                d_uw: new_uw,
                d_uv,
                d_vw,
            });
            degree[v] = 0;
            changed = true;
        }

        if changed {
            g.rebuild_faces()?;
        }

        // rotation-adjacent parallel edges bound 2-gon faces
        let mut merged = false;
        for f in 0..g.faces.len() {
            if !g.faces[f].alive || g.faces[f].len != 2 || f == g.infinite_face {
                continue;
            }
            let d = g.faces[f].any_dart;
            let d2 = g.next_in_face[d];
            if d / 2 == d2 / 2 {
                continue; // single-edge graph's two-dart face, not parallel
            }
            if !g.dart_alive[d] || !g.dart_alive[d2] {
                continue;
            }
            // d: u->v, d2: v->u on another edge; keep the lower edge id with
            // orientation u->v
            let (keep_uv, drop_uv) = if d / 2 < d2 / 2 { (d, d2 ^ 1) } else { (d2 ^ 1, d) };
            let kept_caps = (c[keep_uv], c[keep_uv ^ 1]);
            let removed_caps = (c[drop_uv], c[drop_uv ^ 1]);
            c[keep_uv] += removed_caps.0;
            c[keep_uv ^ 1] += removed_caps.1;
            if g.boundary_anchor / 2 == drop_uv / 2 {
                g.boundary_anchor = if g.boundary_anchor == drop_uv {
                    keep_uv
                } else {
                    keep_uv ^ 1
                };
            }
            g.remove_edge_of(drop_uv);
            log.entries.push(LogEntry::Parallel {
                kept_uv: keep_uv,
                removed_uv: drop_uv,
                kept_caps,
                removed_caps,
            });
            merged = true;
            changed = true;
            break; // face data stale; rebuild and rescan
        }
        if merged {
            g.rebuild_faces()?;
        }

        if !changed {
            break;
        }
    }
    Ok(())
}

/// Map a feasible flow on the rewritten graph back onto the graph the log
/// started from. The result is truncated to `log.base_darts` darts.
pub fn push_back_flow(log: &SimplificationLog, f_in: &FlowMap) -> Result<FlowMap, GraphError> {
    let mut f = f_in.f.clone();
    for entry in log.entries.iter().rev() {
        match entry {
            LogEntry::AddedZeroCapEdge { edge } => {
                let d = 2 * edge;
                if f[d] != 0 {
                    return Err(GraphError::InfeasiblePushback(format!(
                        "zero-capacity chord {} carries flow {}",
                        edge, f[d]
                    )));
                }
            }
            LogEntry::Deg2 { d_uw, d_uv, d_vw } => {
                let v = f[*d_uw];
                f[*d_uv] = v;
                f[*d_uv ^ 1] = -v;
                f[*d_vw] = v;
                f[*d_vw ^ 1] = -v;
                f[*d_uw] = 0;
                f[*d_uw ^ 1] = 0;
            }
            LogEntry::Parallel {
                kept_uv,
                removed_uv,
                kept_caps,
                removed_caps,
            } => {
                let total = f[*kept_uv];
                // greedy: the kept dart takes as much as it can hold
                let kept = total.clamp(-kept_caps.1, kept_caps.0);
                let rest = total - kept;
                if rest > removed_caps.0 || -rest > removed_caps.1 {
                    return Err(GraphError::InfeasiblePushback(format!(
                        "parallel split {} does not fit caps {:?}",
                        rest, removed_caps
                    )));
                }
                f[*kept_uv] = kept;
                f[*kept_uv ^ 1] = -kept;
                f[*removed_uv] = rest;
                f[*removed_uv ^ 1] = -rest;
            }
            LogEntry::SuperTerminal { edges, .. } => {
                for e in edges {
                    f[2 * e] = 0;
                    f[2 * e + 1] = 0;
                }
            }
        }
    }
    f.truncate(log.base_darts);
    Ok(FlowMap { f })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Single edge s(0)–t(1): darts 0: s->t, 1: t->s.
    fn single_edge() -> PlanarGraph {
        PlanarGraph::build(2, &[(0, 1)], &[vec![0], vec![1]], 0).unwrap()
    }

    /// Triangle s(0), u(1), t(2); e0 = s-t, e1 = s-u, e2 = u-t.
    /// Boundary walk (f∞ anchored at dart 0) is s->t->u->s.
    pub fn triangle() -> PlanarGraph {
        PlanarGraph::build(
            3,
            &[(0, 2), (0, 1), (1, 2)],
            &[vec![0, 2], vec![3, 4], vec![1, 5]],
            0,
        )
        .unwrap()
    }

    #[test]
    fn build_single_edge() {
        let g = single_edge();
        assert_eq!(g.vertex_count, 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.faces.len(), 1);
        assert_eq!(g.boundary_walk(), vec![0, 1]);
    }

    #[test]
    fn build_triangle_faces() {
        let g = triangle();
        assert_eq!(g.faces.len(), 2);
        let inner = 1 - g.infinite_face;
        assert_eq!(g.faces[inner].len, 3);
        assert_eq!(g.boundary_walk().len(), 3);
        // every boundary dart's face is the infinite face
        for d in g.boundary_walk() {
            assert_eq!(g.face_of[d], g.infinite_face);
        }
    }

    #[test]
    fn build_rejects_malformed() {
        // dart listed at the wrong vertex
        let r = PlanarGraph::build(2, &[(0, 1)], &[vec![1], vec![0]], 0);
        assert!(matches!(r, Err(GraphError::MalformedRotation(_))));
        // dart missing
        let r = PlanarGraph::build(2, &[(0, 1)], &[vec![0], vec![]], 0);
        assert!(matches!(r, Err(GraphError::MalformedRotation(_))));
        // disconnected
        let r = PlanarGraph::build(
            4,
            &[(0, 1), (2, 3)],
            &[vec![0], vec![1], vec![2], vec![3]],
            0,
        );
        assert!(matches!(r, Err(GraphError::Disconnected)));
    }

    #[test]
    fn dual_of_single_edge_is_a_loop() {
        let g = single_edge();
        let d = g.dual().unwrap();
        assert_eq!(d.vertex_count, 1);
        assert_eq!(d.edge_count(), 1);
        assert_eq!(d.head[0], 0);
        assert_eq!(d.head[1], 0);
    }

    #[test]
    fn dual_of_triangle_is_two_vertices_three_edges() {
        let g = triangle();
        let d = g.dual().unwrap();
        assert_eq!(d.vertex_count, 2);
        assert_eq!(d.edge_count(), 3);
        for e in 0..3 {
            assert_ne!(d.head[2 * e], d.head[2 * e + 1]);
        }
    }

    #[test]
    fn dual_dual_restores_primal() {
        let g = crate::gen::gen_grid(3, 3, 1, 7, 9).unwrap().graph;
        assert_eq!(g.faces.len(), 5); // 4 inner + outer
        let dd = g.dual().unwrap().dual().unwrap();
        // same rotation system; vertices renamed by the orbit correspondence
        assert_eq!(dd.next_cw, g.next_cw);
        for d in 0..g.dart_count() {
            // map dual-dual vertices back through any dart they carry
            assert_eq!(g.tail(dd.vertex_dart[dd.head[d ^ 1]]), g.tail(d));
        }
    }

    #[test]
    fn triangulate_square_adds_one_chord() {
        let mut g = PlanarGraph::build(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
            &[vec![0, 7], vec![2, 1], vec![4, 3], vec![6, 5]],
            1,
        )
        .unwrap();
        let mut c = CapacityMap::new(vec![1; 8]);
        let mut log = SimplificationLog {
            entries: Vec::new(),
            base_darts: 8,
        };
        triangulate(&mut g, &mut c, &mut log).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert_eq!(log.entries.len(), 1);
        assert_eq!(c[8], 0);
        assert_eq!(c[9], 0);
        for (i, f) in g.faces.iter().enumerate() {
            if i != g.infinite_face {
                assert_eq!(f.len, 3);
            }
        }
    }

    #[test]
    fn triangulate_kgon_adds_k_minus_3() {
        for k in 4..9 {
            let edges: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
            let rotation: Vec<Vec<usize>> = (0..k)
                .map(|i| {
                    let prev = (i + k - 1) % k;
                    vec![2 * i, 2 * prev + 1]
                })
                .collect();
            let mut g = PlanarGraph::build(k, &edges, &rotation, 1).unwrap();
            let inner = g.face_of[0];
            assert_ne!(inner, g.infinite_face);
            assert_eq!(g.faces[inner].len, k);
            let mut c = CapacityMap::new(vec![1; 2 * k]);
            let mut log = SimplificationLog {
                entries: Vec::new(),
                base_darts: 2 * k,
            };
            triangulate(&mut g, &mut c, &mut log).unwrap();
            assert_eq!(log.entries.len(), k - 3);
        }
    }

    #[test]
    fn triangulated_graph_is_untouched() {
        let mut g = triangle();
        let mut c = CapacityMap::new(vec![1; 6]);
        let mut log = SimplificationLog {
            entries: Vec::new(),
            base_darts: 6,
        };
        triangulate(&mut g, &mut c, &mut log).unwrap();
        assert!(log.entries.is_empty());
        assert_eq!(g.edge_count(), 3);
    }

    /// Path s(0)–v(1)–t(2) with the capacities from the degree-2 rule.
    fn path_graph() -> (PlanarGraph, CapacityMap) {
        let g = PlanarGraph::build(3, &[(0, 1), (1, 2)], &[vec![0], vec![1, 2], vec![3]], 0)
            .unwrap();
        // s->v 5, v->s 2, v->t 3, t->v 7
        let c = CapacityMap::new(vec![5, 2, 3, 7]);
        (g, c)
    }

    #[test]
    fn simplify_merges_degree_two_chain() {
        let (mut g, mut c) = path_graph();
        let mut log = SimplificationLog {
            entries: Vec::new(),
            base_darts: 4,
        };
        let protected = vec![true, false, true];
        simplify(&mut g, &mut c, &protected, &mut log).unwrap();
        assert_eq!(g.alive_edge_count(), 1);
        let new_dart = match log.entries[0] {
            LogEntry::Deg2 { d_uw, .. } => d_uw,
            _ => panic!("expected a chain merge"),
        };
        assert_eq!(c[new_dart], 3); // min(5, 3)
        assert_eq!(c[new_dart ^ 1], 2); // min(7, 2)
        assert_eq!(g.head[new_dart], 2);
        assert_eq!(g.tail(new_dart), 0);
        // push a flow of 3 back through the chain
        let mut f = FlowMap::zeros(g.dart_count());
        f[new_dart] = 3;
        f[new_dart ^ 1] = -3;
        let back = push_back_flow(&log, &f).unwrap();
        assert_eq!(back[0], 3);
        assert_eq!(back[2], 3);
        assert_eq!(back[1], -3);
    }

    #[test]
    fn simplify_protects_terminals() {
        let (mut g, mut c) = path_graph();
        let mut log = SimplificationLog {
            entries: Vec::new(),
            base_darts: 4,
        };
        let protected = vec![true, true, true];
        simplify(&mut g, &mut c, &protected, &mut log).unwrap();
        assert_eq!(g.alive_edge_count(), 2);
        assert!(log.entries.is_empty());
    }

    /// Two parallel edges 0–1 bounding a 2-gon.
    fn parallel_graph() -> (PlanarGraph, CapacityMap) {
        let g = PlanarGraph::build(2, &[(0, 1), (0, 1)], &[vec![0, 2], vec![1, 3]], 1).unwrap();
        let c = CapacityMap::new(vec![2, 1, 4, 6]);
        (g, c)
    }

    #[test]
    fn simplify_merges_parallel_edges() {
        let (mut g, mut c) = parallel_graph();
        let mut log = SimplificationLog {
            entries: Vec::new(),
            base_darts: 4,
        };
        simplify(&mut g, &mut c, &[true, true], &mut log).unwrap();
        assert_eq!(g.alive_edge_count(), 1);
        let kept = match log.entries[0] {
            LogEntry::Parallel { kept_uv, .. } => kept_uv,
            _ => panic!("expected a parallel merge"),
        };
        assert_eq!(c[kept], 6); // 2 + 4
        assert_eq!(c[kept ^ 1], 7); // 1 + 6
        // greedy split of a flow of 5: kept dart takes 2, removed takes 3
        let mut f = FlowMap::zeros(g.dart_count());
        f[kept] = 5;
        f[kept ^ 1] = -5;
        let back = push_back_flow(&log, &f).unwrap();
        assert_eq!(back[0], 2);
        assert_eq!(back[2], 3);
    }

    #[test]
    fn push_back_zero_flow_is_zero() {
        let (mut g, mut c) = parallel_graph();
        let mut log = SimplificationLog {
            entries: Vec::new(),
            base_darts: 4,
        };
        simplify(&mut g, &mut c, &[true, true], &mut log).unwrap();
        let f = FlowMap::zeros(g.dart_count());
        let back = push_back_flow(&log, &f).unwrap();
        assert!(back.f.iter().all(|&x| x == 0));
    }

    #[test]
    fn boundary_walk_of_grid() {
        let g = crate::gen::gen_grid(3, 3, 1, 0, 5).unwrap().graph;
        assert_eq!(g.boundary_walk().len(), 8);
    }
}
