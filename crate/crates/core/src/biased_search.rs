//! Phase-structured dual search with early stopping and reusable
//! frontiers.
//!
//! The search is Dijkstra in the split dual, driven by an offset heap and
//! an order list over the frontier faces. Within a phase, equal-priority
//! faces are processed closest-to-t first; zero-length dual darts are
//! explored depth-first, scanning clockwise from the successor of the
//! parent dart's reverse, which realizes the leftmost bias. The search
//! halts on the first confirmed arrival at b∞*; at that point the queue
//! and order hold exactly the faces adjacent to and right of the
//! rightmost flow path, with priorities that become residual capacities
//! after one offset subtraction.

use crate::dual_flow::CutPath;
use crate::instrument::Instr;
use crate::offset_heap::{HeapArena, HeapError, OffsetHeap, UNRANKED};
use crate::order_list::{OrderArena, OrderError, OrderList, OrderPos};
use crate::planar_graph::{CapacityMap, Dart, FaceId, PlanarGraph, VertexId, NONE};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BiasedError {
    #[error("terminal {0} is not on the current region boundary")]
    TerminalNotOnBoundary(VertexId),
    #[error("frontier does not match the region: {0}")]
    FrontierMismatch(String),
    #[error("sink side is unreachable from the frontier")]
    SinkUnreachable,
    #[error(transparent)]
    Heap(#[from] HeapError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Per-solve search bookkeeping shared by every augment call.
pub struct SearchState {
    /// Which frontier currently holds each face (0 = none).
    pub face_owner: Vec<u32>,
    /// Union-find over frontier ids, so merged frontiers keep their tags.
    frontier_parent: Vec<u32>,
    pub settled_epoch: Vec<u32>,
    batch_epoch: Vec<u32>,
    pub dist: Vec<i64>,
    pub parent: Vec<Dart>,
    /// Per-dart stamp: dart belongs to the a∞ arc of the current augment.
    pub a_mark: Vec<u32>,
    /// Per-edge stamp guarding one flow application per augment.
    edge_mark: Vec<u32>,
    pub epoch: u32,
    pub heap_arena: HeapArena,
    pub order_arena: OrderArena,
    pub instr: Instr,
    pub tracing: bool,
}

impl SearchState {
    pub fn new(g: &PlanarGraph, heap_arena: HeapArena, order_arena: OrderArena, instr: Instr) -> Self {
        SearchState {
            face_owner: vec![0; g.faces.len()],
            frontier_parent: vec![0],
            settled_epoch: vec![0; g.faces.len()],
            batch_epoch: vec![0; g.faces.len()],
            dist: vec![0; g.faces.len()],
            parent: vec![NONE; g.faces.len()],
            a_mark: vec![0; g.dart_count()],
            edge_mark: vec![0; g.edge_count()],
            epoch: 0,
            heap_arena,
            order_arena,
            instr,
            tracing: false,
        }
    }

    pub fn fresh_frontier_id(&mut self) -> u32 {
        let id = self.frontier_parent.len() as u32;
        self.frontier_parent.push(id);
        id
    }

    pub fn resolve(&mut self, mut id: u32) -> u32 {
        while self.frontier_parent[id as usize] != id {
            let p = self.frontier_parent[id as usize];
            self.frontier_parent[id as usize] = self.frontier_parent[p as usize];
            id = self.frontier_parent[id as usize];
        }
        id
    }

    /// After merging frontier `from` into `into`, alias the tags.
    pub fn alias(&mut self, from: u32, into: u32) {
        let r_from = self.resolve(from);
        let r_into = self.resolve(into);
        self.frontier_parent[r_from as usize] = r_into;
    }
}

/// The reusable pair (queue, order) plus the boundary darts it covers.
pub struct SearchFrontier {
    pub id: u32,
    pub heap: OffsetHeap,
    pub order: OrderList,
    /// Boundary darts of the covered arc, in s-to-t order; the hole lies on
    /// their left.
    pub arc_darts: Vec<Dart>,
    pub source: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceLine {
    pub q: i64,
    pub faces_popped: usize,
    pub darts_relaxed: usize,
}

/// Everything an augment call produces besides the mutated capacities.
pub struct BiasedSearchResult {
    pub value: i64,
    /// Rightmost flow path, s to t; empty when value = 0.
    pub rightmost_path: Vec<Dart>,
    pub cut: CutPath,
    /// Faces settled by this augment (the search tree T*).
    pub settled: Vec<FaceId>,
    /// Per-dart flow pushed (forward darts only).
    pub deltas: Vec<(Dart, i64)>,
    /// Popped-but-unsettled faces of the interrupted phase, t-most first.
    pub leftovers: Vec<FaceId>,
    pub stop_q: i64,
    pub trace: Vec<TraceLine>,
}

#[inline]
fn is_hole(g: &PlanarGraph, face: FaceId) -> bool {
    face == g.infinite_face || !g.faces[face].alive
}

/// Walk the alive contour clockwise from `s`'s hole corner to `t`,
/// returning the boundary darts (hole on the left).
pub fn contour_arc(g: &PlanarGraph, s: VertexId, t: VertexId) -> Result<Vec<Dart>, BiasedError> {
    let limit = g.dart_count() + 2;
    // candidate starting darts out of s bounding the hole
    let first = g.vertex_dart[s];
    if first == NONE {
        return Err(BiasedError::TerminalNotOnBoundary(s));
    }
    let mut start_candidates = Vec::new();
    let mut d = first;
    loop {
        if g.dart_alive[d] && is_hole(g, g.face_of[d]) {
            start_candidates.push(d);
        }
        d = g.next_cw[d];
        if d == first {
            break;
        }
    }
    for d0 in start_candidates {
        let mut arc = vec![d0];
        let mut cur = d0;
        while g.head[cur] != t {
            cur = g.walk_next_alive(cur);
            if !is_hole(g, g.face_of[cur]) || arc.len() > limit {
                arc.clear();
                break;
            }
            arc.push(cur);
            if g.head[cur] == s && arc.len() > 1 {
                // wrapped back without meeting t
                arc.clear();
                break;
            }
        }
        if !arc.is_empty() {
            return Ok(arc);
        }
    }
    Err(BiasedError::TerminalNotOnBoundary(t))
}

/// Build the starting frontier for a pair: queue and order over the faces
/// adjacent to and right of the boundary arc from `s` to `t`, priorities
/// the capacity of their cheapest bounding dart, order running s to t.
pub fn init_frontier(
    g: &PlanarGraph,
    c: &CapacityMap,
    state: &mut SearchState,
    s: VertexId,
    t: VertexId,
) -> Result<SearchFrontier, BiasedError> {
    debug_assert!(g
        .faces
        .iter()
        .enumerate()
        .all(|(i, f)| i == g.infinite_face || !f.alive || f.len == 3));
    let arc = contour_arc(g, s, t)?;
    let id = state.fresh_frontier_id();
    let mut heap = OffsetHeap::new(state.heap_arena.clone());
    let mut order = OrderList::new(state.order_arena.clone())?;
    for &d in &arc {
        let inner = g.face_of[d ^ 1];
        if is_hole(g, inner) {
            continue; // direct a-to-b crossing, handled during augment
        }
        let owner = state.face_owner[inner];
        if owner != 0 {
            let owner = state.resolve(owner);
            if owner != id {
                // the face already hangs off an older frontier; it stays
                // there (no residual path can cross the old rightmost path)
                continue;
            }
            let cur = heap.global_priority(inner)?;
            if c[d] < cur.0 {
                heap.decrease_key(inner, (c[d], UNRANKED))?;
                state.parent[inner] = d;
            }
        } else {
            heap.insert(inner, (c[d], UNRANKED))?;
            order.push_back(inner)?;
            state.face_owner[inner] = id;
            state.parent[inner] = d;
        }
    }
    Ok(SearchFrontier {
        id,
        heap,
        order,
        arc_darts: arc,
        source: s,
    })
}

/// Push the maximum flow from the frontier's covered arc to `t`. The
/// capacities are updated in place to the residual capacities; the
/// frontier is left un-finalized (call `finalize_frontier` next).
pub fn augment(
    g: &PlanarGraph,
    c: &mut CapacityMap,
    state: &mut SearchState,
    frontier: &mut SearchFrontier,
    t: VertexId,
) -> Result<BiasedSearchResult, BiasedError> {
    state.epoch += 1;
    let epoch = state.epoch;
    let my_id = state.resolve(frontier.id);

    // stamp the a-arc
    match frontier.arc_darts.last() {
        Some(&d) if g.head[d] == t => {}
        _ => {
            return Err(BiasedError::FrontierMismatch(format!(
                "frontier coverage does not end at the sink {}",
                t
            )))
        }
    }
    for &d in &frontier.arc_darts {
        if !g.dart_alive[d] || !is_hole(g, g.face_of[d]) {
            return Err(BiasedError::FrontierMismatch(format!(
                "arc dart {} is not a live boundary dart",
                d
            )));
        }
        state.a_mark[d] = epoch;
    }

    let mut best_b: Option<(i64, Dart)> = None;
    // direct crossings from the covered arc to the b-side
    for &d in &frontier.arc_darts {
        let rf = g.face_of[d ^ 1];
        if is_hole(g, rf) && state.a_mark[d ^ 1] != epoch {
            if best_b.map_or(true, |(v, _)| c[d] < v) {
                best_b = Some((c[d], d));
            }
        }
    }

    let mut settled_list: Vec<FaceId> = Vec::new();
    let mut leftovers: Vec<FaceId> = Vec::new();
    let mut trace: Vec<TraceLine> = Vec::new();
    let mut stop_q = 0i64;

    'phases: loop {
        let heap_min = frontier.heap.find_min().ok();
        match (best_b, &heap_min) {
            (Some((bv, _)), Some((_, (q, _)))) if bv < *q => break 'phases,
            (Some(_), None) => break 'phases,
            (None, None) => return Err(BiasedError::SinkUnreachable),
            _ => {}
        }
        let q = heap_min.unwrap().1 .0;
        stop_q = q;

        // pull the whole batch at priority q
        let mut batch: Vec<FaceId> = Vec::new();
        loop {
            match frontier.heap.find_min() {
                Ok((_, (p, _))) if p == q => {
                    let (item, _) = frontier.heap.delete_min().unwrap();
                    batch.push(item);
                    state.batch_epoch[item] = epoch;
                }
                _ => break,
            }
        }
        // process closest-to-t first: descending order labels
        let sorted_desc = batch
            .windows(2)
            .all(|w| frontier.order.label_of(w[0]).unwrap_or(0) > frontier.order.label_of(w[1]).unwrap_or(0));
        if !sorted_desc {
            frontier.order.sort_subset(&mut batch)?;
            batch.reverse();
        }

        let mut popped = 0usize;
        let mut relaxed = 0usize;
        let mut stopped_mid = false;
        let mut batch_pos = 0usize;

        while batch_pos < batch.len() {
            let x = batch[batch_pos];
            batch_pos += 1;
            if state.settled_epoch[x] == epoch {
                continue;
            }
            popped += 1;
            // settle x and explore 0-length darts depth-first leftmost
            let mut cursor: OrderPos = frontier.order.prev_pos(x)?;
            frontier.order.delete(x)?;
            state.settled_epoch[x] = epoch;
            state.dist[x] = q;
            settled_list.push(x);

            // DFS stack: (face, parent dart, next dart to scan)
            let mut stack: Vec<(FaceId, Dart, Dart)> = Vec::new();
            let p = state.parent[x];
            stack.push((x, p, g.next_in_face[p ^ 1]));
            while let Some(frame) = stack.last_mut() {
                let (fx, fp, scan) = *frame;
                if scan == (fp ^ 1) {
                    stack.pop();
                    continue;
                }
                frame.2 = g.next_in_face[scan];
                let o = scan;
                debug_assert_eq!(g.face_of[o], fx);
                relaxed += 1;
                let y = g.face_of[o ^ 1];
                if is_hole(g, y) {
                    if state.a_mark[o ^ 1] == epoch {
                        continue; // back into a∞
                    }
                    let cand = q + c[o];
                    if best_b.map_or(true, |(v, _)| cand < v) {
                        best_b = Some((cand, o));
                    }
                    if cand == q {
                        // confirmed arrival: stop touching anything else
                        stopped_mid = true;
                        break;
                    }
                    continue;
                }
                if state.settled_epoch[y] == epoch {
                    continue;
                }
                let nd = q + c[o];
                if state.batch_epoch[y] == epoch {
                    // pulled in this phase, not yet settled, not in heap
                    if c[o] == 0 {
                        let cpos = frontier.order.pos_of(y)?;
                        if cursor == cpos {
                            cursor = frontier.order.prev_pos(y)?;
                        }
                        frontier.order.delete(y)?;
                        state.parent[y] = o;
                        state.settled_epoch[y] = epoch;
                        state.dist[y] = q;
                        settled_list.push(y);
                        stack.push((y, o, g.next_in_face[o ^ 1]));
                    }
                    continue;
                }
                let owner = state.face_owner[y];
                if owner != 0 {
                    if state.resolve(owner) != my_id {
                        continue; // foreign standing frontier; unreachable for flow
                    }
                    let cur = frontier.heap.global_priority(y)?;
                    if nd < cur.0 {
                        if nd == q {
                            // virtually zero-length: settle now
                            frontier.heap.remove(y)?;
                            let cpos = frontier.order.pos_of(y)?;
                            if cursor == cpos {
                                cursor = frontier.order.prev_pos(y)?;
                            }
                            frontier.order.delete(y)?;
                            state.face_owner[y] = 0;
                            state.parent[y] = o;
                            state.settled_epoch[y] = epoch;
                            state.dist[y] = q;
                            settled_list.push(y);
                            stack.push((y, o, g.next_in_face[o ^ 1]));
                        } else {
                            frontier.heap.decrease_key(y, (nd, UNRANKED))?;
                            state.parent[y] = o;
                            // reposition to the shortest adjacency
                            let cpos = frontier.order.pos_of(y)?;
                            if cursor == cpos {
                                cursor = frontier.order.prev_pos(y)?;
                            }
                            frontier.order.delete(y)?;
                            cursor = frontier.order.insert_after_pos(cursor, y)?;
                        }
                    }
                    continue;
                }
                // never-visited face
                state.parent[y] = o;
                if nd == q {
                    state.settled_epoch[y] = epoch;
                    state.dist[y] = q;
                    settled_list.push(y);
                    stack.push((y, o, g.next_in_face[o ^ 1]));
                } else {
                    frontier.heap.insert(y, (nd, UNRANKED))?;
                    state.face_owner[y] = my_id;
                    cursor = frontier.order.insert_after_pos(cursor, y)?;
                }
            }
            if stopped_mid {
                // remaining pulled faces stay queued for later augments
                leftovers = batch[batch_pos..]
                    .iter()
                    .copied()
                    .filter(|&f| state.settled_epoch[f] != epoch)
                    .collect();
                if state.tracing {
                    trace.push(TraceLine {
                        q,
                        faces_popped: popped,
                        darts_relaxed: relaxed,
                    });
                }
                break 'phases;
            }
        }
        if state.tracing {
            trace.push(TraceLine {
                q,
                faces_popped: popped,
                darts_relaxed: relaxed,
            });
        }
    }

    let (value, arrival) = best_b.ok_or(BiasedError::SinkUnreachable)?;
    stop_q = stop_q.max(value);

    // trace the stop phase when nothing was popped there
    if state.tracing && value > 0 && trace.last().map_or(true, |l| l.q != value) {
        trace.push(TraceLine {
            q: value,
            faces_popped: 0,
            darts_relaxed: 0,
        });
    }

    // leftmost cut: parent chain of the arrival crossing (entry capacities)
    let mut cut_darts = vec![arrival];
    {
        let mut cf = g.face_of[arrival];
        while !is_hole(g, cf) {
            let p = state.parent[cf];
            cut_darts.push(p);
            cf = g.face_of[p];
        }
        cut_darts.reverse();
    }
    let capacity: i64 = cut_darts.iter().map(|&d| c[d]).sum();
    debug_assert_eq!(capacity, value, "cut must certify the pushed value");
    let cut = CutPath {
        darts: cut_darts,
        capacity,
    };

    // apply the flow: distance differences, with unsettled faces at |f|
    let side = |state: &SearchState, g: &PlanarGraph, d: Dart| -> i64 {
        let face = g.face_of[d];
        if is_hole(g, face) {
            if state.a_mark[d] == epoch {
                0
            } else {
                value
            }
        } else if state.settled_epoch[face] == epoch {
            state.dist[face]
        } else {
            value
        }
    };
    let mut deltas: Vec<(Dart, i64)> = Vec::new();
    let mut apply = |state: &mut SearchState, c: &mut CapacityMap, d: Dart| {
        if state.edge_mark[d / 2] == epoch {
            return;
        }
        state.edge_mark[d / 2] = epoch;
        let f = side(state, g, d ^ 1) - side(state, g, d);
        if f != 0 {
            c[d] -= f;
            c[d ^ 1] += f;
            debug_assert!(c[d] >= 0 && c[d ^ 1] >= 0);
            deltas.push((d, f));
        }
    };
    for &x in &settled_list {
        let start = g.faces[x].any_dart;
        let mut o = start;
        loop {
            apply(state, c, o);
            o = g.next_in_face[o];
            if o == start {
                break;
            }
        }
    }
    for &d in &frontier.arc_darts {
        apply(state, c, d);
    }

    // rightmost path: interface darts between the exhausted region and the
    // rest, walked from the source
    let mut rightmost_path = Vec::new();
    if value > 0 {
        let mut next_from: Vec<Dart> = Vec::new();
        let mut interface: Vec<Dart> = Vec::new();
        let left_of = |state: &SearchState, d: Dart| -> Option<i64> {
            let face = g.face_of[d];
            if is_hole(g, face) {
                if state.a_mark[d] == epoch {
                    Some(0)
                } else {
                    None
                }
            } else if state.settled_epoch[face] == epoch {
                Some(state.dist[face])
            } else {
                None
            }
        };
        let consider = |state: &SearchState, d: Dart, out: &mut Vec<Dart>| {
            if !g.dart_alive[d] {
                return;
            }
            if let Some(dl) = left_of(state, d) {
                if dl < value && side(state, g, d ^ 1) == value {
                    out.push(d);
                }
            }
        };
        for &x in &settled_list {
            if state.dist[x] >= value {
                continue;
            }
            let start = g.faces[x].any_dart;
            let mut o = start;
            loop {
                consider(state, o, &mut interface);
                o = g.next_in_face[o];
                if o == start {
                    break;
                }
            }
        }
        for &d in &frontier.arc_darts {
            consider(state, d, &mut interface);
        }
        interface.sort_unstable();
        interface.dedup();
        next_from.resize(g.vertex_count, NONE);
        let mut has_pred = vec![false; g.vertex_count];
        for &d in &interface {
            next_from[g.tail(d)] = d;
        }
        for &d in &interface {
            if next_from[g.head[d]] != NONE {
                has_pred[g.head[d]] = true;
            }
        }
        // walk from the unique start (a tail with no incoming interface dart)
        let start = interface
            .iter()
            .map(|&d| g.tail(d))
            .find(|&v| !has_pred[v])
            .unwrap_or(frontier.source);
        let mut v = start;
        for _ in 0..=interface.len() {
            let d = next_from[v];
            if d == NONE {
                break;
            }
            next_from[v] = NONE;
            rightmost_path.push(d);
            v = g.head[d];
        }
        debug_assert_eq!(
            rightmost_path.len(),
            interface.len(),
            "interface darts must form one s-to-t path"
        );
    }

    Ok(BiasedSearchResult {
        value,
        rightmost_path,
        cut,
        settled: settled_list,
        deltas,
        leftovers,
        stop_q,
        trace,
    })
}

/// Re-queue the interrupted phase's sorted leftovers with explicit ranks
/// (so resuming never re-sorts them) and shift all priorities down by the
/// pushed value; afterwards every priority is the residual capacity of the
/// face's bounding dart(s) on the rightmost path.
pub fn finalize_frontier(
    frontier: &mut SearchFrontier,
    result: &BiasedSearchResult,
) -> Result<(), BiasedError> {
    for (i, &face) in result.leftovers.iter().enumerate() {
        frontier.heap.insert(face, (result.stop_q, (i + 1) as u64))?;
    }
    if result.value != 0 {
        frontier.heap.add_offset(-result.value);
    }
    if result.value > 0 {
        frontier.arc_darts = result.rightmost_path.clone();
    }
    Ok(())
}
