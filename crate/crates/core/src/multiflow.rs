//! Top-level algorithm: terminal normalization, preprocessing, the
//! recursive multi-pair driver with frontier reuse and region splitting,
//! and the simple double-loop reference used to cross-check it.
//!
//! The driver processes source-sink pairs in clockwise order. Each pair
//! first gets a fresh frontier over its own boundary arc; when the cut of
//! an augmentation leaves the sink attached to the earlier sources'
//! component, the top two standing frontiers merge (heap merge, order
//! concatenation, boundary re-walk) and the sink is re-augmented from the
//! earlier source. Everything strictly left of the rightmost flow path,
//! the explored part right of it, and the cut darts are tombstoned after
//! every augmentation.

use crate::biased_search::{
    augment, contour_arc, finalize_frontier, init_frontier, BiasedError, BiasedSearchResult,
    SearchFrontier, SearchState, TraceLine,
};
use crate::dual_flow::{preprocess, st_max_flow, validate_terminal_order, FlowError};
use crate::instrument::new_counters;
use crate::offset_heap::{new_arena, HeapError, UNRANKED};
use crate::order_list::{new_order_arena, OrderError};
use crate::oracle;
use crate::planar_graph::{
    push_back_flow, simplify, triangulate, CapacityMap, FlowMap, GraphError, PlanarGraph,
    SimplificationLog, VertexId, NONE,
};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum MultiflowError {
    #[error("terminal group list is empty or one-sided")]
    EmptyGroup,
    #[error("terminal {0} is not on the boundary")]
    NotOnBoundary(VertexId),
    #[error("frontier invalid: {0}")]
    FrontierInvalid(String),
    #[error("region split produced an inconsistent component structure: {0}")]
    RegionDisconnected(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Biased(#[from] BiasedError),
    #[error(transparent)]
    Heap(#[from] HeapError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Alternating terminals s₁,t₁,…,s_m,t_m in clockwise boundary order.
#[derive(Debug, Clone)]
pub struct TerminalCycle {
    pub verts: Vec<VertexId>,
}

impl TerminalCycle {
    pub fn m(&self) -> usize {
        self.verts.len() / 2
    }

    /// 1-based source index.
    pub fn source(&self, i: usize) -> VertexId {
        self.verts[2 * (i - 1)]
    }

    /// 1-based sink index.
    pub fn sink(&self, j: usize) -> VertexId {
        self.verts[2 * (j - 1) + 1]
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        (1..=self.m()).map(|j| self.sink(j)).collect()
    }

    pub fn sources(&self) -> Vec<VertexId> {
        (1..=self.m()).map(|i| self.source(i)).collect()
    }
}

/// Per-pair flow values in execution order plus the final state. Entry
/// (0, 0, v) reports the net sink flow already pushed by preprocessing.
#[derive(Debug, Clone)]
pub struct PairFlowReport {
    pub pairs: Vec<(usize, usize, i64)>,
    /// Residual capacities on the prepared (normalized, simplified,
    /// triangulated) graph.
    pub final_caps: CapacityMap,
    /// Feasible flow mapped back onto the original input graph.
    pub flow: FlowMap,
    pub total: i64,
}

/// Vertex component labels after a region split (None = isolated).
#[derive(Debug, Clone)]
pub struct RegionSplit {
    pub comp: Vec<Option<u32>>,
    pub count: u32,
}

pub struct AugmentRecord {
    pub source: usize,
    pub sink: usize,
    pub value: i64,
    pub trace: Vec<TraceLine>,
}

pub struct SolveOutput {
    pub report: PairFlowReport,
    pub augments: Vec<AugmentRecord>,
    pub finite_faces: usize,
    pub heap_ops: u64,
    pub order_ops: u64,
    /// The prepared graph and its pre-flow capacities (for verification).
    pub prepared: PlanarGraph,
    pub prepared_caps: CapacityMap,
    pub cycle: TerminalCycle,
}

/// Collapse consecutive same-type terminal groups behind super-terminals
/// joined by never-saturating arcs, producing a strictly alternating
/// clockwise cycle that starts at a source.
pub fn normalize_terminals(
    g: &mut PlanarGraph,
    c: &mut CapacityMap,
    groups: &[(bool, VertexId)],
    log: &mut SimplificationLog,
) -> Result<TerminalCycle, MultiflowError> {
    if groups.is_empty()
        || !groups.iter().any(|&(s, _)| s)
        || !groups.iter().any(|&(s, _)| !s)
    {
        return Err(MultiflowError::EmptyGroup);
    }
    {
        let mut seen = std::collections::HashSet::new();
        for &(_, v) in groups {
            if !seen.insert(v) {
                return Err(MultiflowError::NotOnBoundary(v));
            }
        }
    }
    let verts: Vec<VertexId> = groups.iter().map(|&(_, v)| v).collect();
    validate_terminal_order(g, &verts)?;

    // rotate so position 0 starts a run
    let n = groups.len();
    let start = (0..n)
        .find(|&i| groups[(i + n - 1) % n].0 != groups[i].0)
        .expect("both types present");
    let rotated: Vec<(bool, VertexId)> = (0..n).map(|i| groups[(start + i) % n]).collect();

    let mut cycle: Vec<(bool, VertexId)> = Vec::new();
    let mut i = 0;
    while i < n {
        let ty = rotated[i].0;
        let mut j = i;
        while j + 1 < n && rotated[j + 1].0 == ty {
            j += 1;
        }
        let members: Vec<VertexId> = rotated[i..=j].iter().map(|&(_, v)| v).collect();
        if members.len() == 1 {
            cycle.push((ty, members[0]));
        } else {
            let big = c.big();
            // hub rotation: first member, then the rest in reverse order
            let mut targets = vec![members[0]];
            targets.extend(members[1..].iter().rev());
            let (hub, arcs) = g.attach_hub(&targets)?;
            for _ in &arcs {
                if ty {
                    c.c.push(big); // super-source feeds each member
                    c.c.push(0);
                } else {
                    c.c.push(0);
                    c.c.push(big); // members feed the super-sink
                }
            }
            g.boundary_anchor = arcs[0] ^ 1;
            g.rebuild_faces()?;
            log.entries.push(crate::planar_graph::LogEntry::SuperTerminal {
                vertex: hub,
                edges: arcs.iter().map(|&d| d / 2).collect(),
            });
            cycle.push((ty, hub));
        }
        i = j + 1;
    }
    if cycle.len() % 2 != 0 || cycle.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(MultiflowError::RegionDisconnected(
            "collapsed terminals do not alternate".into(),
        ));
    }
    // start at a source
    let s0 = cycle.iter().position(|&(ty, _)| ty).unwrap();
    let verts: Vec<VertexId> = (0..cycle.len())
        .map(|k| cycle[(s0 + k) % cycle.len()].1)
        .collect();
    Ok(TerminalCycle { verts })
}

/// Shared preparation: normalize, simplify, triangulate, preprocess.
/// Returns the prepared graph/caps, the cycle, the rewrite log, the
/// preprocessed capacities c₀ and the net preprocessing flow into sinks.
pub fn prepare(
    g0: &PlanarGraph,
    c0_in: &CapacityMap,
    groups: &[(bool, VertexId)],
) -> Result<
    (
        PlanarGraph,
        CapacityMap,
        TerminalCycle,
        SimplificationLog,
        CapacityMap,
        i64,
    ),
    MultiflowError,
> {
    let mut g = g0.clone();
    let mut c = c0_in.clone();
    let mut log = SimplificationLog {
        entries: Vec::new(),
        base_darts: g.dart_count(),
    };
    let cycle = normalize_terminals(&mut g, &mut c, groups, &mut log)?;
    let mut protected = vec![false; g.vertex_count];
    for &v in &cycle.verts {
        protected[v] = true;
    }
    simplify(&mut g, &mut c, &protected, &mut log)?;
    triangulate(&mut g, &mut c, &mut log)?;
    let c_res = preprocess(&g, &c, &cycle.verts, None)?;
    let pre_flow = FlowMap::from_residual(&c, &c_res);
    let pre_net = net_into(&g, &pre_flow, &cycle.sinks());
    Ok((g, c, cycle, log, c_res, pre_net))
}

pub fn net_into(g: &PlanarGraph, f: &FlowMap, verts: &[VertexId]) -> i64 {
    let mut want = vec![false; g.vertex_count];
    for &v in verts {
        want[v] = true;
    }
    let mut net = 0;
    for d in 0..g.dart_count() {
        if g.dart_alive[d] && want[g.head[d]] {
            net += f[d];
        }
    }
    net
}

/// The simple double loop: for each sink in clockwise order, saturate
/// flows from its own source backwards to the first, each via the full
/// dual shortest-path computation. The ground truth for the recursive
/// driver.
pub fn abstract_flow_reference(
    g0: &PlanarGraph,
    c0: &CapacityMap,
    groups: &[(bool, VertexId)],
    mut observer: Option<&mut dyn FnMut(usize, usize, &PlanarGraph, &CapacityMap)>,
) -> Result<PairFlowReport, MultiflowError> {
    let (g, c_entry, cycle, log, c_res, pre_net) = prepare(g0, c0, groups)?;
    let mut cur = c_res;
    let mut pairs = Vec::new();
    if pre_net != 0 {
        pairs.push((0, 0, pre_net));
    }
    if let Some(ob) = observer.as_deref_mut() {
        ob(0, 0, &g, &cur);
    }
    let m = cycle.m();
    let mut total = pre_net;
    for j in 1..=m {
        for i in (1..=j).rev() {
            let (f, v, _, _) = st_max_flow(&g, &cur, cycle.source(i), cycle.sink(j))?;
            for d in 0..g.dart_count() {
                cur[d] -= f[d];
            }
            pairs.push((i, j, v));
            total += v;
            if let Some(ob) = observer.as_deref_mut() {
                ob(i, j, &g, &cur);
            }
        }
    }
    let flow_prepared = FlowMap::from_residual(&c_entry, &cur);
    let flow = push_back_flow(&log, &flow_prepared)?;
    Ok(PairFlowReport {
        pairs,
        final_caps: cur,
        flow,
        total,
    })
}

/// Tombstone the searched region: settled faces die, every dart with both
/// sides dead (or on the covered arc's hole) dies, the cut darts die.
/// Returns component labels of the remaining alive graph.
pub fn split_region(
    g: &mut PlanarGraph,
    result: &BiasedSearchResult,
) -> RegionSplit {
    for &x in &result.settled {
        g.faces[x].alive = false;
    }
    let hole = |g: &PlanarGraph, f: usize| f == g.infinite_face || !g.faces[f].alive;
    for &x in &result.settled {
        let start = g.faces[x].any_dart;
        let mut o = start;
        loop {
            let next = g.next_in_face[o];
            if g.dart_alive[o] && hole(g, g.face_of[o ^ 1]) {
                g.remove_edge_of(o);
            }
            o = next;
            if o == start {
                break;
            }
        }
    }
    for &d in &result.cut.darts {
        debug_assert!(hole(g, g.face_of[d]) && hole(g, g.face_of[d ^ 1]));
        if g.dart_alive[d] {
            g.remove_edge_of(d);
        }
    }
    // component labels over alive darts
    let mut comp: Vec<Option<u32>> = vec![None; g.vertex_count];
    let mut count = 0u32;
    let mut stack = Vec::new();
    for v0 in 0..g.vertex_count {
        if comp[v0].is_some() || g.vertex_dart[v0] == NONE {
            continue;
        }
        comp[v0] = Some(count);
        stack.push(v0);
        while let Some(v) = stack.pop() {
            let first = g.vertex_dart[v];
            if first == NONE {
                continue;
            }
            let mut d = first;
            loop {
                debug_assert!(g.dart_alive[d]);
                let w = g.head[d];
                if comp[w].is_none() {
                    comp[w] = Some(count);
                    stack.push(w);
                }
                d = g.next_cw[d];
                if d == first {
                    break;
                }
            }
        }
        count += 1;
    }
    RegionSplit { comp, count }
}

struct StackSource {
    index: usize,
    frontier: SearchFrontier,
}

#[derive(Clone)]
struct PendingPair {
    sink_idx: usize,
    source_idx: usize,
    s: VertexId,
    t: VertexId,
    use_top: bool,
}

struct Frame {
    sources: Vec<StackSource>,
    pairs: VecDeque<PendingPair>,
}

/// Run the full pipeline and the recursive driver.
pub fn solve(
    g0: &PlanarGraph,
    c0: &CapacityMap,
    groups: &[(bool, VertexId)],
    tracing: bool,
    mut observer: Option<&mut dyn FnMut(&PlanarGraph, &CapacityMap)>,
) -> Result<SolveOutput, MultiflowError> {
    let instr = new_counters();
    let (mut g, c_entry, cycle, log, c_res, pre_net) = prepare(g0, c0, groups)?;
    let finite_faces = g.faces.len().saturating_sub(1);
    let mut cur = c_res.clone();
    let heap_arena = new_arena(instr.clone());
    let order_arena = new_order_arena(instr.clone());
    let mut state = SearchState::new(&g, heap_arena, order_arena, instr.clone());
    state.tracing = tracing;

    let mut pairs_out: Vec<(usize, usize, i64)> = Vec::new();
    let mut augments: Vec<AugmentRecord> = Vec::new();
    if pre_net != 0 {
        pairs_out.push((0, 0, pre_net));
    }

    let m = cycle.m();
    let all_pairs: VecDeque<PendingPair> = (1..=m)
        .map(|j| PendingPair {
            sink_idx: j,
            source_idx: j,
            s: cycle.source(j),
            t: cycle.sink(j),
            use_top: false,
        })
        .collect();
    let mut frames: Vec<Frame> = vec![Frame {
        sources: Vec::new(),
        pairs: all_pairs,
    }];

    while let Some(frame_idx) = frames.len().checked_sub(1) {
        let pp = match frames[frame_idx].pairs.pop_front() {
            Some(p) => p,
            None => {
                frames.pop();
                continue;
            }
        };
        if !pp.use_top {
            // terminals may have been exhausted entirely
            if g.vertex_dart[pp.s] == NONE || g.vertex_dart[pp.t] == NONE {
                pairs_out.push((pp.source_idx, pp.sink_idx, 0));
                augments.push(AugmentRecord {
                    source: pp.source_idx,
                    sink: pp.sink_idx,
                    value: 0,
                    trace: Vec::new(),
                });
                continue;
            }
            let fr = init_frontier(&g, &cur, &mut state, pp.s, pp.t)?;
            frames[frame_idx].sources.push(StackSource {
                index: pp.source_idx,
                frontier: fr,
            });
        }
        let top_index = frames[frame_idx].sources.last().unwrap().index;
        let result = {
            let top = frames[frame_idx].sources.last_mut().unwrap();
            augment(&g, &mut cur, &mut state, &mut top.frontier, pp.t)?
        };
        pairs_out.push((top_index, pp.sink_idx, result.value));
        augments.push(AugmentRecord {
            source: top_index,
            sink: pp.sink_idx,
            value: result.value,
            trace: result.trace.clone(),
        });
        if let Some(ob) = observer.as_deref_mut() {
            ob(&g, &cur);
        }
        {
            let top = frames[frame_idx].sources.last_mut().unwrap();
            finalize_frontier(&mut top.frontier, &result)?;
        }
        let split = split_region(&mut g, &result);

        // prune the top frontier to the component that keeps its coverage
        let g1_comp = {
            let top = frames[frame_idx].sources.last_mut().unwrap();
            top.frontier.arc_darts.retain(|&d| g.dart_alive[d]);
            let anchor = top
                .frontier
                .arc_darts
                .first()
                .map(|&d| g.tail(d))
                .unwrap_or(top.frontier.source);
            if let Some(&d0) = top.frontier.arc_darts.first() {
                top.frontier.source = g.tail(d0);
            }
            split.comp[anchor]
        };
        {
            let top = frames[frame_idx].sources.last_mut().unwrap();
            let members = top.frontier.order.to_vec();
            for f in members {
                let alive = g.faces[f].alive;
                let fcomp = if alive {
                    split.comp[g.tail(g.faces[f].any_dart)]
                } else {
                    None
                };
                if !alive || fcomp != g1_comp || g1_comp.is_none() {
                    if top.frontier.heap.contains(f) {
                        top.frontier.heap.remove(f)?;
                    }
                    top.frontier.order.delete(f)?;
                    state.face_owner[f] = 0;
                }
            }
        }

        let t_comp = if g.vertex_dart[pp.t] != NONE {
            split.comp[pp.t]
        } else {
            None
        };
        let pinch = t_comp.is_some() && t_comp == g1_comp && g1_comp.is_some();

        // partition the remaining pairs of this frame by component
        let rem: Vec<PendingPair> = frames[frame_idx].pairs.drain(..).collect();
        let mut g1_pairs: VecDeque<PendingPair> = VecDeque::new();
        let mut runs: Vec<(u32, VecDeque<PendingPair>)> = Vec::new();
        for p in rem {
            let cs = if g.vertex_dart[p.s] != NONE {
                split.comp[p.s]
            } else {
                None
            };
            let ct = if g.vertex_dart[p.t] != NONE {
                split.comp[p.t]
            } else {
                None
            };
            if cs.is_none() || ct.is_none() {
                g1_pairs.push_back(p); // zero-value guard handles it later
                continue;
            }
            if cs != ct {
                return Err(MultiflowError::RegionDisconnected(format!(
                    "pair ({}, {}) straddles components",
                    p.s, p.t
                )));
            }
            if cs == g1_comp {
                g1_pairs.push_back(p);
            } else {
                let comp_id = cs.unwrap();
                match runs.last_mut() {
                    Some((id, run)) if *id == comp_id => run.push_back(p),
                    _ => runs.push((comp_id, VecDeque::from(vec![p]))),
                }
            }
        }
        frames[frame_idx].pairs = g1_pairs;

        if pinch {
            if !runs.is_empty() {
                return Err(MultiflowError::RegionDisconnected(
                    "sink stayed attached but other components hold pairs".into(),
                ));
            }
            if frames[frame_idx].sources.len() >= 2 {
                // descend: merge the exhausted top frontier into the one
                // below and push the same sink again from the earlier source
                let top = frames[frame_idx].sources.pop().unwrap();
                let below = frames[frame_idx].sources.last_mut().unwrap();
                below.frontier.heap.merge(top.frontier.heap, 0)?;
                below.frontier.order.append_right(top.frontier.order)?;
                state.alias(top.frontier.id, below.frontier.id);
                extend_coverage(&g, &cur, &mut state, &mut below.frontier, pp.t)?;
                let below_idx = below.index;
                let below_src = below.frontier.source;
                frames[frame_idx].pairs.push_front(PendingPair {
                    sink_idx: pp.sink_idx,
                    source_idx: below_idx,
                    s: below_src,
                    t: pp.t,
                    use_top: true,
                });
            }
        }
        // detached components with pairs recurse first (their sinks come
        // earlier in clockwise order); reverse keeps run order
        for (_, run) in runs.into_iter().rev() {
            frames.push(Frame {
                sources: Vec::new(),
                pairs: run,
            });
        }
    }

    let total: i64 = pairs_out.iter().map(|&(_, _, v)| v).sum();
    let flow_prepared = FlowMap::from_residual(&c_entry, &cur);
    let flow = push_back_flow(&log, &flow_prepared)?;
    Ok(SolveOutput {
        report: PairFlowReport {
            pairs: pairs_out,
            final_caps: cur,
            flow,
            total,
        },
        augments,
        finite_faces,
        heap_ops: instr.heap_ops(),
        order_ops: instr.order_ops(),
        prepared: g,
        prepared_caps: c_entry,
        cycle,
    })
}

/// After a merge, re-walk the boundary from the surviving coverage start to
/// the next sink, adding missing frontier faces with their boundary-dart
/// residual as priority.
fn extend_coverage(
    g: &PlanarGraph,
    c: &CapacityMap,
    state: &mut SearchState,
    frontier: &mut SearchFrontier,
    t: VertexId,
) -> Result<(), MultiflowError> {
    let arc = contour_arc(g, frontier.source, t)?;
    let id = state.resolve(frontier.id);
    let mut cursor = frontier.order.front_anchor();
    for &d in &arc {
        let inner = g.face_of[d ^ 1];
        if inner == g.infinite_face || !g.faces[inner].alive {
            continue;
        }
        let owner = state.face_owner[inner];
        if owner == 0 {
            frontier.heap.insert(inner, (c[d], UNRANKED))?;
            cursor = frontier.order.insert_after_pos(cursor, inner)?;
            state.face_owner[inner] = id;
            state.parent[inner] = d;
        } else if state.resolve(owner) == id {
            let curp = frontier.heap.global_priority(inner)?;
            if c[d] < curp.0 {
                frontier.heap.decrease_key(inner, (c[d], UNRANKED))?;
                state.parent[inner] = d;
            }
            cursor = frontier.order.pos_of(inner)?;
        }
    }
    frontier.arc_darts = arc;
    Ok(())
}

/// Full pipeline, reporting on the original graph.
pub fn max_multiflow(
    g: &PlanarGraph,
    c: &CapacityMap,
    groups: &[(bool, VertexId)],
) -> Result<PairFlowReport, MultiflowError> {
    Ok(solve(g, c, groups, false, None)?.report)
}

/// Convenience: oracle optimum for the same instance (super-terminal
/// Edmonds-Karp on the raw input).
pub fn oracle_optimum(g: &PlanarGraph, c: &CapacityMap, groups: &[(bool, VertexId)]) -> i64 {
    let sources: Vec<VertexId> = groups.iter().filter(|&&(s, _)| s).map(|&(_, v)| v).collect();
    let sinks: Vec<VertexId> = groups.iter().filter(|&&(s, _)| !s).map(|&(_, v)| v).collect();
    oracle::max_flow_bfs(g, c, &sources, &sinks)
}
