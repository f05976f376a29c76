//! Text formats: instance files and flow files.
//!
//! Instance grammar (LF line endings, single spaces, ASCII decimal):
//!
//! ```text
//! planarflow v1
//! V <n> E <m>
//! R <v> <d...>            one line per vertex, darts clockwise
//! E <e> <u> <v> <c_uv> <c_vu>   one line per edge; dart 2e runs u->v
//! F <dart>                a dart on the infinite face (traced clockwise)
//! T <tok...>              s<id> / t<id>, clockwise boundary order
//! ```
//!
//! Parse → serialize → parse is the identity.

use crate::planar_graph::{CapacityMap, PlanarGraph, VertexId};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum InstanceError {
    /// Malformed text (exit code 2).
    #[error("parse error: {0}")]
    Syntax(String),
    /// Well-formed text describing a bad instance (exit code 3).
    #[error("invalid instance: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: PlanarGraph,
    pub caps: CapacityMap,
    /// (is_source, vertex) in clockwise boundary order; same-type runs allowed.
    pub terminals: Vec<(bool, VertexId)>,
}

pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let syn = |m: String| InstanceError::Syntax(m);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| syn("empty file".into()))?;
    if header != "planarflow v1" {
        return Err(syn(format!("bad header {:?}", header)));
    }
    let sizes = lines.next().ok_or_else(|| syn("missing V/E line".into()))?;
    let toks: Vec<&str> = sizes.split(' ').collect();
    if toks.len() != 4 || toks[0] != "V" || toks[2] != "E" {
        return Err(syn(format!("bad size line {:?}", sizes)));
    }
    let n: usize = toks[1].parse().map_err(|_| syn("bad vertex count".into()))?;
    let m: usize = toks[3].parse().map_err(|_| syn("bad edge count".into()))?;

    let mut rotation: Vec<Vec<usize>> = Vec::with_capacity(n);
    for v in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| syn(format!("missing R line for vertex {}", v)))?;
        let toks: Vec<&str> = line.split(' ').collect();
        if toks.len() < 2 || toks[0] != "R" {
            return Err(syn(format!("bad R line {:?}", line)));
        }
        let vid: usize = toks[1].parse().map_err(|_| syn("bad vertex id".into()))?;
        if vid != v {
            return Err(syn(format!("R lines out of order: expected {}, got {}", v, vid)));
        }
        let darts = toks[2..]
            .iter()
            .map(|t| t.parse::<usize>().map_err(|_| syn("bad dart id".into())))
            .collect::<Result<Vec<_>, _>>()?;
        rotation.push(darts);
    }

    let mut edges = Vec::with_capacity(m);
    let mut caps = Vec::with_capacity(2 * m);
    for e in 0..m {
        let line = lines
            .next()
            .ok_or_else(|| syn(format!("missing E line for edge {}", e)))?;
        let toks: Vec<&str> = line.split(' ').collect();
        if toks.len() != 6 || toks[0] != "E" {
            return Err(syn(format!("bad E line {:?}", line)));
        }
        let eid: usize = toks[1].parse().map_err(|_| syn("bad edge id".into()))?;
        if eid != e {
            return Err(syn(format!("E lines out of order at {}", e)));
        }
        let u: usize = toks[2].parse().map_err(|_| syn("bad endpoint".into()))?;
        let v: usize = toks[3].parse().map_err(|_| syn("bad endpoint".into()))?;
        let cuv: i64 = toks[4].parse().map_err(|_| syn("bad capacity".into()))?;
        let cvu: i64 = toks[5].parse().map_err(|_| syn("bad capacity".into()))?;
        if cuv < 0 || cvu < 0 {
            return Err(InstanceError::Invalid(format!("negative capacity on edge {}", e)));
        }
        edges.push((u, v));
        caps.push(cuv);
        caps.push(cvu);
    }

    let fline = lines.next().ok_or_else(|| syn("missing F line".into()))?;
    let toks: Vec<&str> = fline.split(' ').collect();
    if toks.len() != 2 || toks[0] != "F" {
        return Err(syn(format!("bad F line {:?}", fline)));
    }
    let fdart: usize = toks[1].parse().map_err(|_| syn("bad F dart".into()))?;

    let tline = lines.next().ok_or_else(|| syn("missing T line".into()))?;
    let toks: Vec<&str> = tline.split(' ').collect();
    if toks.is_empty() || toks[0] != "T" || toks.len() < 2 {
        return Err(syn(format!("bad T line {:?}", tline)));
    }
    let mut terminals = Vec::new();
    for t in &toks[1..] {
        let (is_source, rest) = match t.chars().next() {
            Some('s') => (true, &t[1..]),
            Some('t') => (false, &t[1..]),
            _ => return Err(syn(format!("bad terminal token {:?}", t))),
        };
        let v: usize = rest.parse().map_err(|_| syn("bad terminal id".into()))?;
        if v >= n {
            return Err(InstanceError::Invalid(format!("terminal {} out of range", v)));
        }
        terminals.push((is_source, v));
    }
    if let Some(extra) = lines.next() {
        if !extra.is_empty() {
            return Err(syn(format!("trailing content {:?}", extra)));
        }
    }

    if fdart >= 2 * m {
        return Err(InstanceError::Invalid("F dart out of range".into()));
    }
    let graph = PlanarGraph::build(n, &edges, &rotation, fdart)
        .map_err(|e| InstanceError::Invalid(e.to_string()))?;
    Ok(Instance {
        graph,
        caps: CapacityMap::new(caps),
        terminals,
    })
}

pub fn serialize_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut out = String::new();
    out.push_str("planarflow v1\n");
    let _ = writeln!(out, "V {} E {}", g.vertex_count, g.edge_count());
    for v in 0..g.vertex_count {
        let _ = write!(out, "R {}", v);
        let first = g.vertex_dart[v];
        if first != crate::planar_graph::NONE {
            let mut d = first;
            loop {
                let _ = write!(out, " {}", d);
                d = g.next_cw[d];
                if d == first {
                    break;
                }
            }
        }
        out.push('\n');
    }
    for e in 0..g.edge_count() {
        let _ = writeln!(
            out,
            "E {} {} {} {} {}",
            e,
            g.head[2 * e + 1],
            g.head[2 * e],
            inst.caps[2 * e],
            inst.caps[2 * e + 1]
        );
    }
    let _ = writeln!(out, "F {}", g.boundary_anchor);
    out.push('T');
    for &(is_source, v) in &inst.terminals {
        let _ = write!(out, " {}{}", if is_source { 's' } else { 't' }, v);
    }
    out.push('\n');
    out
}

/// Flow file: total value, per-pair values in execution order, then one
/// net flow per edge (signed, tail-to-head on dart 2e).
pub fn serialize_flow(pairs: &[(usize, usize, i64)], total: i64, nets: &[i64]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "value {}", total);
    for &(i, j, v) in pairs {
        let _ = writeln!(out, "pair {} {} {}", i, j, v);
    }
    for (e, net) in nets.iter().enumerate() {
        let _ = writeln!(out, "e {} {}", e, net);
    }
    out
}

pub struct FlowFile {
    pub total: i64,
    pub pairs: Vec<(usize, usize, i64)>,
    pub nets: Vec<i64>,
}

pub fn parse_flow(text: &str) -> Result<FlowFile, InstanceError> {
    let syn = |m: String| InstanceError::Syntax(m);
    let mut total = None;
    let mut pairs = Vec::new();
    let mut nets = Vec::new();
    for line in text.lines() {
        let toks: Vec<&str> = line.split(' ').collect();
        match toks.first() {
            Some(&"value") if toks.len() == 2 => {
                total = Some(toks[1].parse::<i64>().map_err(|_| syn("bad value".into()))?);
            }
            Some(&"pair") if toks.len() == 4 => {
                let i = toks[1].parse().map_err(|_| syn("bad pair".into()))?;
                let j = toks[2].parse().map_err(|_| syn("bad pair".into()))?;
                let v = toks[3].parse().map_err(|_| syn("bad pair".into()))?;
                pairs.push((i, j, v));
            }
            Some(&"e") if toks.len() == 3 => {
                let e: usize = toks[1].parse().map_err(|_| syn("bad edge".into()))?;
                if e != nets.len() {
                    return Err(syn("edge lines out of order".into()));
                }
                nets.push(toks[2].parse().map_err(|_| syn("bad net".into()))?);
            }
            _ => return Err(syn(format!("bad flow line {:?}", line))),
        }
    }
    Ok(FlowFile {
        total: total.ok_or_else(|| syn("missing value line".into()))?,
        pairs,
        nets,
    })
}
