//! Source-stream-sink orientations: representation, degree accounting,
//! validity, oriented-cycle detection and removal, and exhaustive enumeration
//! at desk scale.
//!
//! An orientation lives on a subgraph H of G and assigns each H-edge one of
//! three modes: a source is oriented into both endpoints, a stream into exactly
//! one, a sink into neither. Validity for dimension d asks every H-vertex to
//! have degree at least d+1 and in-degree exactly d, with no oriented cycles
//! among the streams.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum EdgeMode {
    /// Oriented into both endpoints.
    Source,
    /// Oriented into `into`, out of the other endpoint.
    Stream { into: u32 },
    /// Oriented out of both endpoints.
    Sink,
}

/// Per-edge mode assignment over a subgraph H (the key set).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Orientation {
    modes: BTreeMap<Edge, EdgeMode>,
}

impl Orientation {
    pub fn new(modes: BTreeMap<Edge, EdgeMode>) -> Result<Orientation> {
        for (e, m) in &modes {
            if let EdgeMode::Stream { into } = m {
                if !e.touches(*into) {
                    return Err(Error::InvalidOrientation(format!(
                        "stream {e} into {into}, which is not an endpoint"
                    )));
                }
            }
            if e.a == e.b {
                return Err(Error::InvalidOrientation(format!("loop edge {e}")));
            }
        }
        Ok(Orientation { modes })
    }

    pub fn from_pairs(pairs: &[((u32, u32), EdgeMode)]) -> Result<Orientation> {
        Orientation::new(
            pairs
                .iter()
                .map(|&((i, j), m)| (Edge::new(i, j), m))
                .collect(),
        )
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Edge, &EdgeMode)> {
        self.modes.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.modes.len()
    }

    pub fn mode(&self, e: Edge) -> Option<EdgeMode> {
        self.modes.get(&e).copied()
    }

    /// Vertices incident to at least one H-edge, ascending.
    pub fn vertices(&self) -> Vec<u32> {
        let mut vs = BTreeSet::new();
        for e in self.modes.keys() {
            vs.insert(e.a);
            vs.insert(e.b);
        }
        vs.into_iter().collect()
    }

    pub fn is_oriented_into(&self, e: Edge, v: u32) -> bool {
        debug_assert!(e.touches(v));
        match self.modes[&e] {
            EdgeMode::Source => true,
            EdgeMode::Stream { into } => into == v,
            EdgeMode::Sink => false,
        }
    }

    pub fn degree(&self, v: u32) -> usize {
        self.modes.keys().filter(|e| e.touches(v)).count()
    }

    pub fn in_degree(&self, v: u32) -> usize {
        self.modes
            .keys()
            .filter(|e| e.touches(v) && self.is_oriented_into(**e, v))
            .count()
    }

    pub fn out_degree(&self, v: u32) -> usize {
        self.degree(v) - self.in_degree(v)
    }

    /// Edges oriented into v, ascending.
    pub fn edges_into(&self, v: u32) -> Vec<Edge> {
        self.modes
            .keys()
            .filter(|e| e.touches(v) && self.is_oriented_into(**e, v))
            .copied()
            .collect()
    }

    /// Edges oriented out of v, ascending.
    pub fn edges_out_of(&self, v: u32) -> Vec<Edge> {
        self.modes
            .keys()
            .filter(|e| e.touches(v) && !self.is_oriented_into(**e, v))
            .copied()
            .collect()
    }

    pub fn sources(&self) -> Vec<Edge> {
        self.by_mode(|m| matches!(m, EdgeMode::Source))
    }

    pub fn sinks(&self) -> Vec<Edge> {
        self.by_mode(|m| matches!(m, EdgeMode::Sink))
    }

    /// Streams as (edge, into) pairs, ascending by edge.
    pub fn streams(&self) -> Vec<(Edge, u32)> {
        self.modes
            .iter()
            .filter_map(|(e, m)| match m {
                EdgeMode::Stream { into } => Some((*e, *into)),
                _ => None,
            })
            .collect()
    }

    /// Replaces one edge's mode, used by cycle removal.
    fn set_mode(&mut self, e: Edge, m: EdgeMode) {
        self.modes.insert(e, m);
    }

    fn by_mode(&self, pred: impl Fn(&EdgeMode) -> bool) -> Vec<Edge> {
        self.modes
            .iter()
            .filter(|(_, m)| pred(m))
            .map(|(e, _)| *e)
            .collect()
    }
}

/// Per-vertex accounting plus the validity verdict.
#[derive(Clone, Debug, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub acyclic: bool,
    pub per_vertex: BTreeMap<u32, VertexDegrees>,
    pub violations: Vec<String>,
    pub sources: Vec<Edge>,
    pub sinks: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VertexDegrees {
    pub degree: usize,
    pub in_degree: usize,
}

/// Full validity report for dimension d: H-vertices need degree >= d+1 and
/// in-degree exactly d, and the streams must be acyclic. The empty subgraph is
/// invalid (the certificate machinery needs at least one sink to exist).
pub fn check_validity(o: &Orientation, g: &Graph, d: u32) -> Result<ValidityReport> {
    for (e, _) in o.edges() {
        if !g.has_edge(*e) {
            return Err(Error::EdgeNotInGraph(*e));
        }
    }
    let mut violations = Vec::new();
    let mut per_vertex = BTreeMap::new();
    if o.edge_count() == 0 {
        violations.push("empty subgraph".to_string());
    }
    for v in o.vertices() {
        let degree = o.degree(v);
        let in_degree = o.in_degree(v);
        per_vertex.insert(v, VertexDegrees { degree, in_degree });
        if degree < d as usize + 1 {
            violations.push(format!("vertex {v} has degree {degree} < {}", d + 1));
        }
        if in_degree != d as usize {
            violations.push(format!("vertex {v} has in-degree {in_degree} != {d}"));
        }
    }
    let cycle = find_oriented_cycle(o);
    let acyclic = cycle.is_none();
    if let Some(c) = cycle {
        let desc: Vec<String> = c.iter().map(|(e, v)| format!("{e}_{v}")).collect();
        violations.push(format!("oriented cycle: {}", desc.join(", ")));
    }
    Ok(ValidityReport {
        valid: violations.is_empty(),
        acyclic,
        per_vertex,
        violations,
        sources: o.sources(),
        sinks: o.sinks(),
    })
}

/// Finds an oriented cycle of streams: an ordered list mu_1..mu_{l+1} with
/// mu_{l+1} = mu_1 where each stream enters the vertex the next one exits.
/// Returns the closed list, or None. Deterministic (DFS over ascending arcs).
pub fn find_oriented_cycle(o: &Orientation) -> Option<Vec<(Edge, u32)>> {
    // vertex digraph: stream (i,j)_i gives an arc from j (exit) to i (entry)
    let mut arcs: BTreeMap<u32, Vec<(u32, Edge)>> = BTreeMap::new();
    for (e, into) in o.streams() {
        arcs.entry(e.other(into)).or_default().push((into, e));
    }
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Active,
        Done,
    }
    let mut state: BTreeMap<u32, State> = BTreeMap::new();
    let vertices: Vec<u32> = arcs.keys().copied().collect();
    for &start in &vertices {
        if state.contains_key(&start) {
            continue;
        }
        let mut stack: Vec<(u32, usize)> = vec![(start, 0)];
        let mut path: Vec<(Edge, u32)> = Vec::new();
        state.insert(start, State::Active);
        while let Some((v, next)) = stack.last().copied() {
            let out = arcs.get(&v).map(|a| a.as_slice()).unwrap_or(&[]);
            if next >= out.len() {
                state.insert(v, State::Done);
                stack.pop();
                path.pop();
                continue;
            }
            stack.last_mut().unwrap().1 += 1;
            let (to, edge) = out[next];
            match state.get(&to) {
                Some(State::Active) => {
                    path.push((edge, to));
                    let pos = stack.iter().position(|(u, _)| *u == to).unwrap();
                    let mut cycle: Vec<(Edge, u32)> = path[pos..].to_vec();
                    let first = cycle[0];
                    cycle.push(first);
                    return Some(cycle);
                }
                None => {
                    state.insert(to, State::Active);
                    path.push((edge, to));
                    stack.push((to, 0));
                }
                Some(State::Done) => {}
            }
        }
    }
    None
}

/// Removes oriented cycles while preserving every vertex's degree and
/// in-degree: each removal turns the cycle's incoming stream at its smallest
/// vertex into a sink and the outgoing stream into a source, raising the sink
/// and source counts by one each.
pub fn remove_cycles(o: &Orientation, d: u32) -> Result<Orientation> {
    for v in o.vertices() {
        if o.degree(v) < d as usize + 1 || o.in_degree(v) != d as usize {
            return Err(Error::PreconditionViolated(format!(
                "vertex {v}: degree {} in-degree {} (need >= {} and == {d})",
                o.degree(v),
                o.in_degree(v),
                d + 1
            )));
        }
    }
    let mut out = o.clone();
    while let Some(cycle) = find_oriented_cycle(&out) {
        let closed = &cycle[..cycle.len() - 1];
        let j = closed.iter().map(|(_, into)| *into).min().unwrap();
        let pos = closed.iter().position(|(_, into)| *into == j).unwrap();
        let incoming = closed[pos].0;
        let outgoing = closed[(pos + 1) % closed.len()].0;
        out.set_mode(incoming, EdgeMode::Sink);
        out.set_mode(outgoing, EdgeMode::Source);
    }
    debug_assert!(out
        .vertices()
        .iter()
        .all(|&v| out.in_degree(v) == o.in_degree(v) && out.degree(v) == o.degree(v)));
    Ok(out)
}

/// Search bounds for the exhaustive orientation enumeration.
#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    /// Cap on candidate (subgraph, in-edge choice) pairs examined.
    pub max_candidates: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_candidates: 1_000_000,
        }
    }
}

/// Yields every valid acyclic source-stream-sink orientation of dimension d
/// over every qualifying edge subset H, in deterministic order. The search is
/// the direct existential check: choose H with induced minimum degree >= d+1,
/// then choose d incoming edges per H-vertex; each choice tuple is a distinct
/// orientation, so no deduplication is needed. Exceeding the candidate budget
/// yields a final `SearchBudgetExceeded` error.
pub fn enumerate_orientations(
    g: &Graph,
    d: u32,
    limits: SearchLimits,
) -> impl Iterator<Item = Result<Orientation>> + '_ {
    OrientationSearch::new(g, d, limits)
}

struct OrientationSearch<'g> {
    g: &'g Graph,
    d: u32,
    limits: SearchLimits,
    examined: u64,
    subset: u64,
    subset_end: u64,
    current: Option<SubsetState>,
    exhausted: bool,
}

struct SubsetState {
    edges: Vec<Edge>,
    vertices: Vec<u32>,
    // all d-subsets of incident edges, per vertex
    choices: Vec<Vec<Vec<Edge>>>,
    counters: Vec<usize>,
    done: bool,
}

impl<'g> OrientationSearch<'g> {
    fn new(g: &'g Graph, d: u32, limits: SearchLimits) -> Self {
        let m = g.edge_count();
        let subset_end = if m >= 63 { u64::MAX } else { 1u64 << m };
        OrientationSearch {
            g,
            d,
            limits,
            examined: 0,
            subset: 1,
            subset_end,
            current: None,
            exhausted: false,
        }
    }

    fn load_subset(&self, mask: u64) -> Option<SubsetState> {
        let edges: Vec<Edge> = self
            .g
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| *e)
            .collect();
        let mut degree: BTreeMap<u32, usize> = BTreeMap::new();
        for e in &edges {
            *degree.entry(e.a).or_default() += 1;
            *degree.entry(e.b).or_default() += 1;
        }
        if degree.values().any(|&deg| deg < self.d as usize + 1) {
            return None;
        }
        let vertices: Vec<u32> = degree.keys().copied().collect();
        let choices: Vec<Vec<Vec<Edge>>> = vertices
            .iter()
            .map(|&v| {
                use itertools::Itertools;
                let incident: Vec<Edge> = edges.iter().filter(|e| e.touches(v)).copied().collect();
                incident
                    .into_iter()
                    .combinations(self.d as usize)
                    .collect::<Vec<_>>()
            })
            .collect();
        if choices.iter().any(|c| c.is_empty()) {
            return None;
        }
        Some(SubsetState {
            edges,
            vertices,
            counters: vec![0; choices.len()],
            choices,
            done: false,
        })
    }
}

impl SubsetState {
    /// Builds the orientation for the current counters: an edge chosen incoming
    /// at both endpoints is a source, at one a stream, at none a sink.
    fn orientation(&self) -> Orientation {
        let mut chosen_at: BTreeMap<Edge, Vec<u32>> = BTreeMap::new();
        for (vi, &v) in self.vertices.iter().enumerate() {
            for e in &self.choices[vi][self.counters[vi]] {
                chosen_at.entry(*e).or_default().push(v);
            }
        }
        let modes = self
            .edges
            .iter()
            .map(|e| {
                let mode = match chosen_at.get(e).map(|v| v.as_slice()) {
                    Some([_, _]) => EdgeMode::Source,
                    Some([v]) => EdgeMode::Stream { into: *v },
                    _ => EdgeMode::Sink,
                };
                (*e, mode)
            })
            .collect();
        Orientation { modes }
    }

    fn advance(&mut self) {
        for i in (0..self.counters.len()).rev() {
            self.counters[i] += 1;
            if self.counters[i] < self.choices[i].len() {
                return;
            }
            self.counters[i] = 0;
        }
        self.done = true;
    }
}

impl Iterator for OrientationSearch<'_> {
    type Item = Result<Orientation>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.exhausted {
            return None;
        }
        loop {
            if self.current.is_none() {
                if self.subset >= self.subset_end {
                    self.exhausted = true;
                    return None;
                }
                let mask = self.subset;
                self.subset += 1;
                self.examined += 1;
                if self.examined > self.limits.max_candidates {
                    self.exhausted = true;
                    return Some(Err(Error::SearchBudgetExceeded {
                        budget: self.limits.max_candidates,
                    }));
                }
                self.current = self.load_subset(mask);
                continue;
            }
            let state = self.current.as_mut().unwrap();
            if state.done {
                self.current = None;
                continue;
            }
            self.examined += 1;
            if self.examined > self.limits.max_candidates {
                self.exhausted = true;
                return Some(Err(Error::SearchBudgetExceeded {
                    budget: self.limits.max_candidates,
                }));
            }
            let o = state.orientation();
            state.advance();
            if find_oriented_cycle(&o).is_none() {
                return Some(Ok(o));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct OrientationFile {
    edges: Vec<OrientedEdgeFile>,
}

#[derive(Serialize, Deserialize)]
struct OrientedEdgeFile {
    e: [u32; 2],
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    into: Option<u32>,
}

/// Parses `{"edges": [{"e":[1,3],"mode":"source"}, {"e":[5,3],"mode":"stream",
/// "into":3}, {"e":[1,2],"mode":"sink"}]}`.
pub fn orientation_from_json(text: &str) -> Result<Orientation> {
    let f: OrientationFile = serde_json::from_str(text)?;
    let mut modes = BTreeMap::new();
    for oe in f.edges {
        let e = Edge::new(oe.e[0], oe.e[1]);
        let mode = match oe.mode.as_str() {
            "source" => EdgeMode::Source,
            "sink" => EdgeMode::Sink,
            "stream" => {
                let into = oe
                    .into
                    .ok_or_else(|| Error::Parse(format!("stream {e} missing \"into\" endpoint")))?;
                EdgeMode::Stream { into }
            }
            other => return Err(Error::Parse(format!("unknown mode {other:?}"))),
        };
        if modes.insert(e, mode).is_some() {
            return Err(Error::Parse(format!("edge {e} appears twice")));
        }
    }
    Orientation::new(modes)
}

pub fn orientation_to_json(o: &Orientation) -> String {
    let edges = o
        .edges()
        .map(|(e, m)| {
            let (mode, into) = match m {
                EdgeMode::Source => ("source", None),
                EdgeMode::Sink => ("sink", None),
                EdgeMode::Stream { into } => ("stream", Some(*into)),
            };
            OrientedEdgeFile {
                e: [e.a, e.b],
                mode: mode.to_string(),
                into,
            }
        })
        .collect();
    serde_json::to_string_pretty(&OrientationFile { edges }).expect("serializes")
}

/// Orientations used across docs and tests.
pub mod examples {
    use super::*;

    /// The running example: the double banana's orientation with one sink and
    /// seven sources, valid and acyclic for d = 3.
    pub fn double_banana_orientation() -> Orientation {
        use EdgeMode::{Sink, Source, Stream};
        Orientation::from_pairs(&[
            ((1, 2), Sink),
            ((1, 3), Source),
            ((1, 4), Stream { into: 1 }),
            ((1, 5), Stream { into: 1 }),
            ((2, 3), Stream { into: 2 }),
            ((2, 4), Stream { into: 2 }),
            ((2, 5), Stream { into: 2 }),
            ((3, 4), Stream { into: 3 }),
            ((3, 5), Stream { into: 3 }),
            ((4, 6), Source),
            ((4, 7), Stream { into: 4 }),
            ((4, 8), Source),
            ((5, 6), Source),
            ((5, 7), Source),
            ((5, 8), Stream { into: 5 }),
            ((6, 7), Source),
            ((6, 8), Stream { into: 8 }),
            ((7, 8), Source),
        ])
        .expect("fixture is well-formed")
    }

    /// One-source-one-sink orientation of the n-cycle (1,2,...,n): source
    /// (1,2), sink (1,n), streams oriented away from the source toward the
    /// sink. The corollary's construction at d = 1.
    pub fn cycle_orientation(n: u32) -> Orientation {
        assert!(n >= 3);
        let mut pairs = vec![((1, 2), EdgeMode::Source), ((1, n), EdgeMode::Sink)];
        for i in 2..n {
            pairs.push(((i, i + 1), EdgeMode::Stream { into: i + 1 }));
        }
        Orientation::from_pairs(&pairs).expect("fixture is well-formed")
    }
}
