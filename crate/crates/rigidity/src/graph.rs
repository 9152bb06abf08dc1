//! Core graph and placement model shared by every other module.
//!
//! Vertices are the 1-based integers 1..=v. Edges are stored canonically as
//! (min, max); orientation data lives in [`crate::orientation`], never here.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Q, Z};

/// Undirected edge, canonically ordered a < b.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
}

impl Edge {
    /// Canonicalizes the endpoint order. Loops are representable so that
    /// `validate_graph` can report them; everything downstream requires a != b.
    pub fn new(i: u32, j: u32) -> Edge {
        Edge {
            a: i.min(j),
            b: i.max(j),
        }
    }

    pub fn touches(&self, v: u32) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint other than `v`.
    pub fn other(&self, v: u32) -> u32 {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// Finite simple graph on vertex set 1..=v.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub v: u32,
    pub edges: Vec<Edge>,
}

impl Graph {
    /// Builds a graph from raw pairs; edges are canonicalized and sorted.
    pub fn new(v: u32, pairs: &[(u32, u32)]) -> Graph {
        let mut edges: Vec<Edge> = pairs.iter().map(|&(i, j)| Edge::new(i, j)).collect();
        edges.sort();
        Graph { v, edges }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.touches(v)).count()
    }

    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        self.edges
            .iter()
            .filter(|e| e.touches(v))
            .map(|e| e.other(v))
            .collect()
    }
}

/// Accepts iff the graph invariants hold; reports the first violation otherwise.
pub fn validate_graph(g: &Graph) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for e in &g.edges {
        if e.a == e.b {
            return Err(Error::LoopEdge(e.a));
        }
        for v in [e.a, e.b] {
            if v == 0 || v > g.v {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    max: g.v,
                });
            }
        }
        if !seen.insert(*e) {
            return Err(Error::DuplicateEdge(*e));
        }
    }
    Ok(())
}

/// Edge surplus |E| - (d v - C(d+1,2)). Zero means the tight case where the
/// orientation characterization applies directly.
pub fn tightness(g: &Graph, d: u32) -> i64 {
    let bound = d as i64 * g.v as i64 - (d as i64 + 1) * d as i64 / 2;
    g.edges.len() as i64 - bound
}

/// Rational coordinate assignment, one d-tuple per vertex. Coordinates stand in
/// for generic reals; genericity is approximated by random integer sampling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub dim: u32,
    coords: BTreeMap<u32, Vec<Q>>,
}

/// Difference vector e_ij = p_j - p_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeVector(pub Vec<Q>);

impl Placement {
    pub fn new(dim: u32, coords: BTreeMap<u32, Vec<Q>>) -> Result<Placement> {
        for (v, p) in &coords {
            if p.len() != dim as usize {
                return Err(Error::DimensionMismatch {
                    expected: dim as usize,
                    got: p.len(),
                });
            }
            if *v == 0 {
                return Err(Error::VertexOutOfRange { vertex: 0, max: 0 });
            }
        }
        Ok(Placement { dim, coords })
    }

    pub fn from_integers(dim: u32, coords: &[(u32, Vec<i64>)]) -> Placement {
        Placement {
            dim,
            coords: coords
                .iter()
                .map(|(v, p)| (*v, p.iter().map(|&x| crate::q(x)).collect()))
                .collect(),
        }
    }

    pub fn coords(&self, v: u32) -> Result<&[Q]> {
        self.coords
            .get(&v)
            .map(|p| p.as_slice())
            .ok_or(Error::UnplacedVertex(v))
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.coords.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Component-wise difference p_j - p_i. Degenerate (zero) vectors are permitted
/// at this layer.
pub fn edge_vector(p: &Placement, i: u32, j: u32) -> Result<EdgeVector> {
    let pi = p.coords(i)?;
    let pj = p.coords(j)?;
    Ok(EdgeVector(pi.iter().zip(pj).map(|(a, b)| b - a).collect()))
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GraphFile {
    v: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<u32>,
    edges: Vec<[u32; 2]>,
}

/// Parses `{"v": 8, "d": 3, "edges": [[1,2],...]}`; `d` is optional and
/// returned separately.
pub fn graph_from_json(text: &str) -> Result<(Graph, Option<u32>)> {
    let f: GraphFile = serde_json::from_str(text)?;
    let g = Graph::new(
        f.v,
        &f.edges.iter().map(|e| (e[0], e[1])).collect::<Vec<_>>(),
    );
    validate_graph(&g)?;
    Ok((g, f.d))
}

pub fn graph_to_json(g: &Graph, d: Option<u32>) -> String {
    let f = GraphFile {
        v: g.v,
        d,
        edges: g.edges.iter().map(|e| [e.a, e.b]).collect(),
    };
    serde_json::to_string_pretty(&f).expect("graph serializes")
}

/// Formats a rational as `"num"` or `"num/den"`.
pub fn q_to_string(x: &Q) -> String {
    if x.denom() == &Z::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Accepts JSON integers and strings of the form `"num"` or `"num/den"`.
pub fn q_from_json(v: &serde_json::Value) -> Result<Q> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(crate::q(i))
            } else {
                Err(Error::Parse(format!("non-integer number {n}")))
            }
        }
        serde_json::Value::String(s) => {
            let parse_int = |t: &str| {
                t.trim()
                    .parse::<Z>()
                    .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
            };
            match s.split_once('/') {
                Some((n, d)) => {
                    let den = parse_int(d)?;
                    if den.is_zero() {
                        return Err(Error::Parse("zero denominator".into()));
                    }
                    Ok(Q::new(parse_int(n)?, den))
                }
                None => Ok(Q::from_integer(parse_int(s)?)),
            }
        }
        other => Err(Error::Parse(format!("expected rational, got {other}"))),
    }
}

/// Parses `{"coords": {"1": ["0","0","0"], ...}}` with rationals as strings
/// "num/den" or integers.
pub fn placement_from_json(text: &str) -> Result<Placement> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let coords = v
        .get("coords")
        .and_then(|c| c.as_object())
        .ok_or_else(|| Error::Parse("missing coords object".into()))?;
    let mut map = BTreeMap::new();
    let mut dim = None;
    for (k, arr) in coords {
        let vertex: u32 = k
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex label {k:?}")))?;
        let arr = arr
            .as_array()
            .ok_or_else(|| Error::Parse(format!("coords of {k} not an array")))?;
        let p: Result<Vec<Q>> = arr.iter().map(q_from_json).collect();
        let p = p?;
        if let Some(d) = dim {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
        } else {
            dim = Some(p.len());
        }
        map.insert(vertex, p);
    }
    let dim = dim.ok_or_else(|| Error::Parse("empty coords".into()))? as u32;
    Placement::new(dim, map)
}

pub fn placement_to_json(p: &Placement) -> String {
    let coords: serde_json::Map<String, serde_json::Value> = p
        .vertices()
        .map(|v| {
            let arr = p
                .coords(v)
                .unwrap()
                .iter()
                .map(|x| serde_json::Value::String(q_to_string(x)))
                .collect();
            (v.to_string(), serde_json::Value::Array(arr))
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({ "coords": coords })).expect("serializes")
}

/// Well-known graphs used in docs and tests.
pub mod examples {
    use super::Graph;

    /// The classic 8-vertex, 18-edge flexible graph: two copies of K5 minus an
    /// edge glued along the missing edge {4,5}. Satisfies |E| = 3|V| - 6 yet is
    /// flexible in 3-space.
    pub fn double_banana() -> Graph {
        Graph::new(
            8,
            &[
                (1, 2),
                (1, 3),
                (1, 4),
                (1, 5),
                (2, 3),
                (2, 4),
                (2, 5),
                (3, 4),
                (3, 5),
                (4, 6),
                (4, 7),
                (4, 8),
                (5, 6),
                (5, 7),
                (5, 8),
                (6, 7),
                (6, 8),
                (7, 8),
            ],
        )
    }
}
