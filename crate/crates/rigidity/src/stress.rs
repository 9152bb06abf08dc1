//! Self-stress synthesis from an orientation: local Cramer's rules propagate
//! sink variables through the streams, source compatibility pins them down,
//! and the result satisfies w A = 0 exactly.
//!
//! Stream formulas are evaluated at a concrete placement in exact rationals
//! rather than kept symbolic; the symbolic content lives in the certificate
//! polynomials of [`crate::certificate`].

use std::collections::{BTreeMap, BTreeSet};

use num::Zero;
use serde::Serialize;

use crate::bracket::{GenericMatrix, SignedTableau};
use crate::certificate::{cramer_shelves, ordered_sources_sinks, source_sink_certificate};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Placement};
use crate::linalg::QMatrix;
use crate::oracle::{equilibrium_residual, random_placement};
use crate::orientation::{find_oriented_cycle, EdgeMode, Orientation};
use crate::Q;

/// Map edge -> exact stress value; support contained in the orientation's H.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StressAssignment {
    pub values: BTreeMap<Edge, Q>,
}

impl StressAssignment {
    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }

    /// The stress as a vector indexed like g.edges (zeros off-support).
    pub fn as_vector(&self, g: &Graph) -> Vec<Q> {
        g.edges
            .iter()
            .map(|e| self.values.get(e).cloned().unwrap_or_else(Q::zero))
            .collect()
    }
}

/// One local Cramer's rule: the in-edge value as a linear combination of the
/// out-edge values at the same vertex, coefficients evaluated at the placement.
#[derive(Clone, Debug)]
pub struct CramerExpansion {
    pub vertex: u32,
    pub in_edge: Edge,
    pub terms: Vec<(Edge, Q)>,
}

fn evaluate_signed(m: &GenericMatrix, t: &SignedTableau) -> Result<Q> {
    let mut acc = crate::q(t.sign as i64);
    for row in t.tableau.rows() {
        let width = row.width();
        let sub = QMatrix::from_rows(
            (0..width)
                .map(|r| {
                    row.indices()
                        .iter()
                        .map(|&c| m.as_matrix().at(r, c as usize - 1).clone())
                        .collect()
                })
                .collect(),
        );
        acc *= sub.det();
    }
    Ok(acc)
}

/// The Cramer expansions of every in-edge at vertex a: for the in-edge toward
/// b and out-edges toward c_k,
/// w_{ab} = sum_k ([j_1..j_{d-1} a c_k] / [j_1..j_{d-1} b a]) w_{a c_k}.
pub fn local_cramer(
    o: &Orientation,
    a: u32,
    p: &Placement,
    d: u32,
) -> Result<Vec<CramerExpansion>> {
    let max_vertex = o.vertices().last().copied().unwrap_or(0);
    let m = GenericMatrix::from_placement(p, max_vertex)?;
    let mut out = Vec::new();
    for in_edge in o.edges_into(a) {
        let mut terms = Vec::new();
        for out_edge in o.edges_out_of(a) {
            let (numer, denom) = cramer_shelves(o, a, in_edge, out_edge, d)?;
            let dv = evaluate_signed(&m, &denom)?;
            if dv.is_zero() {
                return Err(Error::SingularDenominator { vertex: a });
            }
            let nv = evaluate_signed(&m, &numer)?;
            terms.push((out_edge, nv / dv));
        }
        out.push(CramerExpansion {
            vertex: a,
            in_edge,
            terms,
        });
    }
    Ok(out)
}

/// The stream formula evaluated at a placement: the value of a stream as a
/// linear form in the sink variables, one coefficient per sink, obtained by
/// summing the weight products of all maximal chains of its stream tree.
pub fn stream_formula(
    o: &Orientation,
    stream: (Edge, u32),
    p: &Placement,
    d: u32,
) -> Result<BTreeMap<Edge, Q>> {
    let (edge, into) = stream;
    let tree =
        crate::certificate::decorate(&crate::certificate::build_stream_tree(o, edge, into)?, o, d)?;
    let max_vertex = o.vertices().last().copied().unwrap_or(0);
    let m = GenericMatrix::from_placement(p, max_vertex)?;
    let mut coeffs: BTreeMap<Edge, Q> = BTreeMap::new();
    for chain in tree.maximal_chains() {
        let mut weight = crate::q(1);
        for &id in &chain {
            let node = tree.node(id);
            // multiply the numerator entering this node and divide by this
            // node's denominator when present
            if id != chain[0] {
                weight *= evaluate_signed(&m, &node.left_shelf)?;
            }
            if let Some(dnm) = &node.right_shelf {
                let dv = evaluate_signed(&m, dnm)?;
                if dv.is_zero() {
                    return Err(Error::SingularDenominator {
                        vertex: node.into.expect("denominators live on stream nodes"),
                    });
                }
                weight /= dv;
            }
        }
        let leaf = tree.node(*chain.last().unwrap());
        let sink = leaf.edge.expect("leaves carry edges");
        *coeffs.entry(sink).or_insert_with(Q::zero) += weight;
    }
    Ok(coeffs)
}

/// The source compatibility system: one row per source, one column per sink,
/// entries are the certificate polynomials evaluated at the placement.
#[derive(Clone, Debug)]
pub struct SinkSystem {
    pub sources: Vec<Edge>,
    pub sinks: Vec<Edge>,
    pub matrix: QMatrix,
    pub nullspace: Vec<Vec<Q>>,
}

/// Evaluates every source/sink certificate at the placement and returns the
/// exact nullspace of the resulting k x l system in the sink variables.
pub fn solve_sink_system(o: &Orientation, p: &Placement, d: u32) -> Result<SinkSystem> {
    let (sources, sinks) = ordered_sources_sinks(o);
    let max_vertex = o.vertices().last().copied().unwrap_or(0);
    let m = GenericMatrix::from_placement(p, max_vertex)?;
    let rows: Result<Vec<Vec<Q>>> = sources
        .iter()
        .map(|&mu| {
            sinks
                .iter()
                .map(|&nu| {
                    source_sink_certificate(o, mu, nu, d)?
                        .poly
                        .evaluate(m.as_matrix())
                })
                .collect()
        })
        .collect();
    let matrix = QMatrix::from_rows(rows?);
    let nullspace = matrix.right_kernel();
    Ok(SinkSystem {
        sources,
        sinks,
        matrix,
        nullspace,
    })
}

/// Assigns the sink variables and propagates every stream and source value by
/// repeated local Cramer's rules in reverse topological order. Sources receive
/// the common value of their two stream formulas; a disagreement signals sink
/// values outside the compatibility nullspace (or an unbalanced orientation).
pub fn synthesize_stress(
    o: &Orientation,
    p: &Placement,
    d: u32,
    sink_values: &BTreeMap<Edge, Q>,
) -> Result<StressAssignment> {
    if find_oriented_cycle(o).is_some() {
        return Err(Error::InvalidOrientation("oriented cycle".into()));
    }
    let sinks: BTreeSet<Edge> = o.sinks().into_iter().collect();
    for e in sink_values.keys() {
        if !sinks.contains(e) {
            return Err(Error::InvalidOrientation(format!("{e} is not a sink")));
        }
    }
    let mut values: BTreeMap<Edge, Q> = sinks
        .iter()
        .map(|e| (*e, sink_values.get(e).cloned().unwrap_or_else(Q::zero)))
        .collect();

    // process vertices downstream-first: a vertex is ready when all its
    // out-edges already have values
    let mut pending: BTreeSet<u32> = o.vertices().into_iter().collect();
    while !pending.is_empty() {
        let ready: Vec<u32> = pending
            .iter()
            .copied()
            .filter(|&a| o.edges_out_of(a).iter().all(|e| values.contains_key(e)))
            .collect();
        if ready.is_empty() {
            return Err(Error::InvalidOrientation(
                "no vertex is ready; stream dependencies are cyclic".into(),
            ));
        }
        for a in ready {
            for expansion in local_cramer(o, a, p, d)? {
                let mut value = Q::zero();
                for (out_edge, coeff) in &expansion.terms {
                    value += coeff * &values[out_edge];
                }
                match values.get(&expansion.in_edge) {
                    None => {
                        values.insert(expansion.in_edge, value);
                    }
                    Some(existing) => {
                        // only sources are computed twice (once per endpoint)
                        debug_assert_eq!(o.mode(expansion.in_edge), Some(EdgeMode::Source));
                        if *existing != value {
                            return Err(Error::InconsistentSource(expansion.in_edge));
                        }
                    }
                }
            }
            pending.remove(&a);
        }
    }
    Ok(StressAssignment { values })
}

/// Exact per-vertex residual report for w A = 0.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub pass: bool,
    /// Residual d-vector per vertex, as rational strings.
    pub residuals: BTreeMap<u32, Vec<String>>,
}

pub fn verify_stress(g: &Graph, p: &Placement, w: &StressAssignment) -> Result<ResidualReport> {
    for e in w.values.keys() {
        if !g.has_edge(*e) {
            return Err(Error::EdgeNotInGraph(*e));
        }
    }
    let vec = w.as_vector(g);
    let residuals = equilibrium_residual(g, p, &vec)?;
    let pass = residuals.iter().flatten().all(|x| x.is_zero());
    Ok(ResidualReport {
        pass,
        residuals: residuals
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                (
                    i as u32 + 1,
                    r.iter().map(crate::graph::q_to_string).collect(),
                )
            })
            .collect(),
    })
}

/// Runs `f` at the placement drawn from `seed`, resampling with the next seed
/// on singular denominators, up to `attempts` tries.
pub fn with_generic_placement<T>(
    g: &Graph,
    d: u32,
    seed: u64,
    attempts: u32,
    mut f: impl FnMut(&Placement) -> Result<T>,
) -> Result<T> {
    let mut last = None;
    for t in 0..attempts.max(1) {
        let p = random_placement(g, d, seed.wrapping_add(t as u64));
        match f(&p) {
            Err(Error::SingularDenominator { vertex }) => {
                last = Some(Error::SingularDenominator { vertex });
            }
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}
