//! Stream and source trees, shelf decoration, right-shelf clearing, the signed
//! chain-sum certificate polynomials, the balanced predicate, and an
//! independent path-system (Lindstrom-Gessel-Viennot) formulation used as a
//! cross-check.
//!
//! For a valid acyclic orientation, the stream tree of (i,j)_i expands the
//! edges oriented out of i recursively until sinks; a source tree glues the two
//! stream trees of a source under a virtual root. Local Cramer's rules decorate
//! each arrow with a numerator bracket on the child's left shelf and a
//! denominator bracket on the parent's right shelf. Clearing right-shelves
//! turns the rational chain weights into honest tableaux: afterwards, the
//! product of left shelves along any maximal chain equals the chain's
//! numerators times every right shelf *not* on the chain. The signed sum of
//! chain products ending at a sink is the certificate polynomial whose
//! vanishing (for all choices of sources) makes the orientation balanced.

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::Serialize;

use crate::bracket::{format_poly, probably_zero, straighten, BracketPoly, SignedTableau, Tableau};
use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::orientation::{find_oriented_cycle, EdgeMode, Orientation};
use crate::q;

/// Cap on node-disjoint path systems enumerated per minor.
const PATH_SYSTEM_CAP: u64 = 1_000_000;

/// Number of random evaluations used by the probabilistic balance check.
pub const BALANCE_TRIALS: u32 = 5;

/// One node of a stream or source tree. `edge` is None only for the virtual
/// root of a source tree; `into` is the endpoint a stream-like node enters and
/// None for sinks.
#[derive(Clone, Debug)]
pub struct Node {
    pub edge: Option<Edge>,
    pub into: Option<u32>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub left_shelf: SignedTableau,
    pub right_shelf: Option<SignedTableau>,
}

impl Node {
    fn new(edge: Option<Edge>, into: Option<u32>, parent: Option<usize>) -> Node {
        Node {
            edge,
            into,
            parent,
            children: Vec::new(),
            left_shelf: SignedTableau::one(),
            right_shelf: None,
        }
    }
}

/// Arena-allocated rooted tree; node 0 is the root.
#[derive(Clone, Debug)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Root-to-leaf node id paths in depth-first order, children ascending by
    /// edge. This is the default maximal-chain order.
    pub fn maximal_chains(&self) -> Vec<Vec<usize>> {
        let mut chains = Vec::new();
        let mut stack = vec![(0usize, vec![0usize])];
        while let Some((id, path)) = stack.pop() {
            let node = &self.nodes[id];
            if node.children.is_empty() {
                chains.push(path);
                continue;
            }
            // push in reverse so ascending children pop first
            for &c in node.children.iter().rev() {
                let mut p = path.clone();
                p.push(c);
                stack.push((c, p));
            }
        }
        chains
    }

    /// Depth of the tree counting nodes along the longest chain.
    pub fn depth(&self) -> usize {
        self.maximal_chains()
            .iter()
            .map(|c| c.len())
            .max()
            .unwrap_or(0)
    }

    /// Product of all right-shelf tableaux over the whole tree (the common
    /// denominator of every chain weight).
    pub fn denominator_product(&self) -> SignedTableau {
        let mut acc = SignedTableau::one();
        for n in &self.nodes {
            if let Some(d) = &n.right_shelf {
                acc = acc.mul(d);
            }
        }
        acc
    }

    /// Product of left shelves along a chain of node ids.
    pub fn chain_left_product(&self, chain: &[usize]) -> SignedTableau {
        let mut acc = SignedTableau::one();
        for &id in chain {
            acc = acc.mul(&self.nodes[id].left_shelf);
        }
        acc
    }
}

fn orientation_is_acyclic(o: &Orientation) -> Result<()> {
    if let Some(cycle) = find_oriented_cycle(o) {
        let desc: Vec<String> = cycle.iter().map(|(e, v)| format!("{e}_{v}")).collect();
        return Err(Error::InvalidOrientation(format!(
            "oriented cycle: {}",
            desc.join(", ")
        )));
    }
    Ok(())
}

/// Builds the stream tree of `edge` oriented into `into`: children of a node
/// entering vertex a are the edges oriented out of a; sinks are leaves.
pub fn build_stream_tree(o: &Orientation, edge: Edge, into: u32) -> Result<Tree> {
    if !edge.touches(into) || o.mode(edge).is_none() {
        return Err(Error::InvalidOrientation(format!(
            "{edge} into {into} is not an oriented edge of H"
        )));
    }
    orientation_is_acyclic(o)?;
    let mut tree = Tree {
        nodes: vec![Node::new(Some(edge), Some(into), None)],
    };
    expand_node(&mut tree, 0, o)?;
    Ok(tree)
}

/// Builds the source tree: a virtual root whose two children are the stream
/// trees of the source entering each endpoint. The positive child (first)
/// enters the smaller endpoint.
pub fn build_source_tree(o: &Orientation, source: Edge) -> Result<Tree> {
    if o.mode(source) != Some(EdgeMode::Source) {
        return Err(Error::InvalidOrientation(format!(
            "{source} is not a source"
        )));
    }
    orientation_is_acyclic(o)?;
    let mut tree = Tree {
        nodes: vec![Node::new(None, None, None)],
    };
    for endpoint in [source.a, source.b] {
        let child = tree.nodes.len();
        tree.nodes
            .push(Node::new(Some(source), Some(endpoint), Some(0)));
        tree.nodes[0].children.push(child);
        expand_node(&mut tree, child, o)?;
    }
    Ok(tree)
}

fn expand_node(tree: &mut Tree, id: usize, o: &Orientation) -> Result<()> {
    let Some(a) = tree.nodes[id].into else {
        return Ok(()); // sink leaf
    };
    let out = o.edges_out_of(a);
    if out.is_empty() {
        return Err(Error::InvalidOrientation(format!(
            "vertex {a} has no outgoing edges; chains cannot end in a sink"
        )));
    }
    for e in out {
        let into = match o.mode(e).expect("edge of H") {
            EdgeMode::Stream { into } => Some(into),
            EdgeMode::Sink => None,
            EdgeMode::Source => unreachable!("sources are never oriented out of a vertex"),
        };
        let child = tree.nodes.len();
        tree.nodes.push(Node::new(Some(e), into, Some(id)));
        tree.nodes[id].children.push(child);
        expand_node(tree, child, o)?;
    }
    Ok(())
}

/// The two brackets of the local Cramer step at vertex `a`: solving for the
/// in-edge toward `b` given the out-edge toward `c` yields numerator
/// [j_1..j_{d-1} a c] and denominator [j_1..j_{d-1} b a], where the j's are the
/// other endpoints of the remaining d-1 edges oriented into a.
pub fn cramer_shelves(
    o: &Orientation,
    a: u32,
    in_edge: Edge,
    out_edge: Edge,
    d: u32,
) -> Result<(SignedTableau, SignedTableau)> {
    let b = in_edge.other(a);
    let c = out_edge.other(a);
    let mut js: Vec<u32> = o
        .edges_into(a)
        .into_iter()
        .filter(|e| *e != in_edge)
        .map(|e| e.other(a))
        .collect();
    js.sort_unstable();
    if js.len() != d as usize - 1 {
        return Err(Error::InvalidOrientation(format!(
            "vertex {a} has in-degree {} != {d}",
            js.len() + 1
        )));
    }
    let mut numer = js.clone();
    numer.extend([a, c]);
    let mut denom = js;
    denom.extend([b, a]);
    Ok((
        SignedTableau::from_tuple(&numer),
        SignedTableau::from_tuple(&denom),
    ))
}

/// Decorates every arrow of the tree: the numerator bracket goes on the lower
/// node's left shelf, the denominator bracket on the upper node's right shelf
/// (identical for all children of one node). Brackets are sign-normalized.
pub fn decorate(tree: &Tree, o: &Orientation, d: u32) -> Result<Tree> {
    let mut out = tree.clone();
    for id in 0..out.nodes.len() {
        let node = &out.nodes[id];
        let (Some(edge), Some(a)) = (node.edge, node.into) else {
            continue;
        };
        if node.children.is_empty() {
            continue;
        }
        let children = node.children.clone();
        let mut denom = None;
        for child_id in children {
            let child_edge = out.nodes[child_id].edge.expect("children carry edges");
            let (n, dnm) = cramer_shelves(o, a, edge, child_edge, d)?;
            out.nodes[child_id].left_shelf = n;
            if let Some(prev) = &denom {
                debug_assert_eq!(prev, &dnm, "all children induce the identical denominator");
            }
            denom = Some(dnm);
        }
        out.nodes[id].right_shelf = denom;
    }
    Ok(out)
}

/// Clears right-shelves chain by chain in the default depth-first order.
pub fn clear_right_shelves(tree: &Tree) -> Tree {
    let chains = tree.maximal_chains();
    let order: Vec<usize> = (0..chains.len()).collect();
    clear_right_shelves_with_order(tree, &order)
}

/// Clears right-shelves processing maximal chains in the given order (a
/// permutation of chain indices in default order). For each chain C and each
/// node covered by C but not on it, the left shelf picks up the product of the
/// current denominators on C strictly below the branch point; then C's
/// denominators are set to one. The resulting left-shelf chain products do not
/// depend on the order.
pub fn clear_right_shelves_with_order(tree: &Tree, order: &[usize]) -> Tree {
    let chains = tree.maximal_chains();
    assert_eq!(order.len(), chains.len(), "order must permute all chains");
    let mut out = tree.clone();
    for &ci in order {
        let chain = &chains[ci];
        let on_chain: Vec<bool> = {
            let mut v = vec![false; out.nodes.len()];
            for &id in chain {
                v[id] = true;
            }
            v
        };
        // incomparable relatives with their accumulated multipliers, computed
        // against the current shelf state before any update of this pass
        let mut updates: Vec<(usize, SignedTableau)> = Vec::new();
        for (pos, &id) in chain.iter().enumerate() {
            for &child in &out.nodes[id].children {
                if on_chain[child] {
                    continue;
                }
                // denominators of chain nodes strictly below the branch point
                let mut factor = SignedTableau::one();
                for &below in &chain[pos + 1..] {
                    if let Some(d) = &out.nodes[below].right_shelf {
                        factor = factor.mul(d);
                    }
                }
                if !factor.is_one() {
                    updates.push((child, factor));
                }
            }
        }
        for (id, factor) in updates {
            out.nodes[id].left_shelf = out.nodes[id].left_shelf.mul(&factor);
        }
        for &id in chain {
            out.nodes[id].right_shelf = None;
        }
    }
    out
}

/// Signed chain-sum certificate for one source and one sink, with provenance.
#[derive(Clone, Debug)]
pub struct CertificatePolynomial {
    pub poly: BracketPoly,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    SourceSink {
        source: Edge,
        sink: Edge,
    },
    Minor {
        sources: Vec<Edge>,
        sinks: Vec<Edge>,
    },
}

/// The certificate polynomial of a source-sink pair: the sum over maximal
/// chains ending at the sink of the product of left shelves along the chain,
/// signed + through the positive child (the stream into the smaller endpoint)
/// and - through the negative child. Zero when no chain reaches the sink.
pub fn source_sink_certificate(
    o: &Orientation,
    source: Edge,
    sink: Edge,
    d: u32,
) -> Result<CertificatePolynomial> {
    if o.mode(sink) != Some(EdgeMode::Sink) {
        return Err(Error::InvalidOrientation(format!("{sink} is not a sink")));
    }
    let tree = decorate(&build_source_tree(o, source)?, o, d)?;
    let cleared = clear_right_shelves(&tree);
    let poly = chain_sum(&cleared, sink);
    assert!(
        poly.is_multi_homogeneous(),
        "certificate of ({source},{sink}) must be multi-homogeneous"
    );
    if !poly.is_zero() {
        // telescoping degree law: multidegree = deg D(mu) + deg nu - deg mu,
        // computed as vertex multisets over the decorated (uncleared) tree
        let mut expected = tree.denominator_product().tableau.multi_degree();
        for v in [sink.a, sink.b] {
            *expected.entry(v).or_insert(0) += 1;
        }
        for v in [source.a, source.b] {
            let slot = expected.entry(v).or_insert(0);
            *slot = slot.checked_sub(1).expect("source degree underflow");
        }
        expected.retain(|_, c| *c > 0);
        debug_assert_eq!(
            poly.multi_degree().expect("checked multi-homogeneous"),
            expected,
            "telescoping degree law"
        );
    }
    Ok(CertificatePolynomial {
        poly,
        provenance: Provenance::SourceSink { source, sink },
    })
}

fn chain_sum(cleared: &Tree, sink: Edge) -> BracketPoly {
    let positive_child = cleared.root().children[0];
    let mut poly = BracketPoly::zero();
    for chain in cleared.maximal_chains() {
        let leaf = *chain.last().expect("chains are nonempty");
        if cleared.node(leaf).edge != Some(sink) || cleared.node(leaf).into.is_some() {
            continue;
        }
        let chain_sign = if chain.len() > 1 && chain[1] == positive_child {
            1i64
        } else {
            -1
        };
        let product = cleared.chain_left_product(&chain);
        poly.add_term(product.tableau, q(chain_sign * product.sign as i64));
    }
    poly
}

/// Ordered sources and sinks of a valid orientation (lexicographic by edge).
pub fn ordered_sources_sinks(o: &Orientation) -> (Vec<Edge>, Vec<Edge>) {
    (o.sources(), o.sinks())
}

/// Alternating sum over permutations: sum_pi sgn(pi) prod_j rows[j][pi(j)].
/// The formal determinant of a matrix of polynomials.
pub fn alternating_minor(rows: &[Vec<BracketPoly>]) -> BracketPoly {
    let l = rows.len();
    assert!(rows.iter().all(|r| r.len() == l));
    let mut out = BracketPoly::zero();
    for perm in (0..l).permutations(l) {
        let mut sign = 1i64;
        for i in 0..l {
            for j in i + 1..l {
                if perm[i] > perm[j] {
                    sign = -sign;
                }
            }
        }
        let mut term = BracketPoly::from_tableau(Tableau::empty());
        for (j, &pj) in perm.iter().enumerate() {
            term = term.mul(&rows[j][pj]);
            if term.is_zero() {
                break;
            }
        }
        out = out.add(&term.scale(&q(sign)));
    }
    out
}

fn validate_sigma(sigma: &[usize], k: usize, l: usize) -> Result<()> {
    if sigma.len() != l || sigma.windows(2).any(|w| w[0] >= w[1]) || sigma.iter().any(|&s| s >= k) {
        return Err(Error::ShapeMismatch(format!(
            "sigma {sigma:?} is not an increasing choice of {l} of {k} sources"
        )));
    }
    Ok(())
}

/// The minor certificate T_sigma for an increasing choice `sigma` of l sources
/// (indices into the ordered source list) against all l sinks:
/// sum_pi sgn(pi) prod_j T_{mu_sigma(j), nu_pi(j)}, expanded in the ring.
pub fn minor_certificate(
    o: &Orientation,
    sigma: &[usize],
    d: u32,
) -> Result<CertificatePolynomial> {
    let (sources, sinks) = ordered_sources_sinks(o);
    if sinks.len() > sources.len() {
        return Err(Error::TooManySinks {
            sinks: sinks.len(),
            sources: sources.len(),
        });
    }
    validate_sigma(sigma, sources.len(), sinks.len())?;
    let chosen: Vec<Edge> = sigma.iter().map(|&i| sources[i]).collect();
    let rows: Result<Vec<Vec<BracketPoly>>> = chosen
        .iter()
        .map(|&mu| {
            sinks
                .iter()
                .map(|&nu| Ok(source_sink_certificate(o, mu, nu, d)?.poly))
                .collect()
        })
        .collect();
    let poly = alternating_minor(&rows?);
    assert!(
        poly.is_multi_homogeneous(),
        "minor certificate must be multi-homogeneous"
    );
    Ok(CertificatePolynomial {
        poly,
        provenance: Provenance::Minor {
            sources: chosen,
            sinks,
        },
    })
}

// ---------------------------------------------------------------------------
// Lindstrom-Gessel-Viennot formulation
// ---------------------------------------------------------------------------

/// The DAG on oriented edges: an arrow from eta to xi whenever eta is oriented
/// into a vertex that xi is oriented out of. Acyclic whenever the orientation
/// has no oriented cycles.
fn edge_dag(o: &Orientation) -> BTreeMap<Edge, Vec<Edge>> {
    let mut arcs: BTreeMap<Edge, Vec<Edge>> = BTreeMap::new();
    for (e, _) in o.edges() {
        let mut out = Vec::new();
        for v in [e.a, e.b] {
            if o.is_oriented_into(*e, v) {
                for xi in o.edges_out_of(v) {
                    out.push(xi);
                }
            }
        }
        out.sort();
        out.dedup();
        arcs.insert(*e, out);
    }
    arcs
}

/// One node path per source plus the index of the sink it reaches.
type PathSystem = Vec<(Vec<Edge>, usize)>;

/// All pairwise node-disjoint path systems from the chosen sources to the
/// sinks, depth-first with disjointness pruning.
fn disjoint_path_systems(
    arcs: &BTreeMap<Edge, Vec<Edge>>,
    sources: &[Edge],
    sinks: &[Edge],
    budget: u64,
) -> Result<Vec<PathSystem>> {
    struct Search<'a> {
        arcs: &'a BTreeMap<Edge, Vec<Edge>>,
        sources: &'a [Edge],
        sinks: &'a [Edge],
        used: std::collections::BTreeSet<Edge>,
        used_sinks: Vec<bool>,
        current: PathSystem,
        systems: Vec<PathSystem>,
        visited: u64,
        budget: u64,
    }
    impl Search<'_> {
        fn assign(&mut self, i: usize) -> Result<()> {
            if i == self.sources.len() {
                self.systems.push(self.current.clone());
                return Ok(());
            }
            let start = self.sources[i];
            if self.used.contains(&start) {
                return Ok(());
            }
            let mut path = vec![start];
            self.used.insert(start);
            self.walk(i, start, &mut path)?;
            self.used.remove(&start);
            Ok(())
        }
        fn walk(&mut self, i: usize, at: Edge, path: &mut Vec<Edge>) -> Result<()> {
            self.visited += 1;
            if self.visited > self.budget {
                return Err(Error::SearchBudgetExceeded {
                    budget: self.budget,
                });
            }
            if let Some(si) = self.sinks.iter().position(|s| *s == at) {
                if !self.used_sinks[si] {
                    self.used_sinks[si] = true;
                    self.current.push((path.clone(), si));
                    self.assign(i + 1)?;
                    self.current.pop();
                    self.used_sinks[si] = false;
                }
                return Ok(()); // sinks have no outgoing arrows
            }
            let next: Vec<Edge> = self.arcs.get(&at).cloned().unwrap_or_default();
            for xi in next {
                if self.used.contains(&xi) {
                    continue;
                }
                self.used.insert(xi);
                path.push(xi);
                self.walk(i, xi, path)?;
                path.pop();
                self.used.remove(&xi);
            }
            Ok(())
        }
    }
    let mut search = Search {
        arcs,
        sources,
        sinks,
        used: Default::default(),
        used_sinks: vec![false; sinks.len()],
        current: Vec::new(),
        systems: Vec::new(),
        visited: 0,
        budget,
    };
    search.assign(0)?;
    Ok(search.systems)
}

/// Computes T_sigma through the path-system determinant: the product of the
/// chosen sources' full denominator products, times the signed sum over
/// pairwise node-disjoint path systems of the arrow weights, with denominators
/// cancelled exactly against the common factor.
pub fn lgv_minor_certificate(
    o: &Orientation,
    sigma: &[usize],
    d: u32,
) -> Result<CertificatePolynomial> {
    let (sources, sinks) = ordered_sources_sinks(o);
    if sinks.len() > sources.len() {
        return Err(Error::TooManySinks {
            sinks: sinks.len(),
            sources: sources.len(),
        });
    }
    validate_sigma(sigma, sources.len(), sinks.len())?;
    orientation_is_acyclic(o)?;
    let chosen: Vec<Edge> = sigma.iter().map(|&i| sources[i]).collect();

    // common denominator: product of all right shelves of each chosen tree
    let mut denominator = SignedTableau::one();
    for &mu in &chosen {
        let tree = decorate(&build_source_tree(o, mu)?, o, d)?;
        denominator = denominator.mul(&tree.denominator_product());
    }

    let arcs = edge_dag(o);
    let systems = disjoint_path_systems(&arcs, &chosen, &sinks, PATH_SYSTEM_CAP)?;
    let mut poly = BracketPoly::zero();
    for system in systems {
        let mut term_sign = denominator.sign as i64;
        let mut numerators = Tableau::empty();
        let mut denominators = Tableau::empty();
        let mut perm = vec![0usize; system.len()];
        for (i, (path, sink_index)) in system.iter().enumerate() {
            perm[i] = *sink_index;
            for pair in path.windows(2) {
                let (eta, xi) = (pair[0], pair[1]);
                let x = crossing_vertex(o, eta, xi);
                let (n, dnm) = cramer_shelves(o, x, eta, xi, d)?;
                term_sign *= (n.sign * dnm.sign) as i64;
                numerators = numerators.mul(&n.tableau);
                denominators = denominators.mul(&dnm.tableau);
            }
            // source arrow sign: + when the path leaves through the smaller
            // endpoint (the positive child convention)
            if path.len() > 1 {
                let mu = path[0];
                let exit = crossing_vertex(o, path[0], path[1]);
                if exit != mu.a {
                    term_sign = -term_sign;
                }
            }
        }
        for i in 0..perm.len() {
            for j in i + 1..perm.len() {
                if perm[i] > perm[j] {
                    term_sign = -term_sign;
                }
            }
        }
        let cleared = denominator
            .tableau
            .checked_div(&denominators)
            .expect("path denominators divide the common denominator");
        poly.add_term(cleared.mul(&numerators), q(term_sign));
    }
    assert!(
        poly.is_multi_homogeneous(),
        "path-system minor must be multi-homogeneous"
    );
    Ok(CertificatePolynomial {
        poly,
        provenance: Provenance::Minor {
            sources: chosen,
            sinks,
        },
    })
}

/// The vertex where `eta` enters and `xi` exits (unique for an arrow of the
/// edge DAG).
fn crossing_vertex(o: &Orientation, eta: Edge, xi: Edge) -> u32 {
    for v in [eta.a, eta.b] {
        if xi.touches(v) && o.is_oriented_into(eta, v) && !o.is_oriented_into(xi, v) {
            return v;
        }
    }
    panic!("{eta} -> {xi} is not an arrow of the edge DAG");
}

// ---------------------------------------------------------------------------
// The balanced predicate
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BalanceMode {
    /// Straighten every minor certificate to its normal form.
    Certified,
    /// Evaluate every minor certificate at random lifted matrices
    /// (multi-homogeneity checked, so vanishing transfers exactly).
    Probabilistic,
}

/// Evidence returned by the balanced check: per-pair term counts and per-sigma
/// outcomes, including straightened normal forms in certified mode.
#[derive(Clone, Debug, Serialize)]
pub struct BalanceEvidence {
    pub balanced: bool,
    /// True when there were more sinks than sources, which is balanced by
    /// definition without computing anything.
    pub auto_balanced: bool,
    pub mode: BalanceMode,
    pub seed: u64,
    pub trials: u32,
    pub sources: Vec<Edge>,
    pub sinks: Vec<Edge>,
    /// Term count of each source/sink certificate, row-major over
    /// sources x sinks.
    pub pair_term_counts: Vec<PairTerms>,
    pub sigma_results: Vec<SigmaResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairTerms {
    pub source: Edge,
    pub sink: Edge,
    pub terms: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaResult {
    /// Indices into the ordered source list.
    pub sigma: Vec<usize>,
    pub zero: bool,
    /// Certified mode: the straightened normal form of the content-reduced
    /// certificate ("0" when zero) and the common content divided out first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub content: Option<String>,
}

/// Checks validity (degree, in-degree, acyclicity) of the orientation from its
/// own data, independent of the ambient graph.
fn require_valid(o: &Orientation, d: u32) -> Result<()> {
    if o.edge_count() == 0 {
        return Err(Error::InvalidOrientation("empty subgraph".into()));
    }
    for v in o.vertices() {
        if o.degree(v) < d as usize + 1 {
            return Err(Error::InvalidOrientation(format!(
                "vertex {v} has degree {} < {}",
                o.degree(v),
                d + 1
            )));
        }
        if o.in_degree(v) != d as usize {
            return Err(Error::InvalidOrientation(format!(
                "vertex {v} has in-degree {} != {d}",
                o.in_degree(v)
            )));
        }
    }
    orientation_is_acyclic(o)
}

pub fn is_balanced(
    o: &Orientation,
    d: u32,
    mode: BalanceMode,
    seed: u64,
) -> Result<BalanceEvidence> {
    is_balanced_with(o, d, mode, seed, BALANCE_TRIALS)
}

/// The balanced predicate: immediately true when sinks outnumber sources,
/// otherwise true iff every one of the C(k,l) minor certificates vanishes, by
/// straightening (certified) or by randomized evaluation (probabilistic).
pub fn is_balanced_with(
    o: &Orientation,
    d: u32,
    mode: BalanceMode,
    seed: u64,
    trials: u32,
) -> Result<BalanceEvidence> {
    require_valid(o, d)?;
    let (sources, sinks) = ordered_sources_sinks(o);
    let (k, l) = (sources.len(), sinks.len());
    if l > k {
        return Ok(BalanceEvidence {
            balanced: true,
            auto_balanced: true,
            mode,
            seed,
            trials,
            sources,
            sinks,
            pair_term_counts: Vec::new(),
            sigma_results: Vec::new(),
        });
    }
    // all source/sink certificates, shared across the minors
    let mut pair_polys: BTreeMap<(Edge, Edge), BracketPoly> = BTreeMap::new();
    let mut pair_term_counts = Vec::new();
    for &mu in &sources {
        for &nu in &sinks {
            let cert = source_sink_certificate(o, mu, nu, d)?;
            pair_term_counts.push(PairTerms {
                source: mu,
                sink: nu,
                terms: cert.poly.num_terms(),
            });
            pair_polys.insert((mu, nu), cert.poly);
        }
    }
    let mut balanced = true;
    let mut sigma_results = Vec::new();
    for sigma in (0..k).combinations(l) {
        let rows: Vec<Vec<BracketPoly>> = sigma
            .iter()
            .map(|&i| {
                sinks
                    .iter()
                    .map(|&nu| pair_polys[&(sources[i], nu)].clone())
                    .collect()
            })
            .collect();
        let t_sigma = alternating_minor(&rows);
        let result = match mode {
            BalanceMode::Certified => {
                let content = t_sigma.common_content();
                let reduced = t_sigma
                    .div_monomial(&content)
                    .expect("content divides every term");
                let normal = straighten(&reduced)?;
                SigmaResult {
                    sigma: sigma.clone(),
                    zero: normal.is_zero(),
                    normal_form: Some(format_poly(&normal)),
                    content: Some(content.to_string()),
                }
            }
            BalanceMode::Probabilistic => SigmaResult {
                sigma: sigma.clone(),
                zero: probably_zero(&t_sigma, trials, seed)?,
                normal_form: None,
                content: None,
            },
        };
        balanced &= result.zero;
        sigma_results.push(result);
    }
    Ok(BalanceEvidence {
        balanced,
        auto_balanced: false,
        mode,
        seed,
        trials,
        sources,
        sinks,
        pair_term_counts,
        sigma_results,
    })
}

#[cfg(test)]
mod tests;
