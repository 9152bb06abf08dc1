use super::*;
use crate::bracket::straightens_to_zero;
use crate::orientation::examples::{cycle_orientation, double_banana_orientation};
use crate::orientation::SearchLimits;

fn edge(a: u32, b: u32) -> Edge {
    Edge::new(a, b)
}

/// Child of `parent` labeled by (edge, into), by id.
fn child_of(tree: &Tree, parent: usize, e: Edge, into: Option<u32>) -> usize {
    *tree
        .node(parent)
        .children
        .iter()
        .find(|&&c| tree.node(c).edge == Some(e) && tree.node(c).into == into)
        .unwrap_or_else(|| panic!("no child {e:?} into {into:?}"))
}

fn signed(tuple: &[u32]) -> SignedTableau {
    SignedTableau::from_tuple(tuple)
}

/// Every maximal chain's cleared left-shelf product must equal the original
/// numerators along the chain times all right shelves not on the chain.
fn assert_clearing_postcondition(decorated: &Tree, cleared: &Tree) {
    for chain in decorated.maximal_chains() {
        let mut expected = SignedTableau::one();
        for &id in &chain {
            expected = expected.mul(&decorated.node(id).left_shelf);
        }
        for id in 0..decorated.len() {
            if chain.contains(&id) {
                continue;
            }
            if let Some(d) = &decorated.node(id).right_shelf {
                expected = expected.mul(d);
            }
        }
        assert_eq!(cleared.chain_left_product(&chain), expected);
    }
}

#[test]
fn banana_source_tree_matches_the_figure() {
    let o = double_banana_orientation();
    let tree = build_source_tree(&o, edge(4, 8)).unwrap();

    let pos = tree.root().children[0];
    let neg = tree.root().children[1];
    assert_eq!(tree.node(pos).into, Some(4), "positive child enters 4");
    assert_eq!(tree.node(neg).into, Some(8));

    // (4,8)_4 side: children (1,4)_1, (2,4)_2, (3,4)_3, all chains ending in (1,2)
    let c14 = child_of(&tree, pos, edge(1, 4), Some(1));
    let c24 = child_of(&tree, pos, edge(2, 4), Some(2));
    let c34 = child_of(&tree, pos, edge(3, 4), Some(3));
    assert_eq!(tree.node(pos).children.len(), 3);
    assert_eq!(tree.node(c14).children.len(), 1);
    assert_eq!(tree.node(c24).children.len(), 1);
    let leaf = tree.node(c14).children[0];
    assert_eq!(tree.node(leaf).edge, Some(edge(1, 2)));
    assert_eq!(tree.node(leaf).into, None);
    let c23 = child_of(&tree, c34, edge(2, 3), Some(2));
    assert_eq!(tree.node(c23).children.len(), 1);

    // (4,8)_8 side: single chain through (5,8)_5 fanning out at 5
    let c58 = child_of(&tree, neg, edge(5, 8), Some(5));
    assert_eq!(tree.node(neg).children.len(), 1);
    assert_eq!(tree.node(c58).children.len(), 3);

    // 6 maximal chains, 3 through each stream subtree
    let chains = tree.maximal_chains();
    assert_eq!(chains.len(), 6);
    let via_pos = chains.iter().filter(|c| c[1] == pos).count();
    assert_eq!(via_pos, 3);
}

#[test]
fn trivial_tree_shapes() {
    // a stream whose head vertex has a single out-edge that is a sink
    let o = cycle_orientation(4);
    let tree = build_stream_tree(&o, edge(3, 4), 4).unwrap();
    assert_eq!(tree.len(), 2);
    assert_eq!(tree.maximal_chains(), vec![vec![0, 1]]);

    // the source treated as a stream walks the whole cycle to the sink
    let tree = build_stream_tree(&o, edge(1, 2), 2).unwrap();
    let chains = tree.maximal_chains();
    assert_eq!(chains.len(), 1);
    assert_eq!(tree.depth(), 4);
    let chain = &tree.maximal_chains()[0];
    let labels: Vec<(Option<Edge>, Option<u32>)> = chain
        .iter()
        .map(|&id| (tree.node(id).edge, tree.node(id).into))
        .collect();
    assert_eq!(
        labels,
        vec![
            (Some(edge(1, 2)), Some(2)),
            (Some(edge(2, 3)), Some(3)),
            (Some(edge(3, 4)), Some(4)),
            (Some(edge(1, 4)), None),
        ]
    );
}

#[test]
fn symmetric_source_has_isomorphic_subtrees() {
    let o = cycle_orientation(4);
    // source (1,2): via 1 hits the sink immediately; via 2 walks the streams
    let tree = build_source_tree(&o, edge(1, 2)).unwrap();
    assert_eq!(tree.root().children.len(), 2);
    // depth-2-at-both-heads case: a source whose endpoints see only sinks
    use crate::orientation::EdgeMode::{Sink, Source, Stream};
    let o2 = Orientation::from_pairs(&[
        ((1, 2), Source),
        ((1, 3), Sink),
        ((1, 6), Sink),
        ((2, 4), Sink),
        ((3, 5), Stream { into: 3 }),
        ((4, 5), Stream { into: 4 }),
        ((5, 6), Source),
    ])
    .unwrap();
    let t = build_source_tree(&o2, edge(1, 2)).unwrap();
    // all chains have exactly root + stream node + sink leaf
    for chain in t.maximal_chains() {
        assert_eq!(chain.len(), 3);
    }
}

#[test]
fn decoration_matches_the_paper_shelves() {
    let o = double_banana_orientation();
    let tree = decorate(&build_source_tree(&o, edge(4, 8)).unwrap(), &o, 3).unwrap();
    let pos = tree.root().children[0];
    let neg = tree.root().children[1];

    // right shelf of (4,8)_4 is the tuple (6,7,8,4)
    assert_eq!(tree.node(pos).right_shelf, Some(signed(&[6, 7, 8, 4])));
    // child (1,4)_1: left shelf (6,7,4,1), right shelf (3,5,4,1)
    let c14 = child_of(&tree, pos, edge(1, 4), Some(1));
    assert_eq!(tree.node(c14).left_shelf, signed(&[6, 7, 4, 1]));
    assert_eq!(tree.node(c14).right_shelf, Some(signed(&[3, 5, 4, 1])));
    // its sink leaf: left shelf (3,5,1,2), no right shelf
    let leaf = tree.node(c14).children[0];
    assert_eq!(tree.node(leaf).left_shelf, signed(&[3, 5, 1, 2]));
    assert!(tree.node(leaf).right_shelf.is_none());
    // (5,8)_5 carries (6,7,8,5) on both shelves
    let c58 = child_of(&tree, neg, edge(5, 8), Some(5));
    assert_eq!(tree.node(c58).left_shelf, signed(&[6, 7, 8, 5]));
    assert_eq!(tree.node(c58).right_shelf, Some(signed(&[6, 7, 8, 5])));
    // right shelf of (4,8)_8 is (6,7,4,8)
    assert_eq!(tree.node(neg).right_shelf, Some(signed(&[6, 7, 4, 8])));
    // deepest branch: (3,4)_3 then (2,3)_2 then the sink
    let c34 = child_of(&tree, pos, edge(3, 4), Some(3));
    assert_eq!(tree.node(c34).left_shelf, signed(&[6, 7, 4, 3]));
    assert_eq!(tree.node(c34).right_shelf, Some(signed(&[1, 5, 4, 3])));
    let c23 = child_of(&tree, c34, edge(2, 3), Some(2));
    assert_eq!(tree.node(c23).left_shelf, signed(&[1, 5, 3, 2]));
    assert_eq!(tree.node(c23).right_shelf, Some(signed(&[4, 5, 3, 2])));
    let deep_leaf = tree.node(c23).children[0];
    assert_eq!(tree.node(deep_leaf).left_shelf, signed(&[4, 5, 2, 1]));
}

#[test]
fn clearing_satisfies_the_postcondition_and_ignores_order() {
    let o = double_banana_orientation();
    for source in [edge(4, 8), edge(1, 3), edge(6, 7)] {
        let decorated = decorate(&build_source_tree(&o, source).unwrap(), &o, 3).unwrap();
        let cleared = clear_right_shelves(&decorated);
        for node in 0..cleared.len() {
            assert!(cleared.node(node).right_shelf.is_none());
        }
        assert_clearing_postcondition(&decorated, &cleared);

        // a different chain order gives identical chain products
        let n = decorated.maximal_chains().len();
        let order: Vec<usize> = (0..n).rev().collect();
        let cleared2 = clear_right_shelves_with_order(&decorated, &order);
        for chain in decorated.maximal_chains() {
            assert_eq!(
                cleared.chain_left_product(&chain),
                cleared2.chain_left_product(&chain)
            );
        }
    }
}

#[test]
fn single_chain_tree_keeps_only_its_numerators() {
    let o = cycle_orientation(4);
    let decorated = decorate(&build_stream_tree(&o, edge(1, 2), 2).unwrap(), &o, 1).unwrap();
    let cleared = clear_right_shelves(&decorated);
    let chain = &cleared.maximal_chains()[0];
    let mut numerators = SignedTableau::one();
    for &id in chain {
        numerators = numerators.mul(&decorated.node(id).left_shelf);
    }
    assert_eq!(cleared.chain_left_product(chain), numerators);
}

#[test]
fn banana_certificate_matches_the_six_term_expression() {
    let o = double_banana_orientation();
    let cert = source_sink_certificate(&o, edge(4, 8), edge(1, 2), 3).unwrap();
    // six signed chains, three of each sign, all coefficients +-1
    assert_eq!(cert.poly.num_terms(), 6);
    let mut plus = 0;
    let mut minus = 0;
    for (_, c) in cert.poly.terms() {
        if c == &crate::q(1) {
            plus += 1;
        } else if c == &crate::q(-1) {
            minus += 1;
        } else {
            panic!("coefficient {c} is not a unit");
        }
    }
    assert_eq!((plus, minus), (3, 3));

    // removing the common content leaves the classical six-term reduced form,
    // globally negated
    let content = cert.poly.common_content();
    let reduced = cert.poly.div_monomial(&content).unwrap();
    let display = crate::bracket::parse_poly(concat!(
        "[1,2,3,5][1,4,6,7][2,3,4,5] - [1,2,3,5][1,3,4,5][2,4,6,7]",
        " + [1,2,3,5][1,2,4,5][3,4,6,7] - [1,2,3,4][1,5,6,7][2,3,4,5]",
        " + [1,2,3,4][1,3,4,5][2,5,6,7] - [1,2,3,4][1,2,4,5][3,5,6,7]",
    ))
    .unwrap();
    assert_eq!(reduced, display.neg());

    assert!(straightens_to_zero(&cert.poly).unwrap());
    assert!(probably_zero(&cert.poly, 3, 0).unwrap());
}

#[test]
fn certificate_is_zero_when_the_sink_is_unreachable() {
    use crate::orientation::EdgeMode::{Sink, Source, Stream};
    // two disjoint oriented triangles at d = 1
    let o = Orientation::from_pairs(&[
        ((1, 2), Source),
        ((2, 3), Stream { into: 3 }),
        ((1, 3), Sink),
        ((4, 5), Source),
        ((5, 6), Stream { into: 6 }),
        ((4, 6), Sink),
    ])
    .unwrap();
    let cross = source_sink_certificate(&o, edge(1, 2), edge(4, 6), 1).unwrap();
    assert!(cross.poly.is_zero());
}

#[test]
fn cycle_certificate_is_t_minus_t() {
    // single source, single sink on the 4-cycle: the two chains produce the
    // same tableau with opposite signs
    let o = cycle_orientation(4);
    let cert = source_sink_certificate(&o, edge(1, 2), edge(1, 4), 1).unwrap();
    assert!(cert.poly.is_zero());
    assert!(straightens_to_zero(&cert.poly).unwrap());
}

#[test]
fn minor_with_single_sink_reduces_to_a_pair_certificate() {
    let o = double_banana_orientation();
    let (sources, sinks) = ordered_sources_sinks(&o);
    assert_eq!(sinks.len(), 1);
    for (i, &mu) in sources.iter().enumerate() {
        let minor = minor_certificate(&o, &[i], 3).unwrap();
        let pair = source_sink_certificate(&o, mu, sinks[0], 3).unwrap();
        assert_eq!(minor.poly, pair.poly);
    }
}

#[test]
fn equal_rows_kill_the_alternating_minor() {
    let row = vec![
        BracketPoly::from_tableau(Tableau::new(vec![])),
        crate::bracket::parse_poly("[1,2][3,4]").unwrap(),
    ];
    let det = alternating_minor(&[row.clone(), row]);
    assert!(det.is_zero());
}

#[test]
fn too_many_sinks_is_flagged_and_auto_balanced() {
    use crate::orientation::EdgeMode::{Sink, Source, Stream};
    // figure-eight at d = 1: two triangles sharing vertex 3, three sinks but
    // only two sources
    let o = Orientation::from_pairs(&[
        ((1, 2), Source),
        ((2, 3), Stream { into: 3 }),
        ((1, 3), Sink),
        ((3, 4), Sink),
        ((4, 5), Source),
        ((3, 5), Sink),
    ])
    .unwrap();
    assert!(matches!(
        minor_certificate(&o, &[0, 1], 1),
        Err(Error::TooManySinks {
            sinks: 3,
            sources: 2
        })
    ));
    let ev = is_balanced(&o, 1, BalanceMode::Probabilistic, 0).unwrap();
    assert!(ev.balanced);
    assert!(ev.auto_balanced);
}

#[test]
fn banana_is_balanced_in_both_modes() {
    let o = double_banana_orientation();
    for mode in [BalanceMode::Probabilistic, BalanceMode::Certified] {
        let ev = is_balanced(&o, 3, mode, 0).unwrap();
        assert!(ev.balanced, "mode {mode:?}");
        assert!(!ev.auto_balanced);
        assert_eq!(ev.sources.len(), 7);
        assert_eq!(ev.sinks.len(), 1);
        assert_eq!(ev.sigma_results.len(), 7);
        for r in &ev.sigma_results {
            assert!(r.zero);
            if mode == BalanceMode::Certified {
                assert_eq!(r.normal_form.as_deref(), Some("0"));
            }
        }
    }
}

#[test]
fn corollary_cycle_orientation_is_balanced() {
    let o = cycle_orientation(4);
    let ev = is_balanced(&o, 1, BalanceMode::Certified, 0).unwrap();
    assert!(ev.balanced);
    let ev = is_balanced(&o, 1, BalanceMode::Probabilistic, 0).unwrap();
    assert!(ev.balanced);
}

#[test]
fn certified_and_probabilistic_modes_agree_on_a_negative_case() {
    // a valid orientation of rigid K33: both modes must reject it and flag
    // the same nonvanishing minors
    let g = crate::graph::Graph::new(
        6,
        &[
            (1, 4),
            (1, 5),
            (1, 6),
            (2, 4),
            (2, 5),
            (2, 6),
            (3, 4),
            (3, 5),
            (3, 6),
        ],
    );
    let o = crate::orientation::enumerate_orientations(&g, 2, SearchLimits::default())
        .next()
        .unwrap()
        .unwrap();
    let certified = is_balanced(&o, 2, BalanceMode::Certified, 0).unwrap();
    let sampled = is_balanced(&o, 2, BalanceMode::Probabilistic, 0).unwrap();
    assert!(!certified.balanced);
    assert!(!sampled.balanced);
    for (c, s) in certified.sigma_results.iter().zip(&sampled.sigma_results) {
        assert_eq!(c.sigma, s.sigma);
        assert_eq!(c.zero, s.zero, "sigma {:?}", c.sigma);
        if !c.zero {
            assert_ne!(c.normal_form.as_deref(), Some("0"));
        }
    }
}

#[test]
fn no_orientation_of_k33_is_balanced() {
    // K_{3,3} is tight and generically rigid in the plane, so the theorem says
    // no valid orientation can be balanced; its only min-degree-3 subgraph is
    // the whole graph
    let g = crate::graph::Graph::new(
        6,
        &[
            (1, 4),
            (1, 5),
            (1, 6),
            (2, 4),
            (2, 5),
            (2, 6),
            (3, 4),
            (3, 5),
            (3, 6),
        ],
    );
    assert_eq!(crate::graph::tightness(&g, 2), 0);
    let mut candidates = 0;
    for o in crate::orientation::enumerate_orientations(&g, 2, SearchLimits::default()) {
        let o = o.unwrap();
        candidates += 1;
        let ev = is_balanced_with(&o, 2, BalanceMode::Probabilistic, 7, 2).unwrap();
        assert!(
            !ev.balanced,
            "orientation {o:?} claims balance on a rigid graph"
        );
    }
    assert!(candidates > 0, "K33 admits valid orientations");
}

#[test]
fn invalid_orientations_are_rejected() {
    use crate::orientation::EdgeMode::Stream;
    // in-degree 2 at vertex 2 with d = 1
    let o = Orientation::from_pairs(&[
        ((1, 2), Stream { into: 2 }),
        ((2, 3), Stream { into: 2 }),
        ((1, 3), Stream { into: 1 }),
    ])
    .unwrap();
    assert!(matches!(
        is_balanced(&o, 1, BalanceMode::Probabilistic, 0),
        Err(Error::InvalidOrientation(_))
    ));
}

#[test]
fn lgv_agrees_with_the_tree_certificates_on_the_banana() {
    let o = double_banana_orientation();
    let (sources, _) = ordered_sources_sinks(&o);
    for (i, mu) in sources.iter().enumerate() {
        let tree = minor_certificate(&o, &[i], 3).unwrap();
        let lgv = lgv_minor_certificate(&o, &[i], 3).unwrap();
        assert_eq!(tree.poly, lgv.poly, "source {mu}");
        assert!(straightens_to_zero(&tree.poly.sub(&lgv.poly)).unwrap());
    }
}

#[test]
fn lgv_agrees_on_a_two_sink_instance() {
    use crate::orientation::EdgeMode::{Sink, Source};
    // 4-cycle with two sources and two sinks: a genuinely 2x2 minor
    let o = Orientation::from_pairs(&[
        ((1, 2), Source),
        ((2, 3), Sink),
        ((3, 4), Source),
        ((1, 4), Sink),
    ])
    .unwrap();
    let t = minor_certificate(&o, &[0, 1], 1).unwrap();
    let l = lgv_minor_certificate(&o, &[0, 1], 1).unwrap();
    assert_eq!(t.poly, l.poly);
    // the pair certificates themselves are nonzero even though the minor
    // cancels
    let (sources, sinks) = ordered_sources_sinks(&o);
    let t11 = source_sink_certificate(&o, sources[0], sinks[0], 1).unwrap();
    assert!(!t11.poly.is_zero());
}

#[test]
fn no_disjoint_system_yields_the_zero_sum() {
    // synthetic DAG: both sources funnel through the same node x
    let (mu1, mu2, x, nu1, nu2) = (
        edge(1, 10),
        edge(2, 10),
        edge(3, 10),
        edge(4, 10),
        edge(5, 10),
    );
    let mut arcs: BTreeMap<Edge, Vec<Edge>> = BTreeMap::new();
    arcs.insert(mu1, vec![x]);
    arcs.insert(mu2, vec![x]);
    arcs.insert(x, vec![nu1, nu2]);
    arcs.insert(nu1, vec![]);
    arcs.insert(nu2, vec![]);
    let systems = disjoint_path_systems(&arcs, &[mu1, mu2], &[nu1, nu2], 1000).unwrap();
    assert!(systems.is_empty());
}

#[test]
fn path_system_budget_is_enforced() {
    let o = double_banana_orientation();
    let arcs = edge_dag(&o);
    let (sources, sinks) = ordered_sources_sinks(&o);
    assert!(matches!(
        disjoint_path_systems(&arcs, &sources[..1], &sinks, 2),
        Err(Error::SearchBudgetExceeded { budget: 2 })
    ));
}
