use num::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::QMatrix;

fn bracket(ix: &[u32]) -> Bracket {
    let (s, b) = Bracket::normalize(ix);
    assert_eq!(s, 1, "fixture bracket must be sorted");
    b.unwrap()
}

fn tableau(rows: &[&[u32]]) -> Tableau {
    Tableau::new(rows.iter().map(|r| bracket(r)).collect())
}

fn monomial(rows: &[&[u32]]) -> BracketPoly {
    BracketPoly::from_tableau(tableau(rows))
}

fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> QMatrix {
    QMatrix::from_rows(
        (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| crate::q(rng.gen_range(-50..=50)))
                    .collect()
            })
            .collect(),
    )
}

fn random_bracket(n: u32, width: usize, rng: &mut impl Rng) -> Bracket {
    loop {
        let tuple: Vec<u32> = (0..width).map(|_| rng.gen_range(1..=n)).collect();
        if let (_, Some(b)) = Bracket::normalize(&tuple) {
            return b;
        }
    }
}

fn random_poly(n: u32, width: usize, max_terms: usize, rng: &mut impl Rng) -> BracketPoly {
    let mut p = BracketPoly::zero();
    for _ in 0..rng.gen_range(1..=max_terms) {
        let degree = rng.gen_range(1..=3);
        let rows: Vec<Bracket> = (0..degree).map(|_| random_bracket(n, width, rng)).collect();
        p.add_term(Tableau::new(rows), crate::q(rng.gen_range(-3..=3)));
    }
    p
}

#[test]
fn normalize_records_permutation_sign() {
    let (s, b) = Bracket::normalize(&[2, 1, 3, 4]);
    assert_eq!(s, -1);
    assert_eq!(b.unwrap().indices(), &[1, 2, 3, 4]);
    let (s, b) = Bracket::normalize(&[1, 2, 3, 4]);
    assert_eq!(s, 1);
    assert_eq!(b.unwrap().indices(), &[1, 2, 3, 4]);
    let (s, b) = Bracket::normalize(&[1, 1, 2, 3]);
    assert_eq!(s, 0);
    assert!(b.is_none());
    assert!(matches!(
        Bracket::from_tuple(&[1, 9], 8),
        Err(crate::Error::IndexOutOfRange { index: 9, max: 8 })
    ));
}

proptest! {
    #[test]
    fn any_transposition_flips_the_sign(
        tuple in proptest::collection::vec(1u32..=12, 2..=5),
        i in 0usize..5,
        j in 0usize..5,
    ) {
        let i = i % tuple.len();
        let j = j % tuple.len();
        prop_assume!(i != j);
        let (s1, b1) = Bracket::normalize(&tuple);
        let mut swapped = tuple.clone();
        swapped.swap(i, j);
        let (s2, b2) = Bracket::normalize(&swapped);
        if b1.is_none() {
            prop_assert!(b2.is_none());
        } else {
            prop_assert_eq!(b1, b2);
            prop_assert_eq!(s1, -s2);
        }
    }
}

#[test]
fn standardness_examples() {
    // first violation 4 > 3 in column 2
    let t = tableau(&[&[1, 2, 3, 5], &[1, 4, 6, 7], &[2, 3, 4, 5]]);
    assert!(!t.is_standard());
    assert_eq!(t.first_violation(), Some((1, 1)));
    assert!(tableau(&[&[1, 3, 4, 5], &[2, 4, 6, 7]]).is_standard());
    assert!(tableau(&[&[3, 5, 6, 9]]).is_standard());
}

#[test]
fn tableaux_order_is_degree_then_row_lex() {
    let a = tableau(&[&[1, 4, 6, 7], &[2, 3, 4, 5]]);
    let b = tableau(&[&[1, 3, 4, 7], &[2, 4, 5, 6]]);
    assert!(b < a);
    let c = tableau(&[&[7, 8, 9, 10]]);
    assert!(c < b, "lower degree is smaller regardless of entries");
}

#[test]
fn syzygy_initial_tableau_matches_worked_example() {
    let syz = van_der_waerden_syzygy(&[1], &[2, 3, 4, 6, 7], &[4, 5], 4).unwrap();
    let (lead, c) = syz.leading_term().unwrap();
    assert_eq!(lead, &tableau(&[&[1, 4, 6, 7], &[2, 3, 4, 5]]));
    assert_eq!(c, &crate::q(1));
    // a spectator row [1,2,3,5] recovers the three-row reduction target
    let spect = tableau(&[&[1, 2, 3, 5]]);
    let with_spectator = syz.mul_monomial(&spect, &crate::q(1));
    let (lead, _) = with_spectator.leading_term().unwrap();
    assert_eq!(
        lead,
        &tableau(&[&[1, 2, 3, 5], &[1, 4, 6, 7], &[2, 3, 4, 5]])
    );
}

#[test]
fn syzygies_evaluate_to_zero_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases: Vec<BracketPoly> = vec![
        van_der_waerden_syzygy(&[1], &[2, 3, 4, 6, 7], &[4, 5], 4).unwrap(),
        van_der_waerden_syzygy(&[], &[1, 3, 4], &[2], 2).unwrap(),
        van_der_waerden_syzygy(&[2, 5], &[1, 3, 4, 7], &[], 3).unwrap(),
    ];
    for syz in cases {
        let width = syz.width().unwrap().unwrap();
        let n = syz.max_index() as usize;
        for _ in 0..5 {
            let m = random_matrix(width, n, &mut rng);
            assert!(syz.evaluate(&m).unwrap().is_zero());
        }
    }
}

#[test]
fn width_one_syzygy_is_identically_zero() {
    let syz = van_der_waerden_syzygy(&[], &[3, 7], &[], 1).unwrap();
    assert!(
        syz.is_zero(),
        "[a][b] - [b][a] cancels in a commutative ring"
    );
}

#[test]
fn syzygy_shape_mismatch_is_rejected() {
    assert!(matches!(
        van_der_waerden_syzygy(&[1, 2], &[3, 4, 5], &[6], 4),
        Err(crate::Error::ShapeMismatch(_))
    ));
}

#[test]
fn straighten_reproduces_the_replacement_identity() {
    let p = monomial(&[&[1, 4, 6, 7], &[2, 3, 4, 5]]);
    let s = straighten(&p).unwrap();
    let expected =
        parse_poly("[1,3,4,5][2,4,6,7] - [1,2,4,5][3,4,6,7] + [1,2,3,4][4,5,6,7]").unwrap();
    assert_eq!(s, expected);
}

#[test]
fn straighten_fixes_standard_input_and_is_idempotent() {
    let p = parse_poly("2[1,3,4,5][2,4,6,7] - [1,2,3,4]").unwrap();
    assert_eq!(straighten(&p).unwrap(), p);
    let q = monomial(&[&[1, 4, 6, 7], &[2, 3, 4, 5]]);
    let once = straighten(&q).unwrap();
    assert_eq!(straighten(&once).unwrap(), once);
}

/// The reduced six-term certificate of the double banana source (4,8).
pub fn six_term_certificate() -> BracketPoly {
    parse_poly(concat!(
        "[1,2,3,5][1,4,6,7][2,3,4,5] - [1,2,3,5][1,3,4,5][2,4,6,7]",
        " + [1,2,3,5][1,2,4,5][3,4,6,7] - [1,2,3,4][1,5,6,7][2,3,4,5]",
        " + [1,2,3,4][1,3,4,5][2,5,6,7] - [1,2,3,4][1,2,4,5][3,5,6,7]",
    ))
    .unwrap()
}

#[test]
fn six_term_certificate_straightens_to_zero() {
    let p = six_term_certificate();
    assert!(straighten(&p).unwrap().is_zero());
    assert!(straightens_to_zero(&p).unwrap());
    // while a tableau minus itself is zero before any real work
    let t = monomial(&[&[1, 4, 6, 7], &[2, 3, 4, 5]]);
    assert!(straightens_to_zero(&t.sub(&t)).unwrap());
    // and a lone standard tableau is a basis element
    assert!(!straightens_to_zero(&monomial(&[&[1, 2, 3, 4]])).unwrap());
}

#[test]
fn plucker_replacement_identities_match_the_worked_example() {
    // (i_1..i_5) = (1,2,3,4,5), (j_1,j_2,j_3) = (4,6,7):
    //   -[1467][2345] + [1345][2467] - [1245][3467] + [1234][4567] = 0
    let p = plucker_relation(&[1, 2, 3, 4, 5], &[4, 6, 7]).unwrap();
    let expected = parse_poly(
        "- [1,4,6,7][2,3,4,5] + [1,3,4,5][2,4,6,7] - [1,2,4,5][3,4,6,7] + [1,2,3,4][4,5,6,7]",
    )
    .unwrap();
    assert_eq!(p, expected);
    assert!(straightens_to_zero(&p).unwrap());

    // same i-tuple with (5,6,7) rewrites the other nonstandard tableau
    let p2 = plucker_relation(&[1, 2, 3, 4, 5], &[5, 6, 7]).unwrap();
    let expected2 = parse_poly(
        "- [1,5,6,7][2,3,4,5] + [1,3,4,5][2,5,6,7] - [1,2,4,5][3,5,6,7] + [1,2,3,5][4,5,6,7]",
    )
    .unwrap();
    assert_eq!(p2, expected2);
    assert!(straightens_to_zero(&p2).unwrap());
}

#[test]
fn plucker_instances_vanish_under_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let p = plucker_relation(&[2, 3, 5, 7], &[1, 6]).unwrap();
        let m = random_matrix(3, 7, &mut rng);
        assert!(p.evaluate(&m).unwrap().is_zero());
    }
}

#[test]
fn exchange_width_one_swaps_the_single_box() {
    let t = tableau(&[&[3], &[8]]);
    let s = exchange_expand(&t, (0, 1), &[0]).unwrap();
    // swapping the lone boxes reproduces the same monomial
    assert_eq!(s, BracketPoly::from_tableau(t.clone()));
    assert!(straightens_to_zero(&BracketPoly::from_tableau(t).sub(&s)).unwrap());
}

#[test]
fn exchange_expansion_equals_original_in_the_ring() {
    let t = tableau(&[&[1, 4, 6, 7], &[2, 3, 4, 5]]);
    for fixed in [vec![0], vec![1], vec![0, 2]] {
        let s = exchange_expand(&t, (0, 1), &fixed).unwrap();
        let diff = BracketPoly::from_tableau(t.clone()).sub(&s);
        assert!(
            straightens_to_zero(&diff).unwrap(),
            "exchange with fixed boxes {fixed:?} must equal t in the ring"
        );
    }
}

#[test]
fn exchange_drops_terms_with_repeated_indices() {
    // both rows contain 4, so some swaps collapse to the zero bracket
    let t = tableau(&[&[1, 4, 6, 7], &[2, 3, 4, 5]]);
    let s = exchange_expand(&t, (0, 1), &[2]).unwrap(); // fixed box holds 4
    let full_count = 4; // one swap per box of the first row
    assert!(s.num_terms() < full_count);
}

#[test]
fn multi_degree_examples() {
    let p = parse_poly("[1,2][1,3] + [1,2][1,3]").unwrap();
    let deg = p.multi_degree().unwrap();
    assert_eq!(deg.get(&1), Some(&2));
    assert_eq!(deg.get(&2), Some(&1));
    assert_eq!(deg.get(&3), Some(&1));

    let p = parse_poly("[1,2] + [1,3]").unwrap();
    assert!(p.multi_degree().is_none());
    assert!(!p.is_multi_homogeneous());

    assert!(six_term_certificate().is_multi_homogeneous());
}

#[test]
fn evaluate_examples() {
    // d = 1, M columns (0;1), (1;1): [1,2] -> det [[0,1],[1,1]] = -1
    let p = parse_poly("[1,2]").unwrap();
    let m = QMatrix::from_rows(vec![
        vec![crate::q(0), crate::q(1)],
        vec![crate::q(1), crate::q(1)],
    ]);
    assert_eq!(p.evaluate(&m).unwrap(), crate::q(-1));
    assert!(matches!(
        p.evaluate(&random_matrix(3, 4, &mut ChaCha8Rng::seed_from_u64(0))),
        Err(crate::Error::WidthMismatch { .. })
    ));
}

#[test]
fn straightening_preserves_evaluation_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let p = random_poly(7, 4, 4, &mut rng);
        let s = straighten(&p).unwrap();
        assert!(s.terms().all(|(t, _)| t.is_standard()));
        for _ in 0..3 {
            let m = random_matrix(4, 7, &mut rng);
            assert_eq!(p.evaluate(&m).unwrap(), s.evaluate(&m).unwrap());
        }
    }
}

#[test]
fn probably_zero_examples() {
    let p = plucker_relation(&[1, 2, 3, 4, 5], &[4, 6, 7]).unwrap();
    assert!(probably_zero(&p, 5, 0).unwrap());
    let t = monomial(&[&[1, 2, 3, 4]]);
    assert!(!probably_zero(&t, 5, 0).unwrap());
    let inhomog = parse_poly("[1,2] + [1,3]").unwrap();
    assert!(matches!(
        probably_zero(&inhomog, 5, 0),
        Err(crate::Error::NotMultiHomogeneous)
    ));
}

#[test]
fn probably_zero_agrees_with_straightening_on_generated_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut cases: Vec<BracketPoly> = Vec::new();
    for i in 0..50 {
        let case = match i % 4 {
            // ideal members: monomial multiples of Pluecker instances
            0 => {
                let m = tableau(&[&[1, 2, 5, 7]]);
                plucker_relation(&[1, 2, 3, 4, 5], &[4, 6, 7])
                    .unwrap()
                    .mul_monomial(&m, &crate::q(1 + (i as i64 % 3)))
            }
            1 => van_der_waerden_syzygy(&[1], &[2, 3, 4, 6, 7], &[4, 5], 4)
                .unwrap()
                .mul_monomial(&tableau(&[&[2, 3, 6, 7]]), &crate::q(-2)),
            // nonzero multi-homogeneous elements
            2 => {
                let t = random_bracket(7, 4, &mut rng);
                BracketPoly::from_tableau(Tableau::new(vec![t.clone(), t]))
            }
            _ => {
                let t = tableau(&[&[1, 4, 6, 7], &[2, 3, 4, 5]]);
                let ex = exchange_expand(&t, (0, 1), &[1]).unwrap();
                BracketPoly::from_tableau(t).add(&ex)
            }
        };
        cases.push(case);
    }
    for case in cases {
        let certified = straightens_to_zero(&case).unwrap();
        let sampled = probably_zero(&case, 5, 17).unwrap();
        assert_eq!(certified, sampled);
    }
}

#[test]
fn blowup_cap_fires_instead_of_truncating() {
    let p = monomial(&[&[1, 4, 6, 7], &[2, 3, 4, 5], &[2, 3, 4, 6]]);
    match straighten_with_cap(&p, 2) {
        Err(crate::Error::ExpressionBlowup { cap: 2, .. }) => {}
        other => panic!("expected blowup, got {other:?}"),
    }
}

#[test]
fn text_format_round_trips() {
    let cases = [
        "[1,4,6,7][2,3,4,5]",
        "- [1,2,3,4] + 2[1,3,4,5][2,4,6,7]",
        "3/2[1,2][1,3] - [2,3]",
        "0",
    ];
    for c in cases {
        let p = parse_poly(c).unwrap();
        let printed = format_poly(&p);
        assert_eq!(parse_poly(&printed).unwrap(), p, "round trip of {c:?}");
    }
    // unsorted tuples normalize with sign on parse
    let p = parse_poly("[2,1]").unwrap();
    assert_eq!(p, parse_poly("- [1,2]").unwrap());
    assert!(parse_poly("[1,1]").is_err());
    assert!(parse_poly("").is_err());
}

#[test]
fn generic_matrix_has_unit_bottom_row() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m = GenericMatrix::random(6, 2, &mut rng);
    assert_eq!(m.dim(), 2);
    assert_eq!(m.vertices(), 6);
    for c in 0..6 {
        assert_eq!(m.as_matrix().at(2, c), &crate::q(1));
    }
}
