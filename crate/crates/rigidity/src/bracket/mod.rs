//! The bracket ring engine: brackets, tableaux, the straightening law, Pluecker
//! and exchange relations, multi-homogeneity, and evaluation at lifted
//! coordinate matrices.
//!
//! A bracket `[l_1 ... l_w]` stands for the maximal minor of a w x n matrix
//! selecting columns l_1..l_w. Brackets are stored sorted; building one from an
//! arbitrary tuple records the sign of the sorting permutation, and a repeated
//! index collapses to zero. A tableau is a product of brackets written as rows,
//! kept sorted by the lexicographic bracket order; it is standard when every
//! column is weakly increasing downward. The standard tableaux form a vector
//! space basis of the ring, and `straighten` rewrites any element into that
//! basis.

mod straighten;
mod text;

pub use straighten::{straighten, straighten_with_cap, straightens_to_zero, DEFAULT_TERM_CAP};
pub use text::{format_poly, parse_poly};

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Placement;
use crate::linalg::QMatrix;
use crate::{q, Q};

/// Coordinate magnitude bound for random genericity sampling.
pub const COORD_BOUND: i64 = 1 << 20;

/// Strictly increasing index tuple. The zero bracket (repeated index) is not
/// representable; `normalize` reports it through a zero sign.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Bracket {
    indices: Vec<u32>,
}

impl Bracket {
    /// Sorts an arbitrary tuple into a bracket. Returns the sign of the sorting
    /// permutation, or 0 together with `None` when an index repeats.
    pub fn normalize(tuple: &[u32]) -> (i8, Option<Bracket>) {
        let mut inversions = 0usize;
        for i in 0..tuple.len() {
            for j in i + 1..tuple.len() {
                if tuple[i] == tuple[j] {
                    return (0, None);
                }
                if tuple[i] > tuple[j] {
                    inversions += 1;
                }
            }
        }
        let mut indices = tuple.to_vec();
        indices.sort_unstable();
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        (sign, Some(Bracket { indices }))
    }

    /// Variant that validates indices against a ground set 1..=n.
    pub fn from_tuple(tuple: &[u32], n: u32) -> Result<(i8, Option<Bracket>)> {
        for &i in tuple {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfRange { index: i, max: n });
            }
        }
        Ok(Self::normalize(tuple))
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn width(&self) -> usize {
        self.indices.len()
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// Product of brackets of equal width, stored as rows sorted by the
/// lexicographic bracket order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Tableau {
    rows: Vec<Bracket>,
}

impl Tableau {
    pub fn new(mut rows: Vec<Bracket>) -> Tableau {
        rows.sort();
        Tableau { rows }
    }

    pub fn empty() -> Tableau {
        Tableau { rows: Vec::new() }
    }

    pub fn rows(&self) -> &[Bracket] {
        &self.rows
    }

    pub fn degree(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> Option<usize> {
        self.rows.first().map(|b| b.width())
    }

    pub fn mul(&self, other: &Tableau) -> Tableau {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Tableau::new(rows)
    }

    /// True iff every column is weakly increasing downward (rows are already
    /// sorted by the bracket order).
    pub fn is_standard(&self) -> bool {
        self.first_violation().is_none()
    }

    /// First column violation, scanning row pairs top-down and columns
    /// left-to-right. Returns (upper row index, column index).
    pub fn first_violation(&self) -> Option<(usize, usize)> {
        for r in 0..self.rows.len().saturating_sub(1) {
            let (u, l) = (&self.rows[r], &self.rows[r + 1]);
            for s in 0..u.width().min(l.width()) {
                if u.indices()[s] > l.indices()[s] {
                    return Some((r, s));
                }
            }
        }
        None
    }

    /// How many factors each index appears in, counted with row multiplicity.
    pub fn multi_degree(&self) -> BTreeMap<u32, usize> {
        let mut deg = BTreeMap::new();
        for row in &self.rows {
            for &i in row.indices() {
                *deg.entry(i).or_insert(0) += 1;
            }
        }
        deg
    }

    /// Multiset difference self - other; None when other is not contained.
    pub fn checked_div(&self, other: &Tableau) -> Option<Tableau> {
        let mut rows = self.rows.clone();
        for b in &other.rows {
            let pos = rows.iter().position(|r| r == b)?;
            rows.remove(pos);
        }
        Some(Tableau { rows })
    }
}

impl Ord for Tableau {
    /// The tableaux order: degree first, then (for equal degree) lexicographic
    /// comparison of the sorted row lists, which coincides with the degree
    /// reverse lexicographic order induced by the bracket order.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rows
            .len()
            .cmp(&other.rows.len())
            .then_with(|| self.rows.cmp(&other.rows))
    }
}

impl PartialOrd for Tableau {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "1");
        }
        for row in &self.rows {
            write!(f, "{row}")?;
        }
        Ok(())
    }
}

/// A tableau together with a sign, the unit of account for shelf decorations
/// where brackets arise unsorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedTableau {
    pub sign: i8,
    pub tableau: Tableau,
}

impl SignedTableau {
    pub fn one() -> SignedTableau {
        SignedTableau {
            sign: 1,
            tableau: Tableau::empty(),
        }
    }

    pub fn from_tuple(tuple: &[u32]) -> SignedTableau {
        let (sign, b) = Bracket::normalize(tuple);
        assert!(sign != 0, "zero bracket in shelf decoration");
        SignedTableau {
            sign,
            tableau: Tableau::new(vec![b.unwrap()]),
        }
    }

    pub fn mul(&self, other: &SignedTableau) -> SignedTableau {
        SignedTableau {
            sign: self.sign * other.sign,
            tableau: self.tableau.mul(&other.tableau),
        }
    }

    pub fn is_one(&self) -> bool {
        self.sign == 1 && self.tableau.degree() == 0
    }
}

/// Rational-coefficient linear combination of tableaux, keyed in the tableaux
/// order. Zero coefficients and zero-bracket tableaux are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BracketPoly {
    terms: BTreeMap<Tableau, Q>,
}

impl BracketPoly {
    pub fn zero() -> BracketPoly {
        BracketPoly::default()
    }

    pub fn from_tableau(t: Tableau) -> BracketPoly {
        let mut p = BracketPoly::zero();
        p.add_term(t, Q::one());
        p
    }

    pub fn from_signed(st: &SignedTableau) -> BracketPoly {
        let mut p = BracketPoly::zero();
        p.add_term(st.tableau.clone(), q(st.sign as i64));
        p
    }

    pub fn add_term(&mut self, t: Tableau, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(t) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Tableau, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, t: &Tableau) -> Q {
        self.terms.get(t).cloned().unwrap_or_else(Q::zero)
    }

    /// The tableaux-order largest term.
    pub fn leading_term(&self) -> Option<(&Tableau, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn neg(&self) -> BracketPoly {
        BracketPoly {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &BracketPoly) -> BracketPoly {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &BracketPoly) -> BracketPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> BracketPoly {
        if c.is_zero() {
            return BracketPoly::zero();
        }
        BracketPoly {
            terms: self.terms.iter().map(|(t, k)| (t.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Tableau, c: &Q) -> BracketPoly {
        if c.is_zero() {
            return BracketPoly::zero();
        }
        BracketPoly {
            terms: self.terms.iter().map(|(t, k)| (t.mul(m), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &BracketPoly) -> BracketPoly {
        let mut out = BracketPoly::zero();
        for (t, c) in &self.terms {
            for (u, d) in &other.terms {
                out.add_term(t.mul(u), c * d);
            }
        }
        out
    }

    /// Common bracket width, when any term exists. Mixed widths are rejected.
    pub fn width(&self) -> Result<Option<usize>> {
        let mut width = None;
        for t in self.terms.keys() {
            for row in t.rows() {
                match width {
                    None => width = Some(row.width()),
                    Some(w) if w != row.width() => {
                        return Err(Error::WidthMismatch {
                            expected: w,
                            got: row.width(),
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(width)
    }

    /// Largest index appearing anywhere, i.e. the smallest valid ground set.
    pub fn max_index(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|t| t.rows())
            .flat_map(|b| b.indices())
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Multiset gcd of the terms' rows: the largest monomial dividing every
    /// term. Zero polynomial has empty content.
    pub fn common_content(&self) -> Tableau {
        let mut iter = self.terms.keys();
        let Some(first) = iter.next() else {
            return Tableau::empty();
        };
        let mut content: Vec<Bracket> = first.rows().to_vec();
        for t in iter {
            let mut remaining = t.rows().to_vec();
            content.retain(|b| {
                if let Some(pos) = remaining.iter().position(|r| r == b) {
                    remaining.remove(pos);
                    true
                } else {
                    false
                }
            });
            if content.is_empty() {
                break;
            }
        }
        Tableau::new(content)
    }

    /// Exact division by a monomial that divides every term.
    pub fn div_monomial(&self, m: &Tableau) -> Option<BracketPoly> {
        let mut out = BracketPoly::zero();
        for (t, c) in &self.terms {
            out.add_term(t.checked_div(m)?, c.clone());
        }
        Some(out)
    }

    /// Per-vertex factor counts common to all terms, or None when terms
    /// disagree (not multi-homogeneous). The zero polynomial is trivially
    /// multi-homogeneous with empty multidegree.
    pub fn multi_degree(&self) -> Option<BTreeMap<u32, usize>> {
        let mut iter = self.terms.keys();
        let Some(first) = iter.next() else {
            return Some(BTreeMap::new());
        };
        let deg = first.multi_degree();
        for t in iter {
            if t.multi_degree() != deg {
                return None;
            }
        }
        Some(deg)
    }

    pub fn is_multi_homogeneous(&self) -> bool {
        self.multi_degree().is_some()
    }

    /// Evaluates at a matrix whose row count equals the bracket width: each
    /// bracket becomes the determinant of the column submatrix it selects.
    pub fn evaluate(&self, m: &QMatrix) -> Result<Q> {
        let width = self.width()?;
        let Some(width) = width else {
            // constant polynomial
            return Ok(self
                .terms
                .get(&Tableau::empty())
                .cloned()
                .unwrap_or_else(Q::zero));
        };
        if m.rows() != width {
            return Err(Error::WidthMismatch {
                expected: width,
                got: m.rows(),
            });
        }
        let n = m.cols() as u32;
        let mut minors: BTreeMap<&Bracket, Q> = BTreeMap::new();
        let mut total = Q::zero();
        for (t, c) in &self.terms {
            let mut prod = c.clone();
            for row in t.rows() {
                if !minors.contains_key(row) {
                    for &i in row.indices() {
                        if i == 0 || i > n {
                            return Err(Error::IndexOutOfRange { index: i, max: n });
                        }
                    }
                    let sub = QMatrix::from_rows(
                        (0..width)
                            .map(|r| {
                                row.indices()
                                    .iter()
                                    .map(|&ci| m.at(r, ci as usize - 1).clone())
                                    .collect()
                            })
                            .collect(),
                    );
                    minors.insert(row, sub.det());
                }
                prod *= &minors[row];
                if prod.is_zero() {
                    break;
                }
            }
            total += prod;
        }
        Ok(total)
    }
}

impl fmt::Display for BracketPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(self))
    }
}

/// The lifted coordinate matrix: top d rows are placement coordinates, bottom
/// row all ones, one column per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericMatrix {
    mat: QMatrix,
}

impl GenericMatrix {
    pub fn from_placement(p: &Placement, v: u32) -> Result<GenericMatrix> {
        let d = p.dim as usize;
        let mut rows = vec![Vec::with_capacity(v as usize); d + 1];
        for vertex in 1..=v {
            let coords = p.coords(vertex)?;
            for (k, row) in rows.iter_mut().enumerate().take(d) {
                row.push(coords[k].clone());
            }
            rows[d].push(Q::one());
        }
        Ok(GenericMatrix {
            mat: QMatrix::from_rows(rows),
        })
    }

    /// Integer coordinates sampled uniformly from [-2^20, 2^20].
    pub fn random(v: u32, d: u32, rng: &mut impl Rng) -> GenericMatrix {
        let rows: Vec<Vec<Q>> = (0..d as usize)
            .map(|_| {
                (0..v)
                    .map(|_| q(rng.gen_range(-COORD_BOUND..=COORD_BOUND)))
                    .collect()
            })
            .chain(std::iter::once(vec![Q::one(); v as usize]))
            .collect();
        GenericMatrix {
            mat: QMatrix::from_rows(rows),
        }
    }

    pub fn as_matrix(&self) -> &QMatrix {
        &self.mat
    }

    pub fn vertices(&self) -> u32 {
        self.mat.cols() as u32
    }

    pub fn dim(&self) -> u32 {
        self.mat.rows() as u32 - 1
    }
}

/// The van der Waerden syzygy [[alpha . beta gamma]]: the quadratic relation
///
///   sum over s-subsets tau of beta of
///     sgn(tau, tau*) [alpha beta_{tau*}] [beta_tau gamma]
///
/// with |alpha| = s-1, |beta| = width+1, |gamma| = width-s. Its evaluation at
/// every matrix vanishes, and its tableaux-order initial term is the
/// nonstandard product it is used to eliminate.
pub fn van_der_waerden_syzygy(
    alpha: &[u32],
    beta: &[u32],
    gamma: &[u32],
    width: usize,
) -> Result<BracketPoly> {
    let s = alpha.len() + 1;
    if s > width || beta.len() != width + 1 || gamma.len() != width - s {
        return Err(Error::ShapeMismatch(format!(
            "van der Waerden shapes: |alpha|={}, |beta|={}, |gamma|={}, width={}",
            alpha.len(),
            beta.len(),
            gamma.len(),
            width
        )));
    }
    for part in [alpha, beta, gamma] {
        if part.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ShapeMismatch(
                "alpha, beta, gamma must be strictly increasing".into(),
            ));
        }
    }
    let mut out = BracketPoly::zero();
    let positions: Vec<usize> = (0..beta.len()).collect();
    for tau in combinations(&positions, s) {
        let tau_star: Vec<usize> = positions
            .iter()
            .copied()
            .filter(|p| !tau.contains(p))
            .collect();
        // parity of the concatenated word (tau, tau*), both halves ascending
        let inversions: usize = tau
            .iter()
            .map(|&t| tau_star.iter().filter(|&&u| u < t).count())
            .sum();
        let pair_sign = if inversions.is_multiple_of(2) {
            1i64
        } else {
            -1
        };

        let first: Vec<u32> = alpha
            .iter()
            .copied()
            .chain(tau_star.iter().map(|&p| beta[p]))
            .collect();
        let second: Vec<u32> = tau
            .iter()
            .map(|&p| beta[p])
            .chain(gamma.iter().copied())
            .collect();
        let (s1, b1) = Bracket::normalize(&first);
        let (s2, b2) = Bracket::normalize(&second);
        if s1 == 0 || s2 == 0 {
            continue;
        }
        let t = Tableau::new(vec![b1.unwrap(), b2.unwrap()]);
        out.add_term(t, q(pair_sign * s1 as i64 * s2 as i64));
    }
    Ok(out)
}

/// The Pluecker relation for an index tuple of length width+1 against one of
/// length width-1:
///
///   sum_k (-1)^k [i_1 .. î_k .. i_{w+1}] [i_k j_1 .. j_{w-1}]  =  0.
pub fn plucker_relation(i_tuple: &[u32], j_tuple: &[u32]) -> Result<BracketPoly> {
    if i_tuple.len() < 2 || j_tuple.len() + 2 != i_tuple.len() {
        return Err(Error::ShapeMismatch(format!(
            "Pluecker shapes: |i|={}, |j|={}",
            i_tuple.len(),
            j_tuple.len()
        )));
    }
    if i_tuple.iter().chain(j_tuple).any(|&x| x == 0) {
        return Err(Error::IndexOutOfRange {
            index: 0,
            max: u32::MAX,
        });
    }
    let mut out = BracketPoly::zero();
    for k in 0..i_tuple.len() {
        let omitted: Vec<u32> = i_tuple
            .iter()
            .enumerate()
            .filter(|(p, _)| *p != k)
            .map(|(_, &x)| x)
            .collect();
        let joined: Vec<u32> = std::iter::once(i_tuple[k])
            .chain(j_tuple.iter().copied())
            .collect();
        let (s1, b1) = Bracket::normalize(&omitted);
        let (s2, b2) = Bracket::normalize(&joined);
        if s1 == 0 || s2 == 0 {
            continue;
        }
        let k_sign = if (k + 1).is_multiple_of(2) { 1i64 } else { -1 };
        out.add_term(
            Tableau::new(vec![b1.unwrap(), b2.unwrap()]),
            q(k_sign * s1 as i64 * s2 as i64),
        );
    }
    Ok(out)
}

/// Sylvester exchange expansion of a two-row selection of `t`: fixing the boxes
/// `fixed_boxes` of the pair's second row, sums over all same-size box subsets
/// of the first row the filling obtained by swapping the two entry blocks in
/// order. Sign-free by construction; `t` minus the expansion straightens to
/// zero.
pub fn exchange_expand(
    t: &Tableau,
    row_pair: (usize, usize),
    fixed_boxes: &[usize],
) -> Result<BracketPoly> {
    let (r1, r2) = row_pair;
    if r1 == r2 || r1 >= t.degree() || r2 >= t.degree() {
        return Err(Error::ShapeMismatch(format!(
            "row pair ({r1},{r2}) invalid for a {}-row tableau",
            t.degree()
        )));
    }
    let u = &t.rows()[r1];
    let w = &t.rows()[r2];
    let width = u.width();
    if w.width() != width {
        return Err(Error::WidthMismatch {
            expected: width,
            got: w.width(),
        });
    }
    let mut fixed: Vec<usize> = fixed_boxes.to_vec();
    fixed.sort_unstable();
    fixed.dedup();
    if fixed.is_empty() || fixed.len() != fixed_boxes.len() || *fixed.last().unwrap() >= width {
        return Err(Error::ShapeMismatch(format!(
            "box subset {fixed_boxes:?} invalid for width {width}"
        )));
    }
    let spectator = Tableau::new(
        t.rows()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != r1 && *i != r2)
            .map(|(_, b)| b.clone())
            .collect(),
    );
    let k = fixed.len();
    let incoming: Vec<u32> = fixed.iter().map(|&p| w.indices()[p]).collect();
    let positions: Vec<usize> = (0..width).collect();
    let mut out = BracketPoly::zero();
    for chosen in combinations(&positions, k) {
        let outgoing: Vec<u32> = chosen.iter().map(|&p| u.indices()[p]).collect();
        let mut new_u = u.indices().to_vec();
        for (slot, val) in chosen.iter().zip(&incoming) {
            new_u[*slot] = *val;
        }
        let mut new_w = w.indices().to_vec();
        for (slot, val) in fixed.iter().zip(&outgoing) {
            new_w[*slot] = *val;
        }
        let (s1, b1) = Bracket::normalize(&new_u);
        let (s2, b2) = Bracket::normalize(&new_w);
        if s1 == 0 || s2 == 0 {
            continue;
        }
        let term = Tableau::new(vec![b1.unwrap(), b2.unwrap()]).mul(&spectator);
        out.add_term(term, q(s1 as i64 * s2 as i64));
    }
    Ok(out)
}

/// Randomized zero test via evaluation at `trials` random lifted matrices,
/// sound only for multi-homogeneous inputs (hence the precondition). Trial t
/// uses seed `seed + t`.
pub fn probably_zero(poly: &BracketPoly, trials: u32, seed: u64) -> Result<bool> {
    if poly.multi_degree().is_none() {
        return Err(Error::NotMultiHomogeneous);
    }
    if poly.is_zero() {
        return Ok(true);
    }
    let width = poly.width()?.expect("nonzero poly has a width");
    let n = poly.max_index();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let m = GenericMatrix::random(n, width as u32 - 1, &mut rng);
        if !poly.evaluate(m.as_matrix())?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All k-subsets of `items`, in lexicographic position order.
fn combinations<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    use itertools::Itertools;
    items.iter().copied().combinations(k).collect()
}

#[cfg(test)]
mod tests;
