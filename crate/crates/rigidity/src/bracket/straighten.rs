//! The straightening algorithm: normal form reduction onto the standard
//! tableaux basis via van der Waerden syzygies.
//!
//! Each step takes the tableaux-order largest nonstandard tableau present,
//! locates its first column violation, and subtracts the matching syzygy times
//! the spectator rows. The syzygy's initial term is exactly the violating
//! product, so every replacement introduces strictly smaller tableaux and the
//! loop terminates.

use num::Zero;

use crate::error::{Error, Result};

use super::{van_der_waerden_syzygy, BracketPoly, Tableau};

/// Default cap on intermediate term counts. Exceeding it is an error, not
/// silent truncation.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Rewrites a bracket polynomial as an equal linear combination of standard
/// tableaux. Deterministic normal form; idempotent.
pub fn straighten(poly: &BracketPoly) -> Result<BracketPoly> {
    straighten_with_cap(poly, DEFAULT_TERM_CAP)
}

pub fn straighten_with_cap(poly: &BracketPoly, cap: usize) -> Result<BracketPoly> {
    poly.width()?; // reject mixed widths up front
    let mut p = poly.clone();
    loop {
        let Some((target, coeff)) = p
            .terms()
            .rev()
            .find(|(t, _)| !t.is_standard())
            .map(|(t, c)| (t.clone(), c.clone()))
        else {
            return Ok(p);
        };
        let step = reduction_step(&target)?;
        // step has initial term 1 * target, so this cancels target entirely.
        p = p.sub(&step.scale(&coeff));
        debug_assert!(p.coeff(&target).is_zero());
        debug_assert!(p
            .terms()
            .rev()
            .find(|(t, _)| !t.is_standard())
            .is_none_or(|(t, _)| *t < target));
        if p.num_terms() > cap {
            return Err(Error::ExpressionBlowup {
                terms: p.num_terms(),
                cap,
            });
        }
    }
}

/// The syzygy rewriting of one nonstandard tableau, multiplied by its
/// spectator rows. Initial term is the tableau itself with coefficient +1;
/// all other terms are strictly smaller in the tableaux order.
fn reduction_step(t: &Tableau) -> Result<BracketPoly> {
    let (r, s) = t
        .first_violation()
        .expect("reduction_step requires a nonstandard tableau");
    let upper = &t.rows()[r];
    let lower = &t.rows()[r + 1];
    let width = upper.width();
    // with the violation at 0-based column s: alpha is the first s entries of
    // the upper row; beta: first s+1 entries of the lower row
    // merged with the last width-s entries of the upper row; gamma: the rest of
    // the lower row. All entries of the lower prefix are strictly below all
    // entries of the upper suffix, so the merge is a sorted concatenation.
    let alpha: Vec<u32> = upper.indices()[..s].to_vec();
    let beta: Vec<u32> = lower.indices()[..=s]
        .iter()
        .chain(&upper.indices()[s..])
        .copied()
        .collect();
    let gamma: Vec<u32> = lower.indices()[s + 1..].to_vec();
    debug_assert!(beta.windows(2).all(|w| w[0] < w[1]));
    let syzygy = van_der_waerden_syzygy(&alpha, &beta, &gamma, width)?;
    let spectator = Tableau::new(
        t.rows()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != r && *i != r + 1)
            .map(|(_, b)| b.clone())
            .collect(),
    );
    let step = syzygy.mul_monomial(&spectator, &crate::q(1));
    debug_assert_eq!(step.leading_term().map(|(lt, _)| lt), Some(t));
    debug_assert_eq!(
        step.leading_term().map(|(_, c)| c.clone()),
        Some(crate::q(1))
    );
    Ok(step)
}

/// True iff the polynomial's standard normal form is zero. Divides out the
/// common bracket content of all terms first; this never changes vanishing
/// because the syzygy ideal is prime and contains no single bracket, and it is
/// the same reduction the worked examples apply by hand.
pub fn straightens_to_zero(poly: &BracketPoly) -> Result<bool> {
    if poly.is_zero() {
        return Ok(true);
    }
    let content = poly.common_content();
    let reduced = poly
        .div_monomial(&content)
        .expect("content divides every term");
    Ok(straighten(&reduced)?.is_zero())
}
