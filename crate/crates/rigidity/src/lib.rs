//! Exact-arithmetic decision procedures for generic infinitesimal rigidity of
//! bar-joint frameworks in any dimension.
//!
//! A framework is a graph together with a placement of its vertices in d-space;
//! edges act as rigid bars. Flexibility of a tight graph (|E| = d|V| - C(d+1,2))
//! is equivalent to the existence of a balanced source-stream-sink orientation on
//! a subgraph: an in-degree-d acyclic edge orientation whose certificate
//! polynomials, built from directed paths and local Cramer's rules, straighten to
//! zero in the bracket ring. This crate implements both sides:
//!
//! - [`oracle`]: the rigidity matrix and exact rank computation at random
//!   placements (ground truth, plus kernel vectors for certificate construction);
//! - [`bracket`]: brackets, tableaux, the straightening law, Pluecker and exchange
//!   relations, and evaluation at lifted coordinate matrices;
//! - [`orientation`]: source-stream-sink orientations, validity, cycle removal,
//!   and exhaustive enumeration at desk scale;
//! - [`certificate`]: stream/source trees, shelf decoration, the signed chain-sum
//!   certificates, the balanced predicate, and a path-system (LGV) cross-check;
//! - [`stress`]: synthesis of exact self-stresses from an orientation and
//!   verification of w A = 0;
//! - [`decide`]: the decision procedures tying everything together.
//!
//! All values are immutable after construction and all operations are pure, so
//! everything is safe to share across threads.

pub mod bracket;
pub mod certificate;
pub mod decide;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod orientation;
pub mod stress;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, Placement};

/// Exact rational scalar used throughout.
pub type Q = num::BigRational;
/// Exact integer scalar used throughout.
pub type Z = num::BigInt;

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}
