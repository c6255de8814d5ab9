//! Exact tools for diameter-bounded families in the lattice of subspaces of
//! GF(q)^n: field arithmetic, canonical subspaces, the subspace metric,
//! counting formulas and inequality audits, the complement-pair matching, and
//! an exact maximum-family search.

pub mod counting;
pub mod error;
pub mod gf;
pub mod matching;
pub mod metric;
pub mod search;
pub mod subspace;

pub use error::{Error, Result};
