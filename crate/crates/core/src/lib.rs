//! Numerical toolkit for the DDVV family of matrix commutator inequalities.
//!
//! For symmetric `n×n` matrices `A_1, …, A_m` the normal scalar curvature
//! conjecture takes the matrix form
//!
//! ```text
//! (Σ ||A_r||²)² ≥ 2 Σ_{r<s} ||[A_r, A_s]||²
//! ```
//!
//! and the weaker pinched form `2 Σ ||[A_i, A_j]||² ≤ 3/2 (Σ ||A_i||²)² − Σ ||A_i||⁴`
//! holds for all `n, m`. The crate evaluates both, computes the curvature
//! (submanifold) version from second fundamental form coefficients, searches
//! for extremal tuples by projected gradient ascent on the unit sphere, and
//! ships brute-force oracles for the auxiliary estimates used along the way.

pub mod curvature;
pub mod error;
pub mod io;
pub mod lemmas;
pub mod matrix;
pub mod rng;
pub mod search;
pub mod sweep;
pub mod symmetry;

pub use curvature::{CurvatureSummary, SecondFundamentalForm};
pub use error::{Error, Result};
pub use matrix::{InequalityKind, InequalityReport, SymMatrix, SymTuple};
pub use search::{SearchOptions, SearchResult};
pub use symmetry::OrthogonalPair;
