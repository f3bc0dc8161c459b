//! # clsi
//!
//! Certified lower bounds and numeric estimates for (complete) modified
//! log-Sobolev constants of connected graphs and of the Lindbladians they
//! induce on matrix algebras.
//!
//! The crate is organized around five layers:
//!
//! - [`matfun`]: Hermitian eigendecomposition, matrix functions, double
//!   operator integrals, quadrature cross-checks and dense superoperators.
//! - [`graphs`]: weighted graphs, Kruskal spanning trees, preorder traversal
//!   covers and the combinatorial bound certificate.
//! - [`entropy`]: relative entropies, p-entropies and Fisher informations for
//!   matrix states and graph fields.
//! - [`lindblad`]: graph Hörmander generators, conditional expectations and the
//!   worked matrix examples (Pauli, depolarizing, integer spectrum, collective).
//! - [`estimator`]: multistart ratio minimization, entropy decay curves and the
//!   sandwich harness that reconciles certified bounds with numeric estimates.
//!
//! [`battery`] bundles the numeric property checks used by `clsi verify`, and
//! [`cli`] is the command-line surface. Runnable walkthroughs of every
//! capability live in the crate's `examples/` directory:
//!
//! ```bash
//! cargo run -p clsi --example graph_certificate
//! cargo run -p clsi --example pauli_window
//! cargo run -p clsi --example sandwich
//! ```
//!
//! All traces are normalized: `τ(x) = tr(x)/n`, so states have matrix trace `n`.

#![forbid(unsafe_code)]

pub mod battery;
pub mod cli;
pub mod entropy;
pub mod estimator;
pub mod graphs;
pub mod json;
pub mod lindblad;
pub mod matfun;
pub mod rng;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("eigenvalue {0:e} is below the positivity floor")]
    Domain(f64),

    #[error("quadrature did not converge (last refinement changed by {0:e})")]
    Quadrature(f64),

    #[error("generator has no nonzero eigenvalue above threshold")]
    DegenerateGenerator,

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("graph parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("all starting points collapsed onto the fixed-point set")]
    DegenerateStart,

    #[error("entropy increased along the semigroup at t={t} (by {excess:e})")]
    NonMonotone { t: f64, excess: f64 },

    #[error("dimension cap exceeded: {0}")]
    DimensionCap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use entropy::{MatrixField, RelEntropy, State};
pub use graphs::{BoundCertificate, CyclicCover, SpanningTree, WeightedGraph};
pub use lindblad::ConditionalExpectation;
pub use matfun::{CMat, HermitianMatrix, ScalarKernel, SpectralDecomposition, SpectralSuperoperator};
