//! Spectral engine: Hermitian matrices, functional calculus, double operator
//! integrals and dense superoperators.
//!
//! Superoperators use column-stacking vectorization, so `ρ ↦ AρB` is the
//! matrix `Bᵀ ⊗ A`.

pub mod hermitian;
pub mod kernel;
pub mod quadrature;
pub mod superop;

pub use hermitian::{
    commutator, eig_checked, eig_hermitian, exp, hs_inner, log, mat_from_pairs, mat_to_pairs, matrix_function, powf,
    tau, CMat, HermitianMatrix, SpectralDecomposition, HERMITIAN_TOL, POSITIVITY_FLOOR,
};
pub use kernel::{doi_apply, DoubleOperatorIntegral, ScalarKernel, DIAGONAL_RTOL};
pub use quadrature::{gauss_legendre, quadrature_oracle_resolvent, quadrature_oracle_tilt};
pub use superop::{
    matrix_of_map, semigroup_apply, spectral_gap, superop_from_generators, unvec, vec_of, LinearMap,
    SpectralSuperoperator, KERNEL_TOL,
};
