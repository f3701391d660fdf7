//! Bimodules and Lie modules of finite nest algebras.
//!
//! A finite nest `N` of coordinate projections on `C^n` determines the block
//! upper triangular algebra `T(N)`. This crate computes, for subspaces of
//! `B(C^n)`:
//!
//! - the largest `T(N)`-bimodule `J(M)` inside a subspace `M` and the nest
//!   homomorphism `φ` attached to it ([`bimodule`]);
//! - the Lie module closure of a seed, the bimodule `K(L)` built from corner
//!   compressions of a Lie module `L`, and the diagonal algebra `D_K`
//!   ([`lie`]);
//! - a checker for the inclusions `J(L) ⊆ L ⊆ K(L) + D_K` together with the
//!   supporting identities, reporting witnesses on failure.

pub mod bimodule;
pub mod error;
pub mod fixtures;
pub mod lie;
pub mod nest;
pub mod operator;
pub mod subspace;

pub use error::{Error, Result};
pub use fixtures::InstanceSpec;
pub use lie::{verify_structure_theorem, VerificationReport};
pub use nest::{rank_one, Nest, RankOneProfile};
pub use operator::{basis_vector, trace_inner, Operator, Vector, C64};
pub use subspace::{LinearMap, OperatorSubspace};
