//! Miniversal deformations of complex square matrices under *congruence
//! `A ↦ S*AS`.
//!
//! The crate builds canonical matrices from block descriptions, lays out
//! the `(0, *, ∘, •)` pattern of their simplest miniversal deformation,
//! certifies it against the orbit tangent space, and reduces nearby
//! matrices to the resulting normal form.

pub mod canonical;
pub mod cli;
pub mod construct;
pub mod error;
pub mod io;
pub mod par;
pub mod pattern;
pub mod reduce;
pub mod suite;
pub mod tangent;

pub use canonical::{
    assemble_canonical, build_block, delta_cocycle, hermitian_split, CanonicalBlock,
    CanonicalSpec, ComplexMatrix, HermitianPair, C64,
};
pub use construct::{greedy_miniversal, project_decompose, solve_star_system, GreedyResult, ProjectionResult, Projector};
pub use error::{Error, Result};
pub use pattern::{assemble_pattern, codim, Entry, Pattern};
pub use tangent::{codim_via_kernel, verify_direct_sum, DecompositionReport};
pub use reduce::{reduce_perturbation, ReductionResult};
