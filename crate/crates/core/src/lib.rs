//! Sparse Hamiltonian reconstruction from thermal-state Pauli measurements.
//!
//! A sparse Hamiltonian `H = -η Σ J_a λ_a` is placed in its Gibbs state, the
//! state is rotated by a random Clifford+T circuit, a few Pauli expectations
//! are recorded, and the polarization vector is recovered by L1 minimization.
//! The log map then turns the recovered state back into a Hamiltonian. The
//! same pipeline runs a truncated-tomography baseline for comparison.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod linalg;
pub mod pauli;
pub mod pipeline;
pub mod recovery;
pub mod sensing;
pub mod thermal;

pub use error::{Error, Result};
