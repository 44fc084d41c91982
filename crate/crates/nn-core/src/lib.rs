//! A small, dependency-free neural-network stack on dense `f64` matrices.
//!
//! Everything a graph network needs and nothing more:
//!
//! * [`Matrix`] and three multiplication kernels ([`matmul_nn`],
//!   [`matmul_nt`], [`matmul_tn`]).
//! * Pure forward ops ([`ops`]) — linear layers, (leaky) ReLU, row softmax,
//!   inverted dropout, mean cross-entropy — and sparse aggregation
//!   primitives ([`sparse`]).
//! * A reverse-mode autodiff [`Tape`] recording matrix-level operations.
//! * [`AdamState`] — Adam with bias correction.
//! * [`grad_check`] — central finite differences, the independent oracle
//!   for every backward rule.
//! * [`Checkpoint`] — a versioned text container for named tensors whose
//!   save/load cycle is bit-exact.
//! * [`SplitMix64`] — the project-wide deterministic RNG.
//!
//! Determinism is a design requirement: no global state, no threads, no
//! platform-dependent iteration order; identical inputs and seeds produce
//! identical bytes everywhere.

mod adam;
mod checkpoint;
mod error;
mod grad_check;
mod init;
mod matrix;
pub mod ops;
mod rng;
pub mod sparse;
mod tape;

pub use adam::{AdamParams, AdamState};
pub use checkpoint::{Checkpoint, CheckpointError};
pub use error::NnError;
pub use grad_check::{GradCheckConfig, GradCheckReport, GroupReport, grad_check, relative_error};
pub use init::glorot_uniform;
pub use matrix::{Matrix, column_sums, matmul_nn, matmul_nt, matmul_tn};
pub use ops::{
    DropoutMode, cross_entropy, dropout, leaky_relu, linear_forward, linear_no_bias, relu,
    softmax_rows,
};
pub use rng::{SplitMix64, mix64};
pub use sparse::{SparseMatrix, SparsePattern};
pub use tape::{Gradients, Tape, ValueId};
