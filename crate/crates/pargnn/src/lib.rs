//! Experiment pipeline for learning winning regions of parity games.
//!
//! The pipeline has four stages, mirrored by the `pargnn` binary's
//! subcommands:
//!
//! 1. **generate** — sample random games, solve them exactly, and persist a
//!    split dataset ([`game_gen::generate_dataset`]);
//! 2. **train** — fit a graph network on the training split
//!    ([`training::train_model`]);
//! 3. **eval** — score a checkpoint on both splits
//!    ([`evaluation::evaluate_split`]) and save an [`report::EvalReport`];
//! 4. **report** — render a saved report as a summary table, per-game CSV,
//!    or scatter plot.
//!
//! Every stage is deterministic given its seed: generation, training and
//! evaluation reproduce byte-identical artifacts across runs (reports
//! differ only in their recorded wall-clock timing).

pub mod evaluation;
pub mod metrics;
pub mod report;
pub mod training;

use gnn_model::ModelError;
use nn_core::NnError;

/// Errors from the training and evaluation stages.
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid training settings: {0}")]
    BadSettings(String),
    #[error("the dataset has no training games")]
    EmptyTrainSplit,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numeric(#[from] NnError),
}
