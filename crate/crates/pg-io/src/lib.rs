//! Text formats and dataset management for parity games.
//!
//! This crate owns everything that touches bytes on disk:
//!
//! * [`format`] — parsing and canonical serialization of game files
//!   (`parity <max-id>; ...`) and solution files (`paritysol <max-id>; ...`),
//!   with line-numbered errors for malformed input.
//! * [`dataset`] — the on-disk dataset layout: one game/solution file pair
//!   per record plus a `manifest.tsv` carrying the generation parameters and
//!   the deterministic train/test split.
//!
//! Serialization is canonical and byte-stable: writing the same data twice
//! produces identical files, and parsing canonical output and re-serializing
//! it reproduces the input bytes. That property is what lets experiments be
//! reproduced from a manifest alone.

pub mod dataset;
pub mod format;

pub use dataset::{
    DatasetEntry, DatasetError, DatasetManifest, DatasetMeta, DatasetRecord, LoadedDataset, Split,
    assign_splits, game_file_name, load_dataset, save_dataset, solution_file_name,
};
pub use format::{
    FormatError, SolutionData, SolutionMismatch, parse_game, parse_solution, serialize_game,
    serialize_solution,
};
