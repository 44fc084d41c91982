//! Model evaluation over dataset splits.

use gnn_model::{ModelParams, predict_game};
use parity_core::Player;
use pg_io::{DatasetEntry, LoadedDataset, Split};
use rayon::prelude::*;

use crate::PipelineError;
use crate::metrics::{GameOutcome, Metrics, compute_metrics, misclassified_vertices};

/// Runs inference on one game and scores the decoded regions against the
/// stored exact solution.
pub fn predict_outcome(
    entry: &DatasetEntry,
    params: &ModelParams,
) -> Result<GameOutcome, PipelineError> {
    let output = predict_game(&entry.game, params)?;
    let predicted = output.decode();
    let exact = entry.solution.regions();
    Ok(GameOutcome {
        vertex_count: entry.game.vertex_count(),
        misclassified: misclassified_vertices(&predicted, &exact),
    })
}

/// Evaluates the model on one split. Games are scored in parallel but the
/// resulting metrics list follows manifest order, so repeated calls yield
/// identical results.
pub fn evaluate_split(
    dataset: &LoadedDataset,
    split: Split,
    params: &ModelParams,
) -> Result<Metrics, PipelineError> {
    let indices = dataset.indices_of(split);
    let outcomes: Vec<GameOutcome> = indices
        .par_iter()
        .map(|&i| predict_outcome(&dataset.entries[i], params))
        .collect::<Result<_, _>>()?;
    Ok(compute_metrics(&outcomes))
}

/// Vertex accuracy of the best constant predictor on a split: the larger
/// class share among all vertices of the split's games. An empty split
/// counts as 1.0, mirroring [`compute_metrics`].
pub fn majority_baseline(dataset: &LoadedDataset, split: Split) -> f64 {
    let mut even = 0usize;
    let mut total = 0usize;
    for i in dataset.indices_of(split) {
        let regions = dataset.entries[i].solution.regions();
        for v in 0..regions.w0.universe() {
            if regions.winner_of(v) == Player::Even {
                even += 1;
            }
            total += 1;
        }
    }
    if total == 0 {
        return 1.0;
    }
    let even_share = even as f64 / total as f64;
    even_share.max(1.0 - even_share)
}
