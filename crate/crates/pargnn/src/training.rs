//! The training loop: sequential, single-seeded, reproducible.

use gnn_model::{
    AttributedGraph, ModelConfig, ModelParams, encode_game, model_backward, targets_from_regions,
};
use nn_core::{AdamParams, AdamState, Checkpoint, Matrix, SplitMix64};
use pg_io::{LoadedDataset, Split};

use crate::PipelineError;

/// Maximum number of loss-curve samples embedded in a checkpoint. The full
/// curve can always be written to a CSV at training time; the embedded copy
/// is a bounded summary that travels with the model.
pub const LOSS_CURVE_META_SAMPLES: usize = 64;

/// Checkpoint metadata key holding the embedded loss-curve samples.
pub const LOSS_CURVE_META_KEY: &str = "train.loss_curve";

/// Everything that determines a training run besides the dataset itself.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSettings {
    pub model: ModelConfig,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Number of consecutive games whose gradients are averaged into one
    /// optimizer step. The final step of an epoch may cover fewer games.
    pub games_per_step: usize,
    /// Seeds the single random stream of the run: parameter initialization
    /// first, then the dropout draws of each training step in order.
    pub seed: u64,
}

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ModelParams,
    /// Mean training loss of each optimizer step, in step order.
    pub step_losses: Vec<f64>,
    /// Total number of game visits (games per epoch × epochs).
    pub game_visits: usize,
}

/// Trains a fresh model on the training split of `dataset`.
///
/// The run is fully determined by `(dataset, settings)`: games are visited
/// strictly in manifest order within each epoch, and all randomness comes
/// from one stream seeded with `settings.seed` (initialization first, then
/// dropout). Calling this twice with equal inputs yields identical
/// parameters and losses.
pub fn train_model(
    dataset: &LoadedDataset,
    settings: &TrainSettings,
) -> Result<TrainOutcome, PipelineError> {
    if settings.learning_rate <= 0.0 || !settings.learning_rate.is_finite() {
        return Err(PipelineError::BadSettings(format!(
            "learning rate must be positive and finite, got {}",
            settings.learning_rate
        )));
    }
    if settings.epochs == 0 {
        return Err(PipelineError::BadSettings(
            "epochs must be at least 1".to_string(),
        ));
    }
    if settings.games_per_step == 0 {
        return Err(PipelineError::BadSettings(
            "games per step must be at least 1".to_string(),
        ));
    }
    let train_indices = dataset.indices_of(Split::Train);
    if train_indices.is_empty() {
        return Err(PipelineError::EmptyTrainSplit);
    }

    // Encode every training game once up front; encodings are reused across
    // epochs.
    let prepared: Vec<(AttributedGraph, Matrix)> = train_indices
        .iter()
        .map(|&i| {
            let entry = &dataset.entries[i];
            (
                encode_game(&entry.game),
                targets_from_regions(&entry.solution.regions()),
            )
        })
        .collect();

    let mut rng = SplitMix64::new(settings.seed);
    let mut params = ModelParams::init(settings.model, &mut rng)?;
    let hyper = AdamParams {
        learning_rate: settings.learning_rate,
        ..AdamParams::default()
    };
    let mut adam = AdamState::new(hyper, &params.shapes());

    let mut step_losses = Vec::new();
    for _epoch in 0..settings.epochs {
        for chunk in prepared.chunks(settings.games_per_step) {
            let mut loss_sum = 0.0;
            let mut grad_sum: Option<Vec<Matrix>> = None;
            for (graph, targets) in chunk {
                let (loss, grads) = model_backward(graph, &params, targets, &mut rng)?;
                loss_sum += loss;
                grad_sum = Some(match grad_sum {
                    None => grads,
                    Some(mut acc) => {
                        for (a, g) in acc.iter_mut().zip(&grads) {
                            a.add_scaled(g, 1.0)?;
                        }
                        acc
                    }
                });
            }
            let scale = 1.0 / chunk.len() as f64;
            let mean_grads: Vec<Matrix> = grad_sum
                .expect("chunks are never empty")
                .into_iter()
                .map(|g| g.map(|v| v * scale))
                .collect();
            adam.step(params.tensors_mut(), &mean_grads)?;
            step_losses.push(loss_sum * scale);
        }
    }

    Ok(TrainOutcome {
        params,
        step_losses,
        game_visits: train_indices.len() * settings.epochs,
    })
}

/// Downsamples a loss curve to at most `max_samples` points, always keeping
/// the first and last point and preserving order.
pub fn sample_curve(losses: &[f64], max_samples: usize) -> Vec<f64> {
    assert!(max_samples >= 2, "need room for at least first and last");
    if losses.len() <= max_samples {
        return losses.to_vec();
    }
    (0..max_samples)
        .map(|i| losses[i * (losses.len() - 1) / (max_samples - 1)])
        .collect()
}

/// Packs a trained model into a checkpoint, embedding the training
/// provenance and a bounded loss-curve summary as metadata.
pub fn checkpoint_from_training(
    outcome: &TrainOutcome,
    settings: &TrainSettings,
    dataset_path: &str,
) -> Checkpoint {
    let mut cp = outcome.params.to_checkpoint();
    cp.set_meta("train.dataset", dataset_path);
    cp.set_meta("train.seed", settings.seed.to_string());
    cp.set_meta("train.learning_rate", settings.learning_rate.to_string());
    cp.set_meta("train.epochs", settings.epochs.to_string());
    cp.set_meta("train.games_per_step", settings.games_per_step.to_string());
    cp.set_meta("train.steps", outcome.step_losses.len().to_string());
    let samples: Vec<String> = sample_curve(&outcome.step_losses, LOSS_CURVE_META_SAMPLES)
        .iter()
        .map(|l| l.to_string())
        .collect();
    cp.set_meta(LOSS_CURVE_META_KEY, samples.join(","));
    cp
}

/// Renders the full per-step loss curve as a two-column CSV.
pub fn loss_curve_csv(step_losses: &[f64]) -> String {
    let mut out = String::from("step,loss\n");
    for (i, loss) in step_losses.iter().enumerate() {
        out.push_str(&format!("{},{loss}\n", i + 1));
    }
    out
}
