//! Whole-model inference and training passes.
//!
//! Two routes compute the same function: a pure route used for inference
//! (and cheap to call in parallel across games) and a tape route used for
//! training, which records every operation so one reverse sweep yields all
//! parameter gradients. The two routes are kept in lockstep by an equality
//! test over shared parameters.

use std::rc::Rc;

use nn_core::ops;
use nn_core::{DropoutMode, Gradients, Matrix, SplitMix64, Tape, ValueId};
use parity_core::{ParityGame, Player, WinningRegions};

use crate::config::{ATTENTION_LEAKY_SLOPE, ModelConfig, ModelError, Variant};
use crate::graph::{AttributedGraph, INPUT_WIDTH, Neighborhoods, encode_game};
use crate::layers::{gat_layer, gcn_layer};
use crate::params::ModelParams;

/// Whether a forward pass applies dropout (training) or bypasses it.
pub enum ForwardMode<'a> {
    Infer,
    Train { rng: &'a mut SplitMix64 },
}

/// Per-vertex class probabilities `(x0, x1)` produced by the model.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionOutput {
    probabilities: Matrix,
}

impl PredictionOutput {
    fn new(probabilities: Matrix) -> Self {
        debug_assert_eq!(probabilities.cols(), 2);
        PredictionOutput { probabilities }
    }

    /// `n×2` matrix of per-vertex probabilities; rows sum to 1.
    pub fn probabilities(&self) -> &Matrix {
        &self.probabilities
    }

    pub fn vertex_count(&self) -> usize {
        self.probabilities.rows()
    }

    /// Predicted winning regions: vertex `v` goes to player 0 exactly when
    /// `x0 > x1`; ties go to player 1. Always a partition of the vertices.
    pub fn decode(&self) -> WinningRegions {
        let winners: Vec<Player> = (0..self.probabilities.rows())
            .map(|v| {
                if self.probabilities.get(v, 0) > self.probabilities.get(v, 1) {
                    Player::Even
                } else {
                    Player::Odd
                }
            })
            .collect();
        WinningRegions::from_winners(&winners)
    }
}

/// One-hot training targets from exact winning regions: row `v` is `(1, 0)`
/// if player 0 wins `v`, else `(0, 1)`.
pub fn targets_from_regions(regions: &WinningRegions) -> Matrix {
    let n = regions.w0.universe();
    Matrix::from_fn(n, 2, |v, c| {
        let even_wins = regions.winner_of(v) == Player::Even;
        match (c, even_wins) {
            (0, true) | (1, false) => 1.0,
            _ => 0.0,
        }
    })
}

/// Applies the optional color normalization: divides the color column by
/// the vertex count, leaving ownership indicators untouched.
fn prepared_attributes(graph: &AttributedGraph, config: &ModelConfig) -> Matrix {
    let x = graph.attributes().clone();
    if !config.normalize_colors {
        return x;
    }
    let n = graph.vertex_count() as f64;
    let mut x = x;
    for v in 0..x.rows() {
        let scaled = x.get(v, 0) / n;
        x.set(v, 0, scaled);
    }
    x
}

fn check_input(graph: &AttributedGraph) -> Result<(), ModelError> {
    if graph.attributes().cols() != INPUT_WIDTH {
        return Err(ModelError::InputWidth {
            expected: INPUT_WIDTH,
            got: graph.attributes().cols(),
        });
    }
    Ok(())
}

/// Pure forward pass over an attributed graph: the message-layer stack
/// (each layer followed by a rectifier), then the per-vertex head
/// (linear → rectifier → dropout in training mode → linear → row softmax).
/// Runtime is linear in vertices plus edges per layer.
pub fn model_forward(
    graph: &AttributedGraph,
    params: &ModelParams,
    mode: ForwardMode<'_>,
) -> Result<PredictionOutput, ModelError> {
    check_input(graph)?;
    let config = params.config();
    let neighborhoods = Neighborhoods::new(graph);
    let mut x = prepared_attributes(graph, config);
    for layer in 0..config.message_layers {
        let w = params.message_weight(layer);
        let h = match config.variant {
            Variant::Gcn => gcn_layer(&neighborhoods, &x, w)?,
            Variant::Gat => gat_layer(&neighborhoods, &x, w, params.attention(layer))?,
        };
        x = if config.inter_layer_relu {
            ops::relu(&h)
        } else {
            h
        };
    }
    let hidden = ops::linear_forward(&x, params.head1_weight(), params.head1_bias())?;
    let hidden = ops::relu(&hidden);
    let hidden = match mode {
        ForwardMode::Infer => hidden,
        ForwardMode::Train { rng } => {
            ops::dropout(&hidden, config.dropout, DropoutMode::Train, rng)?
        }
    };
    let logits = ops::linear_forward(&hidden, params.head2_weight(), params.head2_bias())?;
    Ok(PredictionOutput::new(ops::softmax_rows(&logits)))
}

/// Convenience: encode a game and run inference on it.
pub fn predict_game(
    game: &ParityGame,
    params: &ModelParams,
) -> Result<PredictionOutput, ModelError> {
    model_forward(&encode_game(game), params, ForwardMode::Infer)
}

/// The tape-recorded twin of [`model_forward`], shared by the training
/// entry points. Returns the probability node and the registered parameter
/// ids in layout order.
fn build_tape_forward(
    tape: &mut Tape,
    graph: &AttributedGraph,
    params: &ModelParams,
    dropout_rng: Option<&mut SplitMix64>,
) -> Result<(ValueId, Vec<ValueId>), ModelError> {
    check_input(graph)?;
    let config = params.config();
    let neighborhoods = Neighborhoods::new(graph);

    let param_ids: Vec<ValueId> = params
        .tensors()
        .iter()
        .map(|t| tape.param(t.clone()))
        .collect();
    // Mirror the layout that ModelParams guarantees: message tensors first
    // (weight, then attention for the attention variant), then the head.
    let per_layer = match config.variant {
        Variant::Gcn => 1,
        Variant::Gat => 2,
    };
    let head = per_layer * config.message_layers;

    let mut x = tape.input(prepared_attributes(graph, config));
    for layer in 0..config.message_layers {
        let w = param_ids[per_layer * layer];
        let h = match config.variant {
            Variant::Gcn => {
                let aggregated = tape.spmm(Rc::clone(neighborhoods.conv_coefficients()), x)?;
                tape.linear_no_bias(aggregated, w)?
            }
            Variant::Gat => {
                let a = param_ids[per_layer * layer + 1];
                let width = config.hidden_width;
                let pattern = neighborhoods.attention_pattern();
                let transformed = tape.linear_no_bias(x, w)?;
                let source_half = tape.slice_cols(a, 0, width)?;
                let member_half = tape.slice_cols(a, width, width)?;
                let source_scores = tape.linear_no_bias(transformed, source_half)?;
                let member_scores = tape.linear_no_bias(transformed, member_half)?;
                let raw =
                    tape.gather_add_pairs(source_scores, member_scores, Rc::clone(pattern))?;
                let rectified = tape.leaky_relu(raw, ATTENTION_LEAKY_SLOPE);
                let weights = tape.segment_softmax(rectified, Rc::clone(pattern))?;
                tape.weighted_gather_sum(weights, transformed, Rc::clone(pattern))?
            }
        };
        x = if config.inter_layer_relu {
            tape.relu(h)
        } else {
            h
        };
    }
    let mut hidden = tape.linear(x, param_ids[head], param_ids[head + 1])?;
    hidden = tape.relu(hidden);
    if let Some(rng) = dropout_rng
        && config.dropout > 0.0
    {
        hidden = tape.dropout(hidden, config.dropout, rng)?;
    }
    let logits = tape.linear(hidden, param_ids[head + 2], param_ids[head + 3])?;
    let probabilities = tape.softmax_rows(logits);
    Ok((probabilities, param_ids))
}

/// Loss and all parameter gradients for one graph. `targets` must be one
/// one-hot row per vertex; gradients come back in parameter layout order,
/// ready for the optimizer. Dropout is active and drawn from `rng`.
pub fn model_backward(
    graph: &AttributedGraph,
    params: &ModelParams,
    targets: &Matrix,
    rng: &mut SplitMix64,
) -> Result<(f64, Vec<Matrix>), ModelError> {
    if targets.shape() != (graph.vertex_count(), 2) {
        return Err(ModelError::TargetShape {
            expected: (graph.vertex_count(), 2),
            got: targets.shape(),
        });
    }
    let mut tape = Tape::new();
    let (probabilities, param_ids) = build_tape_forward(&mut tape, graph, params, Some(rng))?;
    let loss = tape.cross_entropy(probabilities, targets.clone())?;
    let loss_value = tape.value(loss).get(0, 0);
    let gradients: Gradients = tape.backward(loss)?;
    let grads = param_ids
        .iter()
        .map(|&id| gradients.param_grad(&tape, id))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((loss_value, grads))
}

/// Tape-route inference used to pin the two forward implementations
/// together (no dropout, no gradients — just the recorded forward values).
pub fn model_forward_via_tape(
    graph: &AttributedGraph,
    params: &ModelParams,
) -> Result<PredictionOutput, ModelError> {
    let mut tape = Tape::new();
    let (probabilities, _) = build_tape_forward(&mut tape, graph, params, None)?;
    Ok(PredictionOutput::new(tape.value(probabilities).clone()))
}

/// Mean cross-entropy of the model's inference output against targets.
pub fn evaluation_loss(
    graph: &AttributedGraph,
    params: &ModelParams,
    targets: &Matrix,
) -> Result<f64, ModelError> {
    let output = model_forward(graph, params, ForwardMode::Infer)?;
    Ok(ops::cross_entropy(output.probabilities(), targets)?)
}
