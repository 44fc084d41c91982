//! Graph neural network for predicting winning regions of parity games.
//!
//! The pipeline: [`encode_game`] turns a game into a 3-attributed graph
//! (color and one-hot ownership); a stack of message-passing layers —
//! convolutional ([`gcn_layer`]) or attention-based ([`gat_layer`]), each
//! followed by a rectifier — contextualizes each vertex; a per-vertex MLP
//! head emits two logits; a row softmax yields `(x0, x1)` probabilities;
//! and [`PredictionOutput::decode`] predicts vertex `v` for player 0 exactly
//! when `x0 > x1` (ties to player 1).
//!
//! Inference runs through pure functions ([`model_forward`]); training runs
//! through a recorded tape ([`model_backward`]) producing gradients for all
//! parameters in one reverse sweep. Both routes compute the same function;
//! a test pins them together. A forward pass costs time linear in vertices
//! plus edges per layer, so prediction scales linearly with game size.

mod config;
mod forward;
mod graph;
mod layers;
mod params;

pub use config::{ATTENTION_LEAKY_SLOPE, ModelConfig, ModelError, UnknownVariant, Variant};
pub use forward::{
    ForwardMode, PredictionOutput, evaluation_loss, model_backward, model_forward,
    model_forward_via_tape, predict_game, targets_from_regions,
};
pub use graph::{AttributedGraph, INPUT_WIDTH, Neighborhoods, encode_game};
pub use layers::{gat_attention, gat_layer, gcn_layer};
pub use params::ModelParams;
