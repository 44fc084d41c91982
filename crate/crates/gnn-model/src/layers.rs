//! Single message-passing layers as pure functions. The full model in
//! [`crate::forward`] composes these; they are exposed separately so each
//! aggregation rule can be tested against hand-computed oracles.

use nn_core::ops;
use nn_core::sparse::{gather_add_pairs, segment_softmax, weighted_gather_sum};
use nn_core::{Matrix, NnError};

use crate::config::ATTENTION_LEAKY_SLOPE;
use crate::graph::Neighborhoods;

/// Convolutional layer: `out(v) = W · Σ_{v' ∈ {v}∪N(v)} X(v') /
/// sqrt(deg(v)·deg(v'))`, computed as the sparse aggregation `S·X` followed
/// by the linear transform.
pub fn gcn_layer(
    neighborhoods: &Neighborhoods,
    x: &Matrix,
    weight: &Matrix,
) -> Result<Matrix, NnError> {
    let aggregated = neighborhoods.conv_coefficients().apply(x)?;
    ops::linear_no_bias(&aggregated, weight)
}

/// Transformed features and attention weights shared by the attention layer
/// and its per-vertex inspection helper.
fn attention_internals(
    neighborhoods: &Neighborhoods,
    x: &Matrix,
    weight: &Matrix,
    attention: &Matrix,
) -> Result<(Matrix, Matrix), NnError> {
    let width = weight.rows();
    let transformed = ops::linear_no_bias(x, weight)?;
    // The attention vector scores a concatenated pair (W·X(v), W·X(v')):
    // its first half scores the aggregating vertex, the second the member.
    let source_half = Matrix::from_fn(1, width, |_, c| attention.get(0, c));
    let member_half = Matrix::from_fn(1, width, |_, c| attention.get(0, width + c));
    let source_scores = ops::linear_no_bias(&transformed, &source_half)?;
    let member_scores = ops::linear_no_bias(&transformed, &member_half)?;
    let pattern = neighborhoods.attention_pattern();
    let raw = gather_add_pairs(&source_scores, &member_scores, pattern)?;
    let rectified = ops::leaky_relu(&raw, ATTENTION_LEAKY_SLOPE);
    let weights = segment_softmax(&rectified, pattern)?;
    Ok((transformed, weights))
}

/// Attention weights of vertex `v` over its aggregation set `{v} ∪ N(v)`,
/// paired with the member they weight. Positive and summing to 1.
pub fn gat_attention(
    neighborhoods: &Neighborhoods,
    x: &Matrix,
    weight: &Matrix,
    attention: &Matrix,
    v: usize,
) -> Result<Vec<(usize, f64)>, NnError> {
    let (_, weights) = attention_internals(neighborhoods, x, weight, attention)?;
    let pattern = neighborhoods.attention_pattern();
    Ok(pattern
        .edge_range(v)
        .zip(pattern.segment(v))
        .map(|(e, &member)| (member, weights.get(e, 0)))
        .collect())
}

/// Attention layer: `out(v) = W · Σ_{v' ∈ {v}∪N(v)} α(v,v')·X(v')`, where
/// the attention weights are the per-set softmax of
/// `leaky_relu(aᵀ·(W·X(v) ++ W·X(v')))`. Computed as the α-weighted sum of
/// the transformed features, which equals transforming the α-weighted sum.
pub fn gat_layer(
    neighborhoods: &Neighborhoods,
    x: &Matrix,
    weight: &Matrix,
    attention: &Matrix,
) -> Result<Matrix, NnError> {
    let (transformed, weights) = attention_internals(neighborhoods, x, weight, attention)?;
    weighted_gather_sum(&weights, &transformed, neighborhoods.attention_pattern())
}
