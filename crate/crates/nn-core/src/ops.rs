//! Pure (non-differentiating) forward operations on dense matrices.
//!
//! These are the single source of truth for each operation's forward
//! semantics; the autodiff tape calls into them and adds only the backward
//! rules.

use crate::error::NnError;
use crate::matrix::{Matrix, check_same_shape, matmul_nt};
use crate::rng::SplitMix64;

/// Probabilities below this floor are clamped inside the cross-entropy
/// logarithm so a confidently wrong prediction yields a large finite loss
/// instead of infinity.
pub const CROSS_ENTROPY_FLOOR: f64 = 1e-12;

/// Affine map `y = x · Aᵀ + b` applied to each row of `x`.
///
/// `weight` has shape `out×in` (one row per output feature), `bias` is
/// `1×out` and broadcasts over rows.
pub fn linear_forward(x: &Matrix, weight: &Matrix, bias: &Matrix) -> Result<Matrix, NnError> {
    if bias.shape() != (1, weight.rows()) {
        return Err(NnError::ShapeMismatch {
            op: "linear_forward".to_string(),
            expected: format!("bias of shape (1, {})", weight.rows()),
            got: format!("{:?}", bias.shape()),
        });
    }
    let mut y = matmul_nt(x, weight)?;
    for r in 0..y.rows() {
        let row = y.row_mut(r);
        for (c, cell) in row.iter_mut().enumerate() {
            *cell += bias.get(0, c);
        }
    }
    Ok(y)
}

/// `y = x · Aᵀ` — a linear layer without bias.
pub fn linear_no_bias(x: &Matrix, weight: &Matrix) -> Result<Matrix, NnError> {
    matmul_nt(x, weight)
}

/// Elementwise `max(0, x)`.
pub fn relu(x: &Matrix) -> Matrix {
    x.map(|v| if v > 0.0 { v } else { 0.0 })
}

/// Elementwise leaky rectifier: `x` for positive inputs, `slope * x`
/// otherwise.
pub fn leaky_relu(x: &Matrix, slope: f64) -> Matrix {
    x.map(|v| if v > 0.0 { v } else { slope * v })
}

/// Row-wise softmax, stabilized by subtracting each row's maximum before
/// exponentiation so large logits cannot overflow.
pub fn softmax_rows(x: &Matrix) -> Matrix {
    let mut out = x.clone();
    for r in 0..out.rows() {
        softmax_slice(out.row_mut(r));
    }
    out
}

/// In-place stabilized softmax over one slice.
pub(crate) fn softmax_slice(row: &mut [f64]) {
    if row.is_empty() {
        return;
    }
    let max = row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// How dropout behaves: active in training, the identity at inference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropoutMode {
    Train,
    Infer,
}

/// Inverted dropout: in training mode each entry is zeroed with probability
/// `rate` and survivors are scaled by `1/(1-rate)`, so the expected value of
/// every activation is unchanged and inference needs no rescaling.
pub fn dropout(
    x: &Matrix,
    rate: f64,
    mode: DropoutMode,
    rng: &mut SplitMix64,
) -> Result<Matrix, NnError> {
    if mode == DropoutMode::Infer || rate == 0.0 {
        check_rate(rate)?;
        return Ok(x.clone());
    }
    let mask = sample_dropout_mask(x.rows(), x.cols(), rate, rng)?;
    let mut out = x.clone();
    apply_mask(&mut out, &mask)?;
    Ok(out)
}

/// Samples an inverted-dropout mask with entries `0` or `1/(1-rate)`.
pub fn sample_dropout_mask(
    rows: usize,
    cols: usize,
    rate: f64,
    rng: &mut SplitMix64,
) -> Result<Matrix, NnError> {
    check_rate(rate)?;
    let keep_scale = 1.0 / (1.0 - rate);
    let mut mask = Matrix::zeros(rows, cols);
    for v in mask.data_mut() {
        if rng.next_f64() >= rate {
            *v = keep_scale;
        }
    }
    Ok(mask)
}

pub(crate) fn apply_mask(x: &mut Matrix, mask: &Matrix) -> Result<(), NnError> {
    check_same_shape("dropout mask", x, mask)?;
    for (v, &m) in x.data_mut().iter_mut().zip(mask.data()) {
        *v *= m;
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<(), NnError> {
    if !(0.0..1.0).contains(&rate) {
        return Err(NnError::InvalidDropoutRate { rate });
    }
    Ok(())
}

/// Mean cross-entropy between rows of `prediction` (a probability
/// distribution per row) and rows of `target`:
/// `−(1/rows) Σ_r Σ_c target[r,c] · ln(max(prediction[r,c], floor))`.
pub fn cross_entropy(prediction: &Matrix, target: &Matrix) -> Result<f64, NnError> {
    check_same_shape("cross_entropy", prediction, target)?;
    if prediction.rows() == 0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (p, t) in prediction.data().iter().zip(target.data()) {
        if *t != 0.0 {
            total -= t * p.max(CROSS_ENTROPY_FLOOR).ln();
        }
    }
    Ok(total / prediction.rows() as f64)
}
