//! Weight initialization.

use crate::matrix::Matrix;
use crate::rng::SplitMix64;

/// Glorot (Xavier) uniform initialization for a weight matrix of shape
/// `out×in`: entries drawn from `U(−a, a)` with `a = √(6 / (in + out))`,
/// which keeps activation variance roughly constant across layers.
pub fn glorot_uniform(rows: usize, cols: usize, rng: &mut SplitMix64) -> Matrix {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let mut m = Matrix::zeros(rows, cols);
    for v in m.data_mut() {
        *v = rng.uniform(-limit, limit);
    }
    m
}
