//! Adam: adaptive moment estimation over groups of matrix parameters.

use crate::error::NnError;
use crate::matrix::Matrix;

/// Adam hyperparameters. `Default` gives the standard
/// `lr 1e-3, β₁ 0.9, β₂ 0.999, ε 1e-8`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamParams {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> AdamParams {
        AdamParams {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Optimizer state: first and second moment estimates per parameter group,
/// plus the shared step counter used for bias correction.
pub struct AdamState {
    hyper: AdamParams,
    step: u64,
    moments: Vec<(Matrix, Matrix)>,
}

impl AdamState {
    /// Fresh state for parameter groups of the given shapes.
    pub fn new(hyper: AdamParams, shapes: &[(usize, usize)]) -> AdamState {
        AdamState {
            hyper,
            step: 0,
            moments: shapes
                .iter()
                .map(|&(r, c)| (Matrix::zeros(r, c), Matrix::zeros(r, c)))
                .collect(),
        }
    }

    pub fn hyper(&self) -> &AdamParams {
        &self.hyper
    }

    /// Number of [`AdamState::step`] calls so far.
    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// One update: `params[i] -= lr · m̂ / (√v̂ + ε)` with bias-corrected
    /// moment estimates. `params` and `grads` must match the shapes given
    /// at construction.
    pub fn step(&mut self, params: &mut [Matrix], grads: &[Matrix]) -> Result<(), NnError> {
        if params.len() != self.moments.len() || grads.len() != self.moments.len() {
            return Err(NnError::ParameterGroupMismatch {
                expected: self.moments.len(),
                got: params.len().max(grads.len()),
            });
        }
        self.step += 1;
        let AdamParams {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.hyper;
        let correction1 = 1.0 - beta1.powi(self.step as i32);
        let correction2 = 1.0 - beta2.powi(self.step as i32);

        for ((param, grad), (m, v)) in params.iter_mut().zip(grads).zip(&mut self.moments) {
            if param.shape() != m.shape() || grad.shape() != m.shape() {
                return Err(NnError::ShapeMismatch {
                    op: "adam step".to_string(),
                    expected: format!("{:?}", m.shape()),
                    got: format!("param {:?}, grad {:?}", param.shape(), grad.shape()),
                });
            }
            let p = param.data_mut();
            let g = grad.data();
            let m = m.data_mut();
            let v = v.data_mut();
            for i in 0..p.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                let m_hat = m[i] / correction1;
                let v_hat = v[i] / correction2;
                p[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}
