/// Errors from the numeric stack.
#[derive(Debug, thiserror::Error)]
pub enum NnError {
    #[error("{op}: shape mismatch, expected {expected}, got {got}")]
    ShapeMismatch {
        op: String,
        expected: String,
        got: String,
    },
    #[error("dropout rate must lie in [0, 1), got {rate}")]
    InvalidDropoutRate { rate: f64 },
    #[error("backward needs a scalar loss, but value has shape {shape}")]
    LossNotScalar { shape: String },
    #[error("value id {id} does not belong to this tape (len {len})")]
    ForeignValueId { id: usize, len: usize },
    #[error("value id {id} is not a registered parameter")]
    NotAParameter { id: usize },
    #[error("optimizer state holds {expected} parameter groups, got {got}")]
    ParameterGroupMismatch { expected: usize, got: usize },
}
