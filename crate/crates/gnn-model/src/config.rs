//! Model hyperparameters and their validation.

/// Message-passing layer family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Convolutional aggregation with `1/sqrt(deg(v)·deg(v'))` weights.
    Gcn,
    /// Attention-weighted aggregation (single head, leaky slope 0.2).
    Gat,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Gcn => write!(f, "gcn"),
            Variant::Gat => write!(f, "gat"),
        }
    }
}

/// Error for unknown variant names.
#[derive(Debug, thiserror::Error)]
#[error("unknown variant {0:?}; expected \"gcn\" or \"gat\"")]
pub struct UnknownVariant(String);

impl std::str::FromStr for Variant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gcn" => Ok(Variant::Gcn),
            "gat" => Ok(Variant::Gat),
            _ => Err(UnknownVariant(s.to_string())),
        }
    }
}

/// Negative slope of the leaky rectifier inside attention scoring.
pub const ATTENTION_LEAKY_SLOPE: f64 = 0.2;

/// Architecture hyperparameters. The reference configuration is a stack of
/// 10 message-passing layers of width 256 followed by a 256-wide two-layer
/// head emitting 2 logits per vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub variant: Variant,
    /// Number of stacked message-passing layers (reference: 10).
    pub message_layers: usize,
    /// Width of every message-passing layer (reference: 256).
    pub hidden_width: usize,
    /// Width of the head's hidden linear layer (reference: 256).
    pub head_hidden: usize,
    /// Dropout rate applied after the head's rectifier in training mode.
    pub dropout: f64,
    /// Attention head count; only 1 is supported.
    pub attention_heads: usize,
    /// Scale the color attribute by `1/n` before the first layer. Off by
    /// default: colors are fed raw.
    pub normalize_colors: bool,
    /// Apply a rectifier after every message-passing layer. On by default:
    /// without it the stacked layers compose into a single linear
    /// aggregation. Kept configurable because it shapes results.
    pub inter_layer_relu: bool,
}

impl ModelConfig {
    /// The reference architecture for a variant: 10 layers, width 256,
    /// head 256→256→2, dropout 0.5, raw colors.
    pub fn reference(variant: Variant) -> Self {
        ModelConfig {
            variant,
            message_layers: 10,
            hidden_width: 256,
            head_hidden: 256,
            dropout: 0.5,
            attention_heads: 1,
            normalize_colors: false,
            inter_layer_relu: true,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.message_layers < 1 {
            return Err(ModelError::BadConfig(
                "at least one message-passing layer is required".to_string(),
            ));
        }
        if self.hidden_width < 1 || self.head_hidden < 1 {
            return Err(ModelError::BadConfig(
                "layer widths must be at least 1".to_string(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(ModelError::BadConfig(format!(
                "dropout rate must lie in [0, 1), got {}",
                self.dropout
            )));
        }
        if self.attention_heads != 1 {
            return Err(ModelError::BadConfig(format!(
                "only single-head attention is supported, got {} heads",
                self.attention_heads
            )));
        }
        Ok(())
    }
}

/// Errors surfaced by model construction, inference and persistence.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model configuration: {0}")]
    BadConfig(String),
    #[error("tensor {name}: expected shape {expected:?}, got {got:?}")]
    ShapeMismatch {
        name: String,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("input has {got} attribute columns, the model expects {expected}")]
    InputWidth { expected: usize, got: usize },
    #[error("target matrix shape {got:?} does not match {expected:?}")]
    TargetShape {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("checkpoint is missing tensor {0:?}")]
    MissingTensor(String),
    #[error("checkpoint is missing metadata key {0:?}")]
    MissingMeta(String),
    #[error("checkpoint metadata {key} has unusable value {value:?}")]
    BadMeta { key: String, value: String },
    #[error(transparent)]
    Numeric(#[from] nn_core::NnError),
    #[error(transparent)]
    Checkpoint(#[from] nn_core::CheckpointError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_configuration_is_valid() {
        ModelConfig::reference(Variant::Gcn).validate().unwrap();
        ModelConfig::reference(Variant::Gat).validate().unwrap();
    }

    #[test]
    fn validation_rejects_degenerate_settings() {
        let mut c = ModelConfig::reference(Variant::Gcn);
        c.message_layers = 0;
        assert!(c.validate().is_err());

        let mut c = ModelConfig::reference(Variant::Gcn);
        c.hidden_width = 0;
        assert!(c.validate().is_err());

        let mut c = ModelConfig::reference(Variant::Gcn);
        c.dropout = 1.0;
        assert!(c.validate().is_err());

        let mut c = ModelConfig::reference(Variant::Gat);
        c.attention_heads = 4;
        assert!(c.validate().is_err());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [Variant::Gcn, Variant::Gat] {
            let name = v.to_string();
            assert_eq!(name.parse::<Variant>().unwrap(), v);
        }
        assert!("transformer".parse::<Variant>().is_err());
    }
}
