//! Learnable parameters: storage, initialization, and checkpointing.

use nn_core::{Checkpoint, Matrix, SplitMix64, glorot_uniform};

use crate::config::{ModelConfig, ModelError, Variant};
use crate::graph::INPUT_WIDTH;

/// All learnable tensors of one model, stored flat in a fixed order so the
/// same slice drives the optimizer, the gradient checker and checkpoints.
///
/// Layout: for each message layer `i` ascending, `message{i}.weight` and —
/// attention variant only — `message{i}.attention`; then `head1.weight`,
/// `head1.bias`, `head2.weight`, `head2.bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    config: ModelConfig,
    tensors: Vec<Matrix>,
}

/// Names and shapes of every tensor for a configuration, in layout order.
fn layout(config: &ModelConfig) -> Vec<(String, (usize, usize))> {
    let w = config.hidden_width;
    let mut entries = Vec::new();
    for i in 0..config.message_layers {
        let fan_in = if i == 0 { INPUT_WIDTH } else { w };
        entries.push((format!("message{i}.weight"), (w, fan_in)));
        if config.variant == Variant::Gat {
            entries.push((format!("message{i}.attention"), (1, 2 * w)));
        }
    }
    entries.push(("head1.weight".to_string(), (config.head_hidden, w)));
    entries.push(("head1.bias".to_string(), (1, config.head_hidden)));
    entries.push(("head2.weight".to_string(), (2, config.head_hidden)));
    entries.push(("head2.bias".to_string(), (1, 2)));
    entries
}

impl ModelParams {
    /// Initializes fresh parameters: weight and attention tensors are drawn
    /// from the fan-balanced uniform initializer in layout order from `rng`;
    /// biases start at zero (and consume no randomness).
    pub fn init(config: ModelConfig, rng: &mut SplitMix64) -> Result<ModelParams, ModelError> {
        config.validate()?;
        let tensors = layout(&config)
            .into_iter()
            .map(|(name, (rows, cols))| {
                if name.ends_with(".bias") {
                    Matrix::zeros(rows, cols)
                } else {
                    glorot_uniform(rows, cols, rng)
                }
            })
            .collect();
        Ok(ModelParams { config, tensors })
    }

    /// Wraps existing tensors, validating count and shapes against the
    /// configuration's layout.
    pub fn from_tensors(
        config: ModelConfig,
        tensors: Vec<Matrix>,
    ) -> Result<ModelParams, ModelError> {
        config.validate()?;
        let expected = layout(&config);
        if tensors.len() != expected.len() {
            return Err(ModelError::BadConfig(format!(
                "expected {} tensors for this configuration, got {}",
                expected.len(),
                tensors.len()
            )));
        }
        for ((name, shape), tensor) in expected.iter().zip(&tensors) {
            if tensor.shape() != *shape {
                return Err(ModelError::ShapeMismatch {
                    name: name.clone(),
                    expected: *shape,
                    got: tensor.shape(),
                });
            }
        }
        Ok(ModelParams { config, tensors })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    /// All tensors in layout order.
    pub fn tensors(&self) -> &[Matrix] {
        &self.tensors
    }

    /// Mutable view for in-place optimizer updates.
    pub fn tensors_mut(&mut self) -> &mut [Matrix] {
        &mut self.tensors
    }

    /// Tensor names in layout order.
    pub fn tensor_names(&self) -> Vec<String> {
        layout(&self.config).into_iter().map(|(n, _)| n).collect()
    }

    /// Tensor shapes in layout order (for optimizer-state construction).
    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.tensors.iter().map(Matrix::shape).collect()
    }

    fn index_of_message(&self, layer: usize) -> usize {
        match self.config.variant {
            Variant::Gcn => layer,
            Variant::Gat => 2 * layer,
        }
    }

    /// Weight matrix of message layer `layer` (`width × fan_in`).
    pub fn message_weight(&self, layer: usize) -> &Matrix {
        &self.tensors[self.index_of_message(layer)]
    }

    /// Attention vector of message layer `layer` (`1 × 2·width`); attention
    /// variant only.
    ///
    /// # Panics
    ///
    /// Panics when called on a convolutional model.
    pub fn attention(&self, layer: usize) -> &Matrix {
        assert_eq!(
            self.config.variant,
            Variant::Gat,
            "convolutional layers have no attention vector"
        );
        &self.tensors[2 * layer + 1]
    }

    fn head_base(&self) -> usize {
        let per_layer = match self.config.variant {
            Variant::Gcn => 1,
            Variant::Gat => 2,
        };
        per_layer * self.config.message_layers
    }

    pub fn head1_weight(&self) -> &Matrix {
        &self.tensors[self.head_base()]
    }

    pub fn head1_bias(&self) -> &Matrix {
        &self.tensors[self.head_base() + 1]
    }

    pub fn head2_weight(&self) -> &Matrix {
        &self.tensors[self.head_base() + 2]
    }

    pub fn head2_bias(&self) -> &Matrix {
        &self.tensors[self.head_base() + 3]
    }

    /// Packs the configuration and every tensor into a checkpoint. Callers
    /// may add their own metadata before saving; the model's keys are
    /// `variant`, `message_layers`, `hidden_width`, `head_hidden`,
    /// `dropout`, `attention_heads`, `normalize_colors` and
    /// `inter_layer_relu`.
    pub fn to_checkpoint(&self) -> Checkpoint {
        let mut cp = Checkpoint::new();
        let c = &self.config;
        cp.set_meta("variant", c.variant.to_string());
        cp.set_meta("message_layers", c.message_layers.to_string());
        cp.set_meta("hidden_width", c.hidden_width.to_string());
        cp.set_meta("head_hidden", c.head_hidden.to_string());
        cp.set_meta("dropout", c.dropout.to_string());
        cp.set_meta("attention_heads", c.attention_heads.to_string());
        cp.set_meta("normalize_colors", c.normalize_colors.to_string());
        cp.set_meta("inter_layer_relu", c.inter_layer_relu.to_string());
        for (name, tensor) in self.tensor_names().iter().zip(&self.tensors) {
            cp.push_tensor(name, tensor.clone());
        }
        cp
    }

    /// Reconstructs configuration and parameters from a checkpoint written
    /// by [`ModelParams::to_checkpoint`]. Unknown metadata keys are ignored
    /// so callers can stash extra provenance alongside the model.
    pub fn from_checkpoint(cp: &Checkpoint) -> Result<ModelParams, ModelError> {
        fn meta<'a>(cp: &'a Checkpoint, key: &str) -> Result<&'a str, ModelError> {
            cp.meta(key)
                .ok_or_else(|| ModelError::MissingMeta(key.to_string()))
        }
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ModelError> {
            value.parse().map_err(|_| ModelError::BadMeta {
                key: key.to_string(),
                value: value.to_string(),
            })
        }
        let config = ModelConfig {
            variant: parse("variant", meta(cp, "variant")?)?,
            message_layers: parse("message_layers", meta(cp, "message_layers")?)?,
            hidden_width: parse("hidden_width", meta(cp, "hidden_width")?)?,
            head_hidden: parse("head_hidden", meta(cp, "head_hidden")?)?,
            dropout: parse("dropout", meta(cp, "dropout")?)?,
            attention_heads: parse("attention_heads", meta(cp, "attention_heads")?)?,
            normalize_colors: parse("normalize_colors", meta(cp, "normalize_colors")?)?,
            inter_layer_relu: parse("inter_layer_relu", meta(cp, "inter_layer_relu")?)?,
        };
        config.validate()?;
        let tensors = layout(&config)
            .into_iter()
            .map(|(name, _)| {
                cp.tensor(&name)
                    .cloned()
                    .ok_or(ModelError::MissingTensor(name))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ModelParams::from_tensors(config, tensors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(variant: Variant) -> ModelConfig {
        ModelConfig {
            variant,
            message_layers: 2,
            hidden_width: 4,
            head_hidden: 3,
            dropout: 0.25,
            attention_heads: 1,
            normalize_colors: true,
            inter_layer_relu: true,
        }
    }

    #[test]
    fn layout_shapes_match_the_architecture() {
        let params = ModelParams::init(toy(Variant::Gat), &mut SplitMix64::new(1)).unwrap();
        assert_eq!(params.message_weight(0).shape(), (4, INPUT_WIDTH));
        assert_eq!(params.message_weight(1).shape(), (4, 4));
        assert_eq!(params.attention(0).shape(), (1, 8));
        assert_eq!(params.attention(1).shape(), (1, 8));
        assert_eq!(params.head1_weight().shape(), (3, 4));
        assert_eq!(params.head1_bias().shape(), (1, 3));
        assert_eq!(params.head2_weight().shape(), (2, 3));
        assert_eq!(params.head2_bias().shape(), (1, 2));
        assert_eq!(params.tensors().len(), 8);

        let conv = ModelParams::init(toy(Variant::Gcn), &mut SplitMix64::new(1)).unwrap();
        assert_eq!(conv.tensors().len(), 6);
        assert_eq!(conv.head1_weight().shape(), (3, 4));
    }

    #[test]
    fn biases_start_at_zero_and_weights_do_not() {
        let params = ModelParams::init(toy(Variant::Gcn), &mut SplitMix64::new(7)).unwrap();
        assert_eq!(params.head1_bias().max_abs(), 0.0);
        assert_eq!(params.head2_bias().max_abs(), 0.0);
        assert!(params.message_weight(0).max_abs() > 0.0);
        assert!(params.head2_weight().max_abs() > 0.0);
    }

    #[test]
    fn initialization_is_deterministic_in_the_seed() {
        let a = ModelParams::init(toy(Variant::Gat), &mut SplitMix64::new(3)).unwrap();
        let b = ModelParams::init(toy(Variant::Gat), &mut SplitMix64::new(3)).unwrap();
        assert_eq!(a, b);
        let c = ModelParams::init(toy(Variant::Gat), &mut SplitMix64::new(4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn checkpoint_round_trip_is_exact() {
        let params = ModelParams::init(toy(Variant::Gat), &mut SplitMix64::new(11)).unwrap();
        let cp = params.to_checkpoint();
        let back = ModelParams::from_checkpoint(&cp).unwrap();
        assert_eq!(back, params);
        assert_eq!(back.config(), params.config());
    }

    #[test]
    fn checkpoint_with_missing_tensor_is_rejected() {
        let params = ModelParams::init(toy(Variant::Gcn), &mut SplitMix64::new(2)).unwrap();
        let full = params.to_checkpoint();
        let mut cp = Checkpoint::new();
        for (k, v) in full.meta_entries() {
            cp.set_meta(k, v.clone());
        }
        for (name, tensor) in full.tensors().iter().take(3) {
            cp.push_tensor(name, tensor.clone());
        }
        assert!(matches!(
            ModelParams::from_checkpoint(&cp),
            Err(ModelError::MissingTensor(_))
        ));
    }

    #[test]
    fn from_tensors_rejects_wrong_shapes() {
        let params = ModelParams::init(toy(Variant::Gcn), &mut SplitMix64::new(2)).unwrap();
        let mut tensors = params.tensors().to_vec();
        tensors[0] = Matrix::zeros(4, 9);
        assert!(matches!(
            ModelParams::from_tensors(toy(Variant::Gcn), tensors),
            Err(ModelError::ShapeMismatch { .. })
        ));
    }
}
