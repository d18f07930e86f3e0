use crate::error::{Error, Result};
use crate::text::PipelineConfig;
use crate::text::SplitMode;
use crate::train::{AdamConfig, TrainConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct HyperParams {
    pub vocab_size: usize,
    pub embedding_dim: usize,
    pub maxlen: usize,
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Units per direction in each recurrent layer.
    pub hidden_size: usize,
    pub dense_size: usize,
    pub dropout_rate: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            vocab_size: 20_000,
            embedding_dim: 150,
            maxlen: 200,
            batch_size: 256,
            epochs: 10,
            learning_rate: 1e-3,
            hidden_size: 64,
            dense_size: 64,
            dropout_rate: 0.3,
            test_fraction: 0.2,
            seed: 42,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("vocab_size", self.vocab_size),
            ("embedding_dim", self.embedding_dim),
            ("maxlen", self.maxlen),
            ("batch_size", self.batch_size),
            ("epochs", self.epochs),
            ("hidden_size", self.hidden_size),
            ("dense_size", self.dense_size),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be at least 1")));
        }
        if self.vocab_size < 3 {
            return Err(Error::Config("vocab_size must be at least 3 (two indices are reserved)".into()));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Config(format!("dropout_rate must be in [0, 1), got {}", self.dropout_rate)));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!("test_fraction must be in (0, 1), got {}", self.test_fraction)));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::Config(format!("learning_rate must be finite and non-negative, got {}", self.learning_rate)));
        }
        Ok(())
    }

    pub fn pipeline(&self, split_mode: SplitMode) -> PipelineConfig {
        PipelineConfig {
            vocab_size: self.vocab_size,
            maxlen: self.maxlen,
            test_fraction: self.test_fraction,
            split_mode,
            seed: self.seed,
        }
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig { lr: self.learning_rate, ..AdamConfig::default() }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig { batch_size: self.batch_size, epochs: self.epochs, clip_norm: None }
    }
}
