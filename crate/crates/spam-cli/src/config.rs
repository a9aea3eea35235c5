//! Run configuration: one TOML file, overridable by CLI flags, written
//! back next to every run's outputs for provenance.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spam_model::{LossWeights, ModelConfig, TrainConfig};

/// Paths a run reads and writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathsConfig {
    pub data_dir: PathBuf,
    pub checkpoint: PathBuf,
    pub reports_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            data_dir: PathBuf::from("data"),
            checkpoint: PathBuf::from("spam.ckpt"),
            reports_dir: PathBuf::from("reports"),
        }
    }
}

/// Model shape knobs exposed in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub h: usize,
    pub heads: usize,
    pub layers: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            h: 64,
            heads: 4,
            layers: 2,
        }
    }
}

/// Training knobs exposed in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub batch_size: usize,
    pub lr: f64,
    pub max_steps: usize,
    pub patience: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        TrainSection {
            batch_size: d.batch_size,
            lr: d.lr,
            max_steps: d.max_steps,
            patience: d.patience,
        }
    }
}

/// Evaluation knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub alpha: f64,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection { alpha: 0.05 }
    }
}

/// The full run configuration. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub paths: PathsConfig,
    pub model: ModelSection,
    pub loss: LossWeights,
    pub train: TrainSection,
    pub eval: EvalSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| anyhow::anyhow!("bad config {}: {e}", path.display()))?;
        Ok(config)
    }

    pub fn model_config(&self, init_seed: u64) -> ModelConfig {
        ModelConfig {
            h: self.model.h,
            heads: self.model.heads,
            prompt_layers: self.model.layers,
            init_seed,
            ..ModelConfig::default()
        }
    }

    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            batch_size: self.train.batch_size,
            lr: self.train.lr,
            max_steps: self.train.max_steps,
            patience: self.train.patience,
            loss: self.loss,
            seed,
            ..TrainConfig::default()
        }
    }

    /// Writes the resolved configuration next to a run's outputs.
    pub fn write_resolved(&self, path: &Path) -> anyhow::Result<()> {
        let text = toml::to_string_pretty(self)?;
        std::fs::write(path, text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_roundtrips_through_toml() {
        let config = RunConfig::default();
        let text = toml::to_string_pretty(&config).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<RunConfig>("zzz_not_a_key = 1\n");
        assert!(err.is_err());
    }

    #[test]
    fn partial_config_fills_defaults() {
        let config: RunConfig = toml::from_str("[train]\nmax_steps = 7\n").unwrap();
        assert_eq!(config.train.max_steps, 7);
        assert_eq!(config.train.batch_size, TrainConfig::default().batch_size);
        assert_eq!(config.eval.alpha, 0.05);
    }
}
