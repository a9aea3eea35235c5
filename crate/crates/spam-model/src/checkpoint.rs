//! Versioned binary checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic   8 bytes  "SPAMCKPT"
//! version u32      1
//! meta    u64 length + JSON (model config, standardizer, loss weights,
//!                            training provenance)
//! vocab   u64 count, then per word: u64 length + UTF-8 bytes
//! params  u64 count, then per tensor:
//!           u64 name length + name bytes
//!           u8  frozen flag
//!           u64 rows, u64 cols
//!           rows*cols f32 values, little-endian
//! ```
//!
//! Save then load reproduces every parameter bit-exactly; readers
//! reject unknown magic or versions and truncated files.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::loss::LossWeights;
use crate::mat::Mat;
use crate::model::{Model, ModelConfig};
use crate::params::ParamId;
use crate::trainer::Standardizer;
use crate::ModelError;

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"SPAMCKPT";

/// Training provenance stored alongside the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub seed: u64,
    pub steps_run: usize,
    pub best_step: usize,
    pub best_dev_loss: f64,
    pub initial_dev_loss: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Meta {
    model_config: ModelConfig,
    standardizer: Standardizer,
    loss_weights: LossWeights,
    train_meta: TrainMeta,
}

/// A full model state: config, tokenizer table, aux-target scaling and
/// all parameter tensors (frozen ones included).
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub model_config: ModelConfig,
    pub vocab: Vec<String>,
    pub standardizer: Standardizer,
    pub loss_weights: LossWeights,
    pub train_meta: TrainMeta,
    pub params: Vec<(String, bool, Mat<f32>)>,
}

impl Checkpoint {
    /// Captures the current state of a model.
    pub fn from_model(
        model: &Model<f32>,
        standardizer: Standardizer,
        loss_weights: LossWeights,
        train_meta: TrainMeta,
    ) -> Checkpoint {
        Checkpoint {
            model_config: model.config.clone(),
            vocab: model.vocab.clone(),
            standardizer,
            loss_weights,
            train_meta,
            params: model
                .params
                .entries()
                .iter()
                .map(|e| (e.name.clone(), e.frozen, e.value.clone()))
                .collect(),
        }
    }

    /// Rebuilds a model carrying exactly this checkpoint's parameters.
    pub fn to_model(&self) -> Result<Model<f32>, ModelError> {
        let mut model = Model::<f32>::new(self.model_config.clone(), self.vocab.clone());
        if model.params.len() != self.params.len() {
            return Err(ModelError::BadCheckpoint {
                path: "<memory>".into(),
                reason: format!(
                    "parameter count mismatch: model has {}, checkpoint has {}",
                    model.params.len(),
                    self.params.len()
                ),
            });
        }
        for (name, frozen, value) in &self.params {
            let id = model
                .params
                .id_of(name)
                .ok_or_else(|| ModelError::BadCheckpoint {
                    path: "<memory>".into(),
                    reason: format!("unknown parameter {name}"),
                })?;
            let entry = &model.params.entries()[id.0];
            if entry.frozen != *frozen
                || entry.value.rows != value.rows
                || entry.value.cols != value.cols
            {
                return Err(ModelError::BadCheckpoint {
                    path: "<memory>".into(),
                    reason: format!("shape or freeze mismatch for {name}"),
                });
            }
            *model.params.value_mut(ParamId(id.0)) = value.clone();
        }
        Ok(model)
    }
}

fn corrupt(path: &Path, reason: impl Into<String>) -> ModelError {
    ModelError::BadCheckpoint {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> ModelError {
    ModelError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Serializes a checkpoint; byte output is a pure function of the
/// checkpoint contents.
pub fn save_checkpoint(ckpt: &Checkpoint, path: &Path) -> Result<(), ModelError> {
    let meta = Meta {
        model_config: ckpt.model_config.clone(),
        standardizer: ckpt.standardizer,
        loss_weights: ckpt.loss_weights,
        train_meta: ckpt.train_meta,
    };
    let meta_json = serde_json::to_vec(&meta).expect("meta serializes");

    let mut out: Vec<u8> = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(meta_json.len() as u64).to_le_bytes());
    out.extend_from_slice(&meta_json);
    out.extend_from_slice(&(ckpt.vocab.len() as u64).to_le_bytes());
    for word in &ckpt.vocab {
        out.extend_from_slice(&(word.len() as u64).to_le_bytes());
        out.extend_from_slice(word.as_bytes());
    }
    out.extend_from_slice(&(ckpt.params.len() as u64).to_le_bytes());
    for (name, frozen, value) in &ckpt.params {
        out.extend_from_slice(&(name.len() as u64).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.push(u8::from(*frozen));
        out.extend_from_slice(&(value.rows as u64).to_le_bytes());
        out.extend_from_slice(&(value.cols as u64).to_le_bytes());
        for v in &value.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }

    let mut file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(&out).map_err(|e| io_err(path, e))?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelError> {
        if self.pos + n > self.bytes.len() {
            return Err(corrupt(self.path, "truncated file"));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u64(&mut self) -> Result<u64, ModelError> {
        let b = self.take(8)?;
        Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
    }

    fn u32(&mut self) -> Result<u32, ModelError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
    }

    fn string(&mut self) -> Result<String, ModelError> {
        let len = self.u64()? as usize;
        if len > self.bytes.len() {
            return Err(corrupt(self.path, "implausible string length"));
        }
        let b = self.take(len)?;
        String::from_utf8(b.to_vec()).map_err(|_| corrupt(self.path, "invalid UTF-8"))
    }
}

/// Reads and validates a checkpoint file.
pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, ModelError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .map_err(|e| io_err(path, e))?
        .read_to_end(&mut bytes)
        .map_err(|e| io_err(path, e))?;
    let mut r = Reader {
        bytes: &bytes,
        pos: 0,
        path,
    };

    if r.take(8)? != MAGIC {
        return Err(corrupt(path, "bad magic"));
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(corrupt(
            path,
            format!("unsupported version {version}, expected {CHECKPOINT_VERSION}"),
        ));
    }
    let meta_json = r.string()?;
    let meta: Meta = serde_json::from_str(&meta_json)
        .map_err(|e| corrupt(path, format!("bad meta JSON: {e}")))?;

    let vocab_len = r.u64()? as usize;
    if vocab_len > bytes.len() {
        return Err(corrupt(path, "implausible vocab length"));
    }
    let mut vocab = Vec::with_capacity(vocab_len);
    for _ in 0..vocab_len {
        vocab.push(r.string()?);
    }

    let n_params = r.u64()? as usize;
    if n_params > bytes.len() {
        return Err(corrupt(path, "implausible parameter count"));
    }
    let mut params = Vec::with_capacity(n_params);
    for _ in 0..n_params {
        let name = r.string()?;
        let frozen = r.take(1)?[0] != 0;
        let rows = r.u64()? as usize;
        let cols = r.u64()? as usize;
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| corrupt(path, "tensor shape overflow"))?;
        let raw = r.take(n * 4)?;
        let data: Vec<f32> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        params.push((name, frozen, Mat::from_vec(rows, cols, data)));
    }
    if r.pos != bytes.len() {
        return Err(corrupt(path, "trailing bytes"));
    }

    Ok(Checkpoint {
        model_config: meta.model_config,
        vocab,
        standardizer: meta.standardizer,
        loss_weights: meta.loss_weights,
        train_meta: meta.train_meta,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_checkpoint() -> Checkpoint {
        let config = ModelConfig {
            h: 16,
            heads: 2,
            prompt_layers: 1,
            ff_mult: 2,
            mel_bands: 40,
            dropout: 0.1,
            init_seed: 5,
        };
        let vocab = vec!["male".to_string(), "female".to_string()];
        let model = Model::<f32>::new(config, vocab);
        Checkpoint::from_model(
            &model,
            Standardizer::fit(std::iter::once((Some(5.0), -2.0, 0.5))),
            LossWeights::default(),
            TrainMeta {
                seed: 1,
                steps_run: 0,
                best_step: 0,
                best_dev_loss: 0.0,
                initial_dev_loss: 0.0,
            },
        )
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.ckpt");
        let p2 = dir.path().join("b.ckpt");
        let ckpt = sample_checkpoint();
        save_checkpoint(&ckpt, &p1).unwrap();
        let loaded = load_checkpoint(&p1).unwrap();
        save_checkpoint(&loaded, &p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn parameters_roundtrip_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.ckpt");
        let ckpt = sample_checkpoint();
        save_checkpoint(&ckpt, &path).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded.params.len(), ckpt.params.len());
        for ((n1, f1, v1), (n2, f2, v2)) in ckpt.params.iter().zip(&loaded.params) {
            assert_eq!(n1, n2);
            assert_eq!(f1, f2);
            assert_eq!(v1.data.len(), v2.data.len());
            for (a, b) in v1.data.iter().zip(&v2.data) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn truncated_file_is_a_corrupt_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.ckpt");
        save_checkpoint(&sample_checkpoint(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(ModelError::BadCheckpoint { .. })
        ));
    }

    #[test]
    fn wrong_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.ckpt");
        save_checkpoint(&sample_checkpoint(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 99;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(ModelError::BadCheckpoint { .. })
        ));
    }

    #[test]
    fn model_roundtrips_through_checkpoint() {
        let ckpt = sample_checkpoint();
        let model = ckpt.to_model().unwrap();
        for ((name, _, value), entry) in ckpt.params.iter().zip(model.params.entries()) {
            assert_eq!(name, &entry.name);
            assert_eq!(value.data, entry.value.data);
        }
    }
}
