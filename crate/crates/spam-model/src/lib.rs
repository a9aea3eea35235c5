//! The adherence scorer: encoders, speech-prompt fusion, contrastive
//! training and checkpointing.
//!
//! The network maps a waveform (plus transcript and speaker statistics)
//! and a style prompt into one shared embedding space; the score is the
//! cosine of the two embeddings. Numerics run on a small reverse-mode
//! tape that is generic over f32 (training, inference) and f64
//! (finite-difference gradient verification).

pub mod checkpoint;
pub mod features;
pub mod loss;
pub mod mat;
pub mod model;
pub mod params;
pub mod real;
pub mod sampler;
pub mod scorer;
pub mod tape;
pub mod trainer;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use loss::{
    contrastive_loss, huber, supcon_directional, total_loss_value, AuxPredictions, AuxTargets,
    Batch, LossBreakdown, LossWeights,
};
pub use model::{Model, ModelConfig};
pub use real::Real;
pub use sampler::{sample_batch, PromptRerenderer, SampledItem};
pub use scorer::Scorer;
pub use trainer::{train, Standardizer, TrainConfig, TrainOutcome};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("embedding width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("batch invalid: {reason}")]
    BadBatch { reason: String },

    #[error("anchor {index} has no positive candidate")]
    NoPositive { index: usize },

    #[error("similarity inputs must be L2-normalized")]
    NotNormalized,

    #[error("empty prompt")]
    EmptyPrompt,

    #[error("training diverged at step {step}: loss is not finite")]
    Diverged { step: usize },

    #[error("checkpoint {path}: {reason}")]
    BadCheckpoint { path: String, reason: String },

    #[error("manifest has no {split} records")]
    EmptySplit { split: &'static str },

    #[error(transparent)]
    Core(#[from] spam_core::CoreError),

    #[error("I/O error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
