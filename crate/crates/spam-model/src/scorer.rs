//! Inference: embedding speech and prompts and computing the adherence
//! score.

use spam_core::Waveform;

use crate::checkpoint::Checkpoint;
use crate::features::item_features;
use crate::loss::AuxPredictions;
use crate::model::{Mode, Model};
use crate::tape::Tape;
use crate::trainer::Standardizer;
use crate::ModelError;

/// A scored speech embedding: the unit vector plus the de-standardized
/// auxiliary predictions.
#[derive(Debug, Clone)]
pub struct SpeechEmbedding {
    pub vector: Vec<f32>,
    /// Auxiliary predictions mapped back to physical units
    /// (log Hz, log RMS, phonemes/second).
    pub aux: AuxPredictions,
}

/// Cosine similarity of two unit vectors, accumulated in f64 and
/// clamped into [-1, 1]. Errors when either input is not normalized.
pub fn similarity(a: &[f32], b: &[f32]) -> Result<f64, ModelError> {
    if a.len() != b.len() {
        return Err(ModelError::WidthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    for v in [a, b] {
        let norm: f64 = v.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-4 {
            return Err(ModelError::NotNormalized);
        }
    }
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| x as f64 * y as f64).sum();
    Ok(dot.clamp(-1.0, 1.0))
}

/// Frozen model ready for scoring.
pub struct Scorer {
    pub model: Model<f32>,
    pub standardizer: Standardizer,
}

impl Scorer {
    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Scorer, ModelError> {
        Ok(Scorer {
            model: ckpt.to_model()?,
            standardizer: ckpt.standardizer,
        })
    }

    /// Embeds one utterance (inference mode, no dropout).
    pub fn embed_speech(
        &self,
        transcript: &str,
        waveform: &Waveform,
    ) -> Result<SpeechEmbedding, ModelError> {
        let feats = item_features(transcript, waveform)?;
        let mut tape: Tape<f32> = Tape::new();
        let out =
            self.model
                .forward_speech(&mut tape, &feats.filterbank, &feats.phonemes, Mode::Inference)?;
        Ok(SpeechEmbedding {
            vector: tape.value(out.a).row(0).to_vec(),
            aux: AuxPredictions {
                p_hat: self
                    .standardizer
                    .unstandardize_pitch(tape.value(out.aux.p_hat).scalar() as f64),
                v_hat: self
                    .standardizer
                    .unstandardize_rate(tape.value(out.aux.v_hat).scalar() as f64),
                e_hat: self
                    .standardizer
                    .unstandardize_energy(tape.value(out.aux.e_hat).scalar() as f64),
            },
        })
    }

    /// Embeds one prompt.
    pub fn embed_prompt(&self, prompt: &str) -> Result<Vec<f32>, ModelError> {
        let mut tape: Tape<f32> = Tape::new();
        let b = self.model.forward_prompt(&mut tape, prompt)?;
        Ok(tape.value(b).row(0).to_vec())
    }

    /// The adherence score of one (speech, prompt) pair.
    pub fn score_pair(
        &self,
        transcript: &str,
        waveform: &Waveform,
        prompt: &str,
    ) -> Result<f64, ModelError> {
        let speech = self.embed_speech(transcript, waveform)?;
        let b = self.embed_prompt(prompt)?;
        similarity(&speech.vector, &b)
    }
}
