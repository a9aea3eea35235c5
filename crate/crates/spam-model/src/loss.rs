//! The training loss stack: symmetric supervised contrastive loss over
//! style-key positives plus Huber-regularized auxiliary predictions.
//!
//! Two routes exist on purpose. The plain-f64 functions here are the
//! reference semantics (and what tests oracle against); the
//! `batch_loss_graph` builder expresses the same formulas as tape ops
//! so gradients flow to the encoders.

use serde::{Deserialize, Serialize};
use spam_core::StyleKey;

use crate::mat::{dot, Mat};
use crate::real::Real;
use crate::tape::{Tape, Var};
use crate::ModelError;

/// Loss term weights and shared scalars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossWeights {
    pub lambda_c: f64,
    pub lambda_p: f64,
    pub lambda_v: f64,
    pub lambda_e: f64,
    /// Temperature dividing all dot products; 1.0 reproduces the raw
    /// exponentiated-dot-product form.
    pub temperature: f64,
    pub huber_delta: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            lambda_c: 1.0,
            lambda_p: 0.1,
            lambda_v: 0.1,
            lambda_e: 0.1,
            temperature: 0.07,
            huber_delta: 1.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.lambda_c > 0.0) {
            return Err(ModelError::BadBatch {
                reason: "lambda_c must be positive".into(),
            });
        }
        if !(self.temperature > 0.0) {
            return Err(ModelError::BadBatch {
                reason: "temperature must be positive".into(),
            });
        }
        if self.lambda_p < 0.0 || self.lambda_v < 0.0 || self.lambda_e < 0.0 {
            return Err(ModelError::BadBatch {
                reason: "lambda weights must be nonnegative".into(),
            });
        }
        if !(self.huber_delta > 0.0) {
            return Err(ModelError::BadBatch {
                reason: "huber_delta must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Standardized auxiliary regression targets for one item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxTargets {
    /// Mean log F0 over voiced frames; `None` drops the pitch term.
    pub pitch: Option<f64>,
    pub energy: f64,
    pub rate: f64,
}

/// Utterance-level auxiliary predictions for one item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxPredictions {
    pub p_hat: f64,
    pub v_hat: f64,
    pub e_hat: f64,
}

/// One training batch in embedding space.
#[derive(Debug, Clone)]
pub struct Batch {
    pub speech_embeddings: Vec<Vec<f64>>,
    pub prompt_embeddings: Vec<Vec<f64>>,
    pub style_keys: Vec<StyleKey>,
    pub aux_targets: Vec<AuxTargets>,
    pub aux_predictions: Vec<AuxPredictions>,
}

impl Batch {
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.speech_embeddings.len();
        if n < 2 {
            return Err(ModelError::BadBatch {
                reason: format!("batch needs at least 2 items, got {n}"),
            });
        }
        if self.prompt_embeddings.len() != n
            || self.style_keys.len() != n
            || self.aux_targets.len() != n
            || self.aux_predictions.len() != n
        {
            return Err(ModelError::BadBatch {
                reason: "batch field lengths differ".into(),
            });
        }
        for vecs in [&self.speech_embeddings, &self.prompt_embeddings] {
            for v in vecs.iter() {
                let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-5 {
                    return Err(ModelError::BadBatch {
                        reason: format!("embedding norm {norm} is not 1"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// One directional supervised contrastive loss L(X, Y).
///
/// Per anchor x_i, averages -log(exp(x_i . p / tau) / sum_y exp(x_i . y / tau))
/// over the positives p (the candidates sharing x_i's style key), then
/// averages over anchors. Every anchor must have at least one positive;
/// with pairwise-aligned inputs the anchor's own counterpart always is
/// one.
pub fn supcon_directional(
    anchors: &[Vec<f64>],
    candidates: &[Vec<f64>],
    keys: &[StyleKey],
    temperature: f64,
) -> Result<f64, ModelError> {
    let n = anchors.len();
    if candidates.len() != n || keys.len() != n {
        return Err(ModelError::BadBatch {
            reason: "anchors, candidates and keys must have equal length".into(),
        });
    }
    if n == 0 {
        return Err(ModelError::BadBatch {
            reason: "empty batch".into(),
        });
    }
    let mut total = 0.0;
    for (i, anchor) in anchors.iter().enumerate() {
        let logits: Vec<f64> = candidates
            .iter()
            .map(|c| {
                anchor
                    .iter()
                    .zip(c)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / temperature
            })
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
        let positives: Vec<f64> = logits
            .iter()
            .zip(keys)
            .filter(|(_, k)| **k == keys[i])
            .map(|(&l, _)| l)
            .collect();
        if positives.is_empty() {
            return Err(ModelError::NoPositive { index: i });
        }
        let mean_pos = positives.iter().sum::<f64>() / positives.len() as f64;
        total += lse - mean_pos;
    }
    Ok(total / n as f64)
}

/// Symmetric contrastive loss: the average of the two directions.
pub fn contrastive_loss(batch: &Batch, weights: &LossWeights) -> Result<f64, ModelError> {
    batch.validate()?;
    weights.validate()?;
    let ab = supcon_directional(
        &batch.speech_embeddings,
        &batch.prompt_embeddings,
        &batch.style_keys,
        weights.temperature,
    )?;
    let ba = supcon_directional(
        &batch.prompt_embeddings,
        &batch.speech_embeddings,
        &batch.style_keys,
        weights.temperature,
    )?;
    Ok(0.5 * (ab + ba))
}

/// Huber loss: quadratic within delta, linear beyond.
pub fn huber(pred: f64, target: f64, delta: f64) -> f64 {
    assert!(delta > 0.0, "delta must be positive");
    let r = (pred - target).abs();
    if r <= delta {
        0.5 * r * r
    } else {
        delta * (r - 0.5 * delta)
    }
}

/// Per-term values of the total loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub contrastive: f64,
    pub pitch: f64,
    pub speed: f64,
    pub energy: f64,
}

/// Reference (non-differentiable) total loss:
/// lambda_c * L_con plus weighted batch means of the per-item Huber
/// losses on the utterance-level scalars. Items without a pitch target
/// drop out of the pitch term.
pub fn total_loss_value(batch: &Batch, weights: &LossWeights) -> Result<LossBreakdown, ModelError> {
    let contrastive = contrastive_loss(batch, weights)?;

    let mut pitch_sum = 0.0;
    let mut pitch_count = 0usize;
    let mut speed_sum = 0.0;
    let mut energy_sum = 0.0;
    for (t, p) in batch.aux_targets.iter().zip(&batch.aux_predictions) {
        if let Some(pt) = t.pitch {
            pitch_sum += huber(p.p_hat, pt, weights.huber_delta);
            pitch_count += 1;
        }
        speed_sum += huber(p.v_hat, t.rate, weights.huber_delta);
        energy_sum += huber(p.e_hat, t.energy, weights.huber_delta);
    }
    let n = batch.aux_targets.len() as f64;
    let pitch = if pitch_count == 0 {
        0.0
    } else {
        pitch_sum / pitch_count as f64
    };
    let speed = speed_sum / n;
    let energy = energy_sum / n;

    Ok(LossBreakdown {
        total: weights.lambda_c * contrastive
            + weights.lambda_p * pitch
            + weights.lambda_v * speed
            + weights.lambda_e * energy,
        contrastive,
        pitch,
        speed,
        energy,
    })
}

/// Handles into the batch-loss graph, for seeding item backward passes.
pub struct BatchLossGraph {
    pub total: Var,
    pub contrastive: Var,
    pub pitch_term: Var,
    pub speed_term: Var,
    pub energy_term: Var,
    /// N x h leaf holding the speech embeddings.
    pub a_leaf: Var,
    /// N x h leaf holding the prompt embeddings.
    pub b_leaf: Var,
    /// N x 1 leaves holding the utterance-level aux predictions.
    pub p_leaf: Var,
    pub v_leaf: Var,
    pub e_leaf: Var,
}

/// Positive mask M with M[i][j] = [key_i == key_j] / |P(i)|.
fn positive_mask<T: Real>(keys: &[StyleKey]) -> Result<Mat<T>, ModelError> {
    let n = keys.len();
    let mut mask = Mat::zeros(n, n);
    for i in 0..n {
        let count = keys.iter().filter(|k| **k == keys[i]).count();
        if count == 0 {
            return Err(ModelError::NoPositive { index: i });
        }
        let w = T::from_f64c(1.0 / count as f64);
        for j in 0..n {
            if keys[j] == keys[i] {
                mask.set(i, j, w);
            }
        }
    }
    Ok(mask)
}

/// Builds the differentiable total loss over collected per-item
/// embeddings and aux predictions.
///
/// The caller later seeds each item's graph with the rows of the
/// gradients at `a_leaf` / `b_leaf` and the aux leaves.
#[allow(clippy::too_many_arguments)]
pub fn batch_loss_graph<T: Real>(
    tape: &mut Tape<T>,
    a_rows: Mat<T>,
    b_rows: Mat<T>,
    p_hat: Mat<T>,
    v_hat: Mat<T>,
    e_hat: Mat<T>,
    keys: &[StyleKey],
    targets: &[AuxTargets],
    weights: &LossWeights,
) -> Result<BatchLossGraph, ModelError> {
    weights.validate()?;
    let n = keys.len();
    if a_rows.rows != n || b_rows.rows != n || targets.len() != n {
        return Err(ModelError::BadBatch {
            reason: "batch loss inputs must share length".into(),
        });
    }
    let mask = positive_mask::<T>(keys)?;
    let inv_tau = T::from_f64c(1.0 / weights.temperature);

    let a_leaf = tape.input(a_rows);
    let b_leaf = tape.input(b_rows);

    let directional = |tape: &mut Tape<T>, x: Var, y: Var| {
        let logits = tape.matmul_nt(x, y);
        let logits = tape.scale(logits, inv_tau);
        let lse = tape.logsumexp_rows(logits);
        let masked = tape.mul_const(logits, mask.clone());
        let pos_mean = tape.row_sum(masked);
        let per_anchor = tape.sub(lse, pos_mean);
        tape.mean_all(per_anchor)
    };
    let l_ab = directional(tape, a_leaf, b_leaf);
    let l_ba = directional(tape, b_leaf, a_leaf);
    let sum_dir = tape.add(l_ab, l_ba);
    let contrastive = tape.scale(sum_dir, T::from_f64c(0.5));

    let p_leaf = tape.input(p_hat);
    let v_leaf = tape.input(v_hat);
    let e_leaf = tape.input(e_hat);

    let pitch_targets = Mat::from_vec(
        n,
        1,
        targets
            .iter()
            .map(|t| T::from_f64c(t.pitch.unwrap_or(0.0)))
            .collect(),
    );
    let pitch_mask: Vec<bool> = targets.iter().map(|t| t.pitch.is_some()).collect();
    let rate_targets = Mat::from_vec(n, 1, targets.iter().map(|t| T::from_f64c(t.rate)).collect());
    let energy_targets =
        Mat::from_vec(n, 1, targets.iter().map(|t| T::from_f64c(t.energy)).collect());
    let full_mask = vec![true; n];

    let pitch_term = tape.huber_vec(p_leaf, pitch_targets, pitch_mask, weights.huber_delta);
    let speed_term = tape.huber_vec(v_leaf, rate_targets, full_mask.clone(), weights.huber_delta);
    let energy_term = tape.huber_vec(e_leaf, energy_targets, full_mask, weights.huber_delta);

    let wc = tape.scale(contrastive, T::from_f64c(weights.lambda_c));
    let wp = tape.scale(pitch_term, T::from_f64c(weights.lambda_p));
    let wv = tape.scale(speed_term, T::from_f64c(weights.lambda_v));
    let we = tape.scale(energy_term, T::from_f64c(weights.lambda_e));
    let cp = tape.add(wc, wp);
    let ve = tape.add(wv, we);
    let total = tape.add(cp, ve);

    Ok(BatchLossGraph {
        total,
        contrastive,
        pitch_term,
        speed_term,
        energy_term,
        a_leaf,
        b_leaf,
        p_leaf,
        v_leaf,
        e_leaf,
    })
}

/// L2-normalizes a plain vector (used to build test fixtures).
pub fn normalize(v: &[f64]) -> Vec<f64> {
    let norm = dot(v, v).sqrt();
    v.iter().map(|x| x / norm).collect()
}
