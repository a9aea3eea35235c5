//! The optimization loop: AdamW with warmup and decoupled weight decay,
//! gradient clipping, early stopping on dev contrastive loss, and
//! per-step metrics.

use std::collections::HashMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spam_core::{Manifest, Split, UtteranceRecord};

use crate::checkpoint::{Checkpoint, TrainMeta};
use crate::features::{item_features, ItemFeatures};
use crate::loss::{batch_loss_graph, AuxTargets, LossWeights};
use crate::mat::Mat;
use crate::model::{Mode, Model, ModelConfig};
use crate::params::Grads;
use crate::sampler::{sample_batch, PromptRerenderer};
use crate::tape::Tape;
use crate::ModelError;

/// Optimization hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub max_steps: usize,
    pub warmup_steps: usize,
    /// Dev evaluation cadence in steps.
    pub eval_interval: usize,
    /// Evaluations without improvement before stopping.
    pub patience: usize,
    pub grad_clip: f64,
    pub loss: LossWeights,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            lr: 3e-4,
            weight_decay: 0.01,
            max_steps: 1500,
            warmup_steps: 100,
            eval_interval: 50,
            patience: 10,
            grad_clip: 1.0,
            loss: LossWeights::default(),
            seed: 0,
        }
    }
}

/// Z-scoring statistics for the three auxiliary targets, computed on
/// the train split and stored in every checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub pitch_mean: f64,
    pub pitch_std: f64,
    pub energy_mean: f64,
    pub energy_std: f64,
    pub rate_mean: f64,
    pub rate_std: f64,
}

impl Standardizer {
    pub fn fit(features: impl Iterator<Item = (Option<f64>, f64, f64)>) -> Standardizer {
        let mut pitch = Vec::new();
        let mut energy = Vec::new();
        let mut rate = Vec::new();
        for (p, e, r) in features {
            if let Some(p) = p {
                pitch.push(p);
            }
            energy.push(e);
            rate.push(r);
        }
        let stats = |xs: &[f64]| {
            if xs.is_empty() {
                return (0.0, 1.0);
            }
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64;
            (mean, var.sqrt().max(1e-6))
        };
        let (pitch_mean, pitch_std) = stats(&pitch);
        let (energy_mean, energy_std) = stats(&energy);
        let (rate_mean, rate_std) = stats(&rate);
        Standardizer {
            pitch_mean,
            pitch_std,
            energy_mean,
            energy_std,
            rate_mean,
            rate_std,
        }
    }

    pub fn targets(&self, f: &ItemFeatures) -> AuxTargets {
        AuxTargets {
            pitch: f.pitch_target.map(|p| (p - self.pitch_mean) / self.pitch_std),
            energy: (f.energy_target - self.energy_mean) / self.energy_std,
            rate: (f.rate_target - self.rate_mean) / self.rate_std,
        }
    }

    pub fn unstandardize_pitch(&self, z: f64) -> f64 {
        z * self.pitch_std + self.pitch_mean
    }

    pub fn unstandardize_energy(&self, z: f64) -> f64 {
        z * self.energy_std + self.energy_mean
    }

    pub fn unstandardize_rate(&self, z: f64) -> f64 {
        z * self.rate_std + self.rate_mean
    }
}

/// One metrics-log record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub step: usize,
    pub total: f64,
    pub contrastive: f64,
    pub pitch: f64,
    pub speed: f64,
    pub energy: f64,
}

/// Everything a training run produces.
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub metrics: Vec<MetricsRow>,
    pub initial_dev_loss: f64,
    pub best_dev_loss: f64,
    pub steps_run: usize,
}

/// Loads waveforms and extracts model features for every record.
pub fn prepare_features(
    manifest_path: &Path,
    records: &[UtteranceRecord],
) -> Result<HashMap<String, ItemFeatures>, ModelError> {
    let mut features = HashMap::new();
    for rec in records {
        let path = Manifest::resolve_audio(manifest_path, rec);
        let wave = spam_core::wav::read_wav(&path)?;
        features.insert(rec.item_id.clone(), item_features(&rec.transcript, &wave)?);
    }
    Ok(features)
}

struct Adam {
    m: Vec<Mat<f32>>,
    v: Vec<Mat<f32>>,
    t: usize,
}

impl Adam {
    fn new(model: &Model<f32>) -> Adam {
        Adam {
            m: model
                .params
                .entries()
                .iter()
                .map(|e| Mat::zeros(e.value.rows, e.value.cols))
                .collect(),
            v: model
                .params
                .entries()
                .iter()
                .map(|e| Mat::zeros(e.value.rows, e.value.cols))
                .collect(),
            t: 0,
        }
    }

    /// AdamW step with decoupled weight decay; frozen entries skipped.
    fn step(&mut self, model: &mut Model<f32>, grads: &Grads<f32>, lr: f64, weight_decay: f64) {
        self.t += 1;
        let (b1, b2, eps) = (0.9f64, 0.999f64, 1e-8f64);
        let bc1 = 1.0 - b1.powi(self.t as i32);
        let bc2 = 1.0 - b2.powi(self.t as i32);
        for idx in 0..model.params.len() {
            if model.params.entries()[idx].frozen {
                continue;
            }
            let g = &grads.mats[idx];
            let m = &mut self.m[idx];
            let v = &mut self.v[idx];
            let p = model.params.value_mut(crate::params::ParamId(idx));
            for i in 0..p.data.len() {
                let gi = g.data[i] as f64;
                let mi = b1 * m.data[i] as f64 + (1.0 - b1) * gi;
                let vi = b2 * v.data[i] as f64 + (1.0 - b2) * gi * gi;
                m.data[i] = mi as f32;
                v.data[i] = vi as f32;
                let update = (mi / bc1) / ((vi / bc2).sqrt() + eps);
                let pi = p.data[i] as f64;
                p.data[i] = (pi - lr * (update + weight_decay * pi)) as f32;
            }
        }
    }
}

struct BatchForward {
    a_rows: Mat<f32>,
    b_rows: Mat<f32>,
    p_hat: Mat<f32>,
    v_hat: Mat<f32>,
    e_hat: Mat<f32>,
    keys: Vec<spam_core::StyleKey>,
    targets: Vec<AuxTargets>,
    tapes: Vec<Tape<f32>>,
    outputs: Vec<(crate::tape::Var, crate::tape::Var, crate::tape::Var, crate::tape::Var, crate::tape::Var)>,
}

fn dropout_masks(
    rows: usize,
    cols: usize,
    p: f64,
    seed: u64,
    step: usize,
    slot: usize,
) -> (Mat<f32>, Mat<f32>) {
    if p <= 0.0 {
        return (
            Mat::from_fn(rows, cols, |_, _| 1.0),
            Mat::from_fn(rows, cols, |_, _| 1.0),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed ^ spam_core::stable_hash64(b"dropout")
            ^ (step as u64).wrapping_mul(0x9e3779b97f4a7c15)
            ^ (slot as u64).rotate_left(32),
    );
    let keep = 1.0 / (1.0 - p);
    let mut make = || {
        Mat::from_fn(rows, cols, |_, _| {
            if rng.gen::<f64>() < p {
                0.0
            } else {
                keep as f32
            }
        })
    };
    (make(), make())
}

#[allow(clippy::too_many_arguments)]
fn forward_batch(
    model: &Model<f32>,
    records: &[UtteranceRecord],
    features: &HashMap<String, ItemFeatures>,
    items: &[crate::sampler::SampledItem],
    standardizer: &Standardizer,
    dropout: f64,
    seed: u64,
    step: usize,
) -> Result<BatchForward, ModelError> {
    let n = items.len();
    let h = model.config.h;
    let mut a_rows = Mat::zeros(n, h);
    let mut b_rows = Mat::zeros(n, h);
    let mut p_hat = Mat::zeros(n, 1);
    let mut v_hat = Mat::zeros(n, 1);
    let mut e_hat = Mat::zeros(n, 1);
    let mut keys = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    let mut tapes = Vec::with_capacity(n);
    let mut outputs = Vec::with_capacity(n);

    for (slot, item) in items.iter().enumerate() {
        let rec = &records[item.record_index];
        let feats = features
            .get(&rec.item_id)
            .ok_or_else(|| ModelError::BadBatch {
                reason: format!("missing features for {}", rec.item_id),
            })?;
        let prompt = item.prompt_override.as_deref().unwrap_or(&rec.prompt);

        let mut tape: Tape<f32> = Tape::new();
        let masks = dropout_masks(feats.filterbank.rows, h, dropout, seed, step, slot);
        let speech = model.forward_speech(
            &mut tape,
            &feats.filterbank,
            &feats.phonemes,
            Mode::Train {
                speed_masks: &masks,
            },
        )?;
        let b_var = model.forward_prompt(&mut tape, prompt)?;

        a_rows.row_mut(slot).copy_from_slice(tape.value(speech.a).row(0));
        b_rows.row_mut(slot).copy_from_slice(tape.value(b_var).row(0));
        p_hat.data[slot] = tape.value(speech.aux.p_hat).scalar();
        v_hat.data[slot] = tape.value(speech.aux.v_hat).scalar();
        e_hat.data[slot] = tape.value(speech.aux.e_hat).scalar();
        keys.push(rec.style_key);
        targets.push(standardizer.targets(feats));
        outputs.push((
            speech.a,
            b_var,
            speech.aux.p_hat,
            speech.aux.v_hat,
            speech.aux.e_hat,
        ));
        tapes.push(tape);
    }

    Ok(BatchForward {
        a_rows,
        b_rows,
        p_hat,
        v_hat,
        e_hat,
        keys,
        targets,
        tapes,
        outputs,
    })
}

/// Dev-split contrastive loss in inference mode (no dropout).
fn dev_contrastive_loss(
    model: &Model<f32>,
    dev: &[&UtteranceRecord],
    features: &HashMap<String, ItemFeatures>,
    weights: &LossWeights,
) -> Result<f64, ModelError> {
    let mut a = Vec::with_capacity(dev.len());
    let mut b = Vec::with_capacity(dev.len());
    let mut keys = Vec::with_capacity(dev.len());
    for rec in dev {
        let feats = features
            .get(&rec.item_id)
            .ok_or_else(|| ModelError::BadBatch {
                reason: format!("missing features for {}", rec.item_id),
            })?;
        let mut tape: Tape<f32> = Tape::new();
        let speech =
            model.forward_speech(&mut tape, &feats.filterbank, &feats.phonemes, Mode::Inference)?;
        let b_var = model.forward_prompt(&mut tape, &rec.prompt)?;
        a.push(tape.value(speech.a).row(0).iter().map(|&v| v as f64).collect());
        b.push(tape.value(b_var).row(0).iter().map(|&v| v as f64).collect());
        keys.push(rec.style_key);
    }
    let ab = crate::loss::supcon_directional(&a, &b, &keys, weights.temperature)?;
    let ba = crate::loss::supcon_directional(&b, &a, &keys, weights.temperature)?;
    Ok(0.5 * (ab + ba))
}

/// Trains a fresh model on the manifest's train split, early-stopping
/// on the dev split, and returns the best-dev checkpoint plus the
/// metrics log.
pub fn train(
    records: &[UtteranceRecord],
    features: &HashMap<String, ItemFeatures>,
    vocab: Vec<String>,
    model_config: ModelConfig,
    config: &TrainConfig,
    rerenderer: &dyn PromptRerenderer,
) -> Result<TrainOutcome, ModelError> {
    config.loss.validate()?;
    let train_records: Vec<&UtteranceRecord> =
        records.iter().filter(|r| r.split == Split::Train).collect();
    let dev_records: Vec<&UtteranceRecord> =
        records.iter().filter(|r| r.split == Split::Dev).collect();
    if train_records.is_empty() {
        return Err(ModelError::EmptySplit { split: "train" });
    }
    if dev_records.is_empty() {
        return Err(ModelError::EmptySplit { split: "dev" });
    }
    let train_owned: Vec<UtteranceRecord> = train_records.iter().map(|r| (*r).clone()).collect();

    let standardizer = Standardizer::fit(train_records.iter().map(|r| {
        let f = &features[&r.item_id];
        (f.pitch_target, f.energy_target, f.rate_target)
    }));

    let mut model = Model::<f32>::new(model_config.clone(), vocab);
    let mut adam = Adam::new(&model);
    let mut grads = Grads::zeros_like(&model.params);
    let mut metrics = Vec::with_capacity(config.max_steps);

    let initial_dev_loss = dev_contrastive_loss(&model, &dev_records, features, &config.loss)?;
    let mut best_dev_loss = initial_dev_loss;
    let mut best_params = model.params.clone();
    let mut best_step = 0usize;
    let mut evals_since_best = 0usize;
    let mut steps_run = 0usize;

    for step in 0..config.max_steps {
        let items = sample_batch(
            &train_owned,
            config.batch_size,
            config.seed ^ (step as u64).wrapping_mul(0x2545f4914f6cdd1d),
            rerenderer,
        )?;
        let fwd = forward_batch(
            &model,
            &train_owned,
            features,
            &items,
            &standardizer,
            model.config.dropout,
            config.seed,
            step,
        )?;

        let mut loss_tape: Tape<f32> = Tape::new();
        let graph = batch_loss_graph(
            &mut loss_tape,
            fwd.a_rows,
            fwd.b_rows,
            fwd.p_hat,
            fwd.v_hat,
            fwd.e_hat,
            &fwd.keys,
            &fwd.targets,
            &config.loss,
        )?;
        let row = MetricsRow {
            step,
            total: loss_tape.value(graph.total).scalar() as f64,
            contrastive: loss_tape.value(graph.contrastive).scalar() as f64,
            pitch: loss_tape.value(graph.pitch_term).scalar() as f64,
            speed: loss_tape.value(graph.speed_term).scalar() as f64,
            energy: loss_tape.value(graph.energy_term).scalar() as f64,
        };
        if !row.total.is_finite() {
            return Err(ModelError::Diverged { step });
        }
        metrics.push(row);

        // batch-level backward, then seed each item graph in batch order
        grads.zero();
        let leaf_grads = loss_tape.backward_collect(
            &[(graph.total, Mat::from_vec(1, 1, vec![1.0f32]))],
            &mut grads,
            &[graph.a_leaf, graph.b_leaf, graph.p_leaf, graph.v_leaf, graph.e_leaf],
        );
        let (da, db, dp, dv, de) = (
            &leaf_grads[0],
            &leaf_grads[1],
            &leaf_grads[2],
            &leaf_grads[3],
            &leaf_grads[4],
        );
        for (slot, (tape, vars)) in fwd.tapes.iter().zip(&fwd.outputs).enumerate() {
            let (a_var, b_var, p_var, v_var, e_var) = *vars;
            tape.backward(
                &[
                    (a_var, Mat::from_vec(1, model.config.h, da.row(slot).to_vec())),
                    (b_var, Mat::from_vec(1, model.config.h, db.row(slot).to_vec())),
                    (p_var, Mat::from_vec(1, 1, vec![dp.data[slot]])),
                    (v_var, Mat::from_vec(1, 1, vec![dv.data[slot]])),
                    (e_var, Mat::from_vec(1, 1, vec![de.data[slot]])),
                ],
                &mut grads,
            );
        }

        let norm = grads.global_norm(&model.params);
        if norm > config.grad_clip {
            let scale = (config.grad_clip / norm) as f32;
            for (mat, entry) in grads.mats.iter_mut().zip(model.params.entries()) {
                if entry.frozen {
                    continue;
                }
                for v in &mut mat.data {
                    *v *= scale;
                }
            }
        }

        let lr = config.lr
            * if config.warmup_steps > 0 {
                ((step + 1) as f64 / config.warmup_steps as f64).min(1.0)
            } else {
                1.0
            };
        adam.step(&mut model, &grads, lr, config.weight_decay);
        steps_run = step + 1;

        let last_step = step + 1 == config.max_steps;
        if (step + 1) % config.eval_interval == 0 || last_step {
            let dev_loss = dev_contrastive_loss(&model, &dev_records, features, &config.loss)?;
            if dev_loss < best_dev_loss {
                best_dev_loss = dev_loss;
                best_params = model.params.clone();
                best_step = step + 1;
                evals_since_best = 0;
            } else {
                evals_since_best += 1;
                if evals_since_best >= config.patience {
                    break;
                }
            }
        }
    }

    let checkpoint = Checkpoint {
        model_config,
        vocab: model.vocab.clone(),
        standardizer,
        loss_weights: config.loss,
        train_meta: TrainMeta {
            seed: config.seed,
            steps_run,
            best_step,
            best_dev_loss,
            initial_dev_loss,
        },
        params: best_params
            .entries()
            .iter()
            .map(|e| (e.name.clone(), e.frozen, e.value.clone()))
            .collect(),
    };

    Ok(TrainOutcome {
        checkpoint,
        metrics,
        initial_dev_loss,
        best_dev_loss,
        steps_run,
    })
}
