//! Network definition: waveform/speaker/transcript encoders, the
//! cross-attention speech encoder, the prompt encoder, and the
//! four-branch fusion module with its auxiliary heads.
//!
//! The waveform, speaker and prompt backbones are small trainable
//! stand-ins sitting behind the same interfaces a full-scale system
//! would use; the speaker projection stage is frozen at initialization.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mat::Mat;
use crate::params::{linear_init, table_init, ParamId, ParamSet};
use crate::real::Real;
use crate::tape::{Tape, Var};
use crate::ModelError;

/// Token id reserved for out-of-vocabulary prompt words.
pub const UNK_TOKEN: usize = 0;

/// Hyperparameters of the scorer network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Shared embedding width.
    pub h: usize,
    /// Attention heads in the cross-attention and prompt layers.
    pub heads: usize,
    /// Transformer layers in the prompt encoder.
    pub prompt_layers: usize,
    /// Feed-forward expansion factor inside prompt layers.
    pub ff_mult: usize,
    /// Mel bands of the waveform features.
    pub mel_bands: usize,
    /// Dropout probability of the speed variance predictor (training only).
    pub dropout: f64,
    /// Seed for parameter initialization.
    pub init_seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            h: 64,
            heads: 4,
            prompt_layers: 2,
            ff_mult: 4,
            mel_bands: crate::features::MEL_BANDS,
            dropout: 0.1,
            init_seed: 1,
        }
    }
}

struct MlpIds {
    w1: ParamId,
    b1: ParamId,
    w2: ParamId,
    b2: ParamId,
}

struct AttnIds {
    wq: ParamId,
    bq: ParamId,
    wk: ParamId,
    bk: ParamId,
    wv: ParamId,
    bv: ParamId,
    wo: ParamId,
    bo: ParamId,
}

struct PromptLayerIds {
    attn: AttnIds,
    ln1_gain: ParamId,
    ln1_bias: ParamId,
    ff_w1: ParamId,
    ff_b1: ParamId,
    ff_w2: ParamId,
    ff_b2: ParamId,
    ln2_gain: ParamId,
    ln2_bias: ParamId,
}

struct SpeedHeadIds {
    conv1_w: ParamId,
    conv1_b: ParamId,
    ln1_gain: ParamId,
    ln1_bias: ParamId,
    conv2_w: ParamId,
    conv2_b: ParamId,
    ln2_gain: ParamId,
    ln2_bias: ParamId,
    out_w: ParamId,
    out_b: ParamId,
}

struct ScalarHeadIds {
    w1: ParamId,
    b1: ParamId,
    out_w: ParamId,
    out_b: ParamId,
}

struct Ids {
    wave: MlpIds,
    spk_proj_w: ParamId,
    spk_proj_b: ParamId,
    spk_adapter: MlpIds,
    transcript_table: ParamId,
    transcript_blank: ParamId,
    fuse: AttnIds,
    fuse_ln_gain: ParamId,
    fuse_ln_bias: ParamId,
    prompt_table: ParamId,
    prompt_layers: Vec<PromptLayerIds>,
    prompt_adapter: MlpIds,
    branches: [MlpIds; 4],
    speed_head: SpeedHeadIds,
    pitch_head: ScalarHeadIds,
    energy_head: ScalarHeadIds,
}

/// The scorer network: parameters plus the prompt tokenizer table.
pub struct Model<T> {
    pub config: ModelConfig,
    pub vocab: Vec<String>,
    token_index: HashMap<String, usize>,
    pub params: ParamSet<T>,
    ids: Ids,
}

/// Branch outputs of the fusion module, all frames x h.
pub struct BranchVars {
    pub global: Var,
    pub speed: Var,
    pub energy: Var,
    pub pitch: Var,
}

/// Frame-level and utterance-level auxiliary predictions.
pub struct AuxVars {
    pub v_frames: Var,
    pub e_frames: Var,
    pub p_frames: Var,
    pub v_hat: Var,
    pub e_hat: Var,
    pub p_hat: Var,
}

/// Cross-attention output plus per-head attention weights (for tests).
pub struct FuseOutput {
    pub a_hat: Var,
    pub attention: Vec<Var>,
}

/// Complete speech-side forward pass.
pub struct SpeechForward {
    pub a: Var,
    pub a_hat: Var,
    pub aux: AuxVars,
}

/// Dropout masks for the speed head, one per conv stage.
pub enum Mode<'a, T> {
    Inference,
    Train { speed_masks: &'a (Mat<T>, Mat<T>) },
}

impl<T: Real> Model<T> {
    /// Builds a model with freshly initialized parameters.
    ///
    /// `vocab` is the prompt word list; unknown words map to a shared
    /// UNK row. The speaker projection is initialized and frozen.
    pub fn new(config: ModelConfig, vocab: Vec<String>) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.init_seed);
        let mut params = ParamSet::new();
        let h = config.h;

        let mlp = |params: &mut ParamSet<T>, rng: &mut ChaCha8Rng, prefix: &str, d_in: usize, d_out: usize| MlpIds {
            w1: params.register(&format!("{prefix}.l1.weight"), linear_init(rng, d_in, d_out), false),
            b1: params.register(&format!("{prefix}.l1.bias"), Mat::zeros(1, d_out), false),
            w2: params.register(&format!("{prefix}.l2.weight"), linear_init(rng, d_out, d_out), false),
            b2: params.register(&format!("{prefix}.l2.bias"), Mat::zeros(1, d_out), false),
        };
        let attn = |params: &mut ParamSet<T>, rng: &mut ChaCha8Rng, prefix: &str| AttnIds {
            wq: params.register(&format!("{prefix}.q.weight"), linear_init(rng, h, h), false),
            bq: params.register(&format!("{prefix}.q.bias"), Mat::zeros(1, h), false),
            wk: params.register(&format!("{prefix}.k.weight"), linear_init(rng, h, h), false),
            bk: params.register(&format!("{prefix}.k.bias"), Mat::zeros(1, h), false),
            wv: params.register(&format!("{prefix}.v.weight"), linear_init(rng, h, h), false),
            bv: params.register(&format!("{prefix}.v.bias"), Mat::zeros(1, h), false),
            wo: params.register(&format!("{prefix}.o.weight"), linear_init(rng, h, h), false),
            bo: params.register(&format!("{prefix}.o.bias"), Mat::zeros(1, h), false),
        };
        let ln = |params: &mut ParamSet<T>, prefix: &str| {
            (
                params.register(&format!("{prefix}.gain"), Mat::from_fn(1, h, |_, _| T::one()), false),
                params.register(&format!("{prefix}.bias"), Mat::zeros(1, h), false),
            )
        };

        let wave = mlp(&mut params, &mut rng, "wave_enc", config.mel_bands, h);

        let spk_proj_w = params.register(
            "spk_enc.proj.weight",
            linear_init(&mut rng, 2 * config.mel_bands, h),
            true,
        );
        let spk_proj_b = params.register("spk_enc.proj.bias", Mat::zeros(1, h), true);
        let spk_adapter = mlp(&mut params, &mut rng, "spk_enc.adapter", h, h);

        let transcript_table = params.register(
            "transcript.table",
            table_init(&mut rng, spam_core::phoneme::PHONEME_VOCAB_SIZE, h, 0.1),
            false,
        );
        let transcript_blank =
            params.register("transcript.blank", table_init(&mut rng, 1, h, 0.1), false);

        let fuse = attn(&mut params, &mut rng, "fuse.attn");
        let (fuse_ln_gain, fuse_ln_bias) = ln(&mut params, "fuse.ln");

        let prompt_table = params.register(
            "prompt.table",
            table_init(&mut rng, vocab.len() + 1, h, 0.1),
            false,
        );
        let mut prompt_layers = Vec::new();
        for layer in 0..config.prompt_layers {
            let prefix = format!("prompt.layer{layer}");
            let attn_ids = attn(&mut params, &mut rng, &format!("{prefix}.attn"));
            let (ln1_gain, ln1_bias) = ln(&mut params, &format!("{prefix}.ln1"));
            let d_ff = h * config.ff_mult;
            let ff_w1 = params.register(
                &format!("{prefix}.ff.l1.weight"),
                linear_init(&mut rng, h, d_ff),
                false,
            );
            let ff_b1 = params.register(&format!("{prefix}.ff.l1.bias"), Mat::zeros(1, d_ff), false);
            let ff_w2 = params.register(
                &format!("{prefix}.ff.l2.weight"),
                linear_init(&mut rng, d_ff, h),
                false,
            );
            let ff_b2 = params.register(&format!("{prefix}.ff.l2.bias"), Mat::zeros(1, h), false);
            let (ln2_gain, ln2_bias) = ln(&mut params, &format!("{prefix}.ln2"));
            prompt_layers.push(PromptLayerIds {
                attn: attn_ids,
                ln1_gain,
                ln1_bias,
                ff_w1,
                ff_b1,
                ff_w2,
                ff_b2,
                ln2_gain,
                ln2_bias,
            });
        }
        let prompt_adapter = mlp(&mut params, &mut rng, "prompt.adapter", h, h);

        let branches = [
            mlp(&mut params, &mut rng, "branch.global", h, h),
            mlp(&mut params, &mut rng, "branch.speed", h, h),
            mlp(&mut params, &mut rng, "branch.energy", h, h),
            mlp(&mut params, &mut rng, "branch.pitch", h, h),
        ];

        let speed_head = {
            let conv1_w = params.register(
                "head.speed.conv1.weight",
                linear_init(&mut rng, 3 * h, h),
                false,
            );
            let conv1_b = params.register("head.speed.conv1.bias", Mat::zeros(1, h), false);
            let (ln1_gain, ln1_bias) = ln(&mut params, "head.speed.ln1");
            let conv2_w = params.register(
                "head.speed.conv2.weight",
                linear_init(&mut rng, 3 * h, h),
                false,
            );
            let conv2_b = params.register("head.speed.conv2.bias", Mat::zeros(1, h), false);
            let (ln2_gain, ln2_bias) = ln(&mut params, "head.speed.ln2");
            let out_w = params.register("head.speed.out.weight", linear_init(&mut rng, h, 1), false);
            let out_b = params.register("head.speed.out.bias", Mat::zeros(1, 1), false);
            SpeedHeadIds {
                conv1_w,
                conv1_b,
                ln1_gain,
                ln1_bias,
                conv2_w,
                conv2_b,
                ln2_gain,
                ln2_bias,
                out_w,
                out_b,
            }
        };
        let scalar_head = |params: &mut ParamSet<T>, rng: &mut ChaCha8Rng, prefix: &str| ScalarHeadIds {
            w1: params.register(&format!("{prefix}.l1.weight"), linear_init(rng, h, h), false),
            b1: params.register(&format!("{prefix}.l1.bias"), Mat::zeros(1, h), false),
            out_w: params.register(&format!("{prefix}.out.weight"), linear_init(rng, h, 1), false),
            out_b: params.register(&format!("{prefix}.out.bias"), Mat::zeros(1, 1), false),
        };
        let pitch_head = scalar_head(&mut params, &mut rng, "head.pitch");
        let energy_head = scalar_head(&mut params, &mut rng, "head.energy");

        let token_index = vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i + 1))
            .collect();

        Model {
            config,
            vocab,
            token_index,
            params,
            ids: Ids {
                wave,
                spk_proj_w,
                spk_proj_b,
                spk_adapter,
                transcript_table,
                transcript_blank,
                fuse,
                fuse_ln_gain,
                fuse_ln_bias,
                prompt_table,
                prompt_layers,
                prompt_adapter,
                branches,
                speed_head,
                pitch_head,
                energy_head,
            },
        }
    }

    /// Copy of this model with all parameters widened to f64, for
    /// finite-difference verification.
    pub fn widen_f64(&self) -> Model<f64> {
        let mut wide = Model::<f64>::new(self.config.clone(), self.vocab.clone());
        for (i, entry) in self.params.entries().iter().enumerate() {
            *wide.params.value_mut(ParamId(i)) = entry.value.to_f64();
        }
        wide
    }

    /// Word-level tokenization against the stored vocabulary; unknown
    /// words map to the UNK id.
    pub fn tokenize(&self, prompt: &str) -> Vec<usize> {
        prompt
            .split_whitespace()
            .map(|w| self.token_index.get(w).copied().unwrap_or(UNK_TOKEN))
            .collect()
    }

    fn mlp_seq(&self, tape: &mut Tape<T>, ids: &MlpIds, x: Var) -> Var {
        let w1 = tape.param(&self.params, ids.w1);
        let h1 = tape.matmul(x, w1);
        let b1 = tape.param(&self.params, ids.b1);
        let h1 = tape.add_row(h1, b1);
        let h1 = tape.tanh(h1);
        let w2 = tape.param(&self.params, ids.w2);
        let h2 = tape.matmul(h1, w2);
        let b2 = tape.param(&self.params, ids.b2);
        tape.add_row(h2, b2)
    }

    /// Frame-level waveform embedding w_t: filterbank -> 2-layer MLP.
    pub fn encode_waveform(&self, tape: &mut Tape<T>, filterbank: &Mat<T>) -> Var {
        let x = tape.input(filterbank.clone());
        self.mlp_seq(tape, &self.ids.wave, x)
    }

    /// Utterance-level speaker embedding: statistics pooling, a frozen
    /// projection, then a trainable adapter.
    pub fn encode_speaker(&self, tape: &mut Tape<T>, filterbank: &Mat<T>) -> Var {
        let x = tape.input(filterbank.clone());
        let mean = tape.mean_rows(x);
        let sq = tape.mul_elem(x, x);
        let mean_sq = tape.mean_rows(sq);
        let mean_mean = tape.mul_elem(mean, mean);
        let var = tape.sub(mean_sq, mean_mean);
        let sd = tape.sqrt_eps(var, 1e-8);
        let stats = tape.concat_cols(&[mean, sd]);
        let proj_w = tape.param(&self.params, self.ids.spk_proj_w);
        let proj = tape.matmul(stats, proj_w);
        let proj_b = tape.param(&self.params, self.ids.spk_proj_b);
        let proj = tape.add_row(proj, proj_b);
        let proj = tape.tanh(proj);
        self.mlp_seq(tape, &self.ids.spk_adapter, proj)
    }

    /// Phoneme lookup c_s; an empty transcript yields the learned blank
    /// row so downstream attention always has at least one key.
    pub fn embed_transcript(&self, tape: &mut Tape<T>, phonemes: &[usize]) -> Var {
        if phonemes.is_empty() {
            return tape.param(&self.params, self.ids.transcript_blank);
        }
        let table = tape.param(&self.params, self.ids.transcript_table);
        tape.gather_rows(table, phonemes)
    }

    fn multi_head_attention(
        &self,
        tape: &mut Tape<T>,
        ids: &AttnIds,
        queries_in: Var,
        keys_in: Var,
    ) -> (Var, Vec<Var>) {
        let h = self.config.h;
        let heads = self.config.heads;
        let dk = h / heads;

        let wq = tape.param(&self.params, ids.wq);
        let q = tape.matmul(queries_in, wq);
        let bq = tape.param(&self.params, ids.bq);
        let q = tape.add_row(q, bq);
        let wk = tape.param(&self.params, ids.wk);
        let k = tape.matmul(keys_in, wk);
        let bk = tape.param(&self.params, ids.bk);
        let k = tape.add_row(k, bk);
        let wv = tape.param(&self.params, ids.wv);
        let v = tape.matmul(keys_in, wv);
        let bv = tape.param(&self.params, ids.bv);
        let v = tape.add_row(v, bv);

        let scale = T::from_f64c(1.0 / (dk as f64).sqrt());
        let mut contexts = Vec::with_capacity(heads);
        let mut attentions = Vec::with_capacity(heads);
        for head in 0..heads {
            let qh = tape.slice_cols(q, head * dk, dk);
            let kh = tape.slice_cols(k, head * dk, dk);
            let vh = tape.slice_cols(v, head * dk, dk);
            let scores = tape.matmul_nt(qh, kh);
            let scores = tape.scale(scores, scale);
            let weights = tape.softmax_rows(scores);
            attentions.push(weights);
            contexts.push(tape.matmul(weights, vh));
        }
        let ctx = tape.concat_cols(&contexts);
        let wo = tape.param(&self.params, ids.wo);
        let out = tape.matmul(ctx, wo);
        let bo = tape.param(&self.params, ids.bo);
        (tape.add_row(out, bo), attentions)
    }

    /// Cross-attention fusion: queries w_t + s, keys/values c_s, one
    /// residual multi-head layer with layer norm; returns a_hat frames.
    pub fn fuse_speech(
        &self,
        tape: &mut Tape<T>,
        w: Var,
        s: Var,
        c: Var,
    ) -> Result<FuseOutput, ModelError> {
        let (wc, sc) = (tape.value(w).cols, tape.value(s).cols);
        let cc = tape.value(c).cols;
        if wc != sc || wc != cc {
            return Err(ModelError::WidthMismatch {
                left: wc,
                right: if wc != sc { sc } else { cc },
            });
        }
        let queries = tape.add_row(w, s);
        let (attn_out, attention) = self.multi_head_attention(tape, &self.ids.fuse, queries, c);
        let resid = tape.add(queries, attn_out);
        let gain = tape.param(&self.params, self.ids.fuse_ln_gain);
        let bias = tape.param(&self.params, self.ids.fuse_ln_bias);
        let a_hat = tape.layer_norm(resid, gain, bias, 1e-5);
        Ok(FuseOutput { a_hat, attention })
    }

    /// Prompt embedding b: token embeddings + sinusoidal positions,
    /// transformer layers, mean pooling, adapter, L2 normalization.
    pub fn encode_prompt(&self, tape: &mut Tape<T>, tokens: &[usize]) -> Result<Var, ModelError> {
        if tokens.is_empty() {
            return Err(ModelError::EmptyPrompt);
        }
        let table = tape.param(&self.params, self.ids.prompt_table);
        let emb = tape.gather_rows(table, tokens);
        let pos = tape.input(sinusoidal_positions(tokens.len(), self.config.h));
        let mut x = tape.add(emb, pos);

        for layer in &self.ids.prompt_layers {
            let (attn_out, _) = self.multi_head_attention(tape, &layer.attn, x, x);
            let resid = tape.add(x, attn_out);
            let g1 = tape.param(&self.params, layer.ln1_gain);
            let b1 = tape.param(&self.params, layer.ln1_bias);
            x = tape.layer_norm(resid, g1, b1, 1e-5);

            let w1 = tape.param(&self.params, layer.ff_w1);
            let ff = tape.matmul(x, w1);
            let fb1 = tape.param(&self.params, layer.ff_b1);
            let ff = tape.add_row(ff, fb1);
            let ff = tape.tanh(ff);
            let w2 = tape.param(&self.params, layer.ff_w2);
            let ff = tape.matmul(ff, w2);
            let fb2 = tape.param(&self.params, layer.ff_b2);
            let ff = tape.add_row(ff, fb2);
            let resid = tape.add(x, ff);
            let g2 = tape.param(&self.params, layer.ln2_gain);
            let b2 = tape.param(&self.params, layer.ln2_bias);
            x = tape.layer_norm(resid, g2, b2, 1e-5);
        }

        let pooled = tape.mean_rows(x);
        let adapted = self.mlp_seq(tape, &self.ids.prompt_adapter, pooled);
        Ok(tape.l2_normalize_rows(adapted))
    }

    /// The four parallel per-frame branches over a_hat.
    pub fn run_branches(&self, tape: &mut Tape<T>, a_hat: Var) -> BranchVars {
        BranchVars {
            global: self.mlp_seq(tape, &self.ids.branches[0], a_hat),
            speed: self.mlp_seq(tape, &self.ids.branches[1], a_hat),
            energy: self.mlp_seq(tape, &self.ids.branches[2], a_hat),
            pitch: self.mlp_seq(tape, &self.ids.branches[3], a_hat),
        }
    }

    /// Auxiliary heads: the convolutional variance predictor on the
    /// speed branch, MLP heads on energy and pitch. Utterance scalars
    /// are means over frames.
    pub fn predict_aux(&self, tape: &mut Tape<T>, branches: &BranchVars, mode: Mode<'_, T>) -> AuxVars {
        let sh = &self.ids.speed_head;
        let w1 = tape.param(&self.params, sh.conv1_w);
        let b1 = tape.param(&self.params, sh.conv1_b);
        let c1 = tape.conv1d_k3(branches.speed, w1, b1);
        let c1 = tape.tanh(c1);
        let g1 = tape.param(&self.params, sh.ln1_gain);
        let lb1 = tape.param(&self.params, sh.ln1_bias);
        let mut c1 = tape.layer_norm(c1, g1, lb1, 1e-5);
        if let Mode::Train { speed_masks } = &mode {
            c1 = tape.mul_const(c1, speed_masks.0.clone());
        }
        let w2 = tape.param(&self.params, sh.conv2_w);
        let b2 = tape.param(&self.params, sh.conv2_b);
        let c2 = tape.conv1d_k3(c1, w2, b2);
        let c2 = tape.tanh(c2);
        let g2 = tape.param(&self.params, sh.ln2_gain);
        let lb2 = tape.param(&self.params, sh.ln2_bias);
        let mut c2 = tape.layer_norm(c2, g2, lb2, 1e-5);
        if let Mode::Train { speed_masks } = &mode {
            c2 = tape.mul_const(c2, speed_masks.1.clone());
        }
        let ow = tape.param(&self.params, sh.out_w);
        let v_frames = tape.matmul(c2, ow);
        let ob = tape.param(&self.params, sh.out_b);
        let v_frames = tape.add_row(v_frames, ob);

        let scalar_head = |tape: &mut Tape<T>, ids: &ScalarHeadIds, x: Var| {
            let w1 = tape.param(&self.params, ids.w1);
            let h1 = tape.matmul(x, w1);
            let b1 = tape.param(&self.params, ids.b1);
            let h1 = tape.add_row(h1, b1);
            let h1 = tape.tanh(h1);
            let ow = tape.param(&self.params, ids.out_w);
            let out = tape.matmul(h1, ow);
            let ob = tape.param(&self.params, ids.out_b);
            tape.add_row(out, ob)
        };
        let e_frames = scalar_head(tape, &self.ids.energy_head, branches.energy);
        let p_frames = scalar_head(tape, &self.ids.pitch_head, branches.pitch);

        AuxVars {
            v_hat: tape.mean_all(v_frames),
            e_hat: tape.mean_all(e_frames),
            p_hat: tape.mean_all(p_frames),
            v_frames,
            e_frames,
            p_frames,
        }
    }

    /// Per-frame sum of the four branches, mean over frames, L2
    /// normalization: the final speech embedding a.
    pub fn pool(&self, tape: &mut Tape<T>, branches: &BranchVars) -> Var {
        let gs = tape.add(branches.global, branches.speed);
        let ep = tape.add(branches.energy, branches.pitch);
        let sum = tape.add(gs, ep);
        let pooled = tape.mean_rows(sum);
        tape.l2_normalize_rows(pooled)
    }

    /// Full speech-side forward pass for one utterance.
    pub fn forward_speech(
        &self,
        tape: &mut Tape<T>,
        filterbank: &Mat<T>,
        phonemes: &[usize],
        mode: Mode<'_, T>,
    ) -> Result<SpeechForward, ModelError> {
        let w = self.encode_waveform(tape, filterbank);
        let s = self.encode_speaker(tape, filterbank);
        let c = self.embed_transcript(tape, phonemes);
        let fused = self.fuse_speech(tape, w, s, c)?;
        let branches = self.run_branches(tape, fused.a_hat);
        let aux = self.predict_aux(tape, &branches, mode);
        let a = self.pool(tape, &branches);
        Ok(SpeechForward {
            a,
            a_hat: fused.a_hat,
            aux,
        })
    }

    /// Prompt-side forward pass from raw text.
    pub fn forward_prompt(&self, tape: &mut Tape<T>, prompt: &str) -> Result<Var, ModelError> {
        let tokens = self.tokenize(prompt);
        self.encode_prompt(tape, &tokens)
    }
}

/// Standard fixed sinusoidal position encodings, length x h.
pub fn sinusoidal_positions<T: Real>(len: usize, h: usize) -> Mat<T> {
    Mat::from_fn(len, h, |pos, j| {
        let i = (j / 2) as f64;
        let angle = pos as f64 / 10_000f64.powf(2.0 * i / h as f64);
        T::from_f64c(if j % 2 == 0 { angle.sin() } else { angle.cos() })
    })
}
