//! End-to-end corpus generation: styled audio, manifests and splits.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spam_core::phoneme::phonemize;
use spam_core::wav::write_wav;
use spam_core::{
    stable_hash64, write_manifest, Manifest, Split, StyleKey, UtteranceRecord,
};

use crate::prompts::render_prompt;
use crate::sentences::SENTENCES;
use crate::spec::GenerationSpec;
use crate::synth::{sampled_controls, synthesize_utterance};
use crate::DatagenError;

/// Splitmix64; stretches (seed, index) into independent item seeds.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn item_seed(corpus_seed: u64, index: usize) -> u64 {
    splitmix64(corpus_seed ^ splitmix64(index as u64))
}

/// 80/10/10 split by stable hash of the item id.
pub fn split_of(item_id: &str) -> Split {
    match stable_hash64(item_id.as_bytes()) % 10 {
        0..=7 => Split::Train,
        8 => Split::Dev,
        _ => Split::Test,
    }
}

/// Generates `spec.n_items` styled utterances under `out_dir`.
///
/// Layout: `out_dir/audio/u####.wav` plus `out_dir/manifest.jsonl`.
/// Style keys are sampled uniformly over all 54; the transcript is
/// drawn from the fixed sentence pool, restricted to lengths that land
/// the utterance duration inside the spec's window at the sampled
/// speaking rate. Fully deterministic in (spec, seed): item randomness
/// derives from (seed, item index) only.
pub fn generate_corpus(spec: &GenerationSpec, out_dir: &Path) -> Result<Manifest, DatagenError> {
    spec.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| DatagenError::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;

    let keys = StyleKey::all();
    let sentence_lengths: Vec<usize> = SENTENCES
        .iter()
        .map(|s| phonemize(s).expect("fixed sentences phonemize").len())
        .collect();

    let mut records = Vec::with_capacity(spec.n_items);
    if spec.n_items > 0 {
        let audio_dir = out_dir.join("audio");
        std::fs::create_dir_all(&audio_dir).map_err(|e| DatagenError::Io {
            path: audio_dir.clone(),
            source: e,
        })?;

        for index in 0..spec.n_items {
            let item_id = format!("u{index:04}");
            let seed = item_seed(spec.seed, index);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stable_hash64(b"item"));

            let key = keys[rng.gen_range(0..keys.len())];
            let controls = sampled_controls(&key, seed, spec);

            // transcripts whose phoneme count keeps the duration in range
            let min_ph = (controls.rate_pps * spec.duration_range_s.lo).ceil() as usize;
            let max_ph = (controls.rate_pps * spec.duration_range_s.hi).floor() as usize;
            let eligible: Vec<usize> = sentence_lengths
                .iter()
                .enumerate()
                .filter(|(_, &len)| len >= min_ph && len <= max_ph)
                .map(|(i, _)| i)
                .collect();
            if eligible.is_empty() {
                return Err(DatagenError::BadSpec {
                    reason: format!(
                        "no sentence with {min_ph}..={max_ph} phonemes for rate {:.2}",
                        controls.rate_pps
                    ),
                });
            }
            let transcript = SENTENCES[eligible[rng.gen_range(0..eligible.len())]];

            let prompt = render_prompt(&key, seed ^ stable_hash64(b"prompt"));
            let waveform = synthesize_utterance(&key, transcript, seed, spec)?;

            let audio_rel = format!("audio/{item_id}.wav");
            write_wav(&out_dir.join(&audio_rel), &waveform)?;

            records.push(UtteranceRecord {
                split: split_of(&item_id),
                item_id,
                audio_path: audio_rel,
                transcript: transcript.to_string(),
                prompt,
                style_key: key,
            });
        }
    }

    let manifest = Manifest::new(records);
    write_manifest(&manifest, &out_dir.join("manifest.jsonl"))?;
    Ok(manifest)
}
