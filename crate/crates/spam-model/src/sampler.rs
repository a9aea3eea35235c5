//! Multi-positive batch sampling over style keys.
//!
//! Each batch draws batch_size / 2 style keys (with replacement,
//! weighted by how often each key occurs in the corpus) and two records
//! per key, so every anchor is guaranteed an in-batch positive beyond
//! its own pairing. Keys holding a single record fall back to that
//! record twice with a re-rendered prompt for the duplicate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spam_core::{stable_hash64, StyleKey, UtteranceRecord};

use crate::ModelError;

/// Produces a paraphrase of a style key; wired to the prompt renderer
/// by the caller so this crate stays independent of the generator.
pub trait PromptRerenderer {
    fn rerender(&self, key: &StyleKey, seed: u64) -> String;
}

impl<F: Fn(&StyleKey, u64) -> String> PromptRerenderer for F {
    fn rerender(&self, key: &StyleKey, seed: u64) -> String {
        self(key, seed)
    }
}

/// One sampled batch slot: a record index plus an optional prompt
/// override for single-record-key duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledItem {
    pub record_index: usize,
    pub prompt_override: Option<String>,
}

/// Samples one batch of record indices from `records`.
///
/// `batch_size` must be even and at least 4. Deterministic in
/// (records, batch_size, seed).
pub fn sample_batch(
    records: &[UtteranceRecord],
    batch_size: usize,
    seed: u64,
    rerenderer: &dyn PromptRerenderer,
) -> Result<Vec<SampledItem>, ModelError> {
    if batch_size < 4 || batch_size % 2 != 0 {
        return Err(ModelError::BadBatch {
            reason: format!("batch_size must be even and >= 4, got {batch_size}"),
        });
    }
    if records.is_empty() {
        return Err(ModelError::EmptySplit { split: "train" });
    }

    // group record indices by style key, in record order
    let mut groups: Vec<(StyleKey, Vec<usize>)> = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        match groups.iter_mut().find(|(k, _)| *k == rec.style_key) {
            Some((_, v)) => v.push(i),
            None => groups.push((rec.style_key, vec![i])),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stable_hash64(b"batch-sampler"));
    let mut items = Vec::with_capacity(batch_size);
    for _ in 0..batch_size / 2 {
        // frequency-weighted key choice = uniform over records
        let pick = rng.gen_range(0..records.len());
        let key = records[pick].style_key;
        let group = &groups
            .iter()
            .find(|(k, _)| *k == key)
            .expect("picked key exists")
            .1;
        if group.len() >= 2 {
            let first = group[rng.gen_range(0..group.len())];
            let second = loop {
                let candidate = group[rng.gen_range(0..group.len())];
                if candidate != first {
                    break candidate;
                }
            };
            items.push(SampledItem {
                record_index: first,
                prompt_override: None,
            });
            items.push(SampledItem {
                record_index: second,
                prompt_override: None,
            });
        } else {
            // single-record key: duplicate it with a re-rendered prompt
            let only = group[0];
            items.push(SampledItem {
                record_index: only,
                prompt_override: None,
            });
            items.push(SampledItem {
                record_index: only,
                prompt_override: Some(rerenderer.rerender(&key, rng.gen())),
            });
        }
    }
    Ok(items)
}
