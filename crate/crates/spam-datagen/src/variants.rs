//! Positive and negative prompt variants for the faithfulness protocol.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spam_core::{
    stable_hash64, EnergyLevel, Gender, PitchLevel, SpeedLevel, StyleKey, UtteranceRecord,
};

use crate::prompts::{parse_prompt, render_prompt};
use crate::DatagenError;

/// Number of positive and of negative prompts per item.
pub const VARIANTS_PER_SIDE: usize = 10;

/// The four style attributes, used to describe which ones a negative
/// prompt flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Gender,
    Pitch,
    Speed,
    Energy,
}

impl Attribute {
    pub const ALL: [Attribute; 4] = [
        Attribute::Gender,
        Attribute::Pitch,
        Attribute::Speed,
        Attribute::Energy,
    ];
}

/// One item's original prompt with its paraphrases and negated variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSet {
    pub item_id: String,
    pub original_prompt: String,
    pub positive_prompts: Vec<String>,
    pub negative_prompts: Vec<String>,
}

/// Attributes on which `negative` differs from `original`.
pub fn flipped_attributes(
    original: &StyleKey,
    negative_prompt: &str,
) -> Result<Vec<Attribute>, DatagenError> {
    let key = parse_prompt(negative_prompt)?;
    let mut flipped = Vec::new();
    if key.gender != original.gender {
        flipped.push(Attribute::Gender);
    }
    if key.pitch != original.pitch {
        flipped.push(Attribute::Pitch);
    }
    if key.speed != original.speed {
        flipped.push(Attribute::Speed);
    }
    if key.energy != original.energy {
        flipped.push(Attribute::Energy);
    }
    Ok(flipped)
}

fn flip_attribute(key: &mut StyleKey, attr: Attribute, rng: &mut ChaCha8Rng) {
    match attr {
        Attribute::Gender => {
            key.gender = match key.gender {
                Gender::Male => Gender::Female,
                Gender::Female => Gender::Male,
            };
        }
        Attribute::Pitch => {
            let others: Vec<PitchLevel> = PitchLevel::ALL
                .into_iter()
                .filter(|l| *l != key.pitch)
                .collect();
            key.pitch = others[rng.gen_range(0..others.len())];
        }
        Attribute::Speed => {
            let others: Vec<SpeedLevel> = SpeedLevel::ALL
                .into_iter()
                .filter(|l| *l != key.speed)
                .collect();
            key.speed = others[rng.gen_range(0..others.len())];
        }
        Attribute::Energy => {
            let others: Vec<EnergyLevel> = EnergyLevel::ALL
                .into_iter()
                .filter(|l| *l != key.energy)
                .collect();
            key.energy = others[rng.gen_range(0..others.len())];
        }
    }
}

/// All 1- and 2-element attribute subsets, the flip targets negatives
/// draw from uniformly.
fn attribute_subsets() -> Vec<Vec<Attribute>> {
    let mut subsets: Vec<Vec<Attribute>> =
        Attribute::ALL.iter().map(|&a| vec![a]).collect();
    for i in 0..4 {
        for j in (i + 1)..4 {
            subsets.push(vec![Attribute::ALL[i], Attribute::ALL[j]]);
        }
    }
    subsets
}

/// Builds the 10 positive paraphrases and 10 negative variants for one
/// record.
///
/// Positives re-render the record's own style key and are pairwise
/// distinct and different from the original text. Negatives flip 1 or 2
/// attributes: the flip count is uniform on {1, 2} and the attribute
/// subset uniform over subsets of that size.
pub fn make_variants(record: &UtteranceRecord, seed: u64) -> Result<VariantSet, DatagenError> {
    let parsed = parse_prompt(&record.prompt)?;
    if parsed != record.style_key {
        return Err(DatagenError::PromptKeyMismatch {
            item_id: record.item_id.clone(),
        });
    }

    let mut bytes = [0u8; 32];
    bytes[0..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&stable_hash64(record.item_id.as_bytes()).to_le_bytes());
    bytes[16..24].copy_from_slice(&stable_hash64(b"variants").to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(bytes);

    let mut positive_prompts: Vec<String> = Vec::with_capacity(VARIANTS_PER_SIDE);
    let mut guard = 0;
    while positive_prompts.len() < VARIANTS_PER_SIDE {
        let candidate = render_prompt(&record.style_key, rng.gen());
        if candidate != record.prompt && !positive_prompts.contains(&candidate) {
            positive_prompts.push(candidate);
        }
        guard += 1;
        if guard > 10_000 {
            return Err(DatagenError::VariantExhaustion {
                item_id: record.item_id.clone(),
            });
        }
    }

    let subsets = attribute_subsets();
    let mut negative_prompts: Vec<String> = Vec::with_capacity(VARIANTS_PER_SIDE);
    let mut guard = 0;
    while negative_prompts.len() < VARIANTS_PER_SIDE {
        // flip count uniform on {1, 2}, then subset uniform of that size
        let n_flips = rng.gen_range(1..=2usize);
        let of_size: Vec<&Vec<Attribute>> =
            subsets.iter().filter(|s| s.len() == n_flips).collect();
        let subset = of_size[rng.gen_range(0..of_size.len())];
        let mut key = record.style_key;
        for &attr in subset {
            flip_attribute(&mut key, attr, &mut rng);
        }
        let candidate = render_prompt(&key, rng.gen());
        if !negative_prompts.contains(&candidate) {
            negative_prompts.push(candidate);
        }
        guard += 1;
        if guard > 10_000 {
            return Err(DatagenError::VariantExhaustion {
                item_id: record.item_id.clone(),
            });
        }
    }

    Ok(VariantSet {
        item_id: record.item_id.clone(),
        original_prompt: record.prompt.clone(),
        positive_prompts,
        negative_prompts,
    })
}

/// Writes variant sets line-delimited.
pub fn write_variants(sets: &[VariantSet], path: &Path) -> Result<(), DatagenError> {
    let mut out = String::new();
    for set in sets {
        out.push_str(&serde_json::to_string(set).expect("variant set serializes"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| DatagenError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Reads a line-delimited variants file.
pub fn read_variants(path: &Path) -> Result<Vec<VariantSet>, DatagenError> {
    let text = std::fs::read_to_string(path).map_err(|e| DatagenError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut sets = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let set: VariantSet =
            serde_json::from_str(line).map_err(|e| DatagenError::MalformedVariants {
                line: lineno + 1,
                reason: e.to_string(),
            })?;
        if set.positive_prompts.len() != VARIANTS_PER_SIDE
            || set.negative_prompts.len() != VARIANTS_PER_SIDE
        {
            return Err(DatagenError::MalformedVariants {
                line: lineno + 1,
                reason: format!(
                    "expected {VARIANTS_PER_SIDE} positives and negatives, got {} and {}",
                    set.positive_prompts.len(),
                    set.negative_prompts.len()
                ),
            });
        }
        sets.push(set);
    }
    Ok(sets)
}
