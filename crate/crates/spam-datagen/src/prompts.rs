//! Style prompt rendering and the keyword parser used as a test oracle.
//!
//! Prompts verbalize a style key through one of six sentence templates
//! and three synonym phrases per attribute level. Synonym phrases are
//! word sequences chosen so that, with word-boundary matching, a prompt
//! mentions exactly one level per attribute; `parse_prompt` recovers the
//! style key from any rendered prompt. The parser is an internal oracle
//! for corpus generation and tests, not part of the scorer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spam_core::{stable_hash64, EnergyLevel, Gender, PitchLevel, SpeedLevel, StyleKey};

use crate::DatagenError;

/// Sentence templates; slots are filled with attribute synonym phrases.
pub const TEMPLATES: [&str; 6] = [
    "a {g} voice with a {p} pitch a {s} pace and a {e} sound",
    "the speaker is {g} the pitch is {p} the tempo is {s} and the volume is {e}",
    "this recording features a {g} speaker whose delivery is {p} {s} and {e}",
    "{g} speech that sounds {p} moves at a {s} rate and feels {e}",
    "you hear a {g} voice that is {p} in tone {s} in pace and {e} in presence",
    "a {g} speaker talking in a {p} register at a {s} speed with a {e} level of loudness",
];

pub const GENDER_SYNONYMS: [(Gender, [&str; 3]); 2] = [
    (Gender::Male, ["male", "masculine", "manly"]),
    (Gender::Female, ["female", "feminine", "womanly"]),
];

pub const PITCH_SYNONYMS: [(PitchLevel, [&str; 3]); 3] = [
    (PitchLevel::Low, ["deep", "bass heavy", "rumbling"]),
    (
        PitchLevel::Normal,
        ["mid toned", "medium pitched", "natural pitched"],
    ),
    (PitchLevel::High, ["high pitched", "shrill", "piercing"]),
];

pub const SPEED_SYNONYMS: [(SpeedLevel, [&str; 3]); 3] = [
    (SpeedLevel::Slow, ["slow", "unhurried", "leisurely"]),
    (SpeedLevel::Normal, ["steady", "measured", "moderate"]),
    (SpeedLevel::Fast, ["fast", "rapid", "hurried"]),
];

pub const ENERGY_SYNONYMS: [(EnergyLevel, [&str; 3]); 3] = [
    (EnergyLevel::Low, ["soft", "quiet", "hushed"]),
    (EnergyLevel::Normal, ["balanced", "middling", "temperate"]),
    (EnergyLevel::High, ["booming", "thunderous", "forceful"]),
];

fn gender_phrase(level: Gender, idx: usize) -> &'static str {
    GENDER_SYNONYMS
        .iter()
        .find(|(l, _)| *l == level)
        .map(|(_, syns)| syns[idx])
        .expect("known level")
}

fn pitch_phrase(level: PitchLevel, idx: usize) -> &'static str {
    PITCH_SYNONYMS
        .iter()
        .find(|(l, _)| *l == level)
        .map(|(_, syns)| syns[idx])
        .expect("known level")
}

fn speed_phrase(level: SpeedLevel, idx: usize) -> &'static str {
    SPEED_SYNONYMS
        .iter()
        .find(|(l, _)| *l == level)
        .map(|(_, syns)| syns[idx])
        .expect("known level")
}

fn energy_phrase(level: EnergyLevel, idx: usize) -> &'static str {
    ENERGY_SYNONYMS
        .iter()
        .find(|(l, _)| *l == level)
        .map(|(_, syns)| syns[idx])
        .expect("known level")
}

/// Renders `key` with an explicit template/synonym selection.
pub fn render_prompt_with(
    key: &StyleKey,
    template_idx: usize,
    synonym_idx: [usize; 4],
) -> String {
    TEMPLATES[template_idx % TEMPLATES.len()]
        .replacen("{g}", gender_phrase(key.gender, synonym_idx[0] % 3), 1)
        .replacen("{p}", pitch_phrase(key.pitch, synonym_idx[1] % 3), 1)
        .replacen("{s}", speed_phrase(key.speed, synonym_idx[2] % 3), 1)
        .replacen("{e}", energy_phrase(key.energy, synonym_idx[3] % 3), 1)
}

/// Renders a natural-language description of `key`; the seed picks the
/// template and synonyms. `parse_prompt(render_prompt(k, s)) == k` for
/// every key and seed.
pub fn render_prompt(key: &StyleKey, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stable_hash64(b"render-prompt"));
    let template_idx = rng.gen_range(0..TEMPLATES.len());
    let synonym_idx = [
        rng.gen_range(0..3),
        rng.gen_range(0..3),
        rng.gen_range(0..3),
        rng.gen_range(0..3),
    ];
    render_prompt_with(key, template_idx, synonym_idx)
}

/// Finds which level of one attribute a prompt mentions.
///
/// Matches synonym phrases on word boundaries, longest phrase first.
/// Exactly one level must match.
fn find_level<L: Copy + PartialEq + std::fmt::Debug>(
    padded: &str,
    table: &[(L, [&'static str; 3])],
    attribute: &'static str,
) -> Result<L, DatagenError> {
    let mut candidates: Vec<(L, &str)> = table
        .iter()
        .flat_map(|(level, syns)| syns.iter().map(move |&s| (*level, s)))
        .collect();
    candidates.sort_by_key(|(_, s)| std::cmp::Reverse(s.len()));

    let mut found: Option<L> = None;
    for (level, syn) in candidates {
        if padded.contains(&format!(" {syn} ")) {
            match found {
                None => found = Some(level),
                Some(prev) if prev == level => {}
                Some(_) => {
                    return Err(DatagenError::AmbiguousPrompt {
                        attribute,
                        prompt: padded.trim().to_string(),
                    })
                }
            }
        }
    }
    found.ok_or_else(|| DatagenError::UnparsablePrompt {
        attribute,
        prompt: padded.trim().to_string(),
    })
}

/// Recovers the style key a rendered prompt describes.
pub fn parse_prompt(prompt: &str) -> Result<StyleKey, DatagenError> {
    let padded = format!(" {prompt} ");
    Ok(StyleKey {
        gender: find_level(&padded, &GENDER_SYNONYMS, "gender")?,
        pitch: find_level(&padded, &PITCH_SYNONYMS, "pitch")?,
        speed: find_level(&padded, &SPEED_SYNONYMS, "speed")?,
        energy: find_level(&padded, &ENERGY_SYNONYMS, "energy")?,
    })
}

/// Every word that can appear in a rendered prompt, deduplicated and
/// sorted. The prompt encoder builds its token vocabulary from this.
pub fn prompt_vocabulary() -> Vec<String> {
    let mut words: Vec<String> = Vec::new();
    for template in TEMPLATES {
        for word in template.split_whitespace() {
            if !word.starts_with('{') {
                words.push(word.to_string());
            }
        }
    }
    let all_syns = GENDER_SYNONYMS
        .iter()
        .flat_map(|(_, s)| s.iter())
        .chain(PITCH_SYNONYMS.iter().flat_map(|(_, s)| s.iter()))
        .chain(SPEED_SYNONYMS.iter().flat_map(|(_, s)| s.iter()))
        .chain(ENERGY_SYNONYMS.iter().flat_map(|(_, s)| s.iter()));
    for syn in all_syns {
        for word in syn.split_whitespace() {
            words.push(word.to_string());
        }
    }
    words.sort();
    words.dedup();
    words
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_synonyms() -> Vec<&'static str> {
        GENDER_SYNONYMS
            .iter()
            .flat_map(|(_, s)| s.iter().copied())
            .chain(PITCH_SYNONYMS.iter().flat_map(|(_, s)| s.iter().copied()))
            .chain(SPEED_SYNONYMS.iter().flat_map(|(_, s)| s.iter().copied()))
            .chain(ENERGY_SYNONYMS.iter().flat_map(|(_, s)| s.iter().copied()))
            .collect()
    }

    /// No synonym phrase may appear, word-aligned, inside a template's
    /// literal text or inside a synonym of a different attribute;
    /// otherwise parsing would be ambiguous.
    #[test]
    fn synonyms_never_collide_with_templates_or_other_attributes() {
        let literal_text: String = TEMPLATES
            .iter()
            .map(|t| {
                t.split_whitespace()
                    .filter(|w| !w.starts_with('{'))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(" ");
        let padded_literals = format!(" {literal_text} ");
        for syn in all_synonyms() {
            assert!(
                !padded_literals.contains(&format!(" {syn} ")),
                "synonym {syn:?} appears in template literals"
            );
        }

        let tables: [Vec<&str>; 4] = [
            GENDER_SYNONYMS.iter().flat_map(|(_, s)| s.iter().copied()).collect(),
            PITCH_SYNONYMS.iter().flat_map(|(_, s)| s.iter().copied()).collect(),
            SPEED_SYNONYMS.iter().flat_map(|(_, s)| s.iter().copied()).collect(),
            ENERGY_SYNONYMS.iter().flat_map(|(_, s)| s.iter().copied()).collect(),
        ];
        for (i, a) in tables.iter().enumerate() {
            for (j, b) in tables.iter().enumerate() {
                if i == j {
                    continue;
                }
                for syn_a in a {
                    for syn_b in b {
                        let padded = format!(" {syn_b} ");
                        assert!(
                            !padded.contains(&format!(" {syn_a} ")),
                            "{syn_a:?} hides inside {syn_b:?}"
                        );
                    }
                }
            }
        }
    }

    /// Exhaustive round trip: every key, every template, every synonym
    /// combination parses back to the same key.
    #[test]
    fn parse_inverts_render_for_all_surface_forms() {
        for key in StyleKey::all() {
            for t in 0..TEMPLATES.len() {
                for g in 0..3 {
                    for p in 0..3 {
                        for s in 0..3 {
                            for e in 0..3 {
                                let prompt = render_prompt_with(&key, t, [g, p, s, e]);
                                let parsed = parse_prompt(&prompt).unwrap_or_else(|err| {
                                    panic!("cannot parse {prompt:?}: {err}")
                                });
                                assert_eq!(parsed, key, "prompt {prompt:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn all_54_keys_render_to_distinct_parsed_keys() {
        let mut seen = std::collections::HashSet::new();
        for key in StyleKey::all() {
            let parsed = parse_prompt(&render_prompt(&key, 123)).unwrap();
            assert!(seen.insert(parsed.index()));
        }
        assert_eq!(seen.len(), 54);
    }

    #[test]
    fn different_seeds_paraphrase_same_key() {
        let key = StyleKey::new(
            Gender::Male,
            PitchLevel::High,
            SpeedLevel::Normal,
            EnergyLevel::Normal,
        );
        let a = render_prompt(&key, 1);
        let b = render_prompt(&key, 2);
        assert_ne!(a, b);
        assert_eq!(parse_prompt(&a).unwrap(), key);
        assert_eq!(parse_prompt(&b).unwrap(), key);
    }

    #[test]
    fn example_key_mentions_male_and_high_pitch_synonyms() {
        let key = StyleKey::new(
            Gender::Male,
            PitchLevel::High,
            SpeedLevel::Normal,
            EnergyLevel::Normal,
        );
        let prompt = format!(" {} ", render_prompt(&key, 9));
        let has_male = ["male", "masculine", "manly"]
            .iter()
            .any(|s| prompt.contains(&format!(" {s} ")));
        let has_high = ["high pitched", "shrill", "piercing"]
            .iter()
            .any(|s| prompt.contains(&format!(" {s} ")));
        assert!(has_male && has_high, "prompt {prompt:?}");
    }

    #[test]
    fn prompts_stay_in_the_toy_alphabet() {
        for key in StyleKey::all() {
            for seed in 0..5 {
                let prompt = render_prompt(&key, seed);
                assert!(prompt
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c == ' ' || c.is_ascii_digit()));
            }
        }
    }

    #[test]
    fn vocabulary_is_nonempty_sorted_and_unique() {
        let vocab = prompt_vocabulary();
        assert!(vocab.len() > 40);
        let mut sorted = vocab.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(vocab, sorted);
    }

    #[test]
    fn unparsable_prompt_is_an_error() {
        assert!(parse_prompt("nothing to see here").is_err());
    }
}
