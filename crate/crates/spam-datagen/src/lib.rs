//! Synthetic styled-speech corpus generation.
//!
//! Stands in for real prompt-based TTS corpora at desk scale: harmonic
//! tone "speech" whose pitch, speed, energy and spectral tilt realize a
//! style key, templated natural-language prompts describing that key,
//! and the positive/negative prompt variants the faithfulness protocol
//! scores.

pub mod corpus;
pub mod prompts;
pub mod sentences;
pub mod spec;
pub mod synth;
pub mod variants;

pub use corpus::{generate_corpus, split_of};
pub use prompts::{parse_prompt, prompt_vocabulary, render_prompt, render_prompt_with, TEMPLATES};
pub use sentences::SENTENCES;
pub use spec::{AmplitudeRanges, GenerationSpec, Interval, PitchRanges, RateRanges};
pub use synth::{sampled_controls, synthesize_utterance, Controls};
pub use variants::{
    flipped_attributes, make_variants, read_variants, write_variants, Attribute, VariantSet,
    VARIANTS_PER_SIDE,
};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("invalid generation spec: {reason}")]
    BadSpec { reason: String },

    #[error("transcript is empty")]
    EmptyTranscript,

    #[error("prompt mentions no {attribute} level: {prompt:?}")]
    UnparsablePrompt {
        attribute: &'static str,
        prompt: String,
    },

    #[error("prompt mentions multiple {attribute} levels: {prompt:?}")]
    AmbiguousPrompt {
        attribute: &'static str,
        prompt: String,
    },

    #[error("record {item_id}: prompt does not parse to the record's style key")]
    PromptKeyMismatch { item_id: String },

    #[error("record {item_id}: could not draw enough distinct prompt variants")]
    VariantExhaustion { item_id: String },

    #[error("variants file line {line}: {reason}")]
    MalformedVariants { line: usize, reason: String },

    #[error(transparent)]
    Core(#[from] spam_core::CoreError),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
