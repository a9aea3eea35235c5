//! Shared domain types and signal-level feature extraction.
//!
//! This crate holds everything the rest of the workspace agrees on:
//! the style-key vocabulary, utterance records and manifests, PCM-16 WAV
//! reading/writing, and the deterministic acoustic feature extractors
//! (framing, pitch, energy, grapheme-to-phoneme, speaking rate) that
//! supervise the scorer's auxiliary heads.

pub mod dsp;
pub mod manifest;
pub mod phoneme;
pub mod types;
pub mod wav;

pub use manifest::{read_manifest, write_manifest, Manifest, MANIFEST_VERSION};
pub use phoneme::{phonemize, PhonemeSequence, PHONEME_NAMES, PHONEME_VOCAB_SIZE, SIL};
pub use types::{
    style_key_equal, EnergyLevel, Gender, PitchLevel, SpeedLevel, Split, StyleKey,
    UtteranceRecord, Waveform, SAMPLE_RATE_HZ,
};

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by domain types, manifest I/O and feature extraction.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("sample rate must be 16000 Hz, got {got}")]
    BadSampleRate { got: u32 },

    #[error("waveform has no samples")]
    EmptyWaveform,

    #[error("waveform sample out of [-1, 1] or not finite")]
    SampleOutOfRange,

    #[error("invalid record {item_id}: {reason}")]
    InvalidRecord { item_id: String, reason: String },

    #[error("malformed manifest line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("duplicate item_id {item_id:?} in manifest")]
    DuplicateItemId { item_id: String },

    #[error("unsupported manifest version {got:?}, expected {expected:?}")]
    UnsupportedVersion { got: String, expected: String },

    #[error("audio resource {path} for item {item_id:?} not found")]
    MissingAudio { item_id: String, path: PathBuf },

    #[error("unmappable character {ch:?} at position {position}")]
    UnmappableCharacter { ch: char, position: usize },

    #[error("transcript is empty")]
    EmptyTranscript,

    #[error("{path}: not a 16 kHz mono PCM-16 WAV file ({reason})")]
    BadWav { path: PathBuf, reason: String },

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Stable 64-bit FNV-1a hash.
///
/// Used wherever a seed or split decision must be reproducible across
/// runs and toolchain versions, unlike `std`'s unspecified default hasher.
pub fn stable_hash64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
