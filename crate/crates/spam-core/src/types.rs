//! Core domain types: style keys, utterance records and waveforms.

use serde::{Deserialize, Serialize};

use crate::CoreError;

/// Speaker gender attribute of a style key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Male,
    Female,
}

/// Pitch level attribute of a style key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PitchLevel {
    Low,
    Normal,
    High,
}

/// Speaking-rate level attribute of a style key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedLevel {
    Slow,
    Normal,
    Fast,
}

/// Loudness level attribute of a style key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyLevel {
    Low,
    Normal,
    High,
}

impl Gender {
    pub const ALL: [Gender; 2] = [Gender::Male, Gender::Female];
}

impl PitchLevel {
    pub const ALL: [PitchLevel; 3] = [PitchLevel::Low, PitchLevel::Normal, PitchLevel::High];
}

impl SpeedLevel {
    pub const ALL: [SpeedLevel; 3] = [SpeedLevel::Slow, SpeedLevel::Normal, SpeedLevel::Fast];
}

impl EnergyLevel {
    pub const ALL: [EnergyLevel; 3] = [EnergyLevel::Low, EnergyLevel::Normal, EnergyLevel::High];
}

/// Discrete acoustic attribute tuple labelling an utterance.
///
/// Two utterance/prompt pairs are positives for contrastive training iff
/// their style keys are equal field-wise. The vocabulary is the full product
/// of the four attributes, 2 * 3 * 3 * 3 = 54 keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StyleKey {
    pub gender: Gender,
    pub pitch: PitchLevel,
    pub speed: SpeedLevel,
    pub energy: EnergyLevel,
}

impl StyleKey {
    pub fn new(gender: Gender, pitch: PitchLevel, speed: SpeedLevel, energy: EnergyLevel) -> Self {
        StyleKey {
            gender,
            pitch,
            speed,
            energy,
        }
    }

    /// Enumerates all 54 style keys in a fixed order.
    pub fn all() -> Vec<StyleKey> {
        let mut keys = Vec::with_capacity(54);
        for &gender in &Gender::ALL {
            for &pitch in &PitchLevel::ALL {
                for &speed in &SpeedLevel::ALL {
                    for &energy in &EnergyLevel::ALL {
                        keys.push(StyleKey::new(gender, pitch, speed, energy));
                    }
                }
            }
        }
        keys
    }

    /// Index of this key in the `all()` ordering.
    pub fn index(&self) -> usize {
        let g = match self.gender {
            Gender::Male => 0,
            Gender::Female => 1,
        };
        let p = match self.pitch {
            PitchLevel::Low => 0,
            PitchLevel::Normal => 1,
            PitchLevel::High => 2,
        };
        let s = match self.speed {
            SpeedLevel::Slow => 0,
            SpeedLevel::Normal => 1,
            SpeedLevel::Fast => 2,
        };
        let e = match self.energy {
            EnergyLevel::Low => 0,
            EnergyLevel::Normal => 1,
            EnergyLevel::High => 2,
        };
        ((g * 3 + p) * 3 + s) * 3 + e
    }
}

/// Field-wise style key equality; this is the positive-pair relation.
pub fn style_key_equal(a: &StyleKey, b: &StyleKey) -> bool {
    a == b
}

/// Dataset split assignment of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

/// One audio/transcript/prompt/style-key item of a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceRecord {
    pub item_id: String,
    /// Path to a RIFF/PCM-16 mono waveform, relative to the manifest file.
    pub audio_path: String,
    pub transcript: String,
    pub prompt: String,
    pub style_key: StyleKey,
    pub split: Split,
}

impl UtteranceRecord {
    /// Checks the per-record invariants (non-empty id/transcript/prompt).
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.item_id.is_empty() {
            return Err(CoreError::InvalidRecord {
                item_id: "<empty>".into(),
                reason: "item_id is empty".into(),
            });
        }
        if self.transcript.is_empty() {
            return Err(CoreError::InvalidRecord {
                item_id: self.item_id.clone(),
                reason: "transcript is empty".into(),
            });
        }
        if self.prompt.is_empty() {
            return Err(CoreError::InvalidRecord {
                item_id: self.item_id.clone(),
                reason: "prompt is empty".into(),
            });
        }
        Ok(())
    }
}

/// Sample rate every waveform in the system uses.
pub const SAMPLE_RATE_HZ: u32 = 16_000;

/// A mono waveform at the fixed 16 kHz sample rate, samples in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f32>,
    sample_rate_hz: u32,
}

impl Waveform {
    /// Wraps samples, checking the sample-rate and range invariants.
    pub fn new(samples: Vec<f32>, sample_rate_hz: u32) -> Result<Self, CoreError> {
        if sample_rate_hz != SAMPLE_RATE_HZ {
            return Err(CoreError::BadSampleRate {
                got: sample_rate_hz,
            });
        }
        if samples.is_empty() {
            return Err(CoreError::EmptyWaveform);
        }
        if samples.iter().any(|s| !s.is_finite() || s.abs() > 1.0) {
            return Err(CoreError::SampleOutOfRange);
        }
        Ok(Waveform {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }
}
