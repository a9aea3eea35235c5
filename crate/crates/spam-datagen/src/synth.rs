//! Harmonic-tone utterance synthesis.
//!
//! Each phoneme becomes one fixed-length segment: silence for the SIL
//! symbol, otherwise a harmonic complex at the utterance's base F0 with
//! a small per-segment jitter. Gender sets the spectral tilt (female
//! harmonics fall 12 dB per octave, male 18), the energy level sets the
//! segment RMS, and the speed level sets the segment duration. Samples
//! are quantized to PCM-16 before returning, so the in-memory waveform
//! equals its on-disk decode bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spam_core::phoneme::{phonemize, SIL};
use spam_core::wav::{dequantize_i16, quantize_i16};
use spam_core::{stable_hash64, Gender, StyleKey, Waveform, SAMPLE_RATE_HZ};

use crate::spec::GenerationSpec;
use crate::DatagenError;

/// Relative margin kept between sampled controls and their declared
/// interval so that jitter and extraction error never escape it.
const F0_MARGIN: f64 = 0.05;
const AMP_MARGIN: f64 = 0.08;
/// Per-segment F0 jitter bound.
const JITTER: f64 = 0.03;
/// Raised-cosine ramp at tone/silence boundaries, in samples.
const RAMP: usize = 32;

/// The per-utterance control values sampled from a generation spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controls {
    pub rate_pps: f64,
    pub base_f0_hz: f64,
    pub amplitude: f64,
}

fn control_rng(key: &StyleKey, seed: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[0..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&stable_hash64(b"synth").to_le_bytes());
    bytes[16..24].copy_from_slice(&(key.index() as u64).to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

fn sample_controls(key: &StyleKey, spec: &GenerationSpec, rng: &mut ChaCha8Rng) -> Controls {
    let rate_iv = spec.rate_ranges_pps.get(key.speed);
    let rate_pps = rng.gen_range(rate_iv.lo..rate_iv.hi);

    let f0_iv = spec.f0_range(key.gender, key.pitch);
    let margin = f0_iv.width() * F0_MARGIN + 1.0;
    let base_f0_hz = rng.gen_range((f0_iv.lo + margin)..(f0_iv.hi - margin));

    let amp_iv = spec.amplitude_ranges.get(key.energy);
    let margin = amp_iv.width() * AMP_MARGIN;
    let amplitude = rng.gen_range((amp_iv.lo + margin)..(amp_iv.hi - margin));

    Controls {
        rate_pps,
        base_f0_hz,
        amplitude,
    }
}

/// The controls `synthesize_utterance` would sample for these arguments.
/// The corpus generator uses this to pick a transcript whose length fits
/// the duration window at the sampled rate.
pub fn sampled_controls(key: &StyleKey, seed: u64, spec: &GenerationSpec) -> Controls {
    sample_controls(key, spec, &mut control_rng(key, seed))
}

/// Renders one utterance as a waveform.
///
/// Deterministic in (key, transcript, seed, spec). Segment F0 jitters
/// by up to 3% around the base but stays strictly inside the declared
/// F0 interval; voiced segments are scaled so their RMS is
/// amplitude / sqrt(2), the RMS a pure sine of that amplitude has.
pub fn synthesize_utterance(
    key: &StyleKey,
    transcript: &str,
    seed: u64,
    spec: &GenerationSpec,
) -> Result<Waveform, DatagenError> {
    if transcript.is_empty() {
        return Err(DatagenError::EmptyTranscript);
    }
    let phonemes = phonemize(transcript)?;

    let mut rng = control_rng(key, seed);
    let controls = sample_controls(key, spec, &mut rng);

    let sr = SAMPLE_RATE_HZ as f64;
    let seg_len = (sr / controls.rate_pps).round() as usize;
    let f0_iv = spec.f0_range(key.gender, key.pitch);

    let mut samples: Vec<f64> = Vec::with_capacity(seg_len * phonemes.len());
    let mut phase = 0.0f64;
    let voiced_flags: Vec<bool> = phonemes.phonemes.iter().map(|&p| p != SIL).collect();

    for (seg_idx, &voiced) in voiced_flags.iter().enumerate() {
        if !voiced {
            samples.extend(std::iter::repeat(0.0).take(seg_len));
            continue;
        }
        let jitter = rng.gen_range(-JITTER..JITTER);
        let f0 = (controls.base_f0_hz * (1.0 + jitter)).clamp(f0_iv.lo * 1.01, f0_iv.hi * 0.99);

        // harmonic amplitudes with gender tilt: female 1/k^2, male 1/k^3
        let n_harmonics = ((6000.0 / f0).floor() as usize).clamp(1, 8);
        let tilt_power = match key.gender {
            Gender::Female => 2,
            Gender::Male => 3,
        };
        let amps: Vec<f64> = (1..=n_harmonics)
            .map(|k| 1.0 / (k as f64).powi(tilt_power))
            .collect();
        // scale so segment RMS equals amplitude / sqrt(2)
        let norm = controls.amplitude / amps.iter().map(|a| a * a).sum::<f64>().sqrt();

        let ramp_in = seg_idx == 0 || !voiced_flags[seg_idx - 1];
        let ramp_out = seg_idx + 1 == voiced_flags.len() || !voiced_flags[seg_idx + 1];
        let omega = std::f64::consts::TAU * f0 / sr;

        for i in 0..seg_len {
            phase += omega;
            let mut v = 0.0;
            for (k, &a) in amps.iter().enumerate() {
                v += a * ((k + 1) as f64 * phase).sin();
            }
            let mut v = v * norm;
            if ramp_in && i < RAMP {
                let x = i as f64 / RAMP as f64;
                v *= 0.5 - 0.5 * (std::f64::consts::PI * x).cos();
            }
            if ramp_out && i + RAMP >= seg_len {
                let x = (seg_len - i) as f64 / RAMP as f64;
                v *= 0.5 - 0.5 * (std::f64::consts::PI * x.min(1.0)).cos();
            }
            samples.push(v);
        }
        phase %= std::f64::consts::TAU;
    }

    debug_assert!(
        samples.iter().all(|s| s.abs() < 0.99),
        "synthesis must not clip"
    );
    let quantized: Vec<f32> = samples
        .iter()
        .map(|&s| dequantize_i16(quantize_i16(s as f32)))
        .collect();
    Ok(Waveform::new(quantized, SAMPLE_RATE_HZ)?)
}
