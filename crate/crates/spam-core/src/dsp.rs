//! Frame-level acoustic feature extraction.
//!
//! All frame-based quantities share one convention: 25 ms windows
//! (400 samples at 16 kHz) with a 10 ms hop (160 samples). Pitch comes
//! from normalized autocorrelation with parabolic peak refinement,
//! energy is floored log RMS, and speaking rate is phonemes per second.
//! Every extractor is a pure function: identical inputs give
//! bit-identical outputs.

use crate::phoneme::phonemize;
use crate::types::Waveform;
use crate::CoreError;

/// Samples per analysis window (25 ms at 16 kHz).
pub const FRAME_LEN: usize = 400;
/// Samples per hop (10 ms at 16 kHz).
pub const FRAME_HOP: usize = 160;

/// Lowest trackable fundamental, Hz.
pub const PITCH_FLOOR_HZ: f64 = 50.0;
/// Highest trackable fundamental, Hz.
pub const PITCH_CEIL_HZ: f64 = 600.0;
/// Normalized-autocorrelation peak value required to call a frame voiced.
pub const VOICING_THRESHOLD: f64 = 0.5;
/// RMS floor applied before the energy log.
pub const ENERGY_FLOOR: f64 = 1e-5;

/// Per-frame supervision targets extracted from one utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeatures {
    /// log F0 per frame; exactly 0.0 where the frame is unvoiced.
    pub pitch_log_hz: Vec<f64>,
    pub voicing_mask: Vec<bool>,
    /// log(max(RMS, 1e-5)) per frame.
    pub energy_log_rms: Vec<f64>,
    pub frame_count: usize,
    /// Utterance-level phonemes per second, broadcast as the per-frame
    /// speed target.
    pub speaking_rate_pps: f64,
}

impl FrameFeatures {
    /// Mean log F0 over voiced frames; `None` when nothing is voiced.
    pub fn mean_voiced_pitch_log(&self) -> Option<f64> {
        let voiced: Vec<f64> = self
            .pitch_log_hz
            .iter()
            .zip(&self.voicing_mask)
            .filter(|(_, &v)| v)
            .map(|(&p, _)| p)
            .collect();
        if voiced.is_empty() {
            None
        } else {
            Some(voiced.iter().sum::<f64>() / voiced.len() as f64)
        }
    }

    /// Mean log RMS over all frames.
    pub fn mean_energy_log(&self) -> f64 {
        self.energy_log_rms.iter().sum::<f64>() / self.energy_log_rms.len() as f64
    }

    /// Mean log RMS over voiced frames only; `None` when nothing is voiced.
    pub fn mean_voiced_energy_log(&self) -> Option<f64> {
        let voiced: Vec<f64> = self
            .energy_log_rms
            .iter()
            .zip(&self.voicing_mask)
            .filter(|(_, &v)| v)
            .map(|(&e, _)| e)
            .collect();
        if voiced.is_empty() {
            None
        } else {
            Some(voiced.iter().sum::<f64>() / voiced.len() as f64)
        }
    }
}

/// Number of frames the 25 ms / 10 ms convention yields for `len` samples.
pub fn frame_count(len: usize) -> usize {
    if len < FRAME_LEN {
        1
    } else {
        (len - FRAME_LEN) / FRAME_HOP + 1
    }
}

/// Slices a waveform into 400-sample frames with a 160-sample hop.
///
/// A waveform shorter than one window yields a single right-zero-padded
/// frame.
pub fn frame(waveform: &Waveform) -> Vec<Vec<f64>> {
    let samples = waveform.samples();
    let count = frame_count(samples.len());
    let mut frames = Vec::with_capacity(count);
    for f in 0..count {
        let start = f * FRAME_HOP;
        let mut buf = vec![0.0f64; FRAME_LEN];
        for (i, slot) in buf.iter_mut().enumerate() {
            if let Some(&s) = samples.get(start + i) {
                *slot = s as f64;
            }
        }
        frames.push(buf);
    }
    frames
}

/// Per-frame F0 via normalized autocorrelation.
///
/// Lags range over [sr/600, sr/50] samples. A frame is voiced iff its
/// peak normalized autocorrelation reaches 0.5; voiced frames carry
/// log(F0) with the peak lag refined by parabolic interpolation,
/// unvoiced frames carry 0. The frame mean is removed before
/// correlation, and the correlation is normalized, so the result is
/// invariant to amplitude scaling.
pub fn extract_pitch(waveform: &Waveform) -> (Vec<f64>, Vec<bool>) {
    let sr = waveform.sample_rate_hz() as f64;
    let lag_min = (sr / PITCH_CEIL_HZ).ceil() as usize;
    let lag_max = (sr / PITCH_FLOOR_HZ).floor() as usize;

    let frames = frame(waveform);
    let mut pitch = Vec::with_capacity(frames.len());
    let mut voicing = Vec::with_capacity(frames.len());

    for frame in &frames {
        match frame_f0(frame, lag_min, lag_max, sr) {
            Some(f0) => {
                let f0 = f0.clamp(PITCH_FLOOR_HZ, PITCH_CEIL_HZ);
                pitch.push(f0.ln());
                voicing.push(true);
            }
            None => {
                pitch.push(0.0);
                voicing.push(false);
            }
        }
    }
    (pitch, voicing)
}

fn frame_f0(frame: &[f64], lag_min: usize, lag_max: usize, sr: f64) -> Option<f64> {
    let n = frame.len();
    let mean = frame.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = frame.iter().map(|&s| s - mean).collect();

    // prefix sums of squares for the lag-dependent normalization terms
    let mut sq_prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        sq_prefix[i + 1] = sq_prefix[i] + x[i] * x[i];
    }

    let lag_max = lag_max.min(n - 1);
    if lag_min > lag_max {
        return None;
    }

    let mut r = vec![0.0f64; lag_max + 1];
    for (lag, r_slot) in r.iter_mut().enumerate().take(lag_max + 1).skip(lag_min) {
        let overlap = n - lag;
        let mut num = 0.0f64;
        for i in 0..overlap {
            num += x[i] * x[i + lag];
        }
        let e_head = sq_prefix[overlap];
        let e_tail = sq_prefix[n] - sq_prefix[lag];
        let denom = (e_head * e_tail).sqrt();
        *r_slot = if denom > 1e-12 { num / denom } else { 0.0 };
    }

    let r_max = r[lag_min..=lag_max]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if r_max < VOICING_THRESHOLD {
        return None;
    }

    // Smallest local maximum close to the global peak; guards against
    // picking a period multiple.
    let mut best_lag = None;
    for lag in lag_min..=lag_max {
        let left = if lag > lag_min { r[lag - 1] } else { f64::NEG_INFINITY };
        let right = if lag < lag_max { r[lag + 1] } else { f64::NEG_INFINITY };
        if r[lag] >= left && r[lag] >= right && r[lag] >= 0.95 * r_max {
            best_lag = Some(lag);
            break;
        }
    }
    let lag = best_lag?;

    let refined = if lag > lag_min && lag < lag_max {
        let (a, b, c) = (r[lag - 1], r[lag], r[lag + 1]);
        let denom = a - 2.0 * b + c;
        if denom.abs() > 1e-12 {
            let delta = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
            lag as f64 + delta
        } else {
            lag as f64
        }
    } else {
        lag as f64
    };

    Some(sr / refined)
}

/// Per-frame log RMS, floored at log(1e-5).
pub fn extract_energy(waveform: &Waveform) -> Vec<f64> {
    frame(waveform)
        .iter()
        .map(|frame| {
            let ms = frame.iter().map(|&s| s * s).sum::<f64>() / frame.len() as f64;
            ms.sqrt().max(ENERGY_FLOOR).ln()
        })
        .collect()
}

/// Utterance-level phonemes per second.
pub fn speaking_rate(transcript: &str, waveform: &Waveform) -> Result<f64, CoreError> {
    if transcript.is_empty() {
        return Err(CoreError::EmptyTranscript);
    }
    let phonemes = phonemize(transcript)?;
    Ok(phonemes.len() as f64 / waveform.duration_seconds())
}

/// Runs all extractors for one utterance and bundles the targets.
pub fn extract_features(transcript: &str, waveform: &Waveform) -> Result<FrameFeatures, CoreError> {
    let (pitch_log_hz, voicing_mask) = extract_pitch(waveform);
    let energy_log_rms = extract_energy(waveform);
    let speaking_rate_pps = speaking_rate(transcript, waveform)?;
    let frame_count = pitch_log_hz.len();
    debug_assert_eq!(energy_log_rms.len(), frame_count);
    Ok(FrameFeatures {
        pitch_log_hz,
        voicing_mask,
        energy_log_rms,
        frame_count,
        speaking_rate_pps,
    })
}
