//! Input features for the toy waveform backbone: a 40-band log-mel
//! filterbank over the shared 25 ms / 10 ms framing.
//!
//! The FFT is a fixed 512-point radix-2 implementation so the feature
//! values are bit-identical everywhere, independent of any runtime
//! kernel dispatch.

use spam_core::dsp::{frame, FrameFeatures};
use spam_core::Waveform;

use crate::mat::Mat;

/// Number of mel bands the waveform backbone consumes.
pub const MEL_BANDS: usize = 40;
const FFT_SIZE: usize = 512;
const LOG_FLOOR: f64 = 1e-10;

/// In-place iterative radix-2 FFT (decimation in time).
fn fft_512(re: &mut [f64; FFT_SIZE], im: &mut [f64; FFT_SIZE]) {
    // bit reversal
    let bits = FFT_SIZE.trailing_zeros();
    for i in 0..FFT_SIZE {
        let j = (i.reverse_bits() >> (usize::BITS - bits)) as usize;
        if j > i {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= FFT_SIZE {
        let ang = -std::f64::consts::TAU / len as f64;
        let (wr, wi) = (ang.cos(), ang.sin());
        let mut start = 0;
        while start < FFT_SIZE {
            let (mut cr, mut ci) = (1.0f64, 0.0f64);
            for k in 0..len / 2 {
                let a = start + k;
                let b = a + len / 2;
                let tr = re[b] * cr - im[b] * ci;
                let ti = re[b] * ci + im[b] * cr;
                re[b] = re[a] - tr;
                im[b] = im[a] - ti;
                re[a] += tr;
                im[a] += ti;
                let ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
            start += len;
        }
        len <<= 1;
    }
}

fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular mel filters as (bin index, weight) lists.
fn mel_filters(sample_rate: f64) -> Vec<Vec<(usize, f64)>> {
    let n_bins = FFT_SIZE / 2 + 1;
    let f_max = sample_rate / 2.0;
    let mel_points: Vec<f64> = (0..MEL_BANDS + 2)
        .map(|i| mel_to_hz(hz_to_mel(f_max) * i as f64 / (MEL_BANDS + 1) as f64))
        .collect();
    let bin_of = |hz: f64| hz / sample_rate * FFT_SIZE as f64;
    (0..MEL_BANDS)
        .map(|m| {
            let (lo, mid, hi) = (
                bin_of(mel_points[m]),
                bin_of(mel_points[m + 1]),
                bin_of(mel_points[m + 2]),
            );
            let mut taps = Vec::new();
            for bin in lo.ceil() as usize..=(hi.floor() as usize).min(n_bins - 1) {
                let b = bin as f64;
                let w = if b <= mid {
                    (b - lo) / (mid - lo)
                } else {
                    (hi - b) / (hi - mid)
                };
                if w > 0.0 {
                    taps.push((bin, w));
                }
            }
            taps
        })
        .collect()
}

/// Per-frame 40-band log-mel features, frames x bands.
pub fn log_mel_filterbank(waveform: &Waveform) -> Mat<f32> {
    let sr = waveform.sample_rate_hz() as f64;
    let filters = mel_filters(sr);
    let frames = frame(waveform);
    let hann: Vec<f64> = (0..400)
        .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / 400.0).cos())
        .collect();

    let mut out = Mat::zeros(frames.len(), MEL_BANDS);
    for (fi, fr) in frames.iter().enumerate() {
        let mut re = [0.0f64; FFT_SIZE];
        let mut im = [0.0f64; FFT_SIZE];
        for (i, (&s, &w)) in fr.iter().zip(&hann).enumerate() {
            re[i] = s * w;
        }
        fft_512(&mut re, &mut im);
        let row = out.row_mut(fi);
        for (m, taps) in filters.iter().enumerate() {
            let mut acc = 0.0;
            for &(bin, w) in taps {
                acc += w * (re[bin] * re[bin] + im[bin] * im[bin]);
            }
            row[m] = (acc + LOG_FLOOR).ln() as f32;
        }
    }
    out
}

/// Everything the model needs for one utterance, computed once.
#[derive(Debug, Clone)]
pub struct ItemFeatures {
    pub filterbank: Mat<f32>,
    pub phonemes: Vec<usize>,
    /// Mean log F0 over voiced frames; absent for all-unvoiced audio.
    pub pitch_target: Option<f64>,
    /// Mean log RMS over all frames.
    pub energy_target: f64,
    pub rate_target: f64,
}

/// Extracts model inputs and auxiliary targets for one utterance.
pub fn item_features(
    transcript: &str,
    waveform: &Waveform,
) -> Result<ItemFeatures, spam_core::CoreError> {
    let feats: FrameFeatures = spam_core::dsp::extract_features(transcript, waveform)?;
    let phonemes = spam_core::phoneme::phonemize(transcript)?.phonemes;
    Ok(ItemFeatures {
        filterbank: log_mel_filterbank(waveform),
        phonemes,
        pitch_target: feats.mean_voiced_pitch_log(),
        energy_target: feats.mean_energy_log(),
        rate_target: feats.speaking_rate_pps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spam_core::SAMPLE_RATE_HZ;

    fn sine(freq: f64, amp: f64, secs: f64) -> Waveform {
        let n = (secs * SAMPLE_RATE_HZ as f64) as usize;
        Waveform::new(
            (0..n)
                .map(|i| {
                    (amp * (std::f64::consts::TAU * freq * i as f64 / SAMPLE_RATE_HZ as f64).sin())
                        as f32
                })
                .collect(),
            SAMPLE_RATE_HZ,
        )
        .unwrap()
    }

    #[test]
    fn fft_matches_naive_dft_on_a_tone() {
        let mut re = [0.0f64; FFT_SIZE];
        let mut im = [0.0f64; FFT_SIZE];
        for (i, slot) in re.iter_mut().enumerate() {
            *slot = (std::f64::consts::TAU * 16.0 * i as f64 / FFT_SIZE as f64).sin();
        }
        let orig = re;
        fft_512(&mut re, &mut im);
        for k in [0usize, 5, 16, 100, 255] {
            let (mut dr, mut di) = (0.0, 0.0);
            for (n, &x) in orig.iter().enumerate() {
                let ang = -std::f64::consts::TAU * k as f64 * n as f64 / FFT_SIZE as f64;
                dr += x * ang.cos();
                di += x * ang.sin();
            }
            assert!(
                (re[k] - dr).abs() < 1e-8 && (im[k] - di).abs() < 1e-8,
                "bin {k}: ({}, {}) vs naive ({dr}, {di})",
                re[k],
                im[k]
            );
        }
    }

    #[test]
    fn filterbank_shape_follows_frame_count() {
        let fb = log_mel_filterbank(&sine(220.0, 0.5, 1.0));
        assert_eq!(fb.rows, 98);
        assert_eq!(fb.cols, MEL_BANDS);
        assert!(fb.data.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn tone_frequency_moves_the_peak_band() {
        let peak_band = |freq: f64| {
            let fb = log_mel_filterbank(&sine(freq, 0.5, 0.5));
            let row = fb.row(10);
            row.iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0
        };
        assert!(peak_band(150.0) < peak_band(1000.0));
        assert!(peak_band(1000.0) < peak_band(4000.0));
    }

    #[test]
    fn filterbank_is_deterministic() {
        let w = sine(330.0, 0.4, 0.3);
        assert_eq!(log_mel_filterbank(&w).data, log_mel_filterbank(&w).data);
    }

    #[test]
    fn item_features_bundle_targets() {
        let w = sine(200.0, 0.4, 1.0);
        let f = item_features("some words here", &w).unwrap();
        assert_eq!(f.filterbank.rows, 98);
        assert!(f.pitch_target.is_some());
        assert!((f.pitch_target.unwrap() - 200f64.ln()).abs() < 0.05);
        assert!(f.rate_target > 0.0);
        assert!(!f.phonemes.is_empty());
    }
}
