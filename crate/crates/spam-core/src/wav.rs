//! Reading and writing 16 kHz mono PCM-16 RIFF files.
//!
//! Only the canonical fmt/data layout is supported; compressed or
//! multi-channel audio is rejected.

use std::fs;
use std::path::Path;

use crate::types::{Waveform, SAMPLE_RATE_HZ};
use crate::CoreError;

fn io_err(path: &Path, source: std::io::Error) -> CoreError {
    CoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn bad(path: &Path, reason: &str) -> CoreError {
    CoreError::BadWav {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

fn u16_at(b: &[u8], off: usize) -> u16 {
    u16::from_le_bytes([b[off], b[off + 1]])
}

fn u32_at(b: &[u8], off: usize) -> u32 {
    u32::from_le_bytes([b[off], b[off + 1], b[off + 2], b[off + 3]])
}

/// Decodes a PCM-16 mono 16 kHz WAV file into a waveform.
pub fn read_wav(path: &Path) -> Result<Waveform, CoreError> {
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(bad(path, "missing RIFF/WAVE header"));
    }

    let mut sample_rate = 0u32;
    let mut channels = 0u16;
    let mut bits = 0u16;
    let mut format = 0u16;
    let mut data: Option<&[u8]> = None;

    let mut off = 12;
    while off + 8 <= bytes.len() {
        let id = &bytes[off..off + 4];
        let size = u32_at(&bytes, off + 4) as usize;
        let body_start = off + 8;
        let body_end = body_start.checked_add(size).ok_or_else(|| bad(path, "chunk size overflow"))?;
        if body_end > bytes.len() {
            return Err(bad(path, "truncated chunk"));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(bad(path, "fmt chunk too small"));
                }
                format = u16_at(&bytes, body_start);
                channels = u16_at(&bytes, body_start + 2);
                sample_rate = u32_at(&bytes, body_start + 4);
                bits = u16_at(&bytes, body_start + 14);
            }
            b"data" => data = Some(&bytes[body_start..body_end]),
            _ => {}
        }
        // chunks are word-aligned
        off = body_end + (size & 1);
    }

    if format != 1 || bits != 16 {
        return Err(bad(path, "not PCM-16"));
    }
    if channels != 1 {
        return Err(bad(path, "not mono"));
    }
    if sample_rate != SAMPLE_RATE_HZ {
        return Err(bad(path, "sample rate is not 16000 Hz"));
    }
    let data = data.ok_or_else(|| bad(path, "missing data chunk"))?;
    if data.len() % 2 != 0 {
        return Err(bad(path, "odd data chunk length"));
    }

    let samples: Vec<f32> = data
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]) as f32 / 32768.0)
        .collect();
    Waveform::new(samples, sample_rate)
}

/// Encodes a waveform as a canonical 44-byte-header PCM-16 mono WAV file.
///
/// Samples are rounded to the nearest 16-bit value; writing then reading
/// reproduces the quantized samples bit-exactly.
pub fn write_wav(path: &Path, waveform: &Waveform) -> Result<(), CoreError> {
    let n = waveform.len();
    let data_len = (n * 2) as u32;
    let mut out = Vec::with_capacity(44 + n * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&SAMPLE_RATE_HZ.to_le_bytes());
    out.extend_from_slice(&(SAMPLE_RATE_HZ * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in waveform.samples() {
        out.extend_from_slice(&quantize_i16(s).to_le_bytes());
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Rounds a [-1, 1] sample to PCM-16.
pub fn quantize_i16(sample: f32) -> i16 {
    let v = (sample as f64 * 32768.0).round();
    v.clamp(i16::MIN as f64, i16::MAX as f64) as i16
}

/// The in-memory value a PCM-16 sample decodes to.
pub fn dequantize_i16(v: i16) -> f32 {
    v as f32 / 32768.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_preserves_quantized_samples() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        let samples: Vec<f32> = (0..1000)
            .map(|i| (i as f32 / 1000.0 * std::f32::consts::TAU).sin() * 0.5)
            .map(|s| dequantize_i16(quantize_i16(s)))
            .collect();
        let wave = Waveform::new(samples.clone(), SAMPLE_RATE_HZ).unwrap();
        write_wav(&path, &wave).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.samples(), &samples[..]);
        assert_eq!(back.sample_rate_hz(), SAMPLE_RATE_HZ);
    }

    #[test]
    fn rejects_truncated_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.wav");
        std::fs::write(&path, b"RIFF....WAVEfm").unwrap();
        assert!(read_wav(&path).is_err());
    }

    #[test]
    fn rejects_wrong_rate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r8k.wav");
        // hand-build an 8 kHz header
        let mut out: Vec<u8> = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&38u32.to_le_bytes());
        out.extend_from_slice(b"WAVE");
        out.extend_from_slice(b"fmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&8000u32.to_le_bytes());
        out.extend_from_slice(&16000u32.to_le_bytes());
        out.extend_from_slice(&2u16.to_le_bytes());
        out.extend_from_slice(&16u16.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&2u32.to_le_bytes());
        out.extend_from_slice(&0i16.to_le_bytes());
        std::fs::write(&path, out).unwrap();
        assert!(read_wav(&path).is_err());
    }
}
