//! Line-delimited manifest files.
//!
//! A manifest starts with a header object naming the format version,
//! followed by one JSON object per record:
//!
//! ```text
//! {"format":"spam-manifest","version":"1"}
//! {"item_id":"u0000","audio_path":"audio/u0000.wav","transcript":"...",
//!  "prompt":"...","style_key":{"gender":"male","pitch":"high",
//!  "speed":"normal","energy":"normal"},"split":"train"}
//! ```
//!
//! A zero-record manifest is an empty file. Readers reject unknown
//! versions, duplicate ids and records whose audio file does not resolve
//! relative to the manifest's directory.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::types::UtteranceRecord;
use crate::CoreError;

/// Current manifest format version.
pub const MANIFEST_VERSION: &str = "1";

const MANIFEST_FORMAT: &str = "spam-manifest";

/// An ordered collection of utterance records plus its format version.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub version: String,
    pub records: Vec<UtteranceRecord>,
}

impl Manifest {
    pub fn new(records: Vec<UtteranceRecord>) -> Self {
        Manifest {
            version: MANIFEST_VERSION.to_string(),
            records,
        }
    }

    /// Resolves a record's audio path against the directory `manifest_path`
    /// lives in.
    pub fn resolve_audio(manifest_path: &Path, record: &UtteranceRecord) -> PathBuf {
        match manifest_path.parent() {
            Some(dir) => dir.join(&record.audio_path),
            None => PathBuf::from(&record.audio_path),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: String,
}

/// Reads and validates a manifest file.
///
/// Checks, in order: header version, per-line JSON shape (reporting the
/// 1-based line number), record invariants, item_id uniqueness, and that
/// every referenced audio file exists.
pub fn read_manifest(path: &Path) -> Result<Manifest, CoreError> {
    let text = fs::read_to_string(path).map_err(|e| CoreError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;

    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());

    let header = match lines.next() {
        None => return Ok(Manifest::new(Vec::new())),
        Some((lineno, line)) => {
            let header: Header =
                serde_json::from_str(line).map_err(|e| CoreError::MalformedLine {
                    line: lineno + 1,
                    reason: format!("bad header: {e}"),
                })?;
            if header.format != MANIFEST_FORMAT || header.version != MANIFEST_VERSION {
                return Err(CoreError::UnsupportedVersion {
                    got: format!("{}/{}", header.format, header.version),
                    expected: format!("{MANIFEST_FORMAT}/{MANIFEST_VERSION}"),
                });
            }
            header
        }
    };

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in lines {
        let record: UtteranceRecord =
            serde_json::from_str(line).map_err(|e| CoreError::MalformedLine {
                line: lineno + 1,
                reason: e.to_string(),
            })?;
        record.validate()?;
        if !seen.insert(record.item_id.clone()) {
            return Err(CoreError::DuplicateItemId {
                item_id: record.item_id.clone(),
            });
        }
        let audio = Manifest::resolve_audio(path, &record);
        if !audio.is_file() {
            return Err(CoreError::MissingAudio {
                item_id: record.item_id.clone(),
                path: audio,
            });
        }
        records.push(record);
    }

    Ok(Manifest {
        version: header.version,
        records,
    })
}

/// Writes a manifest; `read_manifest` on the result reproduces it
/// field-for-field.
pub fn write_manifest(manifest: &Manifest, path: &Path) -> Result<(), CoreError> {
    let mut out = String::new();
    if !manifest.records.is_empty() {
        let header = Header {
            format: MANIFEST_FORMAT.to_string(),
            version: manifest.version.clone(),
        };
        out.push_str(&serde_json::to_string(&header).expect("header serializes"));
        out.push('\n');
        for record in &manifest.records {
            record.validate()?;
            out.push_str(&serde_json::to_string(record).expect("record serializes"));
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(|e| CoreError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{EnergyLevel, Gender, PitchLevel, SpeedLevel, Split, StyleKey};

    fn record(id: &str, audio: &str) -> UtteranceRecord {
        UtteranceRecord {
            item_id: id.to_string(),
            audio_path: audio.to_string(),
            transcript: "a test sentence".to_string(),
            prompt: "a male voice".to_string(),
            style_key: StyleKey::new(
                Gender::Male,
                PitchLevel::High,
                SpeedLevel::Normal,
                EnergyLevel::Normal,
            ),
            split: Split::Train,
        }
    }

    fn write_stub_audio(dir: &Path, name: &str) {
        let wave = crate::types::Waveform::new(vec![0.1; 500], 16_000).unwrap();
        crate::wav::write_wav(&dir.join(name), &wave).unwrap();
    }

    #[test]
    fn roundtrip_preserves_records_in_order() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["a.wav", "b.wav", "c.wav"] {
            write_stub_audio(dir.path(), name);
        }
        let mut records = vec![record("u1", "a.wav"), record("u2", "b.wav"), record("u3", "c.wav")];
        records[1].transcript = "unicode \u{00e9}\u{3042} text".to_string();
        let manifest = Manifest::new(records);
        let path = dir.path().join("manifest.jsonl");
        write_manifest(&manifest, &path).unwrap();
        let back = read_manifest(&path).unwrap();
        assert_eq!(back, manifest);
    }

    #[test]
    fn empty_manifest_is_an_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.jsonl");
        write_manifest(&Manifest::new(Vec::new()), &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap().len(), 0);
        let back = read_manifest(&path).unwrap();
        assert!(back.records.is_empty());
    }

    #[test]
    fn duplicate_id_is_reported_by_name() {
        let dir = tempfile::tempdir().unwrap();
        write_stub_audio(dir.path(), "a.wav");
        let manifest = Manifest::new(vec![record("u1", "a.wav"), record("u1", "a.wav")]);
        let path = dir.path().join("manifest.jsonl");
        write_manifest(&manifest, &path).unwrap();
        match read_manifest(&path) {
            Err(CoreError::DuplicateItemId { item_id }) => assert_eq!(item_id, "u1"),
            other => panic!("expected duplicate-id error, got {other:?}"),
        }
    }

    #[test]
    fn missing_audio_fails_load() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = Manifest::new(vec![record("u1", "nope.wav")]);
        let path = dir.path().join("manifest.jsonl");
        write_manifest(&manifest, &path).unwrap();
        assert!(matches!(
            read_manifest(&path),
            Err(CoreError::MissingAudio { .. })
        ));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.jsonl");
        std::fs::write(
            &path,
            "{\"format\":\"spam-manifest\",\"version\":\"1\"}\nnot json\n",
        )
        .unwrap();
        match read_manifest(&path) {
            Err(CoreError::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed-line error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.jsonl");
        std::fs::write(&path, "{\"format\":\"spam-manifest\",\"version\":\"99\"}\n").unwrap();
        assert!(matches!(
            read_manifest(&path),
            Err(CoreError::UnsupportedVersion { .. })
        ));
    }
}
