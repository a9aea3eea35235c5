//! Score and MOS tables with their comma-separated file formats.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::StatsError;

/// Which prompt variant a score row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Original,
    Positive,
    Negative,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Original => "original",
            Variant::Positive => "positive",
            Variant::Negative => "negative",
        }
    }

    fn parse(s: &str) -> Option<Variant> {
        match s {
            "original" => Some(Variant::Original),
            "positive" => Some(Variant::Positive),
            "negative" => Some(Variant::Negative),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One scored (item, prompt variant) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub item_id: String,
    pub variant: Variant,
    /// 0 for the original, 0-based index otherwise.
    pub variant_idx: u32,
    pub score: f64,
}

/// Per-item scores for original/positive/negative prompt variants.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    pub rows: Vec<ScoreRow>,
}

const SCORE_HEADER: &str = "item_id,variant,variant_idx,score";

impl ScoreTable {
    pub fn new(rows: Vec<ScoreRow>) -> Self {
        ScoreTable { rows }
    }

    /// Item ids in first-appearance order.
    pub fn item_ids(&self) -> Vec<String> {
        let mut seen = std::collections::HashSet::new();
        let mut ids = Vec::new();
        for row in &self.rows {
            if seen.insert(row.item_id.clone()) {
                ids.push(row.item_id.clone());
            }
        }
        ids
    }

    pub fn scores_of(&self, item_id: &str, variant: Variant) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.item_id == item_id && r.variant == variant)
            .map(|r| r.score)
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), StatsError> {
        let mut out = String::from(SCORE_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.item_id,
                row.variant,
                row.variant_idx,
                fmt_f64(row.score)
            ));
        }
        std::fs::write(path, out).map_err(|e| StatsError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn read_csv(path: &Path) -> Result<Self, StatsError> {
        let text = std::fs::read_to_string(path).map_err(|e| StatsError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let p = path.display().to_string();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == SCORE_HEADER => {}
            Some((_, header)) => {
                return Err(bad_header(&p, SCORE_HEADER, header));
            }
            None => {
                return Err(StatsError::BadHeader {
                    path: p,
                    expected: SCORE_HEADER.to_string(),
                    got: "<empty file>".to_string(),
                })
            }
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(StatsError::MalformedRow {
                    path: p.clone(),
                    line: lineno + 1,
                    reason: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let variant = Variant::parse(fields[1]).ok_or_else(|| StatsError::MalformedRow {
                path: p.clone(),
                line: lineno + 1,
                reason: format!("unknown variant {:?}", fields[1]),
            })?;
            let variant_idx: u32 = fields[2].parse().map_err(|_| StatsError::MalformedRow {
                path: p.clone(),
                line: lineno + 1,
                reason: format!("bad variant_idx {:?}", fields[2]),
            })?;
            let score: f64 = fields[3].parse().map_err(|_| StatsError::MalformedRow {
                path: p.clone(),
                line: lineno + 1,
                reason: format!("bad score {:?}", fields[3]),
            })?;
            if !score.is_finite() {
                return Err(StatsError::MalformedRow {
                    path: p.clone(),
                    line: lineno + 1,
                    reason: "score is not finite".to_string(),
                });
            }
            rows.push(ScoreRow {
                item_id: fields[0].to_string(),
                variant,
                variant_idx,
                score,
            });
        }
        Ok(ScoreTable { rows })
    }
}

/// One human (or stand-in) opinion score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MosRow {
    pub item_id: String,
    pub mos: f64,
}

/// Mean-opinion-score table keyed by item id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MosTable {
    pub rows: Vec<MosRow>,
}

const MOS_HEADER: &str = "item_id,mos";

impl MosTable {
    /// Builds a table, enforcing unique ids and the [1, 5] range.
    pub fn new(rows: Vec<MosRow>) -> Result<Self, StatsError> {
        let mut seen = std::collections::HashSet::new();
        for row in &rows {
            if !(1.0..=5.0).contains(&row.mos) {
                return Err(StatsError::NonFinite {
                    context: "mos out of [1, 5]",
                });
            }
            if !seen.insert(row.item_id.clone()) {
                return Err(StatsError::MissingVariants {
                    item_id: row.item_id.clone(),
                    what: "a unique id (duplicate in MOS table)",
                });
            }
        }
        Ok(MosTable { rows })
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), StatsError> {
        let mut out = String::from(MOS_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{},{}\n", row.item_id, fmt_f64(row.mos)));
        }
        std::fs::write(path, out).map_err(|e| StatsError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn read_csv(path: &Path) -> Result<Self, StatsError> {
        let text = std::fs::read_to_string(path).map_err(|e| StatsError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let p = path.display().to_string();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == MOS_HEADER => {}
            Some((_, header)) => return Err(bad_header(&p, MOS_HEADER, header)),
            None => {
                return Err(StatsError::BadHeader {
                    path: p,
                    expected: MOS_HEADER.to_string(),
                    got: "<empty file>".to_string(),
                })
            }
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 2 {
                return Err(StatsError::MalformedRow {
                    path: p.clone(),
                    line: lineno + 1,
                    reason: format!("expected 2 fields, got {}", fields.len()),
                });
            }
            let mos: f64 = fields[1].parse().map_err(|_| StatsError::MalformedRow {
                path: p.clone(),
                line: lineno + 1,
                reason: format!("bad mos {:?}", fields[1]),
            })?;
            rows.push(MosRow {
                item_id: fields[0].to_string(),
                mos,
            });
        }
        MosTable::new(rows)
    }
}

fn bad_header(path: &str, expected: &str, got: &str) -> StatsError {
    // name the first offending column for easier debugging
    let exp_cols: Vec<&str> = expected.split(',').collect();
    let got_cols: Vec<&str> = got.trim().split(',').collect();
    let detail = exp_cols
        .iter()
        .zip(got_cols.iter().chain(std::iter::repeat(&"<missing>")))
        .find(|(e, g)| *e != *g)
        .map(|(e, g)| format!("column {e:?} vs {g:?}"))
        .unwrap_or_else(|| "extra columns".to_string());
    StatsError::BadHeader {
        path: path.to_string(),
        expected: expected.to_string(),
        got: format!("{got} ({detail})"),
    }
}

/// Row id for joining variant-level scores against a MOS table keyed by
/// `item#variant#index`.
pub fn variant_row_id(item_id: &str, variant: Variant, idx: u32) -> String {
    format!("{item_id}#{variant}#{idx}")
}

/// Full-precision float formatting that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> ScoreTable {
        let mut rows = Vec::new();
        for item in ["u1", "u2"] {
            rows.push(ScoreRow {
                item_id: item.to_string(),
                variant: Variant::Original,
                variant_idx: 0,
                score: 0.81234567890123,
            });
            for i in 0..2u32 {
                rows.push(ScoreRow {
                    item_id: item.to_string(),
                    variant: Variant::Positive,
                    variant_idx: i,
                    score: 0.7 + i as f64 * 0.01,
                });
                rows.push(ScoreRow {
                    item_id: item.to_string(),
                    variant: Variant::Negative,
                    variant_idx: i,
                    score: 0.2 - i as f64 * 0.01,
                });
            }
        }
        ScoreTable::new(rows)
    }

    #[test]
    fn score_table_roundtrips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        let table = sample_table();
        table.write_csv(&path).unwrap();
        let back = ScoreTable::read_csv(&path).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn bad_header_names_the_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        std::fs::write(&path, "item_id,kind,variant_idx,score\n").unwrap();
        match ScoreTable::read_csv(&path) {
            Err(StatsError::BadHeader { got, .. }) => assert!(got.contains("variant")),
            other => panic!("expected header error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        std::fs::write(&path, "item_id,variant,variant_idx,score\nu1,original,0,zap\n").unwrap();
        match ScoreTable::read_csv(&path) {
            Err(StatsError::MalformedRow { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed row, got {other:?}"),
        }
    }

    #[test]
    fn mos_table_checks_range_and_uniqueness() {
        assert!(MosTable::new(vec![MosRow {
            item_id: "a".into(),
            mos: 0.5
        }])
        .is_err());
        assert!(MosTable::new(vec![
            MosRow {
                item_id: "a".into(),
                mos: 3.0
            },
            MosRow {
                item_id: "a".into(),
                mos: 4.0
            }
        ])
        .is_err());
    }

    #[test]
    fn mos_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mos.csv");
        let table = MosTable::new(vec![
            MosRow {
                item_id: "a".into(),
                mos: 3.25,
            },
            MosRow {
                item_id: "b".into(),
                mos: 4.9999999,
            },
        ])
        .unwrap();
        table.write_csv(&path).unwrap();
        assert_eq!(MosTable::read_csv(&path).unwrap(), table);
    }
}
