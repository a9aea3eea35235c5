//! Plausibility statistics: correlation of metric scores against a MOS
//! table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::correlation::{kendall_tau, pearson, spearman};
use crate::tables::MosTable;
use crate::StatsError;

/// The three correlation coefficients of the plausibility experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlausibilityReport {
    pub lcc: f64,
    pub srcc: f64,
    pub ktau: f64,
    pub n: usize,
}

/// Joins scores and MOS on item id and computes LCC/SRCC/KTAU over the
/// aligned vectors. Requires at least 3 common ids.
pub fn plausibility_report(
    scores: &BTreeMap<String, f64>,
    mos: &MosTable,
) -> Result<PlausibilityReport, StatsError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in &mos.rows {
        if let Some(&score) = scores.get(&row.item_id) {
            xs.push(score);
            ys.push(row.mos);
        }
    }
    if xs.len() < 3 {
        return Err(StatsError::TooFewCommon {
            needed: 3,
            got: xs.len(),
        });
    }
    Ok(PlausibilityReport {
        lcc: pearson(&xs, &ys)?,
        srcc: spearman(&xs, &ys)?,
        ktau: kendall_tau(&xs, &ys)?,
        n: xs.len(),
    })
}

/// Text rendering of the plausibility row.
pub fn render_plausibility(label: &str, report: &PlausibilityReport) -> String {
    format!(
        "               LCC    SRCC   KTAU     (n = {n})\n{label:<12} {lcc:>6.3} {srcc:>6.3} {ktau:>6.3}\n",
        n = report.n,
        label = label,
        lcc = report.lcc,
        srcc = report.srcc,
        ktau = report.ktau,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::MosRow;

    fn mos(vals: &[(&str, f64)]) -> MosTable {
        MosTable::new(
            vals.iter()
                .map(|(id, m)| MosRow {
                    item_id: id.to_string(),
                    mos: *m,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn self_correlation_is_one() {
        let table = mos(&[("a", 1.0), ("b", 2.5), ("c", 4.0), ("d", 5.0)]);
        let scores: BTreeMap<String, f64> = table
            .rows
            .iter()
            .map(|r| (r.item_id.clone(), r.mos))
            .collect();
        let report = plausibility_report(&scores, &table).unwrap();
        assert!((report.lcc - 1.0).abs() < 1e-12);
        assert!((report.srcc - 1.0).abs() < 1e-12);
        assert!((report.ktau - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negated_scores_give_minus_one() {
        let table = mos(&[("a", 1.0), ("b", 2.5), ("c", 4.0), ("d", 5.0)]);
        let scores: BTreeMap<String, f64> = table
            .rows
            .iter()
            .map(|r| (r.item_id.clone(), -r.mos))
            .collect();
        let report = plausibility_report(&scores, &table).unwrap();
        assert!((report.lcc + 1.0).abs() < 1e-12);
        assert!((report.srcc + 1.0).abs() < 1e-12);
        assert!((report.ktau + 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_common_ids_is_an_error() {
        let table = mos(&[("a", 1.0), ("b", 2.0), ("c", 3.0)]);
        let scores: BTreeMap<String, f64> =
            [("a".to_string(), 0.1), ("zz".to_string(), 0.2)].into();
        assert!(matches!(
            plausibility_report(&scores, &table),
            Err(StatsError::TooFewCommon { .. })
        ));
    }

    #[test]
    fn join_ignores_ids_missing_from_either_side() {
        let table = mos(&[("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0)]);
        let scores: BTreeMap<String, f64> = [
            ("a".to_string(), 1.0),
            ("b".to_string(), 2.0),
            ("c".to_string(), 3.0),
            ("extra".to_string(), 9.0),
        ]
        .into();
        let report = plausibility_report(&scores, &table).unwrap();
        assert_eq!(report.n, 3);
        assert!((report.lcc - 1.0).abs() < 1e-12);
    }
}
