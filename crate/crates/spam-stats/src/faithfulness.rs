//! Faithfulness statistics: adherence rate and the two paired-t
//! hypothesis checks over a score table.

use serde::{Deserialize, Serialize};

use crate::tables::{ScoreTable, Variant};
use crate::ttest::paired_t;
use crate::StatsError;

/// Outcome of one paired t-test within the faithfulness report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub t: f64,
    pub p: f64,
    pub passed: bool,
}

/// Everything the faithfulness experiment reports for one score table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    /// Adherence rate over all positive/negative pairs, macro-averaged.
    pub ar: f64,
    pub mean_sd_original: (f64, f64),
    pub mean_sd_positive: (f64, f64),
    pub mean_sd_negative: (f64, f64),
    /// Two-sided test of "positive scores differ from originals".
    /// `passed` means no detectable difference at level alpha.
    pub t1: TestOutcome,
    /// One-sided test of "negative scores sit below originals".
    /// `passed` means the left shift is significant at level alpha.
    pub t2: TestOutcome,
    pub alpha: f64,
    pub n_items: usize,
}

impl FaithfulnessReport {
    pub fn rejected_h1(&self) -> bool {
        self.t1.passed
    }

    pub fn accepted_h2(&self) -> bool {
        self.t2.passed
    }
}

struct ItemScores {
    original: f64,
    positives: Vec<f64>,
    negatives: Vec<f64>,
}

fn collect_items(table: &ScoreTable) -> Result<Vec<(String, ItemScores)>, StatsError> {
    let mut items = Vec::new();
    for item_id in table.item_ids() {
        let originals = table.scores_of(&item_id, Variant::Original);
        if originals.len() != 1 {
            return Err(StatsError::MissingVariants {
                item_id,
                what: "exactly one original score",
            });
        }
        let positives = table.scores_of(&item_id, Variant::Positive);
        let negatives = table.scores_of(&item_id, Variant::Negative);
        if positives.is_empty() {
            return Err(StatsError::MissingVariants {
                item_id,
                what: "at least one positive score",
            });
        }
        if negatives.is_empty() {
            return Err(StatsError::MissingVariants {
                item_id,
                what: "at least one negative score",
            });
        }
        items.push((
            item_id,
            ItemScores {
                original: originals[0],
                positives,
                negatives,
            },
        ));
    }
    Ok(items)
}

/// Adherence rate: per item, the fraction of (positive, negative) score
/// pairs where the positive wins, ties counting 0.5; then the mean
/// across items.
pub fn adherence_rate(table: &ScoreTable) -> Result<f64, StatsError> {
    let items = collect_items(table)?;
    if items.is_empty() {
        return Err(StatsError::TooFew { needed: 1, got: 0 });
    }
    let mut per_item = Vec::with_capacity(items.len());
    for (_, scores) in &items {
        let mut credit = 0.0;
        for &p in &scores.positives {
            for &n in &scores.negatives {
                credit += if p > n {
                    1.0
                } else if p == n {
                    0.5
                } else {
                    0.0
                };
            }
        }
        per_item.push(credit / (scores.positives.len() * scores.negatives.len()) as f64);
    }
    Ok(per_item.iter().sum::<f64>() / per_item.len() as f64)
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Paired t-test of per-item differences that tolerates a zero-variance
/// vector by taking the natural limit (t of 0 or +/- infinity).
fn paired_t_with_limits(diffs: &[f64]) -> Result<(f64, f64, f64), StatsError> {
    match paired_t(diffs) {
        Ok(out) => Ok((out.t, out.p_two_sided, out.p_one_sided_less)),
        Err(StatsError::DegenerateTest { value }) => {
            if value == 0.0 {
                Ok((0.0, 1.0, 0.5))
            } else if value < 0.0 {
                Ok((f64::NEG_INFINITY, 0.0, 0.0))
            } else {
                Ok((f64::INFINITY, 0.0, 1.0))
            }
        }
        Err(e) => Err(e),
    }
}

/// Builds the full faithfulness report.
///
/// Pairing unit: each item contributes its original score and the means
/// of its positive and negative variant scores. The first test compares
/// positives to originals two-sided and passes when no difference is
/// detectable (p >= alpha); the second compares negatives to originals
/// one-sided and passes when the negative mean is significantly lower.
pub fn faithfulness_report(
    table: &ScoreTable,
    alpha: f64,
) -> Result<FaithfulnessReport, StatsError> {
    let items = collect_items(table)?;
    if items.len() < 3 {
        return Err(StatsError::TooFew {
            needed: 3,
            got: items.len(),
        });
    }

    let originals: Vec<f64> = items.iter().map(|(_, s)| s.original).collect();
    let pos_means: Vec<f64> = items
        .iter()
        .map(|(_, s)| s.positives.iter().sum::<f64>() / s.positives.len() as f64)
        .collect();
    let neg_means: Vec<f64> = items
        .iter()
        .map(|(_, s)| s.negatives.iter().sum::<f64>() / s.negatives.len() as f64)
        .collect();

    let diffs_pos: Vec<f64> = pos_means
        .iter()
        .zip(&originals)
        .map(|(p, o)| p - o)
        .collect();
    let diffs_neg: Vec<f64> = neg_means
        .iter()
        .zip(&originals)
        .map(|(m, o)| m - o)
        .collect();

    let (t1, p1_two, _) = paired_t_with_limits(&diffs_pos)?;
    let (t2, _, p2_less) = paired_t_with_limits(&diffs_neg)?;

    Ok(FaithfulnessReport {
        ar: adherence_rate(table)?,
        mean_sd_original: mean_sd(&originals),
        mean_sd_positive: mean_sd(&pos_means),
        mean_sd_negative: mean_sd(&neg_means),
        t1: TestOutcome {
            t: t1,
            p: p1_two,
            passed: p1_two >= alpha,
        },
        t2: TestOutcome {
            t: t2,
            p: p2_less,
            passed: t2 < 0.0 && p2_less < alpha,
        },
        alpha,
        n_items: items.len(),
    })
}

/// Significance stars for a p-value: *, **, *** for p < .05/.01/.001.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Renders the report in the one-row tabular layout used for published
/// faithfulness results.
pub fn render_faithfulness_table(label: &str, report: &FaithfulnessReport) -> String {
    let mark = |b: bool| if b { "yes" } else { "no " };
    let mut out = String::new();
    out.push_str(
        "               AR      Original         Positive        (H1 reject?)      Negative        (H2 accept?)\n",
    );
    out.push_str(&format!(
        "{label:<12} {ar:>6.3}  {om:>6.3} \u{00b1} {os:<6.3} {pm:>6.3} \u{00b1} {ps:<6.3} {t1:>8.3} {s1:<3} {m1}  {nm:>6.3} \u{00b1} {ns:<6.3} {t2:>8.3} {s2:<3} {m2}\n",
        label = label,
        ar = report.ar,
        om = report.mean_sd_original.0,
        os = report.mean_sd_original.1,
        pm = report.mean_sd_positive.0,
        ps = report.mean_sd_positive.1,
        t1 = report.t1.t,
        s1 = significance_stars(report.t1.p),
        m1 = mark(report.t1.passed),
        nm = report.mean_sd_negative.0,
        ns = report.mean_sd_negative.1,
        t2 = significance_stars(report.t2.p).is_empty().then_some(report.t2.t).unwrap_or(report.t2.t),
        s2 = significance_stars(report.t2.p),
        m2 = mark(report.t2.passed),
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::ScoreRow;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn row(item: &str, variant: Variant, idx: u32, score: f64) -> ScoreRow {
        ScoreRow {
            item_id: item.to_string(),
            variant,
            variant_idx: idx,
            score,
        }
    }

    #[test]
    fn adherence_rate_enumerates_pairs() {
        // positives [0.8, 0.6], negatives [0.5, 0.7] -> 3 of 4 pairs win
        let table = ScoreTable::new(vec![
            row("u1", Variant::Original, 0, 0.9),
            row("u1", Variant::Positive, 0, 0.8),
            row("u1", Variant::Positive, 1, 0.6),
            row("u1", Variant::Negative, 0, 0.5),
            row("u1", Variant::Negative, 1, 0.7),
        ]);
        assert_eq!(adherence_rate(&table).unwrap(), 0.75);
    }

    #[test]
    fn perfect_separation_gives_one() {
        let mut rows = Vec::new();
        for item in ["a", "b", "c"] {
            rows.push(row(item, Variant::Original, 0, 0.9));
            for i in 0..3 {
                rows.push(row(item, Variant::Positive, i, 0.8 + i as f64 * 0.01));
                rows.push(row(item, Variant::Negative, i, 0.1 + i as f64 * 0.01));
            }
        }
        assert_eq!(adherence_rate(&ScoreTable::new(rows)).unwrap(), 1.0);
    }

    #[test]
    fn identical_positive_negative_scores_give_half() {
        let mut rows = vec![row("a", Variant::Original, 0, 0.5)];
        for i in 0..4 {
            rows.push(row("a", Variant::Positive, i, 0.3));
            rows.push(row("a", Variant::Negative, i, 0.3));
        }
        assert_eq!(adherence_rate(&ScoreTable::new(rows)).unwrap(), 0.5);
    }

    #[test]
    fn adherence_rate_is_order_invariant() {
        // depends only on score order: any strictly increasing transform
        // leaves it unchanged
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut rows = Vec::new();
        for item in 0..5 {
            let id = format!("i{item}");
            rows.push(row(&id, Variant::Original, 0, rng.gen_range(0.0..1.0)));
            for i in 0..4 {
                rows.push(row(&id, Variant::Positive, i, rng.gen_range(0.0..1.0)));
                rows.push(row(&id, Variant::Negative, i, rng.gen_range(0.0..1.0)));
            }
        }
        let table = ScoreTable::new(rows.clone());
        let base = adherence_rate(&table).unwrap();
        let transformed = ScoreTable::new(
            rows.iter()
                .map(|r| ScoreRow {
                    score: (3.0 * r.score).exp() - 2.0,
                    ..r.clone()
                })
                .collect(),
        );
        assert!((adherence_rate(&transformed).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn missing_variant_is_an_error() {
        let table = ScoreTable::new(vec![
            row("u1", Variant::Original, 0, 0.9),
            row("u1", Variant::Positive, 0, 0.8),
        ]);
        assert!(matches!(
            adherence_rate(&table),
            Err(StatsError::MissingVariants { .. })
        ));
    }

    #[test]
    fn separable_table_passes_both_tests() {
        // positives scored identically to originals, negatives 0.3 lower
        // with small deterministic noise, 50 items
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut rows = Vec::new();
        for item in 0..50 {
            let id = format!("i{item:02}");
            let base: f64 = rng.gen_range(0.5..0.9);
            rows.push(row(&id, Variant::Original, 0, base));
            for i in 0..10 {
                rows.push(row(&id, Variant::Positive, i, base));
                let noise: f64 = rng.gen_range(-0.02..0.02);
                rows.push(row(&id, Variant::Negative, i, base - 0.3 + noise));
            }
        }
        let report = faithfulness_report(&ScoreTable::new(rows), 0.05).unwrap();
        assert!(report.rejected_h1());
        assert!(report.accepted_h2());
        assert_eq!(report.ar, 1.0);
        assert!(report.t2.t < 0.0);
        assert_eq!(significance_stars(report.t2.p), "***");
    }

    #[test]
    fn pure_noise_rarely_accepts_h2() {
        // under the null, H2 acceptance should occur at about rate alpha
        let mut accepted = 0;
        let runs = 200;
        for seed in 0..runs {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows = Vec::new();
            for item in 0..30 {
                let id = format!("i{item}");
                rows.push(row(&id, Variant::Original, 0, rng.gen_range(0.0..1.0)));
                for i in 0..5 {
                    rows.push(row(&id, Variant::Positive, i, rng.gen_range(0.0..1.0)));
                    rows.push(row(&id, Variant::Negative, i, rng.gen_range(0.0..1.0)));
                }
            }
            let report = faithfulness_report(&ScoreTable::new(rows), 0.05).unwrap();
            if report.accepted_h2() {
                accepted += 1;
            }
        }
        // binomial(200, 0.05): mean 10, sd ~3; 25 is > 4.5 sd away
        assert!(accepted < 25, "accepted H2 {accepted}/{runs} times under the null");
    }

    #[test]
    fn booleans_are_deterministic() {
        let mut rows = Vec::new();
        for item in 0..5 {
            let id = format!("i{item}");
            rows.push(row(&id, Variant::Original, 0, 0.5 + item as f64 * 0.02));
            for i in 0..3 {
                rows.push(row(&id, Variant::Positive, i, 0.5 + i as f64 * 0.03));
                rows.push(row(&id, Variant::Negative, i, 0.2 - i as f64 * 0.03));
            }
        }
        let table = ScoreTable::new(rows);
        let a = faithfulness_report(&table, 0.05).unwrap();
        let b = faithfulness_report(&table, 0.05).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn render_produces_one_data_row() {
        let mut rows = Vec::new();
        for item in 0..5 {
            let id = format!("i{item}");
            rows.push(row(&id, Variant::Original, 0, 0.6 + item as f64 * 0.01));
            for i in 0..3 {
                rows.push(row(&id, Variant::Positive, i, 0.6 + i as f64 * 0.01));
                rows.push(row(&id, Variant::Negative, i, 0.2 + i as f64 * 0.01));
            }
        }
        let report = faithfulness_report(&ScoreTable::new(rows), 0.05).unwrap();
        let text = render_faithfulness_table("scores", &report);
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("AR"));
        assert!(text.contains("scores"));
    }
}
