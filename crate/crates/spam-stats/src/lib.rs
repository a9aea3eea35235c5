//! Statistics for validating an adherence metric: correlation against
//! human scores, paired t-tests over prompt variants, and the adherence
//! rate over positive/negative prompt pairs.
//!
//! Everything here is a pure function over plain slices or small tables.
//! The Student-t CDF is implemented in-repo (regularized incomplete
//! beta, accurate to about 1e-12) so tie and edge conventions are pinned
//! by this crate's own tests rather than by an external dependency.

pub mod correlation;
pub mod faithfulness;
pub mod plausibility;
pub mod tables;
pub mod ttest;

pub use correlation::{fractional_ranks, kendall_tau, pearson, spearman};
pub use faithfulness::{adherence_rate, faithfulness_report, FaithfulnessReport, TestOutcome};
pub use plausibility::{plausibility_report, PlausibilityReport};
pub use tables::{variant_row_id, MosRow, MosTable, ScoreRow, ScoreTable, Variant};
pub use ttest::{paired_t, student_t_cdf, TTest};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },

    #[error("undefined correlation: zero variance in {which}")]
    ZeroVariance { which: &'static str },

    #[error("undefined rank correlation: all pairs tied")]
    AllTied,

    #[error("degenerate paired t-test: differences have zero variance (all equal to {value})")]
    DegenerateTest { value: f64 },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("item {item_id:?} is missing {what}")]
    MissingVariants { item_id: String, what: &'static str },

    #[error("fewer than {needed} common item ids between scores and MOS (got {got})")]
    TooFewCommon { needed: usize, got: usize },

    #[error("{path}: bad header: expected {expected:?}, got {got:?}")]
    BadHeader {
        path: String,
        expected: String,
        got: String,
    },

    #[error("{path}:{line}: {reason}")]
    MalformedRow {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("I/O error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
