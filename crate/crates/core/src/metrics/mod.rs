//! Group-level statistics: heterophily between groups and coverage /
//! consistency of groups over tracked news domains.

mod hits;
mod ties;

use thiserror::Error;

pub use hits::{
    build_hit_matrix, consistency, coverage, group_summary, write_group_summary, GroupSummaryRow, HitMatrix,
};
pub use ties::{expected_ties, expected_ties_from, heterophily, tie_counts, HeterophilyMatrix, TieCounts};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("grouping has no groups")]
    EmptyGrouping,
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("group `{0}` has no accounts")]
    ZeroSizeGroup(String),
    #[error("no ties between grouped accounts")]
    NoTies,
    #[error("tie matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("no tracked domains")]
    EmptyDictionary,
    #[error("no hits on tracked domains")]
    ZeroHits,
    #[error("shape mismatch: {0}")]
    Shape(String),
}
