//! Affiliation-based clustering of map accounts into segments, and the
//! assembly of segments into labelled groups.

mod affiliation;
mod grouping;
mod hac;
mod quality;

use thiserror::Error;

pub use affiliation::{build_affiliation, similarity, AffiliationMatrix, SimilarityMatrix};
pub use grouping::{
    group_segments, load_assignment, read_grouping, read_segments, write_grouping, write_segments, Group, Grouping,
    Segment, RESIDUAL_LABEL,
};
pub use hac::{hac_cluster, Clustering, Cut, HacParams, Linkage, Merge, TieBreak};
pub use quality::adjusted_rand_index;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("no map accounts given")]
    EmptyMapAccounts,
    #[error("map accounts not present in graph: {}", .0.join(", "))]
    UnknownAccounts(Vec<String>),
    #[error("duplicate row account `{0}`")]
    DuplicateRow(String),
    #[error("row {row} references column {col}, but there are only {cols} columns")]
    ColumnOutOfRange { row: usize, col: usize, cols: usize },
    #[error("affiliation matrix has no rows")]
    NoRows,
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("cut target {target} exceeds row count {rows}")]
    CutTooLarge { target: usize, rows: usize },
    #[error("{}", assignment_message(.unknown, .duplicate, .missing))]
    Assignment { unknown: Vec<usize>, duplicate: Vec<usize>, missing: Vec<usize> },
    #[error("group label `{0}` used for more than one group")]
    DuplicateGroupLabel(String),
    #[error("account `{0}` belongs to more than one segment")]
    OverlappingSegments(String),
    #[error("segment {0} has no members")]
    EmptySegment(usize),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn assignment_message(unknown: &[usize], duplicate: &[usize], missing: &[usize]) -> String {
    let list = |ids: &[usize]| ids.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
    let mut parts = Vec::new();
    if !unknown.is_empty() {
        parts.push(format!("unknown segment ids: {}", list(unknown)));
    }
    if !duplicate.is_empty() {
        parts.push(format!("segments assigned more than once: {}", list(duplicate)));
    }
    if !missing.is_empty() {
        parts.push(format!("unassigned segments: {}", list(missing)));
    }
    format!("invalid segment assignment: {}", parts.join("; "))
}
