//! Shared-link analysis: URL normalization, news-source classification,
//! per-group share tables and amplifier detection.

mod dictionary;
mod domain;
mod shares;

use thiserror::Error;

pub use dictionary::{classify_source, DomainDictionary, NewsCategory};
pub use domain::{normalize_domain, BaseDomain};
pub use shares::{
    detect_amplifiers, share_table, AmplifierEntry, AmplifierReport, AmplifierThresholds, ShareRow, ShareTable,
    OVERALL_LABEL,
};

#[derive(Debug, Error)]
pub enum ContentError {
    #[error("cannot extract a host from URL `{0}`")]
    InvalidUrl(String),
    #[error("dictionary line {line}: {reason}")]
    Dictionary { line: usize, reason: String },
    #[error("unknown news category `{0}`")]
    UnknownCategory(String),
    #[error("no citation maps to both a group and a dictionary category")]
    NoClassifiedCitations,
    #[error("amplifier min_shares must be at least 1")]
    InvalidThreshold,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
