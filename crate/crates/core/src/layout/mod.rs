//! Force-directed placement of account maps and group maps, and SVG output.

mod fr;
mod graph;
mod svg;

use thiserror::Error;

pub use fr::{fr_layout, LayoutConfig, NodeLayout};
pub use graph::{aggregate_group_graph, GroupGraph, LayoutGraph, LayoutSource};
pub use svg::{render_svg, SvgStyle};

#[derive(Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error("cannot lay out an empty graph")]
    EmptyGraph,
    #[error("invalid layout config: {0}")]
    InvalidConfig(String),
    #[error("grouping and heterophily labels differ: {0}")]
    LabelMismatch(String),
    #[error("layout does not cover node `{0}`")]
    MissingNode(String),
}
