//! Reconstruction of a social-network map-making pipeline on offline data.
//!
//! The stages are independent modules:
//!
//! * [`graph`]: account graph, edge-list and citation ingestion, snowball
//!   sampling and k-core reduction;
//! * [`clustering`]: bipartite affiliation matrix, cosine similarity,
//!   agglomerative clustering into segments and grouping into labelled groups;
//! * [`metrics`]: heterophily between groups, coverage and consistency over
//!   tracked news domains;
//! * [`content`]: URL normalization, news-source classification, share tables
//!   and amplifier detection;
//! * [`layout`]: Fruchterman-Reingold placement and SVG rendering.
//!
//! Numeric results are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the precision used by the command-line pipeline.

pub mod clustering;
pub mod content;
pub mod graph;
pub mod layout;
pub mod metrics;
mod scalar;

pub use scalar::Scalar;

/// Default working precision.
pub type Real = f64;

pub type HacParams64 = clustering::HacParams<f64>;
pub type HacParams32 = clustering::HacParams<f32>;
pub type Clustering64 = clustering::Clustering<f64>;
pub type Clustering32 = clustering::Clustering<f32>;
pub type HeterophilyMatrix64 = metrics::HeterophilyMatrix<f64>;
pub type HeterophilyMatrix32 = metrics::HeterophilyMatrix<f32>;
pub type ShareTable64 = content::ShareTable<f64>;
pub type ShareTable32 = content::ShareTable<f32>;
pub type LayoutConfig64 = layout::LayoutConfig<f64>;
pub type LayoutConfig32 = layout::LayoutConfig<f32>;
pub type NodeLayout64 = layout::NodeLayout<f64>;
pub type NodeLayout32 = layout::NodeLayout<f32>;
pub type GroupGraph64 = layout::GroupGraph<f64>;
pub type GroupGraph32 = layout::GroupGraph<f32>;
