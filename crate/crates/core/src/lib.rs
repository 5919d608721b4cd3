//! Migrant/native analysis of geo-tagged tweet corpora.
//!
//! The pipeline ingests archived profiles, tweets, and follow edges,
//! infers per-user residence and nationality labels, scores hashtag-based
//! home/destination attachment, and runs a directed social-graph analysis:
//! structural metrics, seven centrality measures, power-law degree fits,
//! and global plus multiscale local assortativity. A deterministic
//! synthetic generator stands in for private production data.
//!
//! Numeric kernels are generic over the [`Scalar`] floating-point type;
//! the `*64` aliases below pin the common `f64` instantiations.

pub mod assortativity;
pub mod attachment;
pub mod corpus;
pub mod country;
pub mod error;
pub mod graph;
pub mod labeling;
pub mod scalar;
pub mod stats;
pub mod synth;

pub use country::CountryCode;
pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` instantiations of the generic result types.
pub type KsResult64 = stats::KsResult<f64>;
pub type Histogram64 = stats::Histogram<f64>;
pub type GroupSummary64 = stats::GroupSummary<f64>;
pub type PowerLawFit64 = graph::PowerLawFit<f64>;
pub type GraphSummary64 = graph::GraphSummary<f64>;
pub type MixingMatrix64 = assortativity::MixingMatrix<f64>;
pub type LocalAssortativity64 = assortativity::LocalAssortativity<f64>;
pub type HashtagCountryTable64 = attachment::HashtagCountryTable<f64>;
pub type AttachmentScore64 = attachment::AttachmentScore<f64>;
