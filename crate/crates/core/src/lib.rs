//! Algorithm performance space toolkit.
//!
//! A performance matrix places every dataset as a point whose coordinates are
//! the scores different algorithms reached on it. On top of that this crate
//! computes per-dataset Difficulty and Variance, scores dataset selections by
//! Diversity, searches for the most and least diverse selections, projects the
//! space with PCA, and renders SVG scatter plots.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the CLI and the bundled fixture use.

pub mod fixture;
pub mod ingest;
pub mod matrix;
pub mod metrics;
pub mod reduce;
pub mod report;
pub mod scalar;
pub mod select;
pub mod viz;

pub use ingest::{IngestError, TableFormat, ValidationReport};
pub use matrix::{AlgorithmId, DatasetId, MatrixError, ScoreMeta};
pub use metrics::{DifficultyOrientation, MetricsError, VolumeRoot};
pub use reduce::{Imputation, ReduceError};
pub use scalar::Scalar;
pub use select::{SearchMode, SelectError};
pub use viz::{ColorBy, HighlightGroup, PlotSpec, VizError};

pub type PerformanceMatrix = matrix::PerformanceMatrix<f64>;
pub type MetricReport = metrics::MetricReport<f64>;
pub type MetricRow = metrics::MetricRow<f64>;
pub type DiversityBreakdown = metrics::DiversityBreakdown<f64>;
pub type PcaProjection = reduce::PcaProjection<f64>;
pub type Selection = select::Selection<f64>;
pub type SearchResult = select::SearchResult<f64>;

pub type PerformanceMatrixF32 = matrix::PerformanceMatrix<f32>;
