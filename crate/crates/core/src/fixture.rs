//! Published benchmark results bundled with the crate: 71 recommender
//! datasets evaluated with nDCG@10 on BPR, ItemKNN, MultiVAE, NeuMF and SGL.

use crate::ingest::{self, IngestError};
use crate::matrix::PerformanceMatrix;
use crate::scalar::Scalar;

/// Wide CSV of scores; `NaN` marks pairings that never finished.
pub const RESULTS_CSV: &str = include_str!("../fixtures/thesis_results.csv");

/// Reported Difficulty and Variance per dataset, 4 decimals.
pub const METRICS_CSV: &str = include_str!("../fixtures/thesis_metrics.csv");

/// Interaction, user and item counts for the 75 datasets considered.
pub const DATASETS_CSV: &str = include_str!("../fixtures/thesis_datasets.csv");

/// Nine reported selections with their Diversity, 4 decimals.
pub const SELECTIONS_CSV: &str = include_str!("../fixtures/thesis_selections.csv");

pub fn results<T: Scalar>() -> Result<PerformanceMatrix<T>, IngestError> {
    ingest::parse_wide(RESULTS_CSV)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetInfo {
    pub name: String,
    pub interactions: u64,
    pub users: u64,
    pub items: u64,
}

/// Parses [`DATASETS_CSV`].
pub fn dataset_info() -> Vec<DatasetInfo> {
    DATASETS_CSV
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let num = |i: usize| f[i].parse().expect("bundled metadata is numeric");
            DatasetInfo {
                name: f[1].to_string(),
                interactions: num(2),
                users: num(3),
                items: num(4),
            }
        })
        .collect()
}
