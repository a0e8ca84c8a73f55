//! The performance matrix: datasets (points) by algorithms (axes).

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("invalid {kind} name {name:?}: must be non-empty without surrounding whitespace")]
    InvalidName { kind: &'static str, name: String },
    #[error("duplicate cell for dataset {dataset:?}, algorithm {algorithm:?}")]
    DuplicateCell { dataset: String, algorithm: String },
    #[error("score {value} for dataset {dataset:?}, algorithm {algorithm:?} is outside [0, 1]")]
    ScoreOutOfRange {
        dataset: String,
        algorithm: String,
        value: String,
    },
    #[error("dataset {0:?} has no present scores")]
    EmptyRow(String),
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("algorithm column {0:?} has no positive score to normalize by")]
    ZeroColumn(String),
    #[error("metric cutoff k must be at least 1")]
    InvalidCutoff,
}

fn check_name(kind: &'static str, name: &str) -> Result<(), MatrixError> {
    if name.is_empty() || name.trim() != name {
        return Err(MatrixError::InvalidName {
            kind,
            name: name.to_string(),
        });
    }
    Ok(())
}

macro_rules! label_type {
    ($(#[$doc:meta])* $name:ident, $kind:literal) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Result<Self, MatrixError> {
                let name = name.into();
                check_name($kind, &name)?;
                Ok(Self(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

label_type!(
    /// One axis of the performance space.
    AlgorithmId,
    "algorithm"
);
label_type!(
    /// One point of the performance space.
    DatasetId,
    "dataset"
);

/// Which evaluation metric the scores are, and at what list cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreMeta {
    metric_name: String,
    k: u32,
}

impl ScoreMeta {
    pub fn new(metric_name: impl Into<String>, k: u32) -> Result<Self, MatrixError> {
        if k == 0 {
            return Err(MatrixError::InvalidCutoff);
        }
        Ok(Self {
            metric_name: metric_name.into(),
            k,
        })
    }

    pub fn metric_name(&self) -> &str {
        &self.metric_name
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

impl Default for ScoreMeta {
    fn default() -> Self {
        Self {
            metric_name: "nDCG".to_string(),
            k: 10,
        }
    }
}

/// One input cell: `(dataset, algorithm, score)`, `None` meaning the run never
/// produced a result.
pub type Record<T> = (DatasetId, AlgorithmId, Option<T>);

/// Dense dataset × algorithm grid of optional scores in `[0, 1]`.
///
/// Immutable once built. Row and column order is first-seen input order.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceMatrix<T> {
    algorithms: Vec<AlgorithmId>,
    datasets: Vec<DatasetId>,
    cells: Vec<Option<T>>,
    meta: ScoreMeta,
}

impl<T: Scalar> PerformanceMatrix<T> {
    /// Builds a matrix from records. Pairs never mentioned are missing.
    pub fn build(records: impl IntoIterator<Item = Record<T>>) -> Result<Self, MatrixError> {
        Self::build_with_meta(records, ScoreMeta::default())
    }

    pub fn build_with_meta(
        records: impl IntoIterator<Item = Record<T>>,
        meta: ScoreMeta,
    ) -> Result<Self, MatrixError> {
        Self::build_with_axes(Vec::new(), records, meta)
    }

    /// Like [`build_with_meta`](Self::build_with_meta) but with the leading
    /// axes fixed up front, so a column survives even when no record names it.
    pub fn build_with_axes(
        axes: Vec<AlgorithmId>,
        records: impl IntoIterator<Item = Record<T>>,
        meta: ScoreMeta,
    ) -> Result<Self, MatrixError> {
        let mut algorithms: Vec<AlgorithmId> = Vec::new();
        let mut datasets: Vec<DatasetId> = Vec::new();
        let mut algo_index: HashMap<AlgorithmId, usize> = HashMap::new();
        for axis in axes {
            if !algo_index.contains_key(&axis) {
                algo_index.insert(axis.clone(), algorithms.len());
                algorithms.push(axis);
            }
        }
        let mut dataset_index: HashMap<DatasetId, usize> = HashMap::new();
        let mut entries: HashMap<(usize, usize), Option<T>> = HashMap::new();

        for (dataset, algorithm, score) in records {
            if let Some(value) = score {
                if !(value >= T::zero() && value <= T::one()) {
                    return Err(MatrixError::ScoreOutOfRange {
                        dataset: dataset.to_string(),
                        algorithm: algorithm.to_string(),
                        value: value.to_string(),
                    });
                }
            }
            let d = *dataset_index.entry(dataset.clone()).or_insert_with(|| {
                datasets.push(dataset.clone());
                datasets.len() - 1
            });
            let a = *algo_index.entry(algorithm.clone()).or_insert_with(|| {
                algorithms.push(algorithm.clone());
                algorithms.len() - 1
            });
            if entries.insert((d, a), score).is_some() {
                return Err(MatrixError::DuplicateCell {
                    dataset: dataset.to_string(),
                    algorithm: algorithm.to_string(),
                });
            }
        }

        let n = algorithms.len();
        let mut cells = vec![None; datasets.len() * n];
        for ((d, a), score) in entries {
            cells[d * n + a] = score;
        }
        let matrix = Self {
            algorithms,
            datasets,
            cells,
            meta,
        };
        for (d, dataset) in matrix.datasets.iter().enumerate() {
            if matrix.row(d).iter().all(Option::is_none) {
                return Err(MatrixError::EmptyRow(dataset.to_string()));
            }
        }
        Ok(matrix)
    }

    fn from_parts(
        algorithms: Vec<AlgorithmId>,
        datasets: Vec<DatasetId>,
        cells: Vec<Option<T>>,
        meta: ScoreMeta,
    ) -> Self {
        debug_assert_eq!(cells.len(), algorithms.len() * datasets.len());
        Self {
            algorithms,
            datasets,
            cells,
            meta,
        }
    }

    pub fn algorithms(&self) -> &[AlgorithmId] {
        &self.algorithms
    }

    pub fn datasets(&self) -> &[DatasetId] {
        &self.datasets
    }

    pub fn meta(&self) -> &ScoreMeta {
        &self.meta
    }

    /// Number of axes.
    pub fn dimension(&self) -> usize {
        self.algorithms.len()
    }

    pub fn dataset_count(&self) -> usize {
        self.datasets.len()
    }

    pub fn dataset_index(&self, name: &str) -> Option<usize> {
        self.datasets.iter().position(|d| d.as_str() == name)
    }

    pub fn algorithm_index(&self, name: &str) -> Option<usize> {
        self.algorithms.iter().position(|a| a.as_str() == name)
    }

    /// Row by position, in algorithm order.
    pub fn row(&self, index: usize) -> &[Option<T>] {
        let n = self.dimension();
        &self.cells[index * n..(index + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&DatasetId, &[Option<T>])> {
        self.datasets
            .iter()
            .enumerate()
            .map(move |(i, d)| (d, self.row(i)))
    }

    pub fn cell(&self, dataset: usize, algorithm: usize) -> Option<T> {
        self.cells[dataset * self.dimension() + algorithm]
    }

    /// The row of a named dataset.
    pub fn row_vector(&self, dataset: &str) -> Result<&[Option<T>], MatrixError> {
        self.dataset_index(dataset)
            .map(|i| self.row(i))
            .ok_or_else(|| MatrixError::UnknownDataset(dataset.to_string()))
    }

    pub fn is_complete_row(&self, index: usize) -> bool {
        self.row(index).iter().all(Option::is_some)
    }

    /// Flattens back to records, row-major, including missing cells.
    pub fn records(&self) -> Vec<Record<T>> {
        self.rows()
            .flat_map(|(d, row)| {
                self.algorithms
                    .iter()
                    .zip(row)
                    .map(move |(a, v)| (d.clone(), a.clone(), *v))
            })
            .collect()
    }

    /// Sub-matrix of the datasets at `indices`, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let datasets = indices.iter().map(|&i| self.datasets[i].clone()).collect();
        let cells = indices
            .iter()
            .flat_map(|&i| self.row(i).iter().copied())
            .collect();
        Self::from_parts(self.algorithms.clone(), datasets, cells, self.meta.clone())
    }

    /// Keeps only the datasets with a score for every algorithm.
    pub fn complete_rows(&self) -> Self {
        let keep: Vec<usize> = (0..self.dataset_count())
            .filter(|&i| self.is_complete_row(i))
            .collect();
        self.select_rows(&keep)
    }

    /// Projects onto a subset of algorithms (in the given order). Datasets left
    /// with no present score are dropped.
    pub fn select_algorithms(&self, names: &[&str]) -> Result<Self, MatrixError> {
        let columns = names
            .iter()
            .map(|name| {
                self.algorithm_index(name)
                    .ok_or_else(|| MatrixError::UnknownAlgorithm(name.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut datasets = Vec::new();
        let mut cells = Vec::new();
        for (d, dataset) in self.datasets.iter().enumerate() {
            let row: Vec<Option<T>> = columns.iter().map(|&a| self.cell(d, a)).collect();
            if row.iter().any(Option::is_some) {
                datasets.push(dataset.clone());
                cells.extend(row);
            }
        }
        let algorithms = columns.iter().map(|&a| self.algorithms[a].clone()).collect();
        Ok(Self::from_parts(algorithms, datasets, cells, self.meta.clone()))
    }

    /// Divides every present cell by its column maximum.
    pub fn normalize_per_axis(&self) -> Result<Self, MatrixError> {
        let n = self.dimension();
        let mut maxima = Vec::with_capacity(n);
        for (a, algorithm) in self.algorithms.iter().enumerate() {
            let max = (0..self.dataset_count())
                .filter_map(|d| self.cell(d, a))
                .fold(T::zero(), T::max);
            if max <= T::zero() {
                return Err(MatrixError::ZeroColumn(algorithm.to_string()));
            }
            maxima.push(max);
        }
        let cells = self
            .cells
            .iter()
            .enumerate()
            .map(|(i, v)| v.map(|x| x / maxima[i % n]))
            .collect();
        Ok(Self::from_parts(
            self.algorithms.clone(),
            self.datasets.clone(),
            cells,
            self.meta.clone(),
        ))
    }

    /// Row-order permutation, used to check order independence.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        self.select_rows(order)
    }
}

/// Convenience builder from string triples.
pub fn build_matrix<T: Scalar>(
    records: impl IntoIterator<Item = (impl Into<String>, impl Into<String>, Option<T>)>,
) -> Result<PerformanceMatrix<T>, MatrixError> {
    let records = records
        .into_iter()
        .map(|(d, a, v)| Ok((DatasetId::new(d)?, AlgorithmId::new(a)?, v)))
        .collect::<Result<Vec<_>, MatrixError>>()?;
    PerformanceMatrix::build(records)
}
