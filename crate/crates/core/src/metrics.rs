//! Per-dataset Difficulty and Variance, per-selection Diversity.
//!
//! Difficulty and Variance read whatever scores a row has; Diversity only
//! accepts complete rows. All three work on raw (unnormalized) scores.

use thiserror::Error;

use crate::matrix::{DatasetId, PerformanceMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("row has no present scores")]
    NoData,
    #[error("point {0} has a missing coordinate")]
    IncompletePoint(usize),
    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("need at least 2 dimensions, got {0}")]
    TooFewDimensions(usize),
}

/// How the per-dataset mean score is turned into Difficulty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DifficultyOrientation {
    /// `1 - mean`: high means no algorithm did well.
    #[default]
    OneMinusMean,
    /// The plain mean of the present scores.
    RawMean,
}

/// How the bounding-box volume enters the Diversity score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VolumeRoot {
    /// `volume^(1/n)`, the geometric mean of the axis ranges.
    #[default]
    NthRoot,
    /// `sqrt(volume)` regardless of dimension.
    LiteralSqrt,
}

fn present<T: Scalar>(row: &[Option<T>]) -> impl Iterator<Item = T> + '_ {
    row.iter().filter_map(|v| *v)
}

/// Difficulty with the default `1 - mean` orientation.
pub fn difficulty<T: Scalar>(row: &[Option<T>]) -> Result<T, MetricsError> {
    difficulty_with(row, DifficultyOrientation::OneMinusMean)
}

pub fn difficulty_with<T: Scalar>(
    row: &[Option<T>],
    orientation: DifficultyOrientation,
) -> Result<T, MetricsError> {
    let (sum, count) = present(row).fold((T::zero(), 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        return Err(MetricsError::NoData);
    }
    let mean = sum / T::from_usize(count).unwrap();
    Ok(match orientation {
        DifficultyOrientation::OneMinusMean => T::one() - mean,
        DifficultyOrientation::RawMean => mean,
    })
}

/// Mean absolute difference over all unordered pairs of present scores;
/// `None` with fewer than two.
pub fn variance<T: Scalar>(row: &[Option<T>]) -> Option<T> {
    let values: Vec<T> = present(row).collect();
    let m = values.len();
    if m < 2 {
        return None;
    }
    let mut sum = T::zero();
    for (i, &a) in values.iter().enumerate() {
        for &b in &values[i + 1..] {
            sum = sum + (a - b).abs();
        }
    }
    let pairs = T::from_usize(m * (m - 1) / 2).unwrap();
    Some(sum / pairs)
}

fn complete_points<T: Scalar, R: AsRef<[Option<T>]>>(points: &[R]) -> Result<Vec<Vec<T>>, MetricsError> {
    let n = points.first().map_or(0, |p| p.as_ref().len());
    points
        .iter()
        .enumerate()
        .map(|(index, point)| {
            let point = point.as_ref();
            if point.len() != n {
                return Err(MetricsError::DimensionMismatch {
                    index,
                    expected: n,
                    found: point.len(),
                });
            }
            point
                .iter()
                .map(|v| v.ok_or(MetricsError::IncompletePoint(index)))
                .collect()
        })
        .collect()
}

fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

fn distances<T: Scalar>(points: &[&[T]]) -> Vec<T> {
    let mut out = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            out.push(euclidean(a, b));
        }
    }
    out
}

/// Euclidean distances of all unordered pairs, in `(i, j)` lexicographic order.
pub fn pairwise_distances<T: Scalar, R: AsRef<[Option<T>]>>(points: &[R]) -> Result<Vec<T>, MetricsError> {
    if points.len() < 2 {
        return Err(MetricsError::TooFewPoints(points.len()));
    }
    let points = complete_points(points)?;
    let refs: Vec<&[T]> = points.iter().map(Vec::as_slice).collect();
    Ok(distances(&refs))
}

/// All intermediate quantities of one Diversity evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityBreakdown<T> {
    pub selection: Vec<DatasetId>,
    pub pairwise_distances: Vec<T>,
    pub mean_distance: T,
    /// Population variance of the pairwise distances.
    pub distance_variance: T,
    /// `(sqrt(n) - 0)^2 / 4 = n / 4`.
    pub max_variance: T,
    pub axis_ranges: Vec<T>,
    pub volume: T,
    pub score: T,
}

struct Parts<T> {
    distances: Vec<T>,
    mean: T,
    variance: T,
    max_variance: T,
    ranges: Vec<T>,
    volume: T,
    score: T,
}

fn diversity_parts<T: Scalar>(points: &[&[T]], variant: VolumeRoot) -> Parts<T> {
    let n = points[0].len();
    let distances = distances(points);
    let count = T::from_usize(distances.len()).unwrap();
    let mean = distances.iter().fold(T::zero(), |a, &d| a + d) / count;
    let variance = distances
        .iter()
        .fold(T::zero(), |a, &d| a + (d - mean) * (d - mean))
        / count;
    let dim = T::from_usize(n).unwrap();
    let max_variance = dim / T::lit(4.0);

    let ranges: Vec<T> = (0..n)
        .map(|axis| {
            let (lo, hi) = points
                .iter()
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), p| {
                    (lo.min(p[axis]), hi.max(p[axis]))
                });
            hi - lo
        })
        .collect();
    let volume = ranges.iter().fold(T::one(), |a, &r| a * r);
    let coverage = match variant {
        VolumeRoot::NthRoot => volume.powf(T::one() / dim),
        VolumeRoot::LiteralSqrt => volume.sqrt(),
    };
    let score = ((T::one() - variance / max_variance) * coverage).max(T::zero());
    Parts {
        distances,
        mean,
        variance,
        max_variance,
        ranges,
        volume,
        score,
    }
}

/// Diversity score alone, for complete points already unwrapped. Callers
/// guarantee at least two points of equal dimension `n >= 2`.
pub(crate) fn diversity_score<T: Scalar>(points: &[&[T]], variant: VolumeRoot) -> T {
    diversity_parts(points, variant).score
}

/// Diversity of a selection of complete rows.
///
/// `(1 - Var(D) / MaxVar) * coverage`, where `D` are the pairwise Euclidean
/// distances, `MaxVar = n / 4` for the unit hypercube of `n` axes, and
/// coverage is the bounding-box volume reduced by `variant`.
pub fn diversity<T: Scalar, R: AsRef<[Option<T>]>>(
    selection: &[DatasetId],
    rows: &[R],
    variant: VolumeRoot,
) -> Result<DiversityBreakdown<T>, MetricsError> {
    if rows.len() < 2 {
        return Err(MetricsError::TooFewPoints(rows.len()));
    }
    let points = complete_points(rows)?;
    let n = points[0].len();
    if n < 2 {
        return Err(MetricsError::TooFewDimensions(n));
    }
    let refs: Vec<&[T]> = points.iter().map(Vec::as_slice).collect();
    let parts = diversity_parts(&refs, variant);
    Ok(DiversityBreakdown {
        selection: selection.to_vec(),
        pairwise_distances: parts.distances,
        mean_distance: parts.mean,
        distance_variance: parts.variance,
        max_variance: parts.max_variance,
        axis_ranges: parts.ranges,
        volume: parts.volume,
        score: parts.score,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow<T> {
    pub dataset: DatasetId,
    pub difficulty: T,
    pub variance: Option<T>,
    pub present_count: usize,
}

/// Difficulty and Variance for every dataset of a matrix, in matrix order.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport<T> {
    pub rows: Vec<MetricRow<T>>,
}

/// Location summary of one metric column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary<T> {
    pub count: usize,
    pub mean: T,
    pub median: T,
    pub min: T,
    pub max: T,
}

fn summarize<T: Scalar>(mut values: Vec<T>) -> Option<Summary<T>> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("metric values are finite"));
    let count = values.len();
    let mean = values.iter().fold(T::zero(), |a, &v| a + v) / T::from_usize(count).unwrap();
    let median = if count % 2 == 1 {
        values[count / 2]
    } else {
        (values[count / 2 - 1] + values[count / 2]) / T::lit(2.0)
    };
    Some(Summary {
        count,
        mean,
        median,
        min: values[0],
        max: values[count - 1],
    })
}

impl<T: Scalar> MetricReport<T> {
    pub fn difficulty_summary(&self) -> Option<Summary<T>> {
        summarize(self.rows.iter().map(|r| r.difficulty).collect())
    }

    /// Over the rows where Variance is defined.
    pub fn variance_summary(&self) -> Option<Summary<T>> {
        summarize(self.rows.iter().filter_map(|r| r.variance).collect())
    }

    pub fn get(&self, dataset: &str) -> Option<&MetricRow<T>> {
        self.rows.iter().find(|r| r.dataset.as_str() == dataset)
    }
}

pub fn metric_table<T: Scalar>(
    matrix: &PerformanceMatrix<T>,
    orientation: DifficultyOrientation,
) -> Result<MetricReport<T>, MetricsError> {
    let rows = matrix
        .rows()
        .map(|(dataset, row)| {
            Ok(MetricRow {
                dataset: dataset.clone(),
                difficulty: difficulty_with(row, orientation)?,
                variance: variance(row),
                present_count: row.iter().filter(|v| v.is_some()).count(),
            })
        })
        .collect::<Result<_, MetricsError>>()?;
    Ok(MetricReport { rows })
}
