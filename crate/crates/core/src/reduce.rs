//! Principal component analysis and correlation.

use thiserror::Error;

use crate::matrix::{DatasetId, PerformanceMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("row {index} has {found} columns, expected {expected}")]
    RaggedGrid {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("matrix of order {0} exceeds the supported order 64")]
    TooLarge(usize),
    #[error("Jacobi iteration did not converge in {0} sweeps")]
    NoConvergence(usize),
    #[error("component count {requested} not in 1..={available}")]
    BadComponentCount { requested: usize, available: usize },
    #[error("data has zero total variance")]
    ZeroVariance,
    #[error("inputs have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 values, got {0}")]
    TooFewValues(usize),
    #[error("input is constant")]
    ConstantInput,
}

const MAX_ORDER: usize = 64;
const MAX_SWEEPS: usize = 100;

fn check_rectangular<T>(data: &[Vec<T>]) -> Result<usize, ReduceError> {
    let n = data.first().map_or(0, Vec::len);
    for (index, row) in data.iter().enumerate() {
        if row.len() != n {
            return Err(ReduceError::RaggedGrid {
                index,
                expected: n,
                found: row.len(),
            });
        }
    }
    Ok(n)
}

/// Sample covariance (divisor `m - 1`) of already column-centered data.
pub fn covariance<T: Scalar>(data: &[Vec<T>]) -> Result<Vec<Vec<T>>, ReduceError> {
    let m = data.len();
    if m < 2 {
        return Err(ReduceError::TooFewRows(m));
    }
    let n = check_rectangular(data)?;
    let divisor = T::from_usize(m - 1).unwrap();
    let mut cov = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let sum = data.iter().fold(T::zero(), |acc, row| acc + row[i] * row[j]);
            cov[i][j] = sum / divisor;
            cov[j][i] = cov[i][j];
        }
    }
    Ok(cov)
}

/// Eigen-decomposition of a small symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen<T> {
    /// Descending.
    pub values: Vec<T>,
    /// `vectors[i]` belongs to `values[i]`; unit norm, largest-magnitude
    /// entry positive.
    pub vectors: Vec<Vec<T>>,
}

fn frobenius<T: Scalar>(a: &[Vec<T>], off_diagonal_only: bool) -> T {
    let mut sum = T::zero();
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !(off_diagonal_only && i == j) {
                sum = sum + v * v;
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi eigensolver.
///
/// Rotations sweep the upper triangle row by row. Iteration stops once the
/// off-diagonal Frobenius norm falls below `tol * ||a||_F`; the result is
/// bit-for-bit reproducible for identical input.
pub fn eigh_symmetric<T: Scalar>(a: &[Vec<T>]) -> Result<SymmetricEigen<T>, ReduceError> {
    let n = a.len();
    if n > MAX_ORDER {
        return Err(ReduceError::TooLarge(n));
    }
    for (index, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(ReduceError::RaggedGrid {
                index,
                expected: n,
                found: row.len(),
            });
        }
    }
    let scale = frobenius(a, false);
    let sym_tol = T::lit(1e-9) * scale.max(T::one());
    for i in 0..n {
        for j in i + 1..n {
            if (a[i][j] - a[j][i]).abs() > sym_tol {
                return Err(ReduceError::NotSymmetric(i, j));
            }
        }
    }

    let mut w: Vec<Vec<T>> = a.to_vec();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let threshold = T::convergence_tol() * scale;
    let two = T::lit(2.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if frobenius(&w, true) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = w[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (w[q][q] - w[p][p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for row in w.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (w[p][k], w[q][k]);
                    w[p][k] = c * pk - s * qk;
                    w[q][k] = s * pk + c * qk;
                }
                w[p][q] = T::zero();
                w[q][p] = T::zero();
                for row in v.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
            }
        }
    }
    if !converged && frobenius(&w, true) > threshold {
        return Err(ReduceError::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their axis order
    order.sort_by(|&i, &j| w[j][j].partial_cmp(&w[i][i]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| w[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&col| {
            let mut vector: Vec<T> = v.iter().map(|row| row[col]).collect();
            let mut pivot = 0;
            for (i, x) in vector.iter().enumerate() {
                if x.abs() > vector[pivot].abs() {
                    pivot = i;
                }
            }
            if vector[pivot] < T::zero() {
                vector.iter_mut().for_each(|x| *x = -*x);
            }
            vector
        })
        .collect();
    Ok(SymmetricEigen { values, vectors })
}

/// How missing cells are handled before PCA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Imputation {
    /// Drop every dataset with a missing cell.
    #[default]
    CompleteRowsOnly,
    /// Replace missing cells with 0.
    ZeroFill,
    /// Replace missing cells with the mean of the present cells of the column.
    ColumnMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaProjection<T> {
    pub dataset_ids: Vec<DatasetId>,
    /// Per dataset, one score per retained component.
    pub coordinates: Vec<Vec<T>>,
    /// Retained principal axes, orthonormal, each of length `n`.
    pub components: Vec<Vec<T>>,
    pub explained_variance_ratio: Vec<T>,
    /// All `n` covariance eigenvalues, descending.
    pub eigenvalues: Vec<T>,
    pub column_means: Vec<T>,
    pub imputation: Imputation,
}

impl<T: Scalar> PcaProjection<T> {
    /// Ratios for all `n` components, summing to one.
    pub fn full_explained_variance_ratio(&self) -> Vec<T> {
        explained_ratios(&self.eigenvalues)
    }

    /// Scores of an arbitrary point of the original space.
    pub fn project(&self, point: &[T]) -> Vec<T> {
        self.components
            .iter()
            .map(|axis| {
                axis.iter()
                    .zip(point.iter().zip(&self.column_means))
                    .fold(T::zero(), |acc, (&w, (&x, &mu))| acc + w * (x - mu))
            })
            .collect()
    }

    /// Maps scores back to centered coordinates of the original space.
    pub fn back_project(&self, scores: &[T]) -> Vec<T> {
        let n = self.column_means.len();
        let mut out = vec![T::zero(); n];
        for (axis, &s) in self.components.iter().zip(scores) {
            for (o, &w) in out.iter_mut().zip(axis) {
                *o = *o + s * w;
            }
        }
        out
    }
}

fn explained_ratios<T: Scalar>(eigenvalues: &[T]) -> Vec<T> {
    let clamped: Vec<T> = eigenvalues.iter().map(|&l| l.max(T::zero())).collect();
    let total = clamped.iter().fold(T::zero(), |a, &l| a + l);
    clamped.iter().map(|&l| l / total).collect()
}

fn impute<T: Scalar>(
    matrix: &PerformanceMatrix<T>,
    imputation: Imputation,
) -> (Vec<DatasetId>, Vec<Vec<T>>) {
    let n = matrix.dimension();
    let fill: Vec<T> = match imputation {
        Imputation::ColumnMean => (0..n)
            .map(|a| {
                let (sum, count) = (0..matrix.dataset_count())
                    .filter_map(|d| matrix.cell(d, a))
                    .fold((T::zero(), 0usize), |(s, c), v| (s + v, c + 1));
                if count == 0 {
                    T::zero()
                } else {
                    sum / T::from_usize(count).unwrap()
                }
            })
            .collect(),
        _ => vec![T::zero(); n],
    };
    matrix
        .rows()
        .filter(|(_, row)| imputation != Imputation::CompleteRowsOnly || row.iter().all(Option::is_some))
        .map(|(d, row)| {
            let filled = row
                .iter()
                .zip(&fill)
                .map(|(v, &f)| v.unwrap_or(f))
                .collect();
            (d.clone(), filled)
        })
        .unzip()
}

/// Projects the datasets onto the top `k` principal axes of their
/// (imputed, column-centered) scores.
pub fn pca_project<T: Scalar>(
    matrix: &PerformanceMatrix<T>,
    k: usize,
    imputation: Imputation,
) -> Result<PcaProjection<T>, ReduceError> {
    let n = matrix.dimension();
    if k == 0 || k > n {
        return Err(ReduceError::BadComponentCount {
            requested: k,
            available: n,
        });
    }
    let (dataset_ids, mut data) = impute(matrix, imputation);
    let m = data.len();
    if m < 2 {
        return Err(ReduceError::TooFewRows(m));
    }
    let count = T::from_usize(m).unwrap();
    let column_means: Vec<T> = (0..n)
        .map(|j| data.iter().fold(T::zero(), |a, row| a + row[j]) / count)
        .collect();
    for row in &mut data {
        for (x, &mu) in row.iter_mut().zip(&column_means) {
            *x = *x - mu;
        }
    }
    let eigen = eigh_symmetric(&covariance(&data)?)?;
    if eigen.values.iter().all(|&l| l <= T::zero()) {
        return Err(ReduceError::ZeroVariance);
    }
    let components: Vec<Vec<T>> = eigen.vectors[..k].to_vec();
    let coordinates = data
        .iter()
        .map(|row| {
            components
                .iter()
                .map(|axis| axis.iter().zip(row).fold(T::zero(), |a, (&w, &x)| a + w * x))
                .collect()
        })
        .collect();
    let explained_variance_ratio = explained_ratios(&eigen.values)[..k].to_vec();
    Ok(PcaProjection {
        dataset_ids,
        coordinates,
        components,
        explained_variance_ratio,
        eigenvalues: eigen.values,
        column_means,
        imputation,
    })
}

/// Pearson product-moment correlation.
pub fn pearson<T: Scalar>(a: &[T], b: &[T]) -> Result<T, ReduceError> {
    if a.len() != b.len() {
        return Err(ReduceError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(ReduceError::TooFewValues(a.len()));
    }
    let count = T::from_usize(a.len()).unwrap();
    let mean_a = a.iter().fold(T::zero(), |s, &x| s + x) / count;
    let mean_b = b.iter().fold(T::zero(), |s, &x| s + x) / count;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - mean_a, y - mean_b);
        sab = sab + dx * dy;
        saa = saa + dx * dx;
        sbb = sbb + dy * dy;
    }
    if saa == T::zero() || sbb == T::zero() {
        return Err(ReduceError::ConstantInput);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).max(-T::one()).min(T::one()))
}
