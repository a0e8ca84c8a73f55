//! Search for the most and least diverse dataset selections.
//!
//! Only complete rows are eligible. Candidates are enumerated over the
//! eligible datasets sorted by name, so index order and name order agree and
//! results do not depend on the row order of the input matrix. Every ranking
//! is total: score first, then the lexicographically smaller name list.

use std::cmp::Ordering;

use rayon::prelude::*;
use thiserror::Error;

use crate::matrix::{DatasetId, PerformanceMatrix};
use crate::metrics::{self, DiversityBreakdown, MetricsError, VolumeRoot};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SelectError {
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error("dataset {0:?} has missing scores")]
    IncompleteDataset(String),
    #[error("invalid selection: {0}")]
    InvalidSelection(String),
    #[error("selection size {size} exceeds the {eligible} eligible datasets")]
    SizeTooLarge { size: usize, eligible: usize },
    #[error("selection size must be at least 2, got {0}")]
    SizeTooSmall(usize),
    #[error("no dataset has a score for every algorithm")]
    NoCompleteRows,
    #[error("top_k must be at least 1")]
    ZeroTopK,
    #[error("diversity needs at least 2 algorithms, matrix has {0}")]
    TooFewDimensions(usize),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Max,
    Min,
}

impl SearchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::Max => "max",
            SearchMode::Min => "min",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection<T> {
    /// Sorted by name.
    pub datasets: Vec<DatasetId>,
    pub score: T,
    /// 1-based position in its result list.
    pub rank: usize,
}

impl<T> Selection<T> {
    /// `;`-joined dataset names.
    pub fn joined(&self) -> String {
        self.datasets
            .iter()
            .map(DatasetId::as_str)
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<T> {
    pub mode: SearchMode,
    pub size: usize,
    pub candidates_evaluated: u64,
    pub top: Vec<Selection<T>>,
}

/// Scores a named selection. Names may come in any order.
pub fn score_selection<T: Scalar>(
    matrix: &PerformanceMatrix<T>,
    datasets: &[&str],
    variant: VolumeRoot,
) -> Result<DiversityBreakdown<T>, SelectError> {
    let mut names: Vec<&str> = datasets.to_vec();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(SelectError::InvalidSelection("duplicate dataset".into()));
    }
    if names.len() < 2 {
        return Err(SelectError::InvalidSelection(format!(
            "need at least 2 datasets, got {}",
            names.len()
        )));
    }
    let mut ids = Vec::with_capacity(names.len());
    let mut rows = Vec::with_capacity(names.len());
    for name in names {
        let index = matrix
            .dataset_index(name)
            .ok_or_else(|| SelectError::UnknownDataset(name.to_string()))?;
        if !matrix.is_complete_row(index) {
            return Err(SelectError::IncompleteDataset(name.to_string()));
        }
        ids.push(matrix.datasets()[index].clone());
        rows.push(matrix.row(index));
    }
    Ok(metrics::diversity(&ids, &rows, variant)?)
}

/// Eligible datasets, sorted by name, with unwrapped coordinates.
struct Pool<T> {
    names: Vec<DatasetId>,
    points: Vec<Vec<T>>,
}

impl<T: Scalar> Pool<T> {
    fn new(matrix: &PerformanceMatrix<T>, size: usize) -> Result<Self, SelectError> {
        if size < 2 {
            return Err(SelectError::SizeTooSmall(size));
        }
        if matrix.dimension() < 2 {
            return Err(SelectError::TooFewDimensions(matrix.dimension()));
        }
        let mut entries: Vec<(DatasetId, Vec<T>)> = matrix
            .rows()
            .filter_map(|(d, row)| {
                row.iter()
                    .copied()
                    .collect::<Option<Vec<T>>>()
                    .map(|p| (d.clone(), p))
            })
            .collect();
        if entries.is_empty() {
            return Err(SelectError::NoCompleteRows);
        }
        if size > entries.len() {
            return Err(SelectError::SizeTooLarge {
                size,
                eligible: entries.len(),
            });
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let (names, points) = entries.into_iter().unzip();
        Ok(Self { names, points })
    }

    fn len(&self) -> usize {
        self.names.len()
    }

    fn score<'a>(&'a self, combo: &[usize], buffer: &mut Vec<&'a [T]>, variant: VolumeRoot) -> T {
        buffer.clear();
        buffer.extend(combo.iter().map(|&i| self.points[i].as_slice()));
        metrics::diversity_score(buffer, variant)
    }

    fn selection(&self, combo: &[usize], score: T, rank: usize) -> Selection<T> {
        Selection {
            datasets: combo.iter().map(|&i| self.names[i].clone()).collect(),
            score,
            rank,
        }
    }
}

/// Exact binomial coefficient; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// The `rank`-th (0-based) `k`-combination of `0..m` in lexicographic order.
fn unrank(mut rank: u64, m: usize, k: usize) -> Vec<usize> {
    let mut combo = Vec::with_capacity(k);
    let mut x = 0;
    for i in 0..k {
        loop {
            let count = binomial((m - x - 1) as u64, (k - i - 1) as u64).unwrap();
            if rank < count {
                combo.push(x);
                x += 1;
                break;
            }
            rank -= count;
            x += 1;
        }
    }
    combo
}

/// Advances to the next combination in lexicographic order.
fn advance(combo: &mut [usize], m: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < m - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn rank_order<T: Scalar>(mode: SearchMode, a: (T, &[usize]), b: (T, &[usize])) -> Ordering {
    let by_score = a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal);
    let by_score = match mode {
        SearchMode::Max => by_score.reverse(),
        SearchMode::Min => by_score,
    };
    by_score.then_with(|| a.1.cmp(b.1))
}

/// Bounded best-first list, sorted by `rank_order`.
struct TopK<T> {
    mode: SearchMode,
    capacity: usize,
    entries: Vec<(T, Vec<usize>)>,
}

impl<T: Scalar> TopK<T> {
    fn new(mode: SearchMode, capacity: usize) -> Self {
        Self {
            mode,
            capacity,
            entries: Vec::with_capacity(capacity + 1),
        }
    }

    fn offer(&mut self, score: T, combo: &[usize]) {
        if self.entries.len() == self.capacity {
            let (worst_score, worst_combo) = self.entries.last().unwrap();
            if rank_order(self.mode, (score, combo), (*worst_score, worst_combo)) != Ordering::Less {
                return;
            }
        }
        let mode = self.mode;
        let at = self
            .entries
            .partition_point(|(s, c)| rank_order(mode, (*s, c), (score, combo)) == Ordering::Less);
        self.entries.insert(at, (score, combo.to_vec()));
        self.entries.truncate(self.capacity);
    }

    fn merge(mut self, other: Self) -> Self {
        for (score, combo) in &other.entries {
            self.offer(*score, combo);
        }
        self
    }
}

/// Evaluates every `size`-subset of the complete rows and keeps the `top_k`
/// best under `mode`. Work is split over the current rayon pool.
pub fn exhaustive_search<T: Scalar>(
    matrix: &PerformanceMatrix<T>,
    size: usize,
    mode: SearchMode,
    top_k: usize,
    variant: VolumeRoot,
) -> Result<SearchResult<T>, SelectError> {
    let chunks = rayon::current_num_threads() * 4;
    exhaustive_search_chunked(matrix, size, mode, top_k, variant, chunks)
}

/// As [`exhaustive_search`], with an explicit number of contiguous
/// enumeration chunks. The result does not depend on `chunks`.
pub fn exhaustive_search_chunked<T: Scalar>(
    matrix: &PerformanceMatrix<T>,
    size: usize,
    mode: SearchMode,
    top_k: usize,
    variant: VolumeRoot,
    chunks: usize,
) -> Result<SearchResult<T>, SelectError> {
    if top_k == 0 {
        return Err(SelectError::ZeroTopK);
    }
    let pool = Pool::new(matrix, size)?;
    let m = pool.len();
    let total = binomial(m as u64, size as u64)
        .ok_or_else(|| SelectError::InvalidSelection("candidate count overflows u64".into()))?;
    let chunks = (chunks.max(1) as u64).min(total);
    let bounds: Vec<(u64, u64)> = (0..chunks)
        .map(|c| (total * c / chunks, total * (c + 1) / chunks))
        .filter(|(lo, hi)| lo < hi)
        .collect();

    let best = bounds
        .par_iter()
        .map(|&(lo, hi)| {
            let mut top = TopK::new(mode, top_k);
            let mut combo = unrank(lo, m, size);
            let mut scratch = Vec::with_capacity(size);
            for step in lo..hi {
                let score = pool.score(&combo, &mut scratch, variant);
                top.offer(score, &combo);
                if step + 1 < hi {
                    advance(&mut combo, m);
                }
            }
            top
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(TopK::new(mode, top_k), TopK::merge);

    Ok(SearchResult {
        mode,
        size,
        candidates_evaluated: total,
        top: best
            .entries
            .iter()
            .enumerate()
            .map(|(i, (score, combo))| pool.selection(combo, *score, i + 1))
            .collect(),
    })
}

/// Best pair by exhaustive enumeration, then grows it one dataset at a time,
/// always taking the addition with the best resulting score under `mode`.
pub fn greedy_search<T: Scalar>(
    matrix: &PerformanceMatrix<T>,
    size: usize,
    mode: SearchMode,
    variant: VolumeRoot,
) -> Result<SearchResult<T>, SelectError> {
    let pool = Pool::new(matrix, size)?;
    let m = pool.len();
    let seed = exhaustive_search_chunked(matrix, 2, mode, 1, variant, 1)?;
    let mut evaluated = seed.candidates_evaluated;
    let seed = &seed.top[0];
    let mut current: Vec<usize> = seed
        .datasets
        .iter()
        .map(|d| pool.names.binary_search(d).expect("seed drawn from pool"))
        .collect();
    let mut score = seed.score;
    let mut scratch = Vec::with_capacity(size);

    while current.len() < size {
        let mut best: Option<(T, Vec<usize>)> = None;
        for candidate in (0..m).filter(|i| !current.contains(i)) {
            let mut trial = current.clone();
            let at = trial.partition_point(|&x| x < candidate);
            trial.insert(at, candidate);
            let trial_score = pool.score(&trial, &mut scratch, variant);
            evaluated += 1;
            let replace = match &best {
                None => true,
                Some((s, c)) => rank_order(mode, (trial_score, &trial), (*s, c)) == Ordering::Less,
            };
            if replace {
                best = Some((trial_score, trial));
            }
        }
        let (s, c) = best.expect("size <= eligible leaves a candidate");
        score = s;
        current = c;
    }

    Ok(SearchResult {
        mode,
        size,
        candidates_evaluated: evaluated,
        top: vec![pool.selection(&current, score, 1)],
    })
}
