//! Long and wide CSV readers/writers for performance tables.
//!
//! Long form has the header `dataset,algorithm,score`, one cell per line.
//! Wide form has the header `dataset,<algorithm>...`, one dataset per line.
//! In both, an empty field or the literal `NaN` is a missing cell. Scores use
//! a plain decimal point; no locale-specific separators are accepted.

use std::collections::HashSet;

use thiserror::Error;

use crate::matrix::{AlgorithmId, DatasetId, MatrixError, PerformanceMatrix, Record, ScoreMeta};
use crate::scalar::Scalar;

pub const LONG_HEADER: [&str; 3] = ["dataset", "algorithm", "score"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    MalformedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: row has {found} cells but the header has {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: cannot parse score {field:?}")]
    BadScore { line: usize, field: String },
    #[error("line {line}: {source}")]
    Row { line: usize, source: MatrixError },
    #[error("{0}")]
    Matrix(#[from] MatrixError),
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("empty document")]
    Empty,
}

impl IngestError {
    /// 1-based input line the error points at, when it has one.
    pub fn line(&self) -> Option<usize> {
        match self {
            IngestError::MalformedHeader { line, .. }
            | IngestError::MalformedRow { line, .. }
            | IngestError::RaggedRow { line, .. }
            | IngestError::BadScore { line, .. }
            | IngestError::Row { line, .. }
            | IngestError::Csv { line, .. } => Some(*line),
            IngestError::Matrix(_) | IngestError::Empty => None,
        }
    }
}

/// Table layout of a CSV document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Long,
    Wide,
}

/// A header starting `dataset,algorithm,score` is long, anything else wide.
pub fn detect_format(text: &str) -> TableFormat {
    let text = strip_bom(text);
    let first = text.lines().next().unwrap_or("");
    let fields: Vec<&str> = first.trim_end_matches('\r').split(',').collect();
    if fields.len() >= 3 && fields[..3] == LONG_HEADER {
        TableFormat::Long
    } else {
        TableFormat::Wide
    }
}

pub fn parse<T: Scalar>(text: &str, format: TableFormat) -> Result<PerformanceMatrix<T>, IngestError> {
    match format {
        TableFormat::Long => parse_long(text),
        TableFormat::Wide => parse_wide(text),
    }
}

fn strip_bom(text: &str) -> &str {
    text.strip_prefix('\u{feff}').unwrap_or(text)
}

struct Line {
    number: usize,
    fields: Vec<String>,
}

fn read_lines(text: &str) -> Result<Vec<Line>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(strip_bom(text).as_bytes());
    let mut lines = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| IngestError::Csv {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let number = record.position().map(|p| p.line() as usize).unwrap_or(0);
        lines.push(Line {
            number,
            fields: record.iter().map(str::to_string).collect(),
        });
    }
    Ok(lines)
}

fn is_decimal_literal(field: &str) -> bool {
    let body = field.strip_prefix(['+', '-']).unwrap_or(field);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], Some(&body[pos + 1..])),
        None => (body, None),
    };
    let mut parts = mantissa.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next().unwrap_or("");
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    let mantissa_ok = digits(int) && digits(frac) && !(int.is_empty() && frac.is_empty());
    let exponent_ok = exponent.is_none_or(|e| {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        !e.is_empty() && digits(e)
    });
    mantissa_ok && exponent_ok
}

fn parse_score<T: Scalar>(field: &str, line: usize) -> Result<Option<T>, IngestError> {
    if field.is_empty() || field == "NaN" {
        return Ok(None);
    }
    if !is_decimal_literal(field) {
        return Err(IngestError::BadScore {
            line,
            field: field.to_string(),
        });
    }
    field.parse::<T>().map(Some).map_err(|_| IngestError::BadScore {
        line,
        field: field.to_string(),
    })
}

fn named<I>(make: impl Fn(String) -> Result<I, MatrixError>, name: &str, line: usize) -> Result<I, IngestError> {
    make(name.to_string()).map_err(|source| IngestError::Row { line, source })
}

/// Builds the matrix, attributing a cell-level failure to the input line
/// that introduced it.
fn assemble<T: Scalar>(
    axes: Vec<AlgorithmId>,
    records: Vec<(usize, Record<T>)>,
) -> Result<PerformanceMatrix<T>, IngestError> {
    let lines: Vec<usize> = records.iter().map(|(l, _)| *l).collect();
    let records: Vec<Record<T>> = records.into_iter().map(|(_, r)| r).collect();
    PerformanceMatrix::build_with_axes(axes, records.clone(), ScoreMeta::default()).map_err(|err| {
        let line = match &err {
            MatrixError::DuplicateCell { dataset, algorithm }
            | MatrixError::ScoreOutOfRange {
                dataset, algorithm, ..
            } => records
                .iter()
                .zip(&lines)
                .filter(|((d, a, _), _)| d.as_str() == dataset && a.as_str() == algorithm)
                .map(|(_, l)| *l)
                .last(),
            MatrixError::EmptyRow(dataset) => records
                .iter()
                .zip(&lines)
                .find(|((d, _, _), _)| d.as_str() == dataset)
                .map(|(_, l)| *l),
            _ => None,
        };
        match line {
            Some(line) => IngestError::Row { line, source: err },
            None => IngestError::Matrix(err),
        }
    })
}

/// Parses the long form `dataset,algorithm,score`.
pub fn parse_long<T: Scalar>(text: &str) -> Result<PerformanceMatrix<T>, IngestError> {
    let lines = read_lines(text)?;
    let (header, body) = lines.split_first().ok_or(IngestError::Empty)?;
    if header.fields != LONG_HEADER {
        return Err(IngestError::MalformedHeader {
            line: header.number,
            reason: format!("expected `dataset,algorithm,score`, found `{}`", header.fields.join(",")),
        });
    }
    let mut records = Vec::with_capacity(body.len());
    for line in body {
        if line.fields.len() != 3 {
            return Err(IngestError::MalformedRow {
                line: line.number,
                expected: 3,
                found: line.fields.len(),
            });
        }
        let dataset = named(DatasetId::new, &line.fields[0], line.number)?;
        let algorithm = named(AlgorithmId::new, &line.fields[1], line.number)?;
        let score = parse_score(&line.fields[2], line.number)?;
        records.push((line.number, (dataset, algorithm, score)));
    }
    assemble(Vec::new(), records)
}

/// Parses the wide form `dataset,<algorithm>...`.
pub fn parse_wide<T: Scalar>(text: &str) -> Result<PerformanceMatrix<T>, IngestError> {
    let lines = read_lines(text)?;
    let (header, body) = lines.split_first().ok_or(IngestError::Empty)?;
    if header.fields.first().map(String::as_str) != Some("dataset") {
        return Err(IngestError::MalformedHeader {
            line: header.number,
            reason: "first header cell must be `dataset`".to_string(),
        });
    }
    let mut seen = HashSet::new();
    let mut axes = Vec::with_capacity(header.fields.len() - 1);
    for name in &header.fields[1..] {
        let algorithm = AlgorithmId::new(name.as_str()).map_err(|e| IngestError::MalformedHeader {
            line: header.number,
            reason: e.to_string(),
        })?;
        if !seen.insert(algorithm.clone()) {
            return Err(IngestError::MalformedHeader {
                line: header.number,
                reason: format!("algorithm {name:?} appears twice"),
            });
        }
        axes.push(algorithm);
    }

    let mut records = Vec::new();
    for line in body {
        if line.fields.len() != header.fields.len() {
            return Err(IngestError::RaggedRow {
                line: line.number,
                expected: header.fields.len(),
                found: line.fields.len(),
            });
        }
        let dataset = named(DatasetId::new, &line.fields[0], line.number)?;
        for (algorithm, field) in axes.iter().zip(&line.fields[1..]) {
            let score = parse_score(field, line.number)?;
            records.push((line.number, (dataset.clone(), algorithm.clone(), score)));
        }
    }
    assemble(axes, records)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory csv writer cannot fail");
    String::from_utf8(bytes).expect("csv output built from UTF-8 fields")
}

fn score_field<T: Scalar>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the wide form. Missing cells become empty fields; scores use the
/// shortest decimal that reads back to the same value.
pub fn write_wide<T: Scalar>(matrix: &PerformanceMatrix<T>) -> String {
    let mut out = writer();
    let mut header = vec!["dataset".to_string()];
    header.extend(matrix.algorithms().iter().map(|a| a.to_string()));
    out.write_record(&header).expect("in-memory write");
    for (dataset, row) in matrix.rows() {
        let mut fields = vec![dataset.to_string()];
        fields.extend(row.iter().map(|v| score_field(*v)));
        out.write_record(&fields).expect("in-memory write");
    }
    finish(out)
}

/// Writes the long form, one line per cell including missing ones so that
/// every column survives a round trip.
pub fn write_long<T: Scalar>(matrix: &PerformanceMatrix<T>) -> String {
    let mut out = writer();
    out.write_record(LONG_HEADER).expect("in-memory write");
    for (dataset, algorithm, score) in matrix.records() {
        out.write_record([dataset.to_string(), algorithm.to_string(), score_field(score)])
            .expect("in-memory write");
    }
    finish(out)
}

/// Cell and row counts of a matrix, plus per-dataset warnings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub dataset_count: usize,
    pub algorithm_count: usize,
    pub present_cells: usize,
    pub missing_cells: usize,
    pub complete_row_count: usize,
    pub warnings: Vec<String>,
}

pub fn validate<T: Scalar>(matrix: &PerformanceMatrix<T>) -> ValidationReport {
    let mut report = ValidationReport {
        dataset_count: matrix.dataset_count(),
        algorithm_count: matrix.dimension(),
        present_cells: 0,
        missing_cells: 0,
        complete_row_count: 0,
        warnings: Vec::new(),
    };
    for (dataset, row) in matrix.rows() {
        let present = row.iter().filter(|v| v.is_some()).count();
        report.present_cells += present;
        report.missing_cells += row.len() - present;
        if present == row.len() {
            report.complete_row_count += 1;
        } else {
            if present == 1 {
                report
                    .warnings
                    .push(format!("{dataset}: only 1 present score, variance undefined"));
            }
            report.warnings.push(format!(
                "{dataset}: {} of {} scores missing, excluded from selection search by default",
                row.len() - present,
                row.len()
            ));
        }
    }
    report
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "datasets:      {}", self.dataset_count)?;
        writeln!(f, "algorithms:    {}", self.algorithm_count)?;
        writeln!(f, "present cells: {}", self.present_cells)?;
        writeln!(f, "missing cells: {}", self.missing_cells)?;
        writeln!(f, "complete rows: {}", self.complete_row_count)?;
        writeln!(f, "warnings:      {}", self.warnings.len())?;
        for warning in &self.warnings {
            writeln!(f, "  - {warning}")?;
        }
        Ok(())
    }
}
