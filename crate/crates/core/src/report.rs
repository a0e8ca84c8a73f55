//! Emission of result tables: CSV files and a Markdown summary.
//!
//! Every number is rounded half-to-even to 4 decimals here and nowhere else.

use std::fmt::Write as _;

use crate::ingest::ValidationReport;
use crate::metrics::MetricReport;
use crate::reduce::PcaProjection;
use crate::scalar::{fmt4, Scalar};
use crate::select::SearchResult;

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(writer.into_inner().expect("in-memory csv writer")).expect("UTF-8 fields")
}

fn num<T: Scalar>(value: T) -> String {
    fmt4(value.to_f64().unwrap_or(f64::NAN))
}

/// `dataset,difficulty,variance,present_count`; undefined variance is empty.
pub fn metrics_csv<T: Scalar>(report: &MetricReport<T>) -> String {
    let mut out = writer();
    out.write_record(["dataset", "difficulty", "variance", "present_count"])
        .expect("in-memory write");
    for row in &report.rows {
        out.write_record([
            row.dataset.to_string(),
            num(row.difficulty),
            row.variance.map(num).unwrap_or_default(),
            row.present_count.to_string(),
        ])
        .expect("in-memory write");
    }
    finish(out)
}

/// `rank,size,datasets,score`, datasets `;`-joined in sorted order. One block
/// of rows per search result, in the given order.
pub fn selections_csv<T: Scalar>(results: &[SearchResult<T>]) -> String {
    let mut out = writer();
    out.write_record(["rank", "size", "datasets", "score"])
        .expect("in-memory write");
    for result in results {
        for selection in &result.top {
            out.write_record([
                selection.rank.to_string(),
                result.size.to_string(),
                selection.joined(),
                num(selection.score),
            ])
            .expect("in-memory write");
        }
    }
    finish(out)
}

/// `dataset,pc1,...,pck`.
pub fn pca_csv<T: Scalar>(projection: &PcaProjection<T>) -> String {
    let mut out = writer();
    let k = projection.components.len();
    let mut header = vec!["dataset".to_string()];
    header.extend((1..=k).map(|i| format!("pc{i}")));
    out.write_record(&header).expect("in-memory write");
    for (dataset, coords) in projection.dataset_ids.iter().zip(&projection.coordinates) {
        let mut fields = vec![dataset.to_string()];
        fields.extend(coords.iter().map(|&c| num(c)));
        out.write_record(&fields).expect("in-memory write");
    }
    finish(out)
}

/// Header `pc1,...,pck` and a single line of explained-variance ratios.
pub fn pca_ratios_csv<T: Scalar>(projection: &PcaProjection<T>) -> String {
    let k = projection.explained_variance_ratio.len();
    let header: Vec<String> = (1..=k).map(|i| format!("pc{i}")).collect();
    let values: Vec<String> = projection.explained_variance_ratio.iter().map(|&r| num(r)).collect();
    format!("{}\n{}\n", header.join(","), values.join(","))
}

/// Inputs of the Markdown summary. Every section is optional.
#[derive(Default)]
pub struct Summary<'a, T> {
    pub source: &'a str,
    pub validation: Option<&'a ValidationReport>,
    pub metrics: Option<&'a MetricReport<T>>,
    pub selections: &'a [SearchResult<T>],
    pub pca: Option<&'a PcaProjection<T>>,
}

pub fn markdown<T: Scalar>(summary: &Summary<'_, T>) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Algorithm performance space report\n");
    let _ = writeln!(md, "Input: `{}`\n", summary.source);

    if let Some(v) = summary.validation {
        let _ = writeln!(md, "## Input\n");
        let _ = writeln!(md, "| datasets | algorithms | present cells | missing cells | complete rows |");
        let _ = writeln!(md, "|---:|---:|---:|---:|---:|");
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} |\n",
            v.dataset_count, v.algorithm_count, v.present_cells, v.missing_cells, v.complete_row_count
        );
    }

    if let Some(report) = summary.metrics {
        let _ = writeln!(md, "## Difficulty and Variance\n");
        if let Some(s) = report.difficulty_summary() {
            let _ = writeln!(
                md,
                "Difficulty over {} datasets: mean {}, median {}, min {}, max {}.\n",
                s.count,
                num(s.mean),
                num(s.median),
                num(s.min),
                num(s.max)
            );
        }
        if let Some(s) = report.variance_summary() {
            let _ = writeln!(
                md,
                "Variance over {} datasets with at least two results: mean {}, median {}, min {}, max {}.\n",
                s.count,
                num(s.mean),
                num(s.median),
                num(s.min),
                num(s.max)
            );
        }
        let _ = writeln!(md, "| dataset | difficulty | variance | results |");
        let _ = writeln!(md, "|---|---:|---:|---:|");
        for row in &report.rows {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} |",
                row.dataset,
                num(row.difficulty),
                row.variance.map(num).unwrap_or_else(|| "n/a".into()),
                row.present_count
            );
        }
        md.push('\n');
    }

    if !summary.selections.is_empty() {
        let _ = writeln!(md, "## Selections\n");
        let _ = writeln!(md, "| mode | size | rank | datasets | diversity |");
        let _ = writeln!(md, "|---|---:|---:|---|---:|");
        for result in summary.selections {
            for s in &result.top {
                let _ = writeln!(
                    md,
                    "| {} | {} | {} | {} | {} |",
                    result.mode.as_str(),
                    result.size,
                    s.rank,
                    s.datasets.iter().map(|d| d.as_str()).collect::<Vec<_>>().join(", "),
                    num(s.score)
                );
            }
        }
        md.push('\n');
    }

    if let Some(p) = summary.pca {
        let _ = writeln!(md, "## PCA\n");
        let _ = writeln!(md, "{} datasets, imputation `{:?}`.\n", p.dataset_ids.len(), p.imputation);
        let _ = writeln!(md, "| component | explained variance |");
        let _ = writeln!(md, "|---:|---:|");
        for (i, r) in p.explained_variance_ratio.iter().enumerate() {
            let _ = writeln!(md, "| {} | {} |", i + 1, num(*r));
        }
        md.push('\n');
    }
    md
}
