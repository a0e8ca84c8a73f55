//! Test-only oracles and fixture readers, written independently of the
//! library code paths they check.
#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    fs::read_to_string(fixture_path(name)).expect("fixture readable")
}

/// Reported Difficulty and Variance (`None` for `NaN`) per dataset.
pub fn expected_metrics() -> Vec<(String, f64, Option<f64>)> {
    fixture_text("thesis_metrics.csv")
        .lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let variance = if f[2] == "NaN" { None } else { Some(f[2].parse().unwrap()) };
            (f[0].to_string(), f[1].parse().unwrap(), variance)
        })
        .collect()
}

pub struct PublishedSelection {
    pub set: usize,
    pub datasets: Vec<String>,
    pub diversity: f64,
}

pub fn published_selections() -> Vec<PublishedSelection> {
    fixture_text("thesis_selections.csv")
        .lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            PublishedSelection {
                set: f[0].parse().unwrap(),
                datasets: f[1].split(';').map(str::to_string).collect(),
                diversity: f[2].parse().unwrap(),
            }
        })
        .collect()
}

/// Mean absolute difference over ordered pairs `i != j`, divided by `m(m-1)`.
pub fn oracle_variance(values: &[f64]) -> Option<f64> {
    let m = values.len();
    if m < 2 {
        return None;
    }
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                total += (values[i] - values[j]).abs();
            }
        }
    }
    Some(total / (m * (m - 1)) as f64)
}

pub fn oracle_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut sq = 0.0;
    for k in 0..a.len() {
        let d = b[k] - a[k];
        sq += d * d;
    }
    sq.sqrt()
}

/// Diversity with the n-th root volume, via `E[d^2] - E[d]^2` for the
/// distance variance and a log-mean for the geometric mean of the ranges.
pub fn oracle_diversity(points: &[Vec<f64>]) -> f64 {
    let n = points[0].len();
    let mut ds = Vec::new();
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i < j {
                ds.push(oracle_distance(&points[i], &points[j]));
            }
        }
    }
    let count = ds.len() as f64;
    let mean = ds.iter().sum::<f64>() / count;
    let mean_sq = ds.iter().map(|d| d * d).sum::<f64>() / count;
    let var = (mean_sq - mean * mean).max(0.0);
    let mut log_sum = 0.0;
    for axis in 0..n {
        let mut col: Vec<f64> = points.iter().map(|p| p[axis]).collect();
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let range = col[col.len() - 1] - col[0];
        if range == 0.0 {
            return 0.0;
        }
        log_sum += range.ln();
    }
    (1.0 - var / (n as f64 / 4.0)) * (log_sum / n as f64).exp()
}

/// `(1/(m-1)) * sum x x^T` by explicit outer products.
pub fn oracle_covariance(data: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = data[0].len();
    let mut acc = vec![vec![0.0; n]; n];
    for x in data {
        for i in 0..n {
            for j in 0..n {
                acc[i][j] += x[i] * x[j];
            }
        }
    }
    let d = (data.len() - 1) as f64;
    acc.iter().map(|r| r.iter().map(|v| v / d).collect()).collect()
}

/// Number of `circle` elements in a well-formed SVG document; panics when the
/// document does not parse or its root is not `svg`.
pub fn svg_circle_count(svg: &str) -> usize {
    let doc = roxmltree::Document::parse(svg).expect("well-formed XML");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    doc.descendants().filter(|n| n.tag_name().name() == "circle").count()
}

/// `(cx, cy, title)` of every circle.
pub fn svg_circles(svg: &str) -> Vec<(f64, f64, String)> {
    let doc = roxmltree::Document::parse(svg).expect("well-formed XML");
    doc.descendants()
        .filter(|n| n.tag_name().name() == "circle")
        .map(|n| {
            let title = n
                .children()
                .find(|c| c.tag_name().name() == "title")
                .and_then(|t| t.text())
                .unwrap_or("")
                .to_string();
            (
                n.attribute("cx").unwrap().parse().unwrap(),
                n.attribute("cy").unwrap().parse().unwrap(),
                title,
            )
        })
        .collect()
}
