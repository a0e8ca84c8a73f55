//! Operation examples checked against the bundled benchmark tables.

mod common;

use aps_core::ingest::{self, validate};
use aps_core::metrics::{self, metric_table, DifficultyOrientation, VolumeRoot};
use aps_core::reduce::{pca_project, pearson, Imputation};
use aps_core::select::{exhaustive_search, greedy_search, score_selection, SearchMode, SelectError};
use aps_core::viz::{mini_aps_grid, mini_aps_svg, pca_scatter_svg, PlotSpec};
use aps_core::{fixture, matrix::build_matrix, PerformanceMatrix};
use approx::assert_abs_diff_eq;
use common::*;

fn thesis() -> PerformanceMatrix {
    ingest::parse_wide(&fixture_text("thesis_results.csv")).unwrap()
}

#[test]
fn bundled_fixture_matches_file_on_disk() {
    assert_eq!(fixture::RESULTS_CSV, fixture_text("thesis_results.csv"));
    assert_eq!(fixture::results::<f64>().unwrap(), thesis());
}

#[test]
fn complete_rows_of_fixture() {
    let m = thesis();
    let complete = m.complete_rows();
    assert_eq!(complete.dataset_count(), 39);
    assert_eq!(complete.algorithms(), m.algorithms());
    assert_eq!(complete.complete_rows(), complete);
}

#[test]
fn row_vector_epinions() {
    let m = thesis();
    assert_eq!(
        m.row_vector("Epinions").unwrap(),
        &[Some(0.0722), Some(0.3757), None, None, None]
    );
}

#[test]
fn normalization_anchors_jester_bpr() {
    let m = thesis();
    let bpr = m.algorithm_index("BPR").unwrap();
    let jester = m.dataset_index("Jester").unwrap();
    let max = (0..m.dataset_count()).filter_map(|d| m.cell(d, bpr)).fold(0.0, f64::max);
    assert_eq!(max, 0.4854);
    let normalized = m.normalize_per_axis().unwrap();
    assert_eq!(normalized.cell(jester, bpr), Some(1.0));
    for a in 0..normalized.dimension() {
        let col: Vec<f64> = (0..normalized.dataset_count()).filter_map(|d| normalized.cell(d, a)).collect();
        assert!(col.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(col.iter().any(|&v| (v - 1.0).abs() <= 1e-12));
    }
}

#[test]
fn validation_of_fixture() {
    let report = validate(&thesis());
    assert_eq!(report.dataset_count, 71);
    assert_eq!(report.algorithm_count, 5);
    assert_eq!(report.present_cells, 268);
    assert_eq!(report.missing_cells, 71 * 5 - 268);
    assert_eq!(report.complete_row_count, 39);
    let single = thesis()
        .rows()
        .filter(|(_, r)| r.iter().filter(|v| v.is_some()).count() == 1)
        .count();
    assert_eq!(report.warnings.len(), single + (71 - 39));
}

#[test]
fn write_wide_of_fixture() {
    let m = thesis();
    let text = ingest::write_wide(&m);
    assert_eq!(text.lines().count(), 72);
    assert_eq!(ingest::parse_wide::<f64>(&text).unwrap(), m);
    assert_eq!(ingest::parse_long::<f64>(&ingest::write_long(&m)).unwrap(), m);
}

#[test]
fn metric_table_extremes_and_location() {
    let report = metric_table(&thesis(), DifficultyOrientation::OneMinusMean).unwrap();
    let hardest = report
        .rows
        .iter()
        .max_by(|a, b| a.difficulty.partial_cmp(&b.difficulty).unwrap())
        .unwrap();
    assert_eq!(hardest.dataset.as_str(), "Amazon_Electronics");
    assert_abs_diff_eq!(hardest.difficulty, 0.9893, epsilon = 5e-5);
    let easiest = report
        .rows
        .iter()
        .min_by(|a, b| a.difficulty.partial_cmp(&b.difficulty).unwrap())
        .unwrap();
    assert_eq!(easiest.dataset.as_str(), "Jester");

    let calmest = report
        .rows
        .iter()
        .filter(|r| r.variance.is_some())
        .min_by(|a, b| a.variance.partial_cmp(&b.variance).unwrap())
        .unwrap();
    assert_eq!(calmest.dataset.as_str(), "Amazon_CDs_and_Vinyl");
    assert_abs_diff_eq!(calmest.variance.unwrap(), 0.0028, epsilon = 5e-5);
    let wildest = report
        .rows
        .iter()
        .filter(|r| r.variance.is_some())
        .max_by(|a, b| a.variance.partial_cmp(&b.variance).unwrap())
        .unwrap();
    assert_eq!(wildest.dataset.as_str(), "Epinions");

    let s = report.difficulty_summary().unwrap();
    assert_abs_diff_eq!(s.mean, 0.886, epsilon = 2e-3);
    assert_abs_diff_eq!(s.median, 0.921, epsilon = 2e-3);
    let v = report.variance_summary().unwrap();
    assert_abs_diff_eq!(v.mean, 0.03, epsilon = 5e-3);
    assert_abs_diff_eq!(v.median, 0.02, epsilon = 5e-3);
}

#[test]
fn movielens_distance_matches_direct_computation() {
    let m = thesis();
    let a = m.row_vector("MovieLens1m").unwrap();
    let b = m.row_vector("MovieLens100k").unwrap();
    let d = metrics::pairwise_distances(&[a, b]).unwrap()[0];
    let unwrap = |r: &[Option<f64>]| r.iter().map(|v| v.unwrap()).collect::<Vec<_>>();
    assert_abs_diff_eq!(d, oracle_distance(&unwrap(a), &unwrap(b)), epsilon = 1e-15);
    assert_abs_diff_eq!(d, 0.06524, epsilon = 1e-4);
}

#[test]
fn published_selection_scores() {
    let m = thesis();
    for published in published_selections() {
        let names: Vec<&str> = published.datasets.iter().map(String::as_str).collect();
        let breakdown = score_selection(&m, &names, VolumeRoot::NthRoot).unwrap();
        let points: Vec<Vec<f64>> = names
            .iter()
            .map(|n| m.row_vector(n).unwrap().iter().map(|v| v.unwrap()).collect())
            .collect();
        assert_abs_diff_eq!(breakdown.score, oracle_diversity(&points), epsilon = 1e-12);
        if published.set == 3 {
            assert!(breakdown.score <= 5e-4, "set 3 scored {}", breakdown.score);
        } else {
            assert_abs_diff_eq!(breakdown.score, published.diversity, epsilon = 1e-3);
        }
    }
}

#[test]
fn selection_with_incomplete_dataset_is_rejected() {
    assert_eq!(
        score_selection(&thesis(), &["Jester", "Epinions"], VolumeRoot::NthRoot),
        Err(SelectError::IncompleteDataset("Epinions".into()))
    );
}

#[test]
fn exhaustive_examples() {
    let m = thesis();
    let r = exhaustive_search(&m, 2, SearchMode::Max, 1, VolumeRoot::NthRoot).unwrap();
    assert_eq!(r.candidates_evaluated, 741);
    assert_eq!(r.top[0].joined(), "Food;Jester");
    assert_abs_diff_eq!(r.top[0].score, 0.4698, epsilon = 1e-3);

    let r = exhaustive_search(&m, 3, SearchMode::Max, 1, VolumeRoot::NthRoot).unwrap();
    assert_eq!(r.candidates_evaluated, 9139);
    assert_eq!(r.top[0].joined(), "Food;Jester;MovieLensLatestSmall");
    assert_abs_diff_eq!(r.top[0].score, 0.4468, epsilon = 1e-3);

    let r = exhaustive_search(&m, 2, SearchMode::Min, 1, VolumeRoot::NthRoot).unwrap();
    assert_eq!(r.top[0].joined(), "FourSquareNYC;MarketBiasModcloth");
    assert!(r.top[0].score <= 5e-4);
}

#[test]
fn greedy_quality_on_fixture() {
    let m = thesis();
    let exact = exhaustive_search(&m, 4, SearchMode::Max, 1, VolumeRoot::NthRoot).unwrap();
    let greedy = greedy_search(&m, 4, SearchMode::Max, VolumeRoot::NthRoot).unwrap();
    let (e, g) = (exact.top[0].score, greedy.top[0].score);
    assert!(g <= e);
    assert!(g >= 0.85 * e, "greedy {g} vs exhaustive {e}");
    assert_eq!(
        greedy_search(&m, 2, SearchMode::Max, VolumeRoot::NthRoot).unwrap(),
        exhaustive_search(&m, 2, SearchMode::Max, 1, VolumeRoot::NthRoot).unwrap()
    );
}

#[test]
fn mini_aps_itemknn_bpr_anchors_jester() {
    let svg = mini_aps_svg(&thesis(), "ItemKNN", "BPR", &PlotSpec::default()).unwrap();
    let circles = svg_circles(&svg);
    let plotted = thesis()
        .rows()
        .filter(|(_, r)| r[0].is_some() && r[1].is_some())
        .count();
    assert_eq!(circles.len(), plotted);
    let max_x = circles.iter().map(|c| c.0).fold(f64::MIN, f64::max);
    let min_y = circles.iter().map(|c| c.1).fold(f64::MAX, f64::min);
    let jester = circles.iter().find(|c| c.2 == "Jester").unwrap();
    assert_eq!(jester.0, max_x);
    assert_eq!(jester.1, min_y);
    // default 600 px frame: x = 1 lands at 576, y = 1 at 40
    assert_eq!(max_x, 576.0);
    assert_eq!(min_y, 40.0);
}

#[test]
fn mini_aps_single_dataset_sits_at_one_one() {
    let m = build_matrix(vec![("only", "X", Some(0.2)), ("only", "Y", Some(0.05))]).unwrap();
    let circles = svg_circles(&mini_aps_svg(&m, "X", "Y", &PlotSpec::default()).unwrap());
    assert_eq!(circles.len(), 1);
    assert_eq!((circles[0].0, circles[0].1), (576.0, 40.0));
}

#[test]
fn mini_aps_grid_counts() {
    let grid = mini_aps_grid(&thesis(), &PlotSpec::default(), false).unwrap();
    assert_eq!(grid.plots.len(), 10);
    assert!(grid.warnings.is_empty());
    assert_eq!(grid.plots[0].file_name(), "mini_BPR_vs_ItemKNN.svg");
    assert_eq!(mini_aps_grid(&thesis(), &PlotSpec::default(), true).unwrap().plots.len(), 20);

    let two = build_matrix(vec![("d", "X", Some(0.2)), ("d", "Y", Some(0.1))]).unwrap();
    assert_eq!(mini_aps_grid(&two, &PlotSpec::default(), false).unwrap().plots.len(), 1);

    let mut records = Vec::new();
    for d in ["r1", "r2"] {
        for (i, a) in ["A", "B", "C", "D"].iter().enumerate() {
            records.push((d.to_string(), a.to_string(), Some(0.1 * (i + 1) as f64)));
        }
        records.push((d.to_string(), "E".to_string(), None));
    }
    records.push(("r3".into(), "E".into(), Some(0.3)));
    let isolated = build_matrix(records).unwrap();
    let grid = mini_aps_grid(&isolated, &PlotSpec::default(), false).unwrap();
    assert_eq!(grid.plots.len(), 6);
    assert_eq!(grid.warnings.len(), 4);
}

#[test]
fn pca_scatter_of_fixture() {
    let m = thesis();
    let p = pca_project(&m, 2, Imputation::ColumnMean).unwrap();
    let report = metric_table(&m, DifficultyOrientation::OneMinusMean).unwrap();
    let difficulty: Vec<Option<f64>> = report.rows.iter().map(|r| Some(r.difficulty)).collect();
    let spec = PlotSpec {
        color_by: Some(aps_core::ColorBy::Difficulty),
        ..PlotSpec::default()
    };
    let svg = pca_scatter_svg(&p, Some(&difficulty), &spec).unwrap();
    assert_eq!(svg_circle_count(&svg), 71);
    assert!(svg.contains("Component 1 (85%"), "x label missing 85%");

    let pc1: Vec<f64> = p.coordinates.iter().map(|c| c[0]).collect();
    let d: Vec<f64> = difficulty.iter().map(|v| v.unwrap()).collect();
    assert!(pearson(&pc1, &d).unwrap().abs() >= 0.90);
}
