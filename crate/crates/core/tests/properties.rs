//! Invariants of every module, checked on random inputs.

mod common;

use aps_core::ingest::{parse_long, parse_wide, write_long, write_wide};
use aps_core::matrix::{self, build_matrix};
use aps_core::metrics::{difficulty, diversity, variance, VolumeRoot};
use aps_core::reduce::{covariance, eigh_symmetric, pca_project, pearson, Imputation};
use aps_core::select::{binomial, exhaustive_search, exhaustive_search_chunked, greedy_search, score_selection, SearchMode};
use aps_core::viz::{mini_aps_svg, pca_scatter_svg, PlotSpec};
use aps_core::{DatasetId, PerformanceMatrix};
use common::*;
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

/// `rows x cols` matrix with random gaps, every row keeping a present cell.
fn gappy_matrix(rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> impl Strategy<Value = PerformanceMatrix> {
    (rows, cols).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(prop::option::weighted(0.8, unit()), n), m).prop_map(move |mut grid| {
            for row in &mut grid {
                if row.iter().all(Option::is_none) {
                    row[0] = Some(0.5);
                }
            }
            to_matrix(&grid)
        })
    })
}

fn complete_matrix(rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> impl Strategy<Value = PerformanceMatrix> {
    (rows, cols).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(unit(), n), m)
            .prop_map(|grid| to_matrix(&grid.iter().map(|r| r.iter().copied().map(Some).collect()).collect::<Vec<_>>()))
    })
}

fn to_matrix(grid: &[Vec<Option<f64>>]) -> PerformanceMatrix {
    build_matrix(grid.iter().enumerate().flat_map(|(d, row)| {
        row.iter()
            .enumerate()
            .map(move |(a, v)| (format!("d{d:02}"), format!("a{a}"), *v))
    }))
    .unwrap()
}

fn points(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(unit(), n), 2..7)
}

fn ids(count: usize) -> Vec<DatasetId> {
    (0..count).map(|i| DatasetId::new(format!("p{i}")).unwrap()).collect()
}

fn opt(points: &[Vec<f64>]) -> Vec<Vec<Option<f64>>> {
    points.iter().map(|p| p.iter().copied().map(Some).collect()).collect()
}

proptest! {
    #[test]
    fn records_round_trip(m in gappy_matrix(1..8, 1..5)) {
        let rebuilt = matrix::PerformanceMatrix::build(m.records()).unwrap();
        prop_assert_eq!(&rebuilt, &m);
        for (d, row) in m.rows() {
            prop_assert_eq!(rebuilt.row_vector(d.as_str()).unwrap(), row);
        }
    }

    #[test]
    fn complete_rows_idempotent(m in gappy_matrix(1..10, 1..5)) {
        let once = m.complete_rows();
        prop_assert_eq!(once.complete_rows(), once.clone());
        prop_assert!((0..once.dataset_count()).all(|i| once.is_complete_row(i)));
    }

    #[test]
    fn normalization_properties(m in gappy_matrix(1..10, 1..5)) {
        let Ok(norm) = m.normalize_per_axis() else { return Ok(()) };
        let twice = norm.normalize_per_axis().unwrap();
        for a in 0..m.dimension() {
            let col: Vec<(usize, f64)> = (0..m.dataset_count()).filter_map(|d| m.cell(d, a).map(|v| (d, v))).collect();
            let ncol: Vec<f64> = col.iter().map(|(d, _)| norm.cell(*d, a).unwrap()).collect();
            prop_assert!(ncol.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!(ncol.iter().any(|v| (v - 1.0).abs() <= 1e-12));
            for (i, (d, v)) in col.iter().enumerate() {
                prop_assert!((twice.cell(*d, a).unwrap() - ncol[i]).abs() <= 1e-12);
                for (j, (_, w)) in col.iter().enumerate() {
                    if v < w { prop_assert!(ncol[i] <= ncol[j]); }
                }
            }
            for d in 0..m.dataset_count() {
                prop_assert_eq!(m.cell(d, a).is_none(), norm.cell(d, a).is_none());
            }
        }
    }

    #[test]
    fn csv_round_trips(m in gappy_matrix(0..8, 1..5)) {
        prop_assert_eq!(parse_wide::<f64>(&write_wide(&m)).unwrap(), m.clone());
        prop_assert_eq!(parse_long::<f64>(&write_long(&m)).unwrap(), m);
    }

    #[test]
    fn difficulty_properties(row in prop::collection::vec(unit(), 1..8), bump in 0.0..0.5f64, idx in any::<prop::sample::Index>()) {
        let r: Vec<Option<f64>> = row.iter().copied().map(Some).collect();
        let base = difficulty(&r).unwrap();
        prop_assert!((0.0..=1.0).contains(&base));
        let mut rev = r.clone();
        rev.reverse();
        prop_assert!((difficulty(&rev).unwrap() - base).abs() <= 1e-12);
        let mut up = r.clone();
        let i = idx.index(up.len());
        up[i] = Some((row[i] + bump).min(1.0));
        prop_assert!(difficulty(&up).unwrap() <= base + 1e-12);
        prop_assert_eq!(difficulty(&vec![Some(1.0); row.len()]).unwrap(), 0.0);
        prop_assert_eq!(difficulty(&vec![Some(0.0); row.len()]).unwrap(), 1.0);
    }

    #[test]
    fn variance_properties(row in prop::collection::vec(0.0..=0.5f64, 2..8), shift in 0.0..=0.5f64) {
        let r: Vec<Option<f64>> = row.iter().copied().map(Some).collect();
        let v = variance(&r).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!((v - oracle_variance(&row).unwrap()).abs() <= 1e-12);
        let shifted: Vec<Option<f64>> = row.iter().map(|x| Some(x + shift)).collect();
        prop_assert!((variance(&shifted).unwrap() - v).abs() <= 1e-12);
        let mut rev = r.clone();
        rev.reverse();
        prop_assert!((variance(&rev).unwrap() - v).abs() <= 1e-12);
        let pair = [r[0], r[1]];
        prop_assert!((variance(&pair).unwrap() - (row[0] - row[1]).abs()).abs() <= 1e-15);
    }

    #[test]
    fn diversity_invariances(pts in points(3), shift in prop::collection::vec(-0.3..0.3f64, 3), rot in 0usize..3) {
        let base = diversity(&ids(pts.len()), &opt(&pts), VolumeRoot::NthRoot).unwrap();
        prop_assert!(base.score >= 0.0);
        prop_assert!((base.score - oracle_diversity(&pts)).abs() <= 1e-9);
        prop_assert!((base.volume - base.axis_ranges.iter().product::<f64>()).abs() <= 1e-12);
        prop_assert!(base.distance_variance >= 0.0 && base.distance_variance <= base.max_variance);

        let mut rev = pts.clone();
        rev.reverse();
        let r = diversity(&ids(rev.len()), &opt(&rev), VolumeRoot::NthRoot).unwrap();
        prop_assert!((r.score - base.score).abs() <= 1e-12);

        let axes: Vec<Vec<f64>> = pts.iter().map(|p| { let mut q = p.clone(); q.rotate_left(rot); q }).collect();
        let a = diversity(&ids(axes.len()), &opt(&axes), VolumeRoot::NthRoot).unwrap();
        prop_assert!((a.score - base.score).abs() <= 1e-12);

        let moved: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().zip(&shift).map(|(x, s)| x + s).collect()).collect();
        let t = diversity(&ids(moved.len()), &opt(&moved), VolumeRoot::NthRoot).unwrap();
        prop_assert!((t.score - base.score).abs() <= 1e-12);
    }

    #[test]
    fn two_point_diversity_is_geometric_mean(a in prop::collection::vec(unit(), 4), b in prop::collection::vec(unit(), 4)) {
        let d = diversity(&ids(2), &opt(&[a.clone(), b.clone()]), VolumeRoot::NthRoot).unwrap();
        prop_assert_eq!(d.distance_variance, 0.0);
        let gm = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).product::<f64>().powf(0.25);
        prop_assert!((d.score - gm).abs() <= 1e-12);
    }

    #[test]
    fn zero_score_iff_flat_axis(mut pts in points(3), flat in any::<bool>()) {
        if flat {
            let v = pts[0][1];
            pts.iter_mut().for_each(|p| p[1] = v);
        }
        let d = diversity(&ids(pts.len()), &opt(&pts), VolumeRoot::NthRoot).unwrap();
        let some_flat = d.axis_ranges.contains(&0.0);
        prop_assert_eq!(d.score == 0.0, some_flat);
    }

    #[test]
    fn covariance_matches_outer_products(data in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 3), 10)) {
        let n = 3;
        let means: Vec<f64> = (0..n).map(|j| data.iter().map(|r| r[j]).sum::<f64>() / data.len() as f64).collect();
        let centered: Vec<Vec<f64>> = data.iter().map(|r| r.iter().zip(&means).map(|(x, m)| x - m).collect()).collect();
        let c = covariance(&centered).unwrap();
        let o = oracle_covariance(&centered);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((c[i][j] - o[i][j]).abs() <= 1e-12);
                prop_assert!((c[i][j] - c[j][i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn eigen_reconstruction(upper in prop::collection::vec(-1.0..1.0f64, 15)) {
        let n = 5;
        let mut a = vec![vec![0.0; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                a[i][j] = upper[k];
                a[j][i] = upper[k];
                k += 1;
            }
        }
        let e = eigh_symmetric(&a).unwrap();
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let norm = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n).map(|t| e.values[t] * e.vectors[t][i] * e.vectors[t][j]).sum();
                prop_assert!((r - a[i][j]).abs() <= 1e-8);
            }
            let av: Vec<f64> = (0..n).map(|r| (0..n).map(|c| a[r][c] * e.vectors[i][c]).sum()).collect();
            for r in 0..n {
                prop_assert!((av[r] - e.values[i] * e.vectors[i][r]).abs() <= 1e-8 * norm.max(1.0));
            }
        }
        prop_assert_eq!(eigh_symmetric(&a).unwrap(), e);
    }

    #[test]
    fn pca_structure(m in complete_matrix(6..15, 2..6)) {
        let n = m.dimension();
        let Ok(p) = pca_project(&m, n, Imputation::CompleteRowsOnly) else { return Ok(()) };
        for (i, u) in p.components.iter().enumerate() {
            for (j, v) in p.components.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() <= 1e-9);
            }
        }
        let ratios = p.full_explained_variance_ratio();
        prop_assert!((ratios.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!(ratios.windows(2).all(|w| w[0] >= w[1]));
        for (d, (_, row)) in m.rows().enumerate() {
            let back = p.back_project(&p.coordinates[d]);
            for j in 0..n {
                prop_assert!((back[j] - (row[j].unwrap() - p.column_means[j])).abs() <= 1e-9);
            }
        }
        prop_assert!(p.project(&p.column_means).iter().all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn pearson_affine(a in prop::collection::vec(-1.0..1.0f64, 3..12), b in prop::collection::vec(-1.0..1.0f64, 12), scale in 0.1..10.0f64, offset in -5.0..5.0f64) {
        let b = &b[..a.len()];
        let Ok(r) = pearson(&a, b) else { return Ok(()) };
        prop_assert!((-1.0..=1.0).contains(&r));
        let moved: Vec<f64> = a.iter().map(|x| scale * x + offset).collect();
        prop_assert!((pearson(&moved, b).unwrap() - r).abs() <= 1e-9);
        let neg: Vec<f64> = b.iter().map(|x| -x).collect();
        prop_assert!((pearson(&a, &neg).unwrap() + r).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn search_properties(m in complete_matrix(4..10, 2..4), size in 2usize..4, seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let size = size.min(m.dataset_count());
        let best = exhaustive_search(&m, size, SearchMode::Max, 1, VolumeRoot::NthRoot).unwrap();
        let worst = exhaustive_search(&m, size, SearchMode::Min, 1, VolumeRoot::NthRoot).unwrap();
        prop_assert_eq!(best.candidates_evaluated, binomial(m.dataset_count() as u64, size as u64).unwrap());

        let greedy_max = greedy_search(&m, size, SearchMode::Max, VolumeRoot::NthRoot).unwrap();
        let greedy_min = greedy_search(&m, size, SearchMode::Min, VolumeRoot::NthRoot).unwrap();
        prop_assert!(greedy_max.top[0].score <= best.top[0].score);
        prop_assert!(greedy_min.top[0].score >= worst.top[0].score);

        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let names: Vec<String> = m.datasets().iter().map(|d| d.to_string()).collect();
        for _ in 0..20 {
            let pick: Vec<&str> = names.choose_multiple(&mut rng, size).map(String::as_str).collect();
            let s = score_selection(&m, &pick, VolumeRoot::NthRoot).unwrap().score;
            prop_assert!(s <= best.top[0].score && s >= worst.top[0].score);
        }

        let mut order: Vec<usize> = (0..m.dataset_count()).collect();
        order.shuffle(&mut rng);
        let permuted = m.permute_rows(&order);
        prop_assert_eq!(exhaustive_search(&permuted, size, SearchMode::Max, 3, VolumeRoot::NthRoot).unwrap(),
                        exhaustive_search(&m, size, SearchMode::Max, 3, VolumeRoot::NthRoot).unwrap());
        for chunks in [1, 3, 7] {
            prop_assert_eq!(
                exhaustive_search_chunked(&m, size, SearchMode::Min, 4, VolumeRoot::NthRoot, chunks).unwrap(),
                exhaustive_search_chunked(&m, size, SearchMode::Min, 4, VolumeRoot::NthRoot, 5).unwrap()
            );
        }
    }

    #[test]
    fn duplicate_member_never_helps(pts in points(3), pick in any::<prop::sample::Index>()) {
        let base = diversity(&ids(pts.len()), &opt(&pts), VolumeRoot::NthRoot).unwrap();
        let mut grown = pts.clone();
        grown.push(pts[pick.index(pts.len())].clone());
        let more = diversity(&ids(grown.len()), &opt(&grown), VolumeRoot::NthRoot).unwrap();
        prop_assert!(more.score <= base.score + 1e-12);
    }

    #[test]
    fn svg_documents_are_well_formed(m in complete_matrix(1..12, 2..4)) {
        let spec = PlotSpec::default();
        let svg = mini_aps_svg(&m, "a0", "a1", &spec);
        if let Ok(svg) = svg {
            prop_assert_eq!(svg_circle_count(&svg), m.dataset_count());
            prop_assert_eq!(mini_aps_svg(&m, "a0", "a1", &spec).unwrap(), svg);
        }
        if let Ok(p) = pca_project(&m, 2, Imputation::CompleteRowsOnly) {
            let svg = pca_scatter_svg(&p, None, &spec).unwrap();
            prop_assert_eq!(svg_circle_count(&svg), m.dataset_count());
        }
    }
}
