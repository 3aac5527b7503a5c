use std::io::Write;

use proptest::prelude::*;

use tom_core::data::{bundled, load_csv, make_quadratic, make_rosenbrock, parse_csv, split_normalize, DataError, Objective};
use tom_core::model::Targets;

fn fd(obj: &dyn Objective, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let (mut p, mut m) = (x.to_vec(), x.to_vec());
            p[i] += h;
            m[i] -= h;
            (obj.loss(&p) - obj.loss(&m)) / (2.0 * h)
        })
        .collect()
}

fn row_keys(features: &[Vec<f64>], targets: &[f64]) -> Vec<Vec<u64>> {
    let mut keys: Vec<Vec<u64>> = features
        .iter()
        .zip(targets)
        .map(|(r, t)| r.iter().chain(std::iter::once(t)).map(|v| v.to_bits()).collect())
        .collect();
    keys.sort();
    keys
}

#[test]
fn split_rows_are_a_permutation_of_the_source() {
    let d = bundled("boston").unwrap();
    let s = split_normalize(&d, 0.8, 17).unwrap();
    assert_eq!((s.train.len(), s.test.len()), (405, 101));
    let mut features = Vec::new();
    let mut targets = Vec::new();
    for part in [&s.train, &s.test] {
        let raw = s.denormalize_features(&part.features);
        let Targets::Values(t) = &part.targets else { unreachable!() };
        for r in 0..part.len() {
            // denormalized values match the source up to rounding
            features.push(raw.row(r).iter().map(|v| (v * 1e6).round() / 1e6).collect::<Vec<_>>());
            targets.push((s.denormalize_target(t.get(r, 0)) * 1e6).round() / 1e6);
        }
    }
    let Targets::Values(t) = &d.targets else { unreachable!() };
    let source_features: Vec<Vec<f64>> = (0..d.len())
        .map(|r| d.features.row(r).iter().map(|v| (v * 1e6).round() / 1e6).collect())
        .collect();
    let source_targets: Vec<f64> = t.col_values(0).iter().map(|v| (v * 1e6).round() / 1e6).collect();
    assert_eq!(row_keys(&features, &targets), row_keys(&source_features, &source_targets));
}

#[test]
fn test_split_uses_train_statistics() {
    let d = bundled("diabetes").unwrap();
    let s = split_normalize(&d, 0.8, 3).unwrap();
    let refit = split_normalize(&s.test, 0.5, 0).unwrap();
    // the held-out rows are not standardized by their own statistics
    assert!(s.norm_mean.iter().zip(&refit.norm_mean).any(|(a, b)| (a - b).abs() > 1e-6));
}

#[test]
fn load_csv_reads_files_and_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiny.csv");
    let mut f = std::fs::File::create(&path).unwrap();
    write!(f, "x1,x2,target\n1,2,3\n4,5,6\n7,8,9\n").unwrap();
    let d = load_csv(&path, "target").unwrap();
    assert_eq!((d.name.as_str(), d.len(), d.features.cols()), ("tiny", 3, 2));
    assert!(matches!(load_csv(&path, "y"), Err(DataError::MissingColumn(_))));
    assert!(matches!(load_csv(dir.path().join("none.csv"), "y"), Err(DataError::FileNotFound(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_round_trips(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..40), seed in any::<u64>()) {
        let mut text = String::from("a,b,y\n");
        for r in &rows {
            text.push_str(&format!("{:?},{:?},{:?}\n", r[0], r[1], r[2]));
        }
        let d = parse_csv("p", text.as_bytes(), "y").unwrap();
        let s = split_normalize(&d, 0.75, seed).unwrap();
        let back = s.denormalize_features(&s.normalize_features(&d.features));
        for (a, b) in back.as_slice().iter().zip(d.features.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
        let mut all: Vec<usize> = s.train_indices.iter().chain(&s.test_indices).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..d.len()).collect::<Vec<_>>());
    }

    #[test]
    fn quadratic_gradient_matches_fd(dim in 1usize..12, cond in 1.0f64..1000.0, seed in any::<u64>(), scale in 0.1f64..3.0) {
        let q = make_quadratic(dim, cond, seed).unwrap();
        let x: Vec<f64> = (0..dim).map(|i| scale * ((i as f64 + 1.0) * 0.7).cos()).collect();
        let g = q.gradient(&x);
        for (a, b) in g.iter().zip(fd(&q, &x, 1e-5)) {
            prop_assert!((a - b).abs() <= 1e-7 * (1.0 + a.abs()), "{} vs {}", a, b);
        }
        // symmetric, positive definite in the probed direction
        for i in 0..dim {
            for j in 0..dim {
                prop_assert!((q.matrix.get(i, j) - q.matrix.get(j, i)).abs() <= 1e-12);
            }
        }
        prop_assert!(q.loss(&x) > 0.0);
    }

    #[test]
    fn rosenbrock_gradient_matches_fd(x in prop::collection::vec(-2.0f64..2.0, 2..8)) {
        let r = make_rosenbrock(x.len()).unwrap();
        for (a, b) in r.gradient(&x).iter().zip(fd(&r, &x, 1e-6)) {
            prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "{} vs {}", a, b);
        }
    }
}
