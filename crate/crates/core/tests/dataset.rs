use std::collections::HashSet;
use std::path::PathBuf;

use ndarray::Axis;
use sessc_core::dataset::{
    fit_zscore, generate_synthetic, load_table, random_split_indices, table_csv, LabelColumn,
    SyntheticKind,
};
use sessc_core::harness::derive_seed;

fn wdbc_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/wdbc.csv")
}

fn wdbc() -> sessc_core::dataset::Dataset {
    load_table(wdbc_path(), &LabelColumn::Name("diagnosis".into()), &[]).unwrap()
}

#[test]
fn wdbc_has_the_expected_shape() {
    let data = wdbc();
    assert_eq!(data.n_samples(), 569);
    assert_eq!(data.n_features(), 30);
    assert_eq!(data.n_classes, 2);
    assert_eq!(data.class_names, vec!["B", "M"]);
    assert_eq!(data.class_counts(), vec![357, 212]);
}

#[test]
fn onehot_is_consistent_with_labels() {
    let data = wdbc();
    for (row, &l) in data.onehot.rows().into_iter().zip(&data.labels) {
        assert_eq!(row.sum(), 1.0);
        assert_eq!(row[l], 1.0);
    }
    let totals = data.onehot.sum_axis(Axis(0));
    for (c, &k) in data.class_counts().iter().enumerate() {
        assert_eq!(totals[c], k as f64);
    }
}

#[test]
fn thirty_splits_are_distinct_partitions() {
    let mut seen = HashSet::new();
    for s in 1..=30u64 {
        let (train, test) = random_split_indices(569, 0.7, derive_seed(s, 0)).unwrap();
        assert_eq!((train.len(), test.len()), (398, 171));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..569).collect::<Vec<_>>());
        let mut key = train.clone();
        key.sort_unstable();
        assert!(seen.insert(key), "split {s} repeats an earlier partition");
    }
}

#[test]
fn normaliser_fitted_on_train_standardises_train_only() {
    let data = wdbc();
    let (tr, te) = random_split_indices(569, 0.7, 3).unwrap();
    let (train, test) = (data.subset(&tr), data.subset(&te));
    let norm = fit_zscore(&train);
    let z = norm.apply(&train).unwrap();
    for col in z.features.columns() {
        let mean = col.mean().unwrap();
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (col.len() - 1) as f64;
        assert!(mean.abs() < 1e-10);
        assert!((var - 1.0).abs() < 1e-10);
    }
    let zt = norm.apply(&test).unwrap();
    let expected = (test.features[[0, 0]] - norm.means[0]) / norm.stds[0];
    assert_eq!(zt.features[[0, 0]], expected);
}

#[test]
fn written_tables_load_back() {
    let data = generate_synthetic(SyntheticKind::Spiral, 50, 0.05, 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spiral.csv");
    std::fs::write(&path, table_csv(&data).unwrap()).unwrap();
    let back = load_table(&path, &LabelColumn::default(), &[]).unwrap();
    assert_eq!(back.labels, data.labels);
    assert_eq!(back.features, data.features);
}

#[test]
fn categorical_columns_expand_to_indicators() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tsv");
    std::fs::write(&path, "a\tcolour\tlabel\n1\tred\tx\n2\tblue\ty\n3\tred\tx\n").unwrap();
    let data = load_table(&path, &LabelColumn::Index(2), &["colour".into()]).unwrap();
    assert_eq!(data.feature_names, vec!["a", "colour=blue", "colour=red"]);
    assert_eq!(data.features.row(1).to_vec(), vec![2.0, 1.0, 0.0]);
}

#[test]
fn missing_files_are_reported() {
    let err = load_table("/no/such/file.csv", &LabelColumn::default(), &[]).unwrap_err();
    assert!(err.to_string().contains("/no/such/file.csv"));
}
