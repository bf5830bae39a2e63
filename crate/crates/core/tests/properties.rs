//! Property tests for the invariants every pipeline stage leans on.

use proptest::collection::vec;
use proptest::prelude::*;

use tempcal::io::{read_logits_csv, split, write_logits_csv};
use tempcal::{predict, tempered_softmax, LogitDataset};

fn logit_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..6, 1usize..40).prop_flat_map(|(k, n)| vec(vec(-50.0..50.0f64, k..=k), n..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rows_are_stochastic_at_any_temperature(
        rows in logit_matrix(),
        t in prop_oneof![0.05..20.0f64, Just(1.0), Just(1e6)],
    ) {
        let data = LogitDataset::from_rows(rows, None).unwrap();
        let probs = tempered_softmax(&data, t).unwrap();
        for row in probs.rows() {
            let sum: f64 = row.iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            prop_assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn argmax_is_invariant_under_temperature(
        rows in logit_matrix(),
        t in 0.05..20.0f64,
    ) {
        let data = LogitDataset::from_rows(rows, None).unwrap();
        let base = predict(&tempered_softmax(&data, 1.0).unwrap());
        let tempered = predict(&tempered_softmax(&data, t).unwrap());
        for (a, b) in base.iter().zip(&tempered) {
            prop_assert_eq!(a.predicted_class, b.predicted_class);
        }
    }

    #[test]
    fn per_row_shifts_change_nothing(
        rows in logit_matrix(),
        shift in -500.0..500.0f64,
        t in 0.5..4.0f64,
    ) {
        let shifted: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|&h| h + shift).collect())
            .collect();
        let a = tempered_softmax(&LogitDataset::from_rows(rows, None).unwrap(), t).unwrap();
        let b = tempered_softmax(&LogitDataset::from_rows(shifted, None).unwrap(), t).unwrap();
        for (ra, rb) in a.rows().zip(b.rows()) {
            for (&pa, &pb) in ra.iter().zip(rb) {
                prop_assert!((pa - pb).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact(
        rows in logit_matrix(),
        labelled in any::<bool>(),
        tag in 0u32..1_000_000,
    ) {
        let n = rows.len();
        let k = rows[0].len();
        let labels = labelled.then(|| (0..n).map(|i| i % k).collect::<Vec<_>>());
        let data = LogitDataset::from_rows(rows, labels).unwrap();
        let path = std::env::temp_dir().join(format!(
            "tempcal-prop-{}-{tag}.csv",
            std::process::id()
        ));
        write_logits_csv(&path, &data).unwrap();
        let back = read_logits_csv(&path, labelled, false).unwrap();
        std::fs::remove_file(&path).ok();
        prop_assert_eq!(back.n_samples(), data.n_samples());
        for i in 0..n {
            for j in 0..k {
                prop_assert_eq!(back.row(i)[j].to_bits(), data.row(i)[j].to_bits());
            }
        }
        prop_assert_eq!(back.labels(), data.labels());
    }

    #[test]
    fn split_partitions_are_disjoint_and_exhaustive(
        n in 2usize..200,
        frac in 0.01..0.99f64,
        seed in any::<u64>(),
    ) {
        // tag each sample with its index so membership is recoverable
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, 0.0]).collect();
        let data = LogitDataset::from_rows(rows, None).unwrap();
        let (calib, test) = split(&data, frac, seed).unwrap();
        prop_assert_eq!(calib.n_samples() + test.n_samples(), n);
        prop_assert_eq!(
            calib.n_samples(),
            ((frac * n as f64).floor() as usize).max(1)
        );
        let mut seen = vec![false; n];
        for row in calib.rows().chain(test.rows()) {
            let idx = row[0] as usize;
            prop_assert!(!seen[idx], "sample {} appeared twice", idx);
            seen[idx] = true;
        }
        prop_assert!(seen.iter().all(|&s| s));
    }
}
