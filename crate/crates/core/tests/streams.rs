use areba::stream::{
    load_csv_stream, Concept, CsvDataset, DriftKind, DriftSpec, StreamConfig, StreamItem,
    SyntheticStream,
};
use areba::Label;
use std::io::Write;

fn collect(config: StreamConfig) -> Vec<StreamItem> {
    SyntheticStream::new(config)
        .unwrap()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn same_seed_same_stream() {
    for concept in Concept::ALL {
        let config = StreamConfig::stationary(concept, 0.1, 2_000, 11)
            .with_drift(DriftSpec::new(DriftKind::Likelihood, 700))
            .with_noise(0.1);
        let a = collect(config.clone());
        let b = collect(config.clone());
        assert_eq!(a, b);
        let c = collect(config.with_seed(12));
        assert_ne!(a, c);
    }
}

#[test]
fn posterior_drift_inverts_the_concept() {
    let onset = 500;
    let config = StreamConfig::stationary(Concept::Circle, 0.3, 1_500, 3)
        .with_drift(DriftSpec::new(DriftKind::Posterior, onset));
    for (t, item) in collect(config).into_iter().enumerate() {
        let flipped = t >= onset;
        let expected = Concept::Circle.classify(&item.example.x, flipped).unwrap();
        assert_eq!(item.concept_label, expected, "t={t}");
        assert_eq!(item.example.y, item.concept_label);
    }
}

fn within_three_sigma(hits: usize, n: usize, p: f64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    (hits as f64 / n as f64 - p).abs() <= 3.0 * sigma
}

#[test]
fn prior_drift_swaps_the_class_prior() {
    let onset = 10_000;
    let config = StreamConfig::stationary(Concept::Sea, 0.1, 40_000, 5)
        .with_drift(DriftSpec::new(DriftKind::Prior, onset));
    let items = collect(config);
    let before = items[..onset]
        .iter()
        .filter(|i| i.example.y.is_positive())
        .count();
    let after = items[onset..]
        .iter()
        .filter(|i| i.example.y.is_positive())
        .count();
    assert!(within_three_sigma(before, onset, 0.1), "{before}");
    assert!(
        within_three_sigma(after, items.len() - onset, 0.9),
        "{after}"
    );
}

#[test]
fn likelihood_drift_moves_negatives_only() {
    let onset = 20_000;
    let config = StreamConfig::stationary(Concept::Sine, 0.5, 40_000, 8)
        .with_drift(DriftSpec::new(DriftKind::Likelihood, onset));
    let items = collect(config);
    let left_share = |range: &[StreamItem], label: Label| {
        let of_class: Vec<_> = range.iter().filter(|i| i.example.y == label).collect();
        let left = of_class.iter().filter(|i| i.example.x[0] < 0.6).count();
        (left, of_class.len())
    };
    let (left, n) = left_share(&items[..onset], Label::Negative);
    assert!(within_three_sigma(left, n, 0.9), "{left}/{n}");
    let (left, n) = left_share(&items[onset..], Label::Negative);
    assert!(within_three_sigma(left, n, 0.1), "{left}/{n}");
    // positives keep the same marginal on both sides of the onset
    let (a, na) = left_share(&items[..onset], Label::Positive);
    let (b, nb) = left_share(&items[onset..], Label::Positive);
    let (pa, pb) = (a as f64 / na as f64, b as f64 / nb as f64);
    assert!((pa - pb).abs() < 0.03, "{pa} vs {pb}");
}

#[test]
fn noise_flips_emitted_labels_only() {
    let config = StreamConfig::stationary(Concept::Sine, 0.3, 30_000, 9).with_noise(0.2);
    let items = collect(config);
    let flips = items
        .iter()
        .filter(|i| i.example.y != i.concept_label)
        .count();
    assert!(within_three_sigma(flips, items.len(), 0.2), "{flips}");
    for item in &items {
        assert_eq!(
            item.concept_label,
            Concept::Sine.classify(&item.example.x, false).unwrap()
        );
    }
}

#[test]
fn csv_round_trip_through_a_file() {
    let dir = std::env::temp_dir().join(format!("areba-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("synthetic.csv");
    let source = collect(StreamConfig::stationary(Concept::Sea, 0.3, 300, 21));
    let mut file = std::fs::File::create(&path).unwrap();
    writeln!(file, "x1,x2,target").unwrap();
    for item in &source {
        let e = &item.example;
        writeln!(file, "{},{},{}", e.x[0] * 10.0, e.x[1] * 10.0, e.y.bit()).unwrap();
    }
    drop(file);

    let ds = CsvDataset::load(&path, "target").unwrap();
    assert_eq!(ds.len(), source.len());
    assert_eq!(ds.feature_names, vec!["x1", "x2"]);
    for column in 0..2 {
        let lo = source
            .iter()
            .map(|i| i.example.x[column])
            .fold(f64::INFINITY, f64::min);
        let hi = source
            .iter()
            .map(|i| i.example.x[column])
            .fold(f64::NEG_INFINITY, f64::max);
        for (loaded, original) in ds.examples.iter().zip(&source) {
            let expected = (original.example.x[column] - lo) / (hi - lo);
            assert!((loaded.x[column] - expected).abs() < 1e-9);
            assert_eq!(loaded.y, original.example.y);
        }
    }
    let a = load_csv_stream(&path, "target", 4).unwrap();
    assert_eq!(a, load_csv_stream(&path, "target", 4).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}
