use cascade_forest::cascade::{sweep_scores, ExpertPartition};
use cascade_forest::prelude::*;
use proptest::prelude::*;

fn label(anomaly: bool) -> Label {
    if anomaly {
        Label::Anomaly
    } else {
        Label::Normal
    }
}

fn f1_oracle(preds: &[Label], labels: &[Label], c: Label) -> f64 {
    let tp = preds.iter().zip(labels).filter(|(p, t)| **p == c && **t == c).count() as f64;
    let predicted = preds.iter().filter(|p| **p == c).count() as f64;
    let actual = labels.iter().filter(|t| **t == c).count() as f64;
    let precision = if predicted == 0.0 { 0.0 } else { tp / predicted };
    let recall = if actual == 0.0 { 0.0 } else { tp / actual };
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn training_routing_is_monotone_in_tct(
        p in 0.0f64..=1.0,
        anomaly in any::<bool>(),
        lo in 0.5f64..=1.0,
        hi in 0.5f64..=1.0,
    ) {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let d = DistributionVector::from_anomaly(p);
        let small = route_training_instance(d, label(anomaly), lo);
        let large = route_training_instance(d, label(anomaly), hi);
        prop_assert!(!small.expert1 || large.expert1);
        prop_assert!(!small.expert2 || large.expert2);
        // normals never land in both sets
        prop_assert!(anomaly || !(large.expert1 && large.expert2));
    }

    #[test]
    fn short_path_shrinks_with_cct(p in 0.0f64..=1.0, lo in 0.5f64..=1.0, hi in 0.5f64..=1.0) {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let d = DistributionVector::from_anomaly(p);
        if route_classification(d, hi) == Path::ShortPath {
            prop_assert_eq!(route_classification(d, lo), Path::ShortPath);
        }
    }

    #[test]
    fn f1_matches_counting_oracle(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..200)) {
        let preds: Vec<Label> = pairs.iter().map(|p| label(p.0)).collect();
        let labels: Vec<Label> = pairs.iter().map(|p| label(p.1)).collect();
        let f = per_class_f1(&preds, &labels).unwrap();
        prop_assert!((f.normal - f1_oracle(&preds, &labels, Label::Normal)).abs() < 1e-12);
        prop_assert!((f.anomaly - f1_oracle(&preds, &labels, Label::Anomaly)).abs() < 1e-12);
    }

    #[test]
    fn sweep_fractions_never_rise(
        rows in prop::collection::vec((0.0f64..=1.0, any::<bool>()), 1..300),
        raw in prop::collection::vec(0.5f64..=1.0, 1..12),
    ) {
        let scores: Vec<DistributionVector> =
            rows.iter().map(|r| DistributionVector::from_anomaly(r.0)).collect();
        let labels: Vec<Label> = rows.iter().map(|r| label(r.1)).collect();
        let mut thresholds = raw;
        thresholds.sort_by(f64::total_cmp);
        let sweep = sweep_scores(&scores, &labels, &thresholds).unwrap();
        for w in sweep.windows(2) {
            prop_assert!(w[1].valid_fraction_normal <= w[0].valid_fraction_normal);
            prop_assert!(w[1].valid_fraction_anomaly <= w[0].valid_fraction_anomaly);
        }
    }

    #[test]
    fn partition_duplicates_only_anomalies(
        rows in prop::collection::vec((0.0f64..=1.0, any::<bool>()), 1..300),
        tct in 0.5f64..=1.0,
    ) {
        let scores: Vec<DistributionVector> =
            rows.iter().map(|r| DistributionVector::from_anomaly(r.0)).collect();
        let labels: Vec<Label> = rows.iter().map(|r| label(r.1)).collect();
        let p = ExpertPartition::build(&scores, &labels, tct);
        for i in 0..rows.len() {
            let in1 = p.expert1.binary_search(&i).is_ok();
            let in2 = p.expert2.binary_search(&i).is_ok();
            let low = scores[i].confidence() < tct;
            if labels[i] == Label::Anomaly {
                prop_assert_eq!(in1 && in2, low);
            } else {
                prop_assert!(!(in1 && in2));
                prop_assert_eq!(in1 || in2, low);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn trained_models_emit_distributions(
        seed in 0u64..1000,
        method in prop::sample::select(vec![Method::Bagging, Method::GradientBoosting, Method::AdaBoost]),
        depth in 1usize..5,
    ) {
        let data = make_synthetic(150, 3, 0.2, 1.5, seed).unwrap();
        let cfg = EnsembleConfig::new(method, 6, Some(depth)).with_seed(seed);
        let model = EnsembleModel::fit(&data, &cfg).unwrap();
        for t in model.trees() {
            prop_assert!(t.depth() <= depth);
        }
        for row in data.rows().take(50) {
            let d = model.predict_proba(row).unwrap();
            prop_assert!(d.is_valid(), "{:?}", d);
        }
    }

    #[test]
    fn stratified_folds_partition_rows(seed in 0u64..1000, k in 2usize..7) {
        let data = make_synthetic(120, 2, 0.1, 1.0, seed).unwrap();
        let folds = stratified_kfold(&data, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut seen = vec![0u32; data.n_rows()];
        for f in &folds {
            prop_assert_eq!(f.train.len() + f.test.len(), data.n_rows());
            for &i in &f.test {
                seen[i] += 1;
            }
            let anomalies = f.test.iter().filter(|&&i| data.label(i) == Label::Anomaly).count();
            let expected = data.class_counts()[1] as f64 / k as f64;
            prop_assert!((anomalies as f64 - expected).abs() < 1.0);
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }
}
