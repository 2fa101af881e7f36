use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{route_classification, route_training_instance, CascadeConfig, Path};
use crate::data::{Dataset, Label};
use crate::ensemble::{DistributionVector, EnsembleConfig, EnsembleModel, Predictor};
use crate::{Error, Result};

/// One of the two second-stage models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "snake_case")]
pub enum Expert {
    Trained(EnsembleModel),
    /// Nothing was routed to this expert during training. It repeats the
    /// coarse distribution.
    Echo,
}

impl Expert {
    /// The expert's distribution for `x`, given the coarse distribution.
    #[inline]
    pub(crate) fn answer(&self, x: &[f64], coarse: DistributionVector) -> DistributionVector {
        match self {
            Expert::Trained(m) => m.predict_unchecked(x),
            Expert::Echo => coarse,
        }
    }

    pub fn model(&self) -> Option<&EnsembleModel> {
        match self {
            Expert::Trained(m) => Some(m),
            Expert::Echo => None,
        }
    }

    /// Echo, or trained on a single class.
    pub fn is_degenerate(&self) -> bool {
        self.model().is_none_or(EnsembleModel::is_degenerate)
    }

    pub fn node_count(&self) -> usize {
        self.model().map_or(0, EnsembleModel::node_count)
    }
}

/// How the training set was split between the experts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingStats {
    pub n_train_rows: usize,
    /// Share of training rows in each expert's set.
    pub fg1_train_fraction: f64,
    pub fg2_train_fraction: f64,
    /// Normal-to-anomaly count in each expert's set; `None` when the set holds
    /// no anomalies.
    pub fg1_ratio: Option<f64>,
    pub fg2_ratio: Option<f64>,
    /// Anomalies copied into both sets.
    pub duplicated_anomaly_count: usize,
}

impl RoutingStats {
    /// Expert training rows over all training rows, counting duplicated
    /// anomalies once per expert.
    pub fn expert_train_fraction(&self) -> f64 {
        self.fg1_train_fraction + self.fg2_train_fraction
    }
}

/// Expert training sets as row indices into the training data, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpertPartition {
    pub expert1: Vec<usize>,
    pub expert2: Vec<usize>,
}

impl ExpertPartition {
    /// Routes every row given its coarse distribution.
    pub fn build(scores: &[DistributionVector], labels: &[Label], tct: f64) -> Self {
        debug_assert_eq!(scores.len(), labels.len());
        let mut p = ExpertPartition::default();
        for (i, (d, label)) in scores.iter().zip(labels).enumerate() {
            let set = route_training_instance(*d, *label, tct);
            if set.expert1 {
                p.expert1.push(i);
            }
            if set.expert2 {
                p.expert2.push(i);
            }
        }
        p
    }

    pub fn rows(&self, path: Path) -> &[usize] {
        match path {
            Path::Expert1 => &self.expert1,
            Path::Expert2 => &self.expert2,
            Path::ShortPath => &[],
        }
    }

    /// Stable row ids of each set.
    pub fn row_ids(&self, data: &Dataset) -> [Vec<u64>; 2] {
        let ids = data.row_ids();
        [
            self.expert1.iter().map(|&i| ids[i]).collect(),
            self.expert2.iter().map(|&i| ids[i]).collect(),
        ]
    }

    pub fn stats(&self, data: &Dataset) -> RoutingStats {
        let n = data.n_rows();
        let frac = |rows: &[usize]| if n == 0 { 0.0 } else { rows.len() as f64 / n as f64 };
        let ratio = |rows: &[usize]| {
            let anomalies = rows.iter().filter(|&&i| data.label(i) == Label::Anomaly).count();
            (anomalies > 0).then(|| (rows.len() - anomalies) as f64 / anomalies as f64)
        };
        let mut dup = 0;
        let (mut a, mut b) = (0, 0);
        while a < self.expert1.len() && b < self.expert2.len() {
            match self.expert1[a].cmp(&self.expert2[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    dup += 1;
                    a += 1;
                    b += 1;
                }
            }
        }
        RoutingStats {
            n_train_rows: n,
            fg1_train_fraction: frac(&self.expert1),
            fg2_train_fraction: frac(&self.expert2),
            fg1_ratio: ratio(&self.expert1),
            fg2_ratio: ratio(&self.expert2),
            duplicated_anomaly_count: dup,
        }
    }
}

/// Outcome of classifying one query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub label: Label,
    /// Top-1 probability of the model that decided.
    pub confidence: f64,
    pub path: Path,
    pub coarse_distribution: DistributionVector,
    /// Present when an expert decided.
    pub expert_distribution: Option<DistributionVector>,
}

/// Gate on the coarse distribution, then let the routed expert decide.
#[inline]
pub(crate) fn resolve<F>(d: DistributionVector, cct: f64, expert: F) -> Result<ClassificationResult>
where
    F: FnOnce(Path) -> Result<DistributionVector>,
{
    let path = route_classification(d, cct);
    if path == Path::ShortPath {
        return Ok(ClassificationResult {
            label: d.argmax(),
            confidence: d.confidence(),
            path,
            coarse_distribution: d,
            expert_distribution: None,
        });
    }
    let e = expert(path)?;
    Ok(ClassificationResult {
        label: e.argmax(),
        confidence: e.confidence(),
        path,
        coarse_distribution: d,
        expert_distribution: Some(e),
    })
}

/// Cascade classification over arbitrary predictors.
pub fn classify_with<C, E1, E2>(
    coarse: &C,
    expert1: &E1,
    expert2: &E2,
    cct: f64,
    x: &[f64],
) -> Result<ClassificationResult>
where
    C: Predictor + ?Sized,
    E1: Predictor + ?Sized,
    E2: Predictor + ?Sized,
{
    let d = coarse.predict_proba(x)?;
    resolve(d, cct, |path| match path {
        Path::Expert1 => expert1.predict_proba(x),
        _ => expert2.predict_proba(x),
    })
}

/// Scores every row of `data` with `model`, in row order.
pub fn score_rows<P: Predictor + ?Sized>(model: &P, data: &Dataset) -> Result<Vec<DistributionVector>> {
    if model.n_features() != data.n_features() {
        return Err(Error::invalid(format!(
            "model expects {} features, data has {}",
            model.n_features(),
            data.n_features()
        )));
    }
    (0..data.n_rows())
        .into_par_iter()
        .map(|i| model.predict_proba(data.row(i)))
        .collect()
}

/// A coarse model and two experts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeModel {
    pub(crate) config: CascadeConfig,
    pub(crate) coarse: EnsembleModel,
    pub(crate) expert1: Expert,
    pub(crate) expert2: Expert,
    pub(crate) training_stats: RoutingStats,
}

/// Trains a cascade; see [`CascadeModel::train`].
pub fn train_cascade(data: &Dataset, config: &CascadeConfig) -> Result<CascadeModel> {
    CascadeModel::train(data, config)
}

impl CascadeModel {
    /// Trains the coarse model on all of `data`, routes every training row by
    /// the coarse model's own confidence, then trains both experts on their
    /// shares.
    pub fn train(data: &Dataset, config: &CascadeConfig) -> Result<Self> {
        Self::train_with_partition(data, config).map(|(m, _)| m)
    }

    /// Like [`CascadeModel::train`], also returning the expert training sets.
    pub fn train_with_partition(
        data: &Dataset,
        config: &CascadeConfig,
    ) -> Result<(Self, ExpertPartition)> {
        config.check()?;
        if !data.has_both_classes() {
            return Err(Error::invalid("cascade training needs both classes"));
        }
        let coarse = EnsembleModel::fit(data, &config.coarse)?;
        Self::from_coarse(coarse, data, config)
    }

    /// Builds the experts around an already trained coarse model.
    pub fn from_coarse(
        coarse: EnsembleModel,
        data: &Dataset,
        config: &CascadeConfig,
    ) -> Result<(Self, ExpertPartition)> {
        let scores = score_rows(&coarse, data)?;
        Self::from_scores(coarse, &scores, data, config)
    }

    /// Builds the experts from precomputed coarse scores of `data`.
    pub fn from_scores(
        coarse: EnsembleModel,
        scores: &[DistributionVector],
        data: &Dataset,
        config: &CascadeConfig,
    ) -> Result<(Self, ExpertPartition)> {
        config.check()?;
        if scores.len() != data.n_rows() {
            return Err(Error::invalid("one coarse score per training row required"));
        }
        let partition = ExpertPartition::build(scores, data.labels(), config.tct());
        let (expert1, expert2) = rayon::join(
            || train_expert(data, &partition.expert1, config.expert_config(Path::Expert1)),
            || train_expert(data, &partition.expert2, config.expert_config(Path::Expert2)),
        );
        let model = CascadeModel {
            config: config.clone(),
            coarse,
            expert1: expert1?,
            expert2: expert2?,
            training_stats: partition.stats(data),
        };
        Ok((model, partition))
    }

    pub fn config(&self) -> &CascadeConfig {
        &self.config
    }

    pub fn coarse(&self) -> &EnsembleModel {
        &self.coarse
    }

    pub fn expert(&self, path: Path) -> Option<&Expert> {
        match path {
            Path::ShortPath => None,
            Path::Expert1 => Some(&self.expert1),
            Path::Expert2 => Some(&self.expert2),
        }
    }

    pub fn training_stats(&self) -> &RoutingStats {
        &self.training_stats
    }

    pub fn n_features(&self) -> usize {
        self.coarse.n_features
    }

    /// Total nodes over the three models.
    pub fn node_count(&self) -> usize {
        self.coarse.node_count() + self.expert1.node_count() + self.expert2.node_count()
    }

    /// Moves the classification gate. Experts depend only on `tct`, so this
    /// needs no retraining.
    pub fn set_cct(&mut self, cct: f64) -> Result<()> {
        self.config = self.config.with_thresholds(cct, self.config.tct())?;
        Ok(())
    }

    pub fn classify(&self, x: &[f64]) -> Result<ClassificationResult> {
        self.check_arity(x)?;
        Ok(self.classify_unchecked(x))
    }

    #[inline]
    pub(crate) fn classify_unchecked(&self, x: &[f64]) -> ClassificationResult {
        let d = self.coarse.predict_unchecked(x);
        let r = resolve(d, self.config.cct(), |path| {
            Ok(match path {
                Path::Expert1 => self.expert1.answer(x, d),
                _ => self.expert2.answer(x, d),
            })
        });
        r.expect("infallible expert")
    }

    /// Coarse model followed by the given expert regardless of confidence.
    #[inline]
    pub(crate) fn classify_forced(&self, x: &[f64], path: Path) -> Label {
        let d = self.coarse.predict_unchecked(x);
        match path {
            Path::ShortPath => d.argmax(),
            Path::Expert1 => self.expert1.answer(x, d).argmax(),
            Path::Expert2 => self.expert2.answer(x, d).argmax(),
        }
    }

    fn check_arity(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(Error::invalid(format!(
                "expected {} features, got {}",
                self.n_features(),
                x.len()
            )));
        }
        Ok(())
    }
}

fn train_expert(data: &Dataset, rows: &[usize], config: &EnsembleConfig) -> Result<Expert> {
    if rows.is_empty() {
        return Ok(Expert::Echo);
    }
    let subset = data.select(rows);
    let [normals, anomalies] = subset.class_counts();
    if normals == 0 || anomalies == 0 {
        let label = if anomalies == 0 { Label::Normal } else { Label::Anomaly };
        return Ok(Expert::Trained(EnsembleModel::constant(
            config.clone(),
            data.n_features(),
            label,
        )));
    }
    EnsembleModel::fit(&subset, config).map(Expert::Trained)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_synthetic, Provenance};

    struct Fixed(DistributionVector);

    impl Predictor for Fixed {
        fn n_features(&self) -> usize {
            1
        }
        fn predict_proba(&self, _: &[f64]) -> Result<DistributionVector> {
            Ok(self.0)
        }
    }

    struct Untouchable;

    impl Predictor for Untouchable {
        fn n_features(&self) -> usize {
            1
        }
        fn predict_proba(&self, _: &[f64]) -> Result<DistributionVector> {
            panic!("expert consulted")
        }
    }

    #[test]
    fn expert_verdict_is_final() {
        let coarse = Fixed(DistributionVector::from_normal(0.83));
        let e1 = Fixed(DistributionVector::from_normal(0.1));
        let r = classify_with(&coarse, &e1, &Untouchable, 0.9, &[0.0]).unwrap();
        assert_eq!(r.label, Label::Anomaly);
        assert_eq!(r.path, Path::Expert1);
        assert!((r.confidence - 0.9).abs() < 1e-12);
    }

    #[test]
    fn confident_coarse_answer_skips_experts() {
        let coarse = Fixed(DistributionVector::from_normal(0.78));
        let r = classify_with(&coarse, &Untouchable, &Untouchable, 0.7, &[0.0]).unwrap();
        assert_eq!((r.label, r.path), (Label::Normal, Path::ShortPath));
        assert_eq!(r.expert_distribution, None);
    }

    fn small() -> Dataset {
        make_synthetic(800, 4, 0.08, 1.2, 21).unwrap()
    }

    fn config(cct: f64, tct: f64) -> CascadeConfig {
        CascadeConfig::new(
            EnsembleConfig::bagging(4, Some(3)),
            EnsembleConfig::bagging(8, Some(6)),
            cct,
            tct,
        )
        .unwrap()
        .with_seed(5)
    }

    #[test]
    fn low_confidence_anomalies_train_both_experts() {
        let d = small();
        let (model, part) = CascadeModel::train_with_partition(&d, &config(0.9, 0.97)).unwrap();
        let scores = score_rows(model.coarse(), &d).unwrap();
        for (i, d_i) in scores.iter().enumerate() {
            let low = d_i.confidence() < 0.97;
            let in1 = part.expert1.binary_search(&i).is_ok();
            let in2 = part.expert2.binary_search(&i).is_ok();
            match (low, d.label(i)) {
                (false, _) => assert!(!in1 && !in2),
                (true, Label::Anomaly) => assert!(in1 && in2),
                (true, Label::Normal) => assert!(in1 ^ in2),
            }
        }
        let stats = model.training_stats();
        let anomalies_low = (0..d.n_rows())
            .filter(|&i| d.label(i) == Label::Anomaly && scores[i].confidence() < 0.97)
            .count();
        assert_eq!(stats.duplicated_anomaly_count, anomalies_low);
        assert!(stats.fg1_train_fraction > 0.0);
    }

    #[test]
    fn bypass_thresholds_leave_experts_unused() {
        let d = small();
        let model = CascadeModel::train(&d, &config(0.5, 0.5)).unwrap();
        let scores = score_rows(model.coarse(), &d).unwrap();
        if scores.iter().all(|s| s.confidence() > 0.5) {
            assert_eq!(model.expert1, Expert::Echo);
            assert_eq!(model.expert2, Expert::Echo);
            assert_eq!(model.training_stats().expert_train_fraction(), 0.0);
            assert_eq!(model.training_stats().fg1_ratio, None);
        }
        for i in 0..d.n_rows() {
            let r = model.classify(d.row(i)).unwrap();
            assert_eq!(r.path, Path::ShortPath);
            assert_eq!(r.label, model.coarse().predict(d.row(i)).unwrap());
        }
    }

    #[test]
    fn echo_repeats_coarse_distribution() {
        let d = DistributionVector::from_normal(0.6);
        assert_eq!(Expert::Echo.answer(&[0.0], d), d);
        assert!(Expert::Echo.is_degenerate());
    }

    #[test]
    fn single_class_expert_is_constant() {
        let d = Dataset::new(
            vec![0.0, 1.0, 2.0, 3.0],
            1,
            vec![Label::Normal, Label::Normal, Label::Anomaly, Label::Normal],
            Provenance::Synthetic,
        )
        .unwrap();
        let e = train_expert(&d, &[0, 1, 3], &EnsembleConfig::bagging(3, Some(2))).unwrap();
        assert!(e.is_degenerate());
        assert_eq!(
            e.answer(&[2.0], DistributionVector::CERTAIN_ANOMALY),
            DistributionVector::CERTAIN_NORMAL
        );
    }

    #[test]
    fn single_class_training_set_rejected() {
        let d = small();
        let normals: Vec<usize> = (0..d.n_rows()).filter(|&i| d.label(i) == Label::Normal).collect();
        assert!(CascadeModel::train(&d.select(&normals), &config(0.9, 0.9)).is_err());
    }

    #[test]
    fn moving_cct_keeps_experts() {
        let d = small();
        let mut m = CascadeModel::train(&d, &config(0.9, 0.97)).unwrap();
        let before = m.expert1.clone();
        m.set_cct(0.6).unwrap();
        assert_eq!(m.config().cct(), 0.6);
        assert_eq!(m.expert1, before);
        assert!(m.set_cct(0.99).is_err());
    }
}
