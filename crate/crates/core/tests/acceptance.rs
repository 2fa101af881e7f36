//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.
//!
//! `cargo test --release --test acceptance` runs everything;
//! `cargo test --release --test acceptance -- A1 A9` runs a subset.
//!
//! A3 to A7 need the benchmark corpora prepared into `CF_DATA_DIR` with
//! `cascade-forest prepare`. Without them those criteria report BLOCKED,
//! which counts as failure only when `CF_ACCEPTANCE_STRICT=1`.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cascade_forest::cascade::{
    score_rows, sweep_cct, threshold_lattice, Expert, ExpertPartition,
};
use cascade_forest::cli::Registry;
use cascade_forest::ensemble::{fit_adaboost_traced, fit_gradient_boosting_traced};
use cascade_forest::eval::{
    cascade_threshold_sweep, evaluate_baseline_cv, evaluate_cascade_cv, sweep_cct_cv,
    BenchComparison, ConfusionMatrix,
};
use cascade_forest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Verdict {
    Pass(String),
    Fail(String),
    Blocked(String),
}

use Verdict::{Blocked, Fail, Pass};

type Criterion = (&'static str, &'static str, fn() -> Verdict);

const SEED: u64 = 20_240_601;

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let strict = std::env::var("CF_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: [Criterion; 9] = [
        ("A1", "routing oracle equivalence", a1_routing_oracle),
        ("A2", "duplication and monotonicity", a2_monotonicity),
        ("A3", "coarse valid-set quality on ccf", a3_valid_set_ccf),
        ("A4", "threshold sweep shape on ccf", a4_sweep_shape_ccf),
        ("A5", "bagging resource ratios on kdd", a5_bagging_kdd),
        ("A6", "boosting resource ratios on fc", a6_boosting_fc),
        ("A7", "dataset statistics", a7_statistics),
        ("A8", "learner sanity", a8_learner_sanity),
        ("A9", "gate bypass identity", a9_gate_bypass),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Blocked(d) => {
                if strict {
                    failed += 1;
                }
                ("BLOCKED", d)
            }
        };
        println!("{id} {tag:<7} {name} [{secs:.1}s]: {detail}");
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn label(anomaly: bool) -> Label {
    if anomaly {
        Label::Anomaly
    } else {
        Label::Normal
    }
}

// ---- A1 ----

/// Training-time routing written directly from the rule: a row the coarse
/// model is sure about stays out; an unsure anomaly goes to both experts; an
/// unsure normal goes to the expert owning the coarse verdict.
fn training_oracle(p_normal: f64, p_anomaly: f64, truth: Label, tct: f64) -> (bool, bool) {
    let top = if p_normal > p_anomaly { p_normal } else { p_anomaly };
    if top >= tct {
        return (false, false);
    }
    if truth == Label::Anomaly {
        return (true, true);
    }
    let coarse_says_normal = p_normal > p_anomaly;
    (coarse_says_normal, !coarse_says_normal)
}

/// Classification written directly from the rule: a sure coarse verdict is
/// final, otherwise the expert owning the coarse verdict answers.
fn classify_oracle(
    coarse: DistributionVector,
    cct: f64,
    e1: DistributionVector,
    e2: DistributionVector,
) -> (Label, Path) {
    let says_normal = coarse.p_normal > coarse.p_anomaly;
    let top = if says_normal { coarse.p_normal } else { coarse.p_anomaly };
    if top >= cct {
        return (label(!says_normal), Path::ShortPath);
    }
    let (answer, path) = if says_normal { (e1, Path::Expert1) } else { (e2, Path::Expert2) };
    (label(answer.p_anomaly >= answer.p_normal), path)
}

struct Fixed(DistributionVector);

impl Predictor for Fixed {
    fn n_features(&self) -> usize {
        1
    }

    fn predict_proba(&self, _: &[f64]) -> cascade_forest::Result<DistributionVector> {
        Ok(self.0)
    }
}

fn a1_routing_oracle() -> Verdict {
    let probs: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
    let thresholds: Vec<f64> = (0..=50).map(|i| 0.5 + i as f64 / 100.0).collect();
    let mut cases = 0usize;
    let mut mismatches = Vec::new();

    for &p in &probs {
        let d = DistributionVector::from_anomaly(p);
        for truth in Label::ALL {
            for &tct in &thresholds {
                let got = route_training_instance(d, truth, tct);
                let want = training_oracle(d.p_normal, d.p_anomaly, truth, tct);
                cases += 1;
                if (got.expert1, got.expert2) != want {
                    mismatches.push(format!("train p={p} {truth} tct={tct}"));
                }
            }
        }
    }

    let expert_answers = [0.0, 0.3, 0.5, 0.7, 1.0].map(DistributionVector::from_anomaly);
    let x = [0.0];
    for &p in &probs {
        let d = DistributionVector::from_anomaly(p);
        for &cct in &thresholds {
            for e1 in expert_answers {
                for e2 in [expert_answers[0], expert_answers[2], expert_answers[4]] {
                    let got = classify_with(&Fixed(d), &Fixed(e1), &Fixed(e2), cct, &x).unwrap();
                    let want = classify_oracle(d, cct, e1, e2);
                    cases += 1;
                    if got.path != route_classification(d, cct) || (got.label, got.path) != want {
                        mismatches.push(format!("classify p={p} cct={cct}"));
                    }
                }
            }
        }
    }

    // trained cascades on random inputs
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for (i, (cct, tct)) in [(0.6, 0.8), (0.8, 0.95), (0.95, 0.95), (0.9, 1.0)].into_iter().enumerate() {
        let data = make_synthetic(600, 4, 0.15, 1.5, SEED + i as u64).unwrap();
        let cfg = CascadeConfig::new(
            EnsembleConfig::bagging(5, Some(3)),
            EnsembleConfig::bagging(9, Some(6)),
            cct,
            tct,
        )
        .unwrap()
        .with_seed(SEED);
        let model = CascadeModel::train(&data, &cfg).unwrap();
        for _ in 0..2500 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..4.0)).collect();
            let d = model.coarse().predict_proba(&x).unwrap();
            let expert_d = |path| match model.expert(path).unwrap() {
                Expert::Trained(m) => m.predict_proba(&x).unwrap(),
                Expert::Echo => d,
            };
            let want = classify_oracle(d, cct, expert_d(Path::Expert1), expert_d(Path::Expert2));
            let got = model.classify(&x).unwrap();
            cases += 1;
            if (got.label, got.path) != want {
                mismatches.push(format!("trained cascade {i} x={x:?}"));
            }
        }
    }

    let detail = format!("{cases} cases, {} mismatches", mismatches.len());
    if cases < 50_000 {
        return Fail(format!("{detail}; grid below 50000 cases"));
    }
    match mismatches.first() {
        None => Pass(detail),
        Some(first) => Fail(format!("{detail}; first: {first}")),
    }
}

// ---- A2 ----

fn a2_monotonicity() -> Verdict {
    let lattice = threshold_lattice(0.05).unwrap();
    let mut violations = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xA2);
    for c in 0..50u64 {
        let rows = rng.gen_range(300..900);
        let features = rng.gen_range(2..7);
        let rate = rng.gen_range(0.03..0.3);
        let sep = rng.gen_range(0.5..3.0);
        let data = make_synthetic(rows, features, rate, sep, SEED + c).unwrap();
        let train = data.select(&(0..rows * 2 / 3).collect::<Vec<_>>());
        let test = data.select(&(rows * 2 / 3..rows).collect::<Vec<_>>());
        let coarse_cfg = EnsembleConfig::bagging(rng.gen_range(3..10), Some(rng.gen_range(2..6)))
            .with_seed(SEED + c);
        let expert_cfg = EnsembleConfig::bagging(6, Some(6)).with_seed(SEED + c);
        let coarse = EnsembleModel::fit(&train, &coarse_cfg).unwrap();
        let scores = score_rows(&coarse, &train).unwrap();

        // (i) duplication and (ii) superset growth along tct
        let mut prev: Option<ExpertPartition> = None;
        for &tct in &lattice {
            let cfg = CascadeConfig::new(coarse_cfg.clone(), expert_cfg.clone(), 0.5, tct).unwrap();
            let (model, part) =
                CascadeModel::from_scores(coarse.clone(), &scores, &train, &cfg).unwrap();
            let [ids1, ids2] = part.row_ids(&train);
            for (i, d) in scores.iter().enumerate() {
                let id = train.row_ids()[i];
                let (in1, in2) = (ids1.binary_search(&id).is_ok(), ids2.binary_search(&id).is_ok());
                let unsure = d.confidence() < tct;
                let ok = match train.label(i) {
                    Label::Anomaly => (in1 && in2) == unsure && (in1 || in2) == unsure,
                    Label::Normal => !(in1 && in2) && (in1 || in2) == unsure,
                };
                if !ok {
                    violations.push(format!("cascade {c}: duplication at tct={tct} row {id}"));
                }
            }
            if *model.training_stats() != part.stats(&train) {
                violations.push(format!("cascade {c}: stats disagree with partition"));
            }
            if let Some(p) = &prev {
                let subset = |a: &[usize], b: &[usize]| a.iter().all(|i| b.binary_search(i).is_ok());
                if !subset(&p.expert1, &part.expert1) || !subset(&p.expert2, &part.expert2) {
                    violations.push(format!("cascade {c}: expert set shrank at tct={tct}"));
                }
            }
            prev = Some(part);
        }

        // (iii) short-path set shrinks along cct
        let cfg = CascadeConfig::new(coarse_cfg.clone(), expert_cfg.clone(), 0.5, 1.0).unwrap();
        let (mut model, _) = CascadeModel::from_scores(coarse.clone(), &scores, &train, &cfg).unwrap();
        let mut prev_short: Option<Vec<bool>> = None;
        for &cct in &lattice {
            model.set_cct(cct).unwrap();
            let short: Vec<bool> = test
                .rows()
                .map(|x| model.classify(x).unwrap().path == Path::ShortPath)
                .collect();
            if let Some(p) = &prev_short {
                if short.iter().zip(p).any(|(now, before)| *now && !*before) {
                    violations.push(format!("cascade {c}: short path grew at cct={cct}"));
                }
            }
            prev_short = Some(short);
        }

        // (iv) valid fractions never rise
        let sweep = sweep_cct(&coarse, &test, &lattice).unwrap();
        for w in sweep.windows(2) {
            if w[1].valid_fraction_normal > w[0].valid_fraction_normal
                || w[1].valid_fraction_anomaly > w[0].valid_fraction_anomaly
            {
                violations.push(format!("cascade {c}: valid fraction rose at {}", w[1].threshold));
            }
        }
    }
    let detail = format!("50 cascades x 11 thresholds, {} violations", violations.len());
    match violations.first() {
        None => Pass(detail),
        Some(v) => Fail(format!("{detail}; first: {v}")),
    }
}

// ---- corpora ----

fn data_dir() -> Option<PathBuf> {
    std::env::var_os("CF_DATA_DIR").map(PathBuf::from)
}

fn corpus(name: &str) -> Result<Dataset, Verdict> {
    let Some(dir) = data_dir() else {
        return Err(Blocked(format!(
            "CF_DATA_DIR not set; run `cascade-forest prepare` and point it at the output ({name} needed)"
        )));
    };
    Registry::load_dataset(&dir, name)
        .map_err(|e| Blocked(format!("{name} not prepared in {}: {e}", dir.display())))
}

fn quarter(data: &Dataset) -> Dataset {
    let n = data.n_rows().div_ceil(4);
    subsample(data, n, true, SEED).unwrap()
}

fn cv() -> EvalOptions {
    EvalOptions {
        folds: 5,
        seed: SEED,
        ..EvalOptions::default()
    }
}

// ---- A3 ----

fn a3_valid_set_ccf() -> Verdict {
    let data = match corpus("ccf") {
        Ok(d) => d,
        Err(v) => return v,
    };
    let coarse = EnsembleConfig::bagging(20, Some(10)).with_seed(SEED);
    let rows = sweep_cct_cv(&data, &coarse, &[0.995], &cv()).unwrap();
    let row = rows[0];
    let baseline =
        evaluate_baseline_cv(&data, &EnsembleConfig::bagging(85, None).with_seed(SEED), &cv())
            .unwrap();
    let valid_f1 = row.f1_anomaly.unwrap_or(0.0);
    let ok = (0.35..=0.70).contains(&row.valid_fraction_normal)
        && (0.30..=0.65).contains(&row.valid_fraction_anomaly)
        && valid_f1 >= 0.90
        && valid_f1 >= baseline.f1_anomaly;
    verdict(
        ok,
        format!(
            "valid normal {:.3} (want 0.35..0.70), valid anomaly {:.3} (want 0.30..0.65), \
             valid-set anomaly F1 {valid_f1:.4} (want >= 0.90 and >= baseline {:.4})",
            row.valid_fraction_normal, row.valid_fraction_anomaly, baseline.f1_anomaly
        ),
    )
}

// ---- A4 ----

fn a4_sweep_shape_ccf() -> Verdict {
    let data = match corpus("ccf") {
        Ok(d) => d,
        Err(v) => return v,
    };
    let lattice = threshold_lattice(0.05).unwrap();
    let rows = cascade_threshold_sweep(
        &data,
        &EnsembleConfig::bagging(20, Some(10)).with_seed(SEED),
        &EnsembleConfig::bagging(25, Some(10)).with_seed(SEED),
        &lattice,
        &cv(),
    )
    .unwrap();
    let first = rows.first().unwrap();
    let last = rows.last().unwrap();
    let interior = &rows[1..rows.len() - 1];
    let best = interior
        .iter()
        .fold(&interior[0], |b, r| if r.f1_anomaly > b.f1_anomaly { r } else { b });
    let gain = best.f1_anomaly - first.f1_anomaly;
    let ok = gain >= 0.015 && last.fg_train_fraction >= 0.90 && best.fg_train_fraction <= 0.15;
    verdict(
        ok,
        format!(
            "F1 {:.4} at t=0.5 -> {:.4} at best t={} (gain {gain:.4}, want >= 0.015); \
             expert train share {:.3} at t=1 (want >= 0.90), {:.4} at best t (want <= 0.15)",
            first.f1_anomaly, best.f1_anomaly, best.threshold, last.fg_train_fraction,
            best.fg_train_fraction
        ),
    )
}

// ---- A5 / A6 ----

fn resource_comparison(
    data: &Dataset,
    cascade: &CascadeConfig,
    baseline: &EnsembleConfig,
    min_ratio: f64,
    f1_tolerance: f64,
    check_size: bool,
) -> Verdict {
    let b = evaluate_baseline_cv(data, baseline, &cv()).unwrap();
    let c = evaluate_cascade_cv(data, cascade, &cv()).unwrap();
    let cmp = BenchComparison::new(b, c);
    let ok = (!check_size || cmp.size_ratio >= min_ratio)
        && cmp.train_ratio >= min_ratio
        && cmp.latency_ratio >= min_ratio
        && cmp.anomaly_f1_delta.abs() <= f1_tolerance;
    verdict(
        ok,
        format!(
            "{} rows; nodes x{:.2} (bytes x{:.2}), train x{:.2}, latency x{:.2} (want >= {min_ratio}); \
             anomaly F1 {:.4} vs baseline {:.4} (want within {f1_tolerance})",
            data.n_rows(),
            cmp.size_ratio,
            cmp.bytes_ratio,
            cmp.train_ratio,
            cmp.latency_ratio,
            cmp.cascade.f1_anomaly,
            cmp.baseline.f1_anomaly
        ),
    )
}

fn a5_bagging_kdd() -> Verdict {
    let data = match corpus("kdd") {
        Ok(d) => quarter(&d),
        Err(v) => return v,
    };
    let cascade = CascadeConfig::parse_literal("R(C(10,10),C(20,20),0.98,0.995)", Method::Bagging)
        .unwrap()
        .with_seed(SEED);
    let baseline = EnsembleConfig::bagging(150, None).with_seed(SEED);
    resource_comparison(&data, &cascade, &baseline, 2.0, 0.01, true)
}

fn a6_boosting_fc() -> Verdict {
    let data = match corpus("fc") {
        Ok(d) => quarter(&d),
        Err(v) => return v,
    };
    let method = Method::GradientBoosting;
    let cascade = CascadeConfig::parse_literal("R(C(70,5),C(300,5),0.99,0.995)", method)
        .unwrap()
        .with_seed(SEED);
    let baseline = EnsembleConfig::gradient_boosting(2000, 3).with_seed(SEED);
    resource_comparison(&data, &cascade, &baseline, 4.0, 0.02, false)
}

// ---- A7 ----

fn a7_statistics() -> Verdict {
    let mut details = Vec::new();
    let mut ok = true;
    let mut blocked = Vec::new();
    for name in ["kdd", "ccf", "fc"] {
        let data = match corpus(name) {
            Ok(d) => d,
            Err(_) => {
                blocked.push(name);
                continue;
            }
        };
        let rate = data.anomaly_rate() * 100.0;
        let (want, tol) = match name {
            "kdd" => (24.389, 0.01),
            "ccf" => (0.172, 0.005),
            _ => (0.9, 0.05),
        };
        let rate_ok = (rate - want).abs() <= tol;
        ok &= rate_ok;
        details.push(format!("{name} rate {rate:.4}% (want {want} +- {tol})"));
        if name == "ccf" {
            let ratio = data.normal_anomaly_ratio().unwrap_or(f64::NAN);
            let ratio_ok = (ratio - 581.4).abs() <= 1.0;
            ok &= ratio_ok;
            details.push(format!("ccf normal/anomaly {ratio:.2} (want 581.4 +- 1)"));
        }
    }
    if !blocked.is_empty() {
        let prefix = if details.is_empty() { String::new() } else { format!("{}; ", details.join(", ")) };
        return Blocked(format!("{prefix}missing {}", blocked.join(", ")));
    }
    verdict(ok, details.join(", "))
}

// ---- A8 ----

fn a8_learner_sanity() -> Verdict {
    let mut problems = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xA8);

    for s in 0..6u64 {
        let data = make_synthetic(500, 5, 0.1 + 0.05 * s as f64, 1.0 + 0.3 * s as f64, SEED + s).unwrap();
        let depth = 1 + s as usize % 4;

        let gb = EnsembleConfig::gradient_boosting(40, depth).with_seed(s);
        let (model, deviance) = fit_gradient_boosting_traced(&data, &gb).unwrap();
        if let Some(w) = deviance.windows(2).find(|w| w[1] > w[0]) {
            problems.push(format!("gboost seed {s}: deviance rose {} -> {}", w[0], w[1]));
        }
        check_depth(&model, depth, &mut problems);

        let ada = EnsembleConfig::adaboost(40, depth).with_seed(s);
        let (model, errors) = fit_adaboost_traced(&data, &ada).unwrap();
        if let Some(e) = errors.iter().find(|e| **e >= 0.5) {
            problems.push(format!("adaboost seed {s}: accepted stage with error {e}"));
        }
        check_depth(&model, depth, &mut problems);

        let bag = EnsembleConfig::bagging(10, Some(depth + 2)).with_seed(s);
        check_depth(&EnsembleModel::fit(&data, &bag).unwrap(), depth + 2, &mut problems);
    }

    let data = make_synthetic(2000, 8, 0.1, 1.5, SEED).unwrap();
    let configs = [
        EnsembleConfig::bagging(24, None).with_seed(SEED),
        EnsembleConfig::gradient_boosting(30, 4).with_seed(SEED),
        EnsembleConfig::adaboost(30, 3).with_seed(SEED),
    ];
    for cfg in &configs {
        let bytes: Vec<Vec<u8>> = [1, 2, 8]
            .map(|t| in_pool(t, || EnsembleModel::fit(&data, cfg).unwrap().to_bytes()))
            .into();
        if bytes.windows(2).any(|w| w[0] != w[1]) {
            problems.push(format!("{}: bytes differ across thread counts", cfg.method));
        }
    }
    let cascade = CascadeConfig::new(configs[0].clone(), configs[0].clone(), 0.9, 0.95).unwrap();
    let bytes: Vec<Vec<u8>> = [1, 2, 8]
        .map(|t| in_pool(t, || CascadeModel::train(&data, &cascade).unwrap().to_bytes()))
        .into();
    if bytes.windows(2).any(|w| w[0] != w[1]) {
        problems.push("cascade: bytes differ across thread counts".into());
    }

    for v in 0..1000 {
        let n = rng.gen_range(1..200);
        let labels: Vec<Label> = (0..n).map(|_| label(rng.gen_bool(0.3))).collect();
        let preds: Vec<Label> = (0..n).map(|_| label(rng.gen_bool(0.4))).collect();
        let got = per_class_f1(&preds, &labels).unwrap();
        let cm = ConfusionMatrix::from_pairs(&preds, &labels);
        for c in Label::ALL {
            let want = f1_from_counts(&preds, &labels, c);
            if (got.get(c) - want).abs() > 1e-12 || (cm.class(c).f1() - want).abs() > 1e-12 {
                problems.push(format!("f1 vector {v} class {c}: {} vs {want}", got.get(c)));
            }
        }
    }

    let detail = format!("{} problems", problems.len());
    match problems.first() {
        None => Pass(format!(
            "deviance monotone, stage errors < 0.5, depth bounds hold, 1/2/8 threads identical, 1000 F1 vectors match; {detail}"
        )),
        Some(p) => Fail(format!("{detail}; first: {p}")),
    }
}

fn check_depth(model: &EnsembleModel, limit: usize, problems: &mut Vec<String>) {
    if let Some(t) = model.trees().iter().find(|t| t.depth() > limit) {
        problems.push(format!("{}: tree depth {} over {limit}", model.method(), t.depth()));
    }
}

fn f1_from_counts(preds: &[Label], labels: &[Label], c: Label) -> f64 {
    let mut tp = 0.0;
    let mut fp = 0.0;
    let mut fn_ = 0.0;
    for (p, t) in preds.iter().zip(labels) {
        match (*p == c, *t == c) {
            (true, true) => tp += 1.0,
            (true, false) => fp += 1.0,
            (false, true) => fn_ += 1.0,
            _ => {}
        }
    }
    if tp == 0.0 {
        0.0
    } else {
        2.0 * tp / (2.0 * tp + fp + fn_)
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

// ---- A9 ----

fn a9_gate_bypass() -> Verdict {
    let data = make_synthetic(1500, 5, 0.1, 1.5, SEED).unwrap();
    let train = data.select(&(0..1000).collect::<Vec<_>>());
    let test = data.select(&(1000..1500).collect::<Vec<_>>());
    // pure leaves and an odd vote count keep every confidence above 0.5
    let coarse = EnsembleConfig::bagging(11, None).with_bootstrap(false).with_seed(SEED);
    let expert = EnsembleConfig::bagging(15, Some(8)).with_seed(SEED);
    let cfg = CascadeConfig::new(coarse.clone(), expert.clone(), 0.5, 0.5).unwrap();
    let model = CascadeModel::train(&train, &cfg).unwrap();

    let mut problems = Vec::new();
    for x in train.rows().chain(test.rows()) {
        if model.coarse().predict_proba(x).unwrap().confidence() <= 0.5 {
            problems.push("coarse confidence at 0.5".to_string());
            break;
        }
    }
    for (i, x) in test.rows().enumerate() {
        let r = model.classify(x).unwrap();
        if r.label != model.coarse().predict(x).unwrap() || r.path != Path::ShortPath {
            problems.push(format!("test row {i} differs from coarse-only"));
        }
    }
    let stats = model.training_stats();
    if stats.expert_train_fraction() != 0.0 {
        problems.push(format!("expert train fraction {}", stats.expert_train_fraction()));
    }
    let rows = cascade_threshold_sweep(&data, &coarse, &expert, &[0.5], &EvalOptions { folds: 3, ..cv() })
        .unwrap();
    if rows[0].fg_train_fraction != 0.0 || rows[0].fg_test_fraction != 0.0 {
        problems.push(format!(
            "sweep row at 0.5 reports expert train {} / test {}",
            rows[0].fg_train_fraction, rows[0].fg_test_fraction
        ));
    }
    match problems.first() {
        None => Pass(format!(
            "{} test rows identical to coarse-only, expert train 0.0%, expert test 0.0%",
            test.n_rows()
        )),
        Some(p) => Fail(format!("{} problems; first: {p}", problems.len())),
    }
}
