use std::hint::black_box;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cascade::{CascadeModel, Path};
use crate::data::Dataset;
use crate::ensemble::{EnsembleModel, Predictor};
use crate::{Error, Result};

static MEASURING: Mutex<()> = Mutex::new(());
static TIMING_DEPTH: AtomicUsize = AtomicUsize::new(0);
static IO_WHILE_TIMING: AtomicU64 = AtomicU64::new(0);

/// Called by loaders and deserializers; counts calls that land inside a
/// timing window.
pub(crate) fn note_io() {
    if TIMING_DEPTH.load(Ordering::Relaxed) > 0 {
        IO_WHILE_TIMING.fetch_add(1, Ordering::Relaxed);
    }
}

/// Data loads or model decodes that happened while a latency measurement was
/// running, since process start.
pub fn io_calls_while_timing() -> u64 {
    IO_WHILE_TIMING.load(Ordering::Relaxed)
}

struct TimingWindow;

impl TimingWindow {
    fn open() -> Self {
        TIMING_DEPTH.fetch_add(1, Ordering::SeqCst);
        TimingWindow
    }
}

impl Drop for TimingWindow {
    fn drop(&mut self) {
        TIMING_DEPTH.fetch_sub(1, Ordering::SeqCst);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatencyOptions {
    /// Untimed calls before measuring.
    pub warmup: usize,
    /// Timed single-query calls.
    pub repetitions: usize,
}

impl Default for LatencyOptions {
    fn default() -> Self {
        LatencyOptions {
            warmup: 100,
            repetitions: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LatencyStats {
    pub mean_us: f64,
    pub p99_us: f64,
    /// Cascades: coarse plus the slower expert, both forced. Ensembles: the
    /// mean, since there is only one path.
    pub worst_case_us: f64,
    pub timed_calls: usize,
}

pub enum LatencySubject<'a> {
    Ensemble(&'a EnsembleModel),
    Cascade(&'a CascadeModel),
}

/// Single-query latency of `subject` over rows of `queries`.
///
/// Timed calls are spread evenly over the query rows. Only one measurement
/// runs at a time in the process.
pub fn measure_latency(
    subject: LatencySubject<'_>,
    queries: &Dataset,
    opts: &LatencyOptions,
) -> Result<LatencyStats> {
    match subject {
        LatencySubject::Ensemble(m) => {
            check_arity(m.n_features(), queries)?;
            let samples = time_queries(queries, opts, |x| {
                black_box(m.predict_unchecked(x));
            })?;
            let mut stats = summarize(&samples);
            stats.worst_case_us = stats.mean_us;
            Ok(stats)
        }
        LatencySubject::Cascade(m) => {
            check_arity(m.n_features(), queries)?;
            let samples = time_queries(queries, opts, |x| {
                black_box(m.classify_unchecked(x));
            })?;
            let mut stats = summarize(&samples);
            let mut worst = stats.mean_us;
            for path in [Path::Expert1, Path::Expert2] {
                let forced = time_queries(queries, opts, |x| {
                    black_box(m.classify_forced(x, path));
                })?;
                worst = worst.max(summarize(&forced).mean_us);
            }
            stats.worst_case_us = worst;
            Ok(stats)
        }
    }
}

fn check_arity(n_features: usize, queries: &Dataset) -> Result<()> {
    if n_features != queries.n_features() {
        return Err(Error::invalid(format!(
            "model expects {n_features} features, queries have {}",
            queries.n_features()
        )));
    }
    Ok(())
}

/// Times `f` once per call on single rows and returns each call's duration
/// in microseconds.
pub fn time_queries<F: FnMut(&[f64])>(
    queries: &Dataset,
    opts: &LatencyOptions,
    mut f: F,
) -> Result<Vec<f64>> {
    let n = queries.n_rows();
    if n == 0 {
        return Err(Error::invalid("no queries to time"));
    }
    if opts.repetitions == 0 {
        return Err(Error::invalid("latency repetitions must be at least 1"));
    }
    let reps = opts.repetitions;
    let pick = |i: usize| {
        if reps <= n {
            (i as u128 * n as u128 / reps as u128) as usize
        } else {
            i % n
        }
    };
    let _serial = MEASURING.lock().unwrap_or_else(|e| e.into_inner());
    for i in 0..opts.warmup {
        f(queries.row(i % n));
    }
    let _window = TimingWindow::open();
    let mut samples = Vec::with_capacity(reps);
    for i in 0..reps {
        let x = queries.row(pick(i));
        let start = Instant::now();
        f(black_box(x));
        samples.push(start.elapsed().as_secs_f64() * 1e6);
    }
    Ok(samples)
}

fn summarize(samples: &[f64]) -> LatencyStats {
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((0.99 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    LatencyStats {
        mean_us: mean,
        p99_us: sorted[rank - 1],
        worst_case_us: mean,
        timed_calls: samples.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::CascadeConfig;
    use crate::data::make_synthetic;
    use crate::ensemble::EnsembleConfig;
    use std::time::Duration;

    fn spin(d: Duration) {
        let start = Instant::now();
        while start.elapsed() < d {
            std::hint::spin_loop();
        }
    }

    #[test]
    fn calibrated_spin_wait() {
        let q = make_synthetic(50, 2, 0.1, 1.0, 0).unwrap();
        let tau = Duration::from_micros(200);
        let opts = LatencyOptions {
            warmup: 5,
            repetitions: 200,
        };
        let samples = time_queries(&q, &opts, |_| spin(tau)).unwrap();
        let s = summarize(&samples);
        assert_eq!(s.timed_calls, 200);
        assert!((s.mean_us - 200.0).abs() <= 40.0, "mean {}", s.mean_us);
        assert!(s.p99_us >= s.mean_us * 0.8);
    }

    #[test]
    fn cascade_worst_case_is_finite_and_bounds_mean() {
        let d = make_synthetic(300, 3, 0.1, 3.0, 1).unwrap();
        let c = EnsembleConfig::bagging(3, Some(3));
        let cfg = CascadeConfig::new(c.clone(), c, 0.5, 0.5).unwrap();
        let m = CascadeModel::train(&d, &cfg).unwrap();
        let opts = LatencyOptions {
            warmup: 10,
            repetitions: 100,
        };
        let s = measure_latency(LatencySubject::Cascade(&m), &d, &opts).unwrap();
        assert!(s.worst_case_us.is_finite());
        assert!(s.worst_case_us >= s.mean_us);
        let e = measure_latency(LatencySubject::Ensemble(m.coarse()), &d, &opts).unwrap();
        assert_eq!(e.worst_case_us, e.mean_us);
    }

    #[test]
    fn empty_queries_and_zero_repetitions_rejected() {
        let d = make_synthetic(30, 2, 0.1, 1.0, 1).unwrap();
        let empty = d.select(&[]);
        assert!(time_queries(&empty, &LatencyOptions::default(), |_| {}).is_err());
        let zero = LatencyOptions {
            warmup: 0,
            repetitions: 0,
        };
        assert!(time_queries(&d, &zero, |_| {}).is_err());
    }

    #[test]
    fn even_spread_over_rows() {
        let d = make_synthetic(10, 1, 0.2, 1.0, 1).unwrap();
        let mut seen = Vec::new();
        let opts = LatencyOptions {
            warmup: 0,
            repetitions: 5,
        };
        time_queries(&d, &opts, |x| seen.push(x[0])).unwrap();
        let expected: Vec<f64> = [0, 2, 4, 6, 8].iter().map(|&i| d.row(i)[0]).collect();
        assert_eq!(seen, expected);
    }
}
